//! Tabulated critical values.
//!
//! ADF: MacKinnon (2010) response surfaces for one variable,
//! `cv(T) = b0 + b1/T + b2/T² + b3/T³`.
//!
//! Johansen: MacKinnon, Haug and Michelis (1999) trace and maximum-eigenvalue
//! quantiles with an unrestricted constant, for `n − r = 1..=12`.

use super::adf::Deterministic;

const TAU_C: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.04],
    [-2.56677, -1.5384, -2.809, 0.0],
];

const TAU_CT: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.38],
];

/// ADF critical values at 1%, 5% and 10% for `nobs` regression rows.
pub fn adf_critical_values(deterministic: Deterministic, nobs: usize) -> [f64; 3] {
    let table = match deterministic {
        Deterministic::Constant => &TAU_C,
        Deterministic::ConstantTrend => &TAU_CT,
    };
    let x = 1.0 / nobs as f64;
    table.map(|b| b[0] + x * (b[1] + x * (b[2] + x * b[3])))
}

/// Trace statistic quantiles (90%, 95%, 99%), indexed by `n − r − 1`.
const TRACE: [[f64; 3]; 12] = [
    [2.7055, 3.8415, 6.6349],
    [13.4294, 15.4943, 19.9349],
    [27.0669, 29.7961, 35.4628],
    [44.4929, 47.8545, 54.6815],
    [65.8202, 69.8189, 77.8202],
    [91.1090, 95.7542, 104.9637],
    [120.3673, 125.6185, 135.9825],
    [153.6341, 159.5290, 171.0905],
    [190.8714, 197.3772, 210.0366],
    [232.1030, 239.2468, 253.2526],
    [277.3740, 285.1402, 300.2821],
    [326.5354, 334.9795, 351.2150],
];

const MAX_EIG: [[f64; 3]; 12] = [
    [2.7055, 3.8415, 6.6349],
    [12.2971, 14.2639, 18.5200],
    [18.8928, 21.1314, 25.8650],
    [25.1236, 27.5858, 32.7172],
    [31.2379, 33.8777, 39.3693],
    [37.2786, 40.0763, 45.8662],
    [43.2947, 46.2299, 52.3069],
    [49.2855, 52.3622, 58.6634],
    [55.2412, 58.4332, 64.9960],
    [61.2041, 64.5040, 71.2525],
    [67.1307, 70.5392, 77.4877],
    [73.0563, 76.5734, 83.7105],
];

/// Largest number of common stochastic trends with tabulated values.
pub const MAX_JOHANSEN_DIM: usize = 12;

/// Trace quantiles (90%, 95%, 99%) for `n_minus_r` common trends.
pub fn johansen_trace_critical(n_minus_r: usize) -> Option<[f64; 3]> {
    n_minus_r.checked_sub(1).and_then(|i| TRACE.get(i).copied())
}

pub fn johansen_max_eig_critical(n_minus_r: usize) -> Option<[f64; 3]> {
    n_minus_r.checked_sub(1).and_then(|i| MAX_EIG.get(i).copied())
}
