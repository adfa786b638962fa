//! Unit-root tests, cointegration, VECM estimation, impulse responses and
//! variance decompositions on the macro panel plus a sentiment index.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sentishift_core::econ::{
    adf_test, estimate_vecm, fevd, impulse_response, johansen_trace, select_lag, AdfResult, BootstrapPlan,
    JohansenResult, LagSelection, MacroPanel, VecmModel, VecmSpec, DETERMINISTIC_TERMS,
};
use sentishift_core::Error as CoreError;

use super::{cell, dirs, require_upstream};
use crate::config::Resolved;
use crate::error::{CliError, Result, StageContext};
use crate::formats::{read_json, read_panel_columns, read_series, write_csv_rows, write_json};
use crate::manifest::StageDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EconAction {
    Adf,
    Johansen,
    Vecm,
    Irf,
    Fevd,
}

/// What `econ vecm` persists for the downstream subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: VecmModel,
    /// The transformed panel the model was estimated on.
    pub panel: MacroPanel,
    pub lag_selection: Option<LagSelection>,
    pub rank_source: String,
    pub johansen: Option<JohansenResult>,
}

pub fn econ(r: &Resolved, action: EconAction) -> Result<PathBuf> {
    match action {
        EconAction::Adf => adf(r),
        EconAction::Johansen => johansen(r),
        EconAction::Vecm => vecm(r),
        EconAction::Irf => irf(r),
        EconAction::Fevd => fevd_cmd(r),
    }
}

fn sub_dir(name: &str) -> String {
    format!("{}/{name}", dirs::ECON)
}

fn model_path(r: &Resolved) -> PathBuf {
    r.out.join(sub_dir("vecm")).join("model.json")
}

/// Panel columns plus the sentiment index, aligned, ordered and logged.
fn load_panel(r: &Resolved, stage: &'static str) -> Result<MacroPanel> {
    let cfg = &r.config.econ;
    let path = cfg
        .panel
        .as_deref()
        .ok_or_else(|| CliError::Config(format!("{stage}: `econ.panel` is not configured")))?;
    let mut cols = read_panel_columns(stage, path)?;
    if let Some(name) = &cfg.sentiment {
        let file = match &cfg.sentiment_file {
            Some(p) => p.clone(),
            None => r.out.join(dirs::INDEX).join(format!("{name}.csv")),
        };
        let file = require_upstream(stage, file, "run `index` first or set econ.sentiment_file")?;
        if cols.iter().any(|c| &c.0 == name) {
            return Err(CliError::Config(format!("{stage}: panel already has a column `{name}`")));
        }
        let s = read_series(stage, &file)?;
        cols.push((name.clone(), s.months, s.values));
    }
    let known = |n: &String| cols.iter().any(|c| &c.0 == n);
    for (key, names) in [("order", &cfg.order), ("log", &cfg.log), ("stationary", &cfg.stationary)] {
        if let Some(n) = names.iter().find(|n| !known(n)) {
            return Err(CliError::Config(format!("{stage}: econ.{key} names unknown variable `{n}`")));
        }
    }
    if !cfg.order.is_empty() {
        let mut ordered = Vec::with_capacity(cfg.order.len());
        for n in &cfg.order {
            let j = cols.iter().position(|c| &c.0 == n).expect("checked above");
            ordered.push(cols[j].clone());
        }
        cols = ordered;
    }
    // Gaps and non-positive logs are problems with the data, not the spec.
    let as_data = |e: CoreError| match e {
        CoreError::InvalidSpec(m) => CliError::Data {
            stage,
            message: format!("{}: {m}", path.display()),
        },
        e => CliError::Core {
            stage,
            path: Some(path.to_path_buf()),
            source: e,
        },
    };
    let panel = MacroPanel::align(&cols).map_err(as_data)?;
    let logs: Vec<&str> = cfg.log.iter().map(String::as_str).collect();
    let panel = panel.log_transform(&logs).map_err(as_data)?;
    log::info!("{stage}: {} variables × {} months", panel.n_vars(), panel.len());
    Ok(panel)
}

fn choose_lag(r: &Resolved, stage: &'static str, panel: &MacroPanel) -> Result<(usize, Option<LagSelection>)> {
    match r.config.econ.lag {
        Some(l) => Ok((l, None)),
        None => {
            let sel = select_lag(panel.data(), r.config.econ.max_lag).stage(stage)?;
            log::info!("{stage}: Schwarz criterion selects lag {}", sel.lag);
            Ok((sel.lag, Some(sel)))
        }
    }
}

fn nonstationary<'a>(r: &Resolved, panel: &'a MacroPanel) -> Vec<&'a str> {
    panel
        .names()
        .iter()
        .filter(|n| !r.config.econ.stationary.contains(n))
        .map(String::as_str)
        .collect()
}

fn adf(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "econ adf";
    let cfg = &r.config.econ;
    let panel = load_panel(r, STAGE)?;
    let mut results: Vec<(String, &str, AdfResult)> = Vec::new();
    for name in panel.names() {
        let level = panel.column(name).stage(STAGE)?;
        let diff: Vec<f64> = level.windows(2).map(|w| w[1] - w[0]).collect();
        for (transform, x) in [("level", &level), ("difference", &diff)] {
            let res = adf_test(x, cfg.adf_max_lag, cfg.adf_deterministic).map_err(|e| CliError::Data {
                stage: STAGE,
                message: format!("{name} ({transform}): {e}"),
            })?;
            results.push((name.clone(), transform, res));
        }
    }
    let out = StageDir::create(r, STAGE, &sub_dir("adf"), None)?;
    let rows = results.iter().map(|(n, t, a)| {
        vec![
            n.clone(),
            t.to_string(),
            a.statistic.to_string(),
            a.lag.to_string(),
            a.nobs.to_string(),
            a.critical_values[0].to_string(),
            a.critical_values[1].to_string(),
            a.critical_values[2].to_string(),
            a.rejected_at_5pct.to_string(),
        ]
    });
    write_csv_rows(
        STAGE,
        &out.path("adf.csv"),
        &["variable", "transform", "statistic", "lag", "nobs", "cv_1pct", "cv_5pct", "cv_10pct", "unit_root_rejected_5pct"],
        rows,
    )?;
    let json: Vec<_> = results
        .iter()
        .map(|(n, t, a)| serde_json::json!({ "variable": n, "transform": t, "result": a }))
        .collect();
    write_json(STAGE, &out.path("adf.json"), &json)?;
    out.finish()
}

fn run_johansen(r: &Resolved, stage: &'static str, panel: &MacroPanel, lag: usize) -> Result<JohansenResult> {
    let names = nonstationary(r, panel);
    let sub = panel.select(&names).stage(stage)?;
    johansen_trace(sub.data(), lag).stage(stage)
}

fn johansen(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "econ johansen";
    let panel = load_panel(r, STAGE)?;
    let (lag, sel) = choose_lag(r, STAGE, &panel)?;
    let j = run_johansen(r, STAGE, &panel, lag)?;
    let out = StageDir::create(r, STAGE, &sub_dir("johansen"), None)?;
    let rows = (0..j.eigenvalues.len()).map(|i| {
        let mut row = vec![i.to_string(), j.eigenvalues[i].to_string(), j.trace[i].to_string()];
        row.extend(j.trace_critical[i].iter().map(f64::to_string));
        row.push(j.max_eig[i].to_string());
        row.extend(j.max_eig_critical[i].iter().map(f64::to_string));
        row
    });
    write_csv_rows(
        STAGE,
        &out.path("johansen.csv"),
        &[
            "rank_null", "eigenvalue", "trace", "trace_cv90", "trace_cv95", "trace_cv99", "max_eig", "max_eig_cv90",
            "max_eig_cv95", "max_eig_cv99",
        ],
        rows,
    )?;
    let json = serde_json::json!({
        "variables": nonstationary(r, &panel),
        "deterministic": DETERMINISTIC_TERMS,
        "lag_selection": sel,
        "result": j,
    });
    write_json(STAGE, &out.path("johansen.json"), &json)?;
    out.finish()
}

fn vecm(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "econ vecm";
    let panel = load_panel(r, STAGE)?;
    let (lag, sel) = choose_lag(r, STAGE, &panel)?;
    let (rank, source, jo) = match r.config.econ.rank {
        Some(k) => (k, "config", None),
        None if nonstationary(r, &panel).len() < 2 => (0, "single non-stationary variable", None),
        None => {
            let j = run_johansen(r, STAGE, &panel, lag)?;
            (j.rank, "trace test at 5%", Some(j))
        }
    };
    let spec = VecmSpec {
        lag,
        rank,
        stationary: r.config.econ.stationary.clone(),
    };
    let model = estimate_vecm(&panel, &spec).stage(STAGE)?;
    let out = StageDir::create(r, STAGE, &sub_dir("vecm"), None)?;
    let file = ModelFile {
        model,
        panel,
        lag_selection: sel,
        rank_source: source.to_string(),
        johansen: jo,
    };
    write_json(STAGE, &out.path("model.json"), &file)?;
    let m = &file.model;
    let mut rows = Vec::new();
    for (i, n) in m.names.iter().enumerate() {
        for c in 0..m.alpha.cols() {
            rows.push(vec![n.clone(), "alpha".into(), c.to_string(), m.alpha[(i, c)].to_string()]);
        }
        for c in 0..m.beta.cols() {
            rows.push(vec![n.clone(), "beta".into(), c.to_string(), m.beta[(i, c)].to_string()]);
        }
        rows.push(vec![n.clone(), "intercept".into(), String::new(), m.intercept[i].to_string()]);
    }
    write_csv_rows(STAGE, &out.path("coefficients.csv"), &["variable", "term", "relation", "value"], rows)?;
    out.finish()
}

fn load_model(r: &Resolved, stage: &'static str) -> Result<(ModelFile, PathBuf)> {
    let path = model_path(r);
    if !path.is_file() {
        return Err(CliError::MissingModel { stage, path });
    }
    Ok((read_json(stage, &path)?, path))
}

fn irf(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "econ irf";
    let cfg = &r.config.econ;
    let seed = r.stage_seed("econ/irf");
    let (mf, path) = load_model(r, STAGE)?;
    let res = if cfg.replications > 0 {
        let plan = BootstrapPlan::new(&mf.model, mf.panel.data(), cfg.replications, cfg.level, cfg.horizon, seed)
            .stage_at(STAGE, &path)?;
        let reps: Vec<_> = (0..cfg.replications).into_par_iter().map(|i| plan.replicate(i)).collect();
        plan.finish(reps).stage(STAGE)?
    } else {
        impulse_response(&mf.model, cfg.horizon).stage(STAGE)?
    };
    let out = StageDir::create(r, STAGE, &sub_dir("irf"), (cfg.replications > 0).then_some(seed))?;
    let k = res.names.len();
    let mut rows = Vec::new();
    for h in 0..=res.horizon {
        for i in 0..k {
            for j in 0..k {
                let band = |b: &[sentishift_core::Matrix]| Some(b[h][(i, j)]);
                rows.push(vec![
                    h.to_string(),
                    res.names[i].clone(),
                    res.names[j].clone(),
                    res.responses[h][(i, j)].to_string(),
                    cell(res.bands.as_ref().and_then(|b| band(&b.lower))),
                    cell(res.bands.as_ref().and_then(|b| band(&b.upper))),
                ]);
            }
        }
    }
    write_csv_rows(STAGE, &out.path("irf.csv"), &["horizon", "response", "shock", "point", "lower", "upper"], rows)?;
    write_json(STAGE, &out.path("irf.json"), &res)?;
    out.finish()
}

fn fevd_cmd(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "econ fevd";
    let (mf, _) = load_model(r, STAGE)?;
    let res = fevd(&mf.model, r.config.econ.horizon).stage(STAGE)?;
    let out = StageDir::create(r, STAGE, &sub_dir("fevd"), None)?;
    let k = res.names.len();
    let mut rows = Vec::new();
    for (h, s) in res.shares.iter().enumerate() {
        for i in 0..k {
            for j in 0..k {
                rows.push(vec![(h + 1).to_string(), res.names[i].clone(), res.names[j].clone(), s[(i, j)].to_string()]);
            }
        }
    }
    write_csv_rows(STAGE, &out.path("fevd.csv"), &["horizon", "variable", "shock", "share"], rows)?;
    write_json(STAGE, &out.path("fevd.json"), &res)?;
    out.finish()
}
