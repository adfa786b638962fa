use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sentiment::Month;

/// Monthly observations of named variables on a gap-free common window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroPanel {
    names: Vec<String>,
    /// First month, when the rows are calendar months.
    start: Option<Month>,
    data: Matrix,
    logged: Vec<bool>,
}

impl MacroPanel {
    pub fn new(names: Vec<String>, start: Option<Month>, data: Matrix) -> Result<Self> {
        if names.len() != data.cols() {
            return Err(Error::InvalidSpec(format!(
                "{} names for {} columns",
                names.len(),
                data.cols()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidSpec(format!("duplicate variable `{n}`")));
            }
        }
        if let Some((i, j)) = (0..data.rows())
            .flat_map(|i| (0..data.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| !data[(i, j)].is_finite())
        {
            return Err(Error::InvalidSpec(format!(
                "non-finite value for `{}` in row {}",
                names[j],
                i + 1
            )));
        }
        let logged = alloc::vec![false; names.len()];
        Ok(Self {
            names,
            start,
            data,
            logged,
        })
    }

    /// Aligns separately observed monthly series on their maximal common
    /// window. A month missing inside that window is an error.
    pub fn align(columns: &[(String, Vec<Month>, Vec<f64>)]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidSpec("panel has no variables".to_string()));
        }
        for (name, months, values) in columns {
            if months.len() != values.len() || months.is_empty() {
                return Err(Error::InvalidSpec(format!("series `{name}` is empty or ragged")));
            }
            if months.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSpec(format!("months of `{name}` are not increasing")));
            }
        }
        let start = columns.iter().map(|c| c.1[0]).max().expect("non-empty");
        let end = columns.iter().map(|c| *c.1.last().expect("non-empty")).min().expect("non-empty");
        if end < start {
            return Err(Error::InsufficientObservations {
                available: 0,
                required: 1,
            });
        }
        let t = (end.since(start) + 1) as usize;
        let mut data = Matrix::zeros(t, columns.len());
        for (j, (name, months, values)) in columns.iter().enumerate() {
            let first = months.iter().position(|m| *m >= start).expect("window inside series");
            for i in 0..t {
                let want = add_months(start, i);
                match months.get(first + i) {
                    Some(m) if *m == want => data[(i, j)] = values[first + i],
                    _ => {
                        return Err(Error::InvalidSpec(format!(
                            "series `{name}` has no observation for {want}"
                        )))
                    }
                }
            }
        }
        let names = columns.iter().map(|c| c.0.clone()).collect();
        Self::new(names, Some(start), data)
    }

    /// Natural log of the named columns.
    pub fn log_transform(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            let j = self.index_of(n)?;
            if self.logged[j] {
                continue;
            }
            for i in 0..self.data.rows() {
                let v = self.data[(i, j)];
                if !(v > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "cannot log non-positive value {v} of `{n}` in row {}",
                        i + 1
                    )));
                }
                self.data[(i, j)] = libm::log(v);
            }
            self.logged[j] = true;
        }
        Ok(self)
    }

    /// Keeps the named columns in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = names.iter().map(|n| self.index_of(n)).collect::<Result<_>>()?;
        Ok(Self {
            names: idx.iter().map(|&j| self.names[j].clone()).collect(),
            start: self.start,
            data: self.data.select_cols(&idx),
            logged: idx.iter().map(|&j| self.logged[j]).collect(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn start(&self) -> Option<Month> {
        self.start
    }

    pub fn months(&self) -> Option<Vec<Month>> {
        self.start.map(|s| (0..self.len()).map(|i| add_months(s, i)).collect())
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn logged(&self) -> &[bool] {
        &self.logged
    }

    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    pub fn n_vars(&self) -> usize {
        self.data.cols()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.data.col(self.index_of(name)?))
    }
}

fn add_months(m: Month, k: usize) -> Month {
    let total = i64::from(m.year) * 12 + i64::from(m.month) - 1 + k as i64;
    Month {
        year: (total.div_euclid(12)) as i32,
        month: (total.rem_euclid(12) + 1) as u8,
    }
}
