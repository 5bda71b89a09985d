//! How fast the revenue guarantee approaches the mean as bidders are added.
//!
//! With bounded values the gap `m - R*_n` is `alpha_n (vmax - m)`, which decays
//! like `1/(2 n^2)`. With a variance bound it is `gamma_n sigma`, of order `1/n`.
//! Allowing correlated values slows the bounded case to `(vmax - m)/(n - 1)`.
//!
//! No mechanism can beat `m` in expected surplus since Nature may pick a point
//! mass at `m`, so these gaps also bound the loss of the second-price auction
//! against any other robust mechanism.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ols_slope;
use crate::variance::gamma_n;

/// `n/(n-1) (1 - 1/(n-1)^2)^{n-2} - 1`, with `alpha_2 = 1`.
pub fn alpha_n(n: u32) -> f64 {
    if n == 2 {
        return 1.0;
    }
    let k = (n - 1) as f64;
    let log = (1.0 / k).ln_1p() + (n - 2) as f64 * (-1.0 / (k * k)).ln_1p();
    log.exp_m1()
}

/// Gap between the mean and the maxmin revenue when values may be correlated.
pub fn correlated_gap(m: f64, vmax: f64, n: u32) -> f64 {
    (vmax - m) / (n - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTableRow {
    pub n: u32,
    pub gap_bounded: f64,
    pub gap_variance: f64,
    pub gap_correlated: f64,
    pub n_sq_alpha: f64,
}

pub fn rate_table(m: f64, vmax: f64, sigma: f64, n_max: u32) -> Result<Vec<RateTableRow>> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 3, got {n_max}")));
    }
    if !(m > 0.0 && vmax > m && sigma > 0.0) {
        return Err(Error::InvalidSetting(format!(
            "need 0 < m < vmax and sigma > 0, got m = {m}, vmax = {vmax}, sigma = {sigma}"
        )));
    }
    Ok((2..=n_max)
        .into_par_iter()
        .map(|n| {
            let a = alpha_n(n);
            RateTableRow {
                n,
                gap_bounded: a * (vmax - m),
                gap_variance: gamma_n(n) * sigma,
                gap_correlated: correlated_gap(m, vmax, n),
                n_sq_alpha: (n as f64).powi(2) * a,
            }
        })
        .collect())
}

/// Log-log slopes of the three gaps against `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSlopes {
    pub bounded: f64,
    pub variance: f64,
    pub correlated: f64,
}

/// Least-squares slopes over the rows with `n` in `[n_max / 10, n_max]`.
pub fn slopes(rows: &[RateTableRow]) -> RateSlopes {
    let n_max = rows.iter().map(|r| r.n).max().unwrap_or(0);
    let top: Vec<&RateTableRow> = rows.iter().filter(|r| r.n >= n_max / 10).collect();
    let xs: Vec<f64> = top.iter().map(|r| (r.n as f64).ln()).collect();
    let fit = |f: fn(&RateTableRow) -> f64| {
        let ys: Vec<f64> = top.iter().map(|r| f(r).ln()).collect();
        ols_slope(&xs, &ys)
    };
    RateSlopes {
        bounded: fit(|r| r.gap_bounded),
        variance: fit(|r| r.gap_variance),
        correlated: fit(|r| r.gap_correlated),
    }
}

pub fn write_rate_csv<W: Write>(rows: &[RateTableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Serialization(e.to_string());
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}
