//! Numerical saddle check: the oracle's lower envelope over reserves should
//! peak at the claimed maxmin revenue, attained at `r = c`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minimize_revenue, Family, OracleConfig};
use crate::dist::{AuctionSetting, TieRule};
use crate::error::{Error, Result};
use crate::numeric::linspace;
use crate::solution::{maxmin, threat_revenue};

/// Allowed excess of the envelope over the maxmin revenue.
pub const ENVELOPE_TOL: f64 = 1e-6;
/// Allowed gap between the envelope at `c` and the maxmin revenue.
pub const AT_COST_TOL: f64 = 1e-4;
/// Envelope points this close to the maximum count as maximizers.
pub const ARGMAX_BAND: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub r: f64,
    /// Best (lowest) revenue the oracle found; an upper bound on the true infimum.
    pub oracle_revenue: f64,
    /// Revenue under the threat distribution for this reserve.
    pub closed_form_bound: f64,
    pub family_tag: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub setting: AuctionSetting,
    pub maxmin_revenue: f64,
    pub claimed_unique: bool,
    pub rows: Vec<VerifyRow>,
    pub envelope_max: f64,
    pub oracle_at_cost: f64,
    pub argmax: Vec<f64>,
    pub empirical_unique: bool,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(["r", "oracle_revenue", "closed_form_bound", "family_tag"])
            .map_err(err)?;
        for row in &self.rows {
            w.write_record([
                row.r.to_string(),
                row.oracle_revenue.to_string(),
                row.closed_form_bound.to_string(),
                row.family_tag.tag().to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Serialization(e.to_string()))
    }
}

pub fn verify_maxmin(setting: &AuctionSetting, r_grid_size: usize, config: &OracleConfig) -> Result<VerifyReport> {
    if r_grid_size < 20 {
        return Err(Error::InvalidArgument(format!(
            "need at least 20 reserves, got {r_grid_size}"
        )));
    }
    let c = setting.cost();
    let claimed = maxmin(setting)?;
    let (maxmin_revenue, claimed_unique) = (claimed.maxmin_revenue, claimed.unique);
    let mut grid = linspace(0.0, 1.5 * setting.mean(), r_grid_size);
    grid.push(c);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let rows = grid
        .par_iter()
        .map(|&r| {
            let found = minimize_revenue(r, setting, TieRule::NoSaleAtReserve, config)?;
            Ok(VerifyRow {
                r,
                oracle_revenue: found.best_revenue,
                closed_form_bound: threat_revenue(r, setting)?,
                family_tag: found.family_tag,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    for row in &rows {
        if row.oracle_revenue > maxmin_revenue + ENVELOPE_TOL {
            violations.push(format!(
                "envelope {} exceeds maxmin revenue {maxmin_revenue} at r = {}",
                row.oracle_revenue, row.r
            ));
        }
    }
    let oracle_at_cost = rows
        .iter()
        .find(|row| row.r == c)
        .map(|row| row.oracle_revenue)
        .expect("cost is on the grid");
    if (oracle_at_cost - maxmin_revenue).abs() > AT_COST_TOL {
        violations.push(format!(
            "envelope at r = c is {oracle_at_cost}, maxmin revenue is {maxmin_revenue}"
        ));
    }
    let envelope_max = rows
        .iter()
        .map(|row| row.oracle_revenue)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax: Vec<f64> = rows
        .iter()
        .filter(|row| row.oracle_revenue >= envelope_max - ARGMAX_BAND)
        .map(|row| row.r)
        .collect();
    let empirical_unique = argmax.len() == 1;
    if empirical_unique != claimed_unique {
        violations.push(format!(
            "empirical maximizers {argmax:?} disagree with uniqueness = {claimed_unique}"
        ));
    }
    Ok(VerifyReport {
        setting: *setting,
        maxmin_revenue,
        claimed_unique,
        rows,
        envelope_max,
        oracle_at_cost,
        argmax,
        empirical_unique,
        violations,
    })
}
