//! Setting-agnostic entry points over the bounded and variance solvers.

use serde::{Deserialize, Serialize};

use crate::bounded::{maxmin_bounded, threat_revenue_bounded, PriceSet};
use crate::dist::{AuctionSetting, Constraint, Distribution};
use crate::error::{Error, Result};
use crate::numeric::linspace;
use crate::variance::{maxmin_variance, threat_revenue_variance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxminSolution {
    pub price_set: PriceSet,
    pub maxmin_revenue: f64,
    pub worst_case: Distribution,
    pub unique: bool,
    /// Lowest support point of the worst case before clamping at `c`.
    pub lowest_support: f64,
}

pub fn maxmin(setting: &AuctionSetting) -> Result<MaxminSolution> {
    Ok(match setting.constraint() {
        Constraint::Bounded { .. } => {
            let s = maxmin_bounded(setting)?;
            MaxminSolution {
                price_set: s.price_set,
                maxmin_revenue: s.maxmin_revenue,
                worst_case: s.worst_case,
                unique: s.unique,
                lowest_support: s.v_min_star,
            }
        }
        Constraint::VarianceBound { .. } => {
            let s = maxmin_variance(setting)?;
            MaxminSolution {
                price_set: s.price_set,
                maxmin_revenue: s.maxmin_revenue,
                worst_case: s.worst_case,
                unique: s.unique,
                lowest_support: s.v_min_star2,
            }
        }
    })
}

/// Revenue at reserve `r` under the threat distribution for `r`.
pub fn threat_revenue(r: f64, setting: &AuctionSetting) -> Result<f64> {
    match setting.constraint() {
        Constraint::Bounded { .. } => threat_revenue_bounded(r, setting),
        Constraint::VarianceBound { .. } => threat_revenue_variance(r, setting),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreatPoint {
    pub r: f64,
    pub threat_revenue: f64,
    pub maxmin_revenue: f64,
}

/// Threat revenue on `points` evenly spaced reserves in `[0, r_max]`.
pub fn threat_curve(setting: &AuctionSetting, r_max: f64, points: usize) -> Result<Vec<ThreatPoint>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reserve range must be positive, got {r_max}"
        )));
    }
    let maxmin_revenue = maxmin(setting)?.maxmin_revenue;
    linspace(0.0, r_max, points)
        .into_iter()
        .map(|r| {
            Ok(ThreatPoint {
                r,
                threat_revenue: threat_revenue(r, setting)?,
                maxmin_revenue,
            })
        })
        .collect()
}
