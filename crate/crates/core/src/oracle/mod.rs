//! Brute-force adversary: minimizes expected revenue at a fixed reserve over
//! distributions meeting the seller's information, without using any of the
//! closed-form characterizations.
//!
//! Two kinds of search run side by side. A discretized search optimizes a step
//! cdf on a value grid by projected gradient descent from random starts. A
//! parametric search scans small families (two points, atom plus uniform, atom
//! plus uniform after a gap, point mass at the mean) whose moments are matched
//! analytically. The best feasible candidate wins; its revenue is an upper
//! bound on the true infimum.
//!
//! Variance settings truncate the value grid at `m + k sigma`; the discretized
//! search therefore cannot place mass further out.

mod discretized;
mod families;
pub mod isotonic;
mod verify;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use verify::{verify_maxmin, VerifyReport, VerifyRow};

use crate::dist::{AuctionSetting, Constraint, Distribution, TieRule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DiscretizedCdf,
    Binary,
    AtomPlusUniform,
    AtomPlusGapUniform,
    PointMass,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::DiscretizedCdf => "discretized_cdf",
            Family::Binary => "binary",
            Family::AtomPlusUniform => "atom_plus_uniform",
            Family::AtomPlusGapUniform => "atom_plus_gap_uniform",
            Family::PointMass => "point_mass",
        }
    }

    pub const ALL: [Family; 5] = [
        Family::DiscretizedCdf,
        Family::Binary,
        Family::AtomPlusUniform,
        Family::AtomPlusGapUniform,
        Family::PointMass,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub value_grid_size: usize,
    /// Top of the value grid; defaults to `vmax` or `m + sigma_multiple * sigma`.
    pub value_grid_max: Option<f64>,
    pub sigma_multiple: f64,
    pub families: Vec<Family>,
    /// Projected-gradient iterations per start.
    pub max_iterations: usize,
    pub starts: usize,
    /// Grid points per parameter axis in the family scans.
    pub family_resolution: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            value_grid_size: 400,
            value_grid_max: None,
            sigma_multiple: 12.0,
            families: Family::ALL.to_vec(),
            max_iterations: 300,
            starts: 10,
            family_resolution: 40,
            tolerance: 1e-7,
            seed: 0,
        }
    }
}

impl OracleConfig {
    fn grid_max(&self, setting: &AuctionSetting) -> f64 {
        self.value_grid_max.unwrap_or(match setting.constraint() {
            Constraint::Bounded { vmax, .. } => vmax,
            Constraint::VarianceBound { mean, sigma } => mean + self.sigma_multiple * sigma,
        })
    }

    fn validate(&self, setting: &AuctionSetting) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleConfig(msg));
        if self.value_grid_size < 50 {
            return bad(format!("value grid needs >= 50 points, got {}", self.value_grid_size));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.families.is_empty() || self.family_resolution < 2 {
            return bad("need at least one family and a family resolution >= 2".into());
        }
        let top = self.grid_max(setting);
        if !(top > setting.mean()) {
            return bad(format!("grid max {top} must exceed the mean {}", setting.mean()));
        }
        if let Constraint::Bounded { vmax, .. } = setting.constraint() {
            if top > vmax {
                return bad(format!("grid max {top} exceeds the value bound {vmax}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_revenue: f64,
    pub best_distribution: Distribution,
    pub family_tag: Family,
    /// Relative mean error, and relative excess variance or excess support.
    pub constraint_residuals: (f64, f64),
    pub iterations: usize,
}

/// Relative violations of the mean and of the variance or support constraint.
pub fn constraint_residuals(dist: &Distribution, setting: &AuctionSetting) -> Result<(f64, f64)> {
    let (mean, var) = dist.moments()?;
    let m = setting.mean();
    let second = match setting.constraint() {
        Constraint::Bounded { vmax, .. } => ((dist.support().1 - vmax) / vmax).max(0.0),
        Constraint::VarianceBound { sigma, .. } => ((var - sigma * sigma) / (sigma * sigma)).max(0.0),
    };
    Ok(((mean - m).abs() / m, second))
}

/// Revenue, distribution and work spent for one family's best point.
type Candidate = (f64, Distribution, usize);

/// Lowest revenue at reserve `r` found over the configured families.
pub fn minimize_revenue(r: f64, setting: &AuctionSetting, tie: TieRule, config: &OracleConfig) -> Result<OracleResult> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("reserve must be >= 0, got {r}")));
    }
    config.validate(setting)?;
    let c = setting.cost();
    let ctx = families::Context {
        setting,
        r,
        tie,
        special_atoms: vec![r, r + 1e-9 * r.max(1.0), c],
        resolution: config.family_resolution,
    };
    let second_moment = match setting.constraint() {
        Constraint::Bounded { .. } => None,
        Constraint::VarianceBound { mean, sigma } => Some(mean * mean + sigma * sigma),
    };
    // parametric families first; their winners also seed the discretized search
    let mut found: Vec<(Family, Option<Candidate>)> = config
        .families
        .par_iter()
        .filter(|&&f| f != Family::DiscretizedCdf)
        .map(|&family| (family, ctx.search(family).map(|f| (f.revenue, f.dist, f.iterations))))
        .collect();
    if config.families.contains(&Family::DiscretizedCdf) {
        let full = config.grid_max(setting);
        let mut best: Option<Candidate> = None;
        // a second pass zooms the grid onto the support of the best candidate so far
        for pass in 0..2 {
            let mut seeds: Vec<&Distribution> = found.iter().filter_map(|(_, o)| o.as_ref().map(|o| &o.1)).collect();
            seeds.extend(best.as_ref().map(|b| &b.1));
            let top = if pass == 0 {
                full
            } else {
                let reach = seeds
                    .iter()
                    .map(|d| d.quantile(1.0 - 1e-9))
                    .fold(setting.mean(), f64::max);
                (1.25 * reach).min(full)
            };
            if pass == 1 && top >= full {
                break;
            }
            let problem = discretized::Problem::new(
                config.value_grid_size,
                top,
                r,
                c,
                setting.bidders(),
                tie,
                setting.mean(),
                second_moment,
            );
            let out = problem.and_then(|p| {
                let warm = seeds.iter().map(|d| p.levels_of(d)).collect();
                let o = p.solve(
                    config.starts,
                    warm,
                    config.seed,
                    config.max_iterations,
                    config.tolerance,
                )?;
                let rev = crate::dist::expected_revenue(&o.dist, r, setting, tie).ok()?;
                Some((rev, o.dist, o.iterations))
            });
            if let Some(o) = out {
                let spent = best.as_ref().map_or(0, |b| b.2);
                if best.as_ref().is_none_or(|b| o.0 < b.0) {
                    best = Some((o.0, o.1, o.2 + spent));
                } else if let Some(b) = best.as_mut() {
                    b.2 += o.2;
                }
            }
        }
        found.push((Family::DiscretizedCdf, best));
    }
    let iterations = found.iter().filter_map(|(_, o)| o.as_ref().map(|o| o.2)).sum();
    let (family, (best_revenue, best_distribution, _)) = found
        .into_iter()
        .filter_map(|(f, o)| o.map(|o| (f, o)))
        .min_by(|(fa, a), (fb, b)| a.0.total_cmp(&b.0).then(fa.cmp(fb)))
        .ok_or_else(|| Error::InfeasibleConfig("no family produced a feasible distribution".into()))?;
    let constraint_residuals = constraint_residuals(&best_distribution, setting)?;
    Ok(OracleResult {
        best_revenue,
        best_distribution,
        family_tag: family,
        constraint_residuals,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OracleConfig {
        OracleConfig {
            value_grid_size: 100,
            starts: 2,
            max_iterations: 100,
            family_resolution: 20,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn far_reserve_leaves_the_seller_with_cost() {
        let s = AuctionSetting::bounded(3, 0.2, 0.5, 1.0).unwrap();
        let out = minimize_revenue(1.0, &s, TieRule::NoSaleAtReserve, &quick()).unwrap();
        assert!((out.best_revenue - 0.2).abs() < 1e-12);
        let s = AuctionSetting::variance(2, 0.3, 1.0, 1.0).unwrap();
        let out = minimize_revenue(2.0, &s, TieRule::NoSaleAtReserve, &quick()).unwrap();
        assert!((out.best_revenue - 0.3).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let s = AuctionSetting::variance(2, 0.0, 1.0, 1.0).unwrap();
        let bad = OracleConfig {
            value_grid_max: Some(0.5),
            ..quick()
        };
        assert!(matches!(
            minimize_revenue(0.0, &s, TieRule::NoSaleAtReserve, &bad),
            Err(Error::InfeasibleConfig(_))
        ));
        let bad = OracleConfig {
            value_grid_size: 10,
            ..quick()
        };
        assert!(minimize_revenue(0.0, &s, TieRule::NoSaleAtReserve, &bad).is_err());
    }

    #[test]
    fn results_are_deterministic() {
        let s = AuctionSetting::variance(3, 0.1, 1.0, 0.5).unwrap();
        let a = minimize_revenue(0.4, &s, TieRule::NoSaleAtReserve, &quick()).unwrap();
        let b = minimize_revenue(0.4, &s, TieRule::NoSaleAtReserve, &quick()).unwrap();
        assert_eq!(a, b);
    }
}
