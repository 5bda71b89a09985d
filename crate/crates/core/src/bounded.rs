//! Known mean and an upper bound on values.
//!
//! Nature's problem at `r = c` is linear in `F` once the Lagrangian of the mean
//! constraint is added, and pointwise minimization yields a "supply curve" of
//! cdf levels indexed by the multiplier. The worst case is a two-point
//! distribution; threat distributions certify that no reserve beats `c`.

use serde::{Deserialize, Serialize};

use crate::dist::{expected_revenue, AuctionSetting, Constraint, Distribution, TieRule};
use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

const SUPPLY_TOL: f64 = 1e-12;

/// `y^{n-1} - y^{n-2}`.
pub fn z(y: f64, n: u32) -> f64 {
    let k = n as i32;
    y.powi(k - 1) - y.powi(k - 2)
}

/// Derivative of [`z`] in `y`.
pub fn z_prime(y: f64, n: u32) -> f64 {
    if n == 2 {
        return 1.0;
    }
    let k = n as i32;
    (k - 1) as f64 * y.powi(k - 2) - (k - 2) as f64 * y.powi(k - 3)
}

/// `1 - 1/(n-1)^2`, where the average cost `z(y)/y` is minimized.
pub fn q_star(n: u32) -> f64 {
    let k = (n - 1) as f64;
    1.0 - 1.0 / (k * k)
}

/// `n(n-1) z(q*_n)`.
pub fn lambda_star(n: u32) -> f64 {
    (n * (n - 1)) as f64 * z(q_star(n), n)
}

/// Cdf levels minimizing the pointwise Lagrangian for multiplier `lambda`.
pub fn supply_curve(lambda: f64, n: u32) -> Vec<f64> {
    let ls = lambda_star(n);
    let qs = q_star(n);
    if (lambda - ls).abs() <= SUPPLY_TOL {
        if qs == 0.0 {
            return vec![0.0];
        }
        return vec![0.0, qs];
    }
    if lambda < ls {
        return vec![0.0];
    }
    if lambda >= 0.0 {
        return vec![1.0];
    }
    let nn1 = (n * (n - 1)) as f64;
    vec![bisect_increasing(|y| nn1 * z(y, n) - lambda, qs, 1.0, SUPPLY_TOL)]
}

/// Either `{c}` or `[0, c]`, the latter possibly extending above `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceSet {
    Singleton {
        price: f64,
    },
    Interval {
        low: f64,
        high: f64,
        may_extend_above: bool,
    },
}

impl PriceSet {
    pub(crate) fn for_cost(c: f64, unique: bool) -> Self {
        if unique {
            PriceSet::Singleton { price: c }
        } else {
            PriceSet::Interval {
                low: 0.0,
                high: c,
                may_extend_above: true,
            }
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        match *self {
            PriceSet::Singleton { price } => r == price,
            PriceSet::Interval { low, high, .. } => (low..=high).contains(&r),
        }
    }
}

/// Uniqueness of `c` as maxmin price given the lowest worst-case support point.
///
/// At `low == c` the weak inequality puts the setting in the non-unique
/// branch, except when both are zero and `[0, c]` collapses to `{0}`.
pub(crate) fn is_unique(low: f64, c: f64) -> bool {
    low < c || low == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedSolution {
    pub v_min_star: f64,
    pub q_star: f64,
    pub lambda_star: f64,
    pub worst_case: Distribution,
    pub maxmin_revenue: f64,
    pub price_set: PriceSet,
    pub unique: bool,
}

fn bounded_params(setting: &AuctionSetting) -> Result<(f64, f64)> {
    match setting.constraint() {
        Constraint::Bounded { mean, vmax } => Ok((mean, vmax)),
        _ => Err(Error::WrongConstraint("expected a bounded-values setting")),
    }
}

fn v_min_star_raw(n: u32, m: f64, vmax: f64) -> f64 {
    if n == 2 {
        return 0.0;
    }
    let k = (n - 1) as f64;
    (m - (vmax - m) / (k * k - 1.0)).max(0.0)
}

/// Lowest support point of the worst case when `c` is ignored.
pub fn v_min_star(setting: &AuctionSetting) -> Result<f64> {
    let (m, vmax) = bounded_params(setting)?;
    Ok(v_min_star_raw(setting.bidders(), m, vmax))
}

/// Two-point distribution on `{low, vmax}` with mean `m`.
fn two_point(low: f64, m: f64, vmax: f64) -> Result<Distribution> {
    Distribution::binary(low, vmax, (vmax - m) / (vmax - low))
}

/// Worst case at `r = c`: two points at `max(v*, c)` and `vmax`.
pub fn worst_case_bounded(setting: &AuctionSetting) -> Result<Distribution> {
    let (m, vmax) = bounded_params(setting)?;
    let low = v_min_star_raw(setting.bidders(), m, vmax).max(setting.cost());
    two_point(low, m, vmax)
}

/// Threat distribution for reserve `r`.
pub fn threat_bounded(r: f64, setting: &AuctionSetting) -> Result<(Distribution, TieRule)> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("reserve must be >= 0, got {r}")));
    }
    let (m, vmax) = bounded_params(setting)?;
    let c = setting.cost();
    let vs = v_min_star_raw(setting.bidders(), m, vmax);
    let out = if r < vs {
        (two_point(vs, m, vmax)?, TieRule::NoSaleAtReserve)
    } else if r < c {
        (two_point(r, m, vmax)?, TieRule::SaleAtReserve)
    } else if r < m {
        (two_point(r, m, vmax)?, TieRule::NoSaleAtReserve)
    } else {
        (Distribution::point(m)?, TieRule::NoSaleAtReserve)
    };
    Ok(out)
}

/// Revenue the threat distribution allows at reserve `r`.
pub fn threat_revenue_bounded(r: f64, setting: &AuctionSetting) -> Result<f64> {
    let (dist, tie) = threat_bounded(r, setting)?;
    expected_revenue(&dist, r, setting, tie)
}

/// Multiplier `n(n-1) z(p)` certifying the worst case, `p` its mass on the low point.
pub fn lagrange_multiplier(setting: &AuctionSetting) -> Result<f64> {
    let n = setting.bidders();
    match worst_case_bounded(setting)? {
        Distribution::Binary { p_low, .. } => Ok((n * (n - 1)) as f64 * z(p_low, n)),
        _ => unreachable!("worst case is two-point"),
    }
}

pub fn maxmin_bounded(setting: &AuctionSetting) -> Result<BoundedSolution> {
    let n = setting.bidders();
    let c = setting.cost();
    let vs = v_min_star(setting)?;
    let worst_case = worst_case_bounded(setting)?;
    let maxmin_revenue = expected_revenue(&worst_case, c, setting, TieRule::SaleAtReserve)?;
    let unique = is_unique(vs, c);
    Ok(BoundedSolution {
        v_min_star: vs,
        q_star: q_star(n),
        lambda_star: lambda_star(n),
        worst_case,
        maxmin_revenue,
        price_set: PriceSet::for_cost(c, unique),
        unique,
    })
}

/// Moves all mass below `c` up to `c` and rescales the rest so the mean stays `m`.
///
/// Returns `F~(v) = 0` for `v < c` and `beta F(v) + 1 - beta` above, with
/// `beta = (m - c) / ∫_c^∞ (1 - F)`.
pub fn mass_shift(dist: &Distribution, c: f64, m: f64) -> Result<Distribution> {
    let (grid, cdf) = match dist {
        Distribution::DiscreteCdf { grid, cdf } => (grid, cdf),
        _ => return Err(Error::InvalidArgument("mass shift expects a discrete cdf".into())),
    };
    let upper = dist.integral_above(c, 1, |f| 1.0 - f)?;
    if upper <= 0.0 || m <= c {
        return Err(Error::InvalidArgument("no mass above c to rescale".into()));
    }
    let beta = ((m - c) / upper).min(1.0);
    let mut new_grid = vec![c];
    let mut new_cdf = vec![beta * dist.cdf(c) + 1.0 - beta];
    for (&g, &f) in grid.iter().zip(cdf) {
        if g > c {
            new_grid.push(g);
            new_cdf.push(beta * f + 1.0 - beta);
        }
    }
    let last = new_cdf.len() - 1;
    new_cdf[last] = 1.0;
    Distribution::discrete(new_grid, new_cdf)
}
