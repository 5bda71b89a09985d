//! Value distributions, auction settings and the second-price revenue functional.
//!
//! Revenue with `n` iid bidders, seller valuation `c` and reserve `r` is
//!
//! ```text
//! R(F, r) = r - (r - c) F(r)^n + ∫_r^∞ (1 - n F^{n-1}(v) + (n-1) F^n(v)) dv
//! ```
//!
//! Every variant is integrated piecewise: atoms and flat stretches exactly,
//! continuous tails with a Gauss-Legendre rule that is exact for the polynomial
//! integrand (in value space for the uniform tail, in quantile space for the
//! quantile-parameterized one). An adaptive rule cross-checks moments.

use serde::{Deserialize, Serialize};

use crate::bounded::{z, z_prime};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, integrate_adaptive, QUAD_TOL};
use crate::variance::GParams;

/// Whether an atom sitting exactly at the reserve trades.
///
/// `SaleAtReserve` stands in for a distribution whose atom is an
/// infinitesimal distance above the reserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    NoSaleAtReserve,
    SaleAtReserve,
}

/// What the seller knows besides the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// Values lie in `[0, vmax]`.
    Bounded { mean: f64, vmax: f64 },
    /// Values are nonnegative with variance at most `sigma^2`.
    VarianceBound { mean: f64, sigma: f64 },
}

impl Constraint {
    pub fn mean(&self) -> f64 {
        match *self {
            Constraint::Bounded { mean, .. } | Constraint::VarianceBound { mean, .. } => mean,
        }
    }
}

/// Number of bidders, seller valuation and the information constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuctionSetting {
    bidders: u32,
    cost: f64,
    constraint: Constraint,
}

impl AuctionSetting {
    pub fn new(bidders: u32, cost: f64, constraint: Constraint) -> Result<Self> {
        let setting = AuctionSetting {
            bidders,
            cost,
            constraint,
        };
        setting.validate()?;
        Ok(setting)
    }

    pub fn bounded(bidders: u32, cost: f64, mean: f64, vmax: f64) -> Result<Self> {
        Self::new(bidders, cost, Constraint::Bounded { mean, vmax })
    }

    pub fn variance(bidders: u32, cost: f64, mean: f64, sigma: f64) -> Result<Self> {
        Self::new(bidders, cost, Constraint::VarianceBound { mean, sigma })
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.constraint.mean();
        let bad = |msg: String| Err(Error::InvalidSetting(msg));
        if self.bidders < 2 {
            return bad(format!("need at least 2 bidders, got {}", self.bidders));
        }
        if !(self.cost.is_finite() && m.is_finite()) || self.cost < 0.0 || self.cost >= m {
            return bad(format!("need 0 <= c < m, got c = {}, m = {}", self.cost, m));
        }
        match self.constraint {
            Constraint::Bounded { vmax, .. } if !(vmax.is_finite() && vmax > m) => {
                bad(format!("need m < vmax, got m = {m}, vmax = {vmax}"))
            }
            Constraint::VarianceBound { sigma, .. } if !(sigma.is_finite() && sigma > 0.0) => {
                bad(format!("need sigma > 0, got {sigma}"))
            }
            _ => Ok(()),
        }
    }

    pub fn bidders(&self) -> u32 {
        self.bidders
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn mean(&self) -> f64 {
        self.constraint.mean()
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    /// Same setting with a different seller valuation.
    pub fn with_cost(&self, cost: f64) -> Result<Self> {
        Self::new(self.bidders, cost, self.constraint)
    }
}

/// A value distribution. All variants are right-continuous cdfs on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Distribution {
    #[serde(rename = "point")]
    PointMass { a: f64 },
    /// Two support points, `p_low` on `low`.
    #[serde(rename = "binary")]
    Binary { low: f64, high: f64, p_low: f64 },
    /// Atom of mass `q` at `rho`, continuous tail given by its quantile map.
    #[serde(rename = "g_tail")]
    AtomQuantileTail(GParams),
    /// Atom at `atom_point`, remaining mass uniform on `[tail_low, tail_high]`.
    #[serde(rename = "atom_uniform")]
    AtomUniformTail {
        atom_point: f64,
        atom_mass: f64,
        tail_low: f64,
        tail_high: f64,
    },
    /// Step cdf: `F(v) = cdf[j]` for `grid[j] <= v < grid[j + 1]`.
    #[serde(rename = "discrete")]
    DiscreteCdf { grid: Vec<f64>, cdf: Vec<f64> },
}

/// `1 - n F^{n-1} + (n-1) F^n`, the probability that the second-highest of `n`
/// values exceeds a point where the cdf equals `f`.
pub fn second_order_survival(f: f64, n: u32) -> f64 {
    let n_i = n as i32;
    1.0 - n as f64 * f.powi(n_i - 1) + (n - 1) as f64 * f.powi(n_i)
}

impl Distribution {
    pub fn point(a: f64) -> Result<Self> {
        let d = Distribution::PointMass { a };
        d.validate()?;
        Ok(d)
    }

    pub fn binary(low: f64, high: f64, p_low: f64) -> Result<Self> {
        let d = Distribution::Binary { low, high, p_low };
        d.validate()?;
        Ok(d)
    }

    pub fn atom_uniform(atom_point: f64, atom_mass: f64, tail_low: f64, tail_high: f64) -> Result<Self> {
        let d = Distribution::AtomUniformTail {
            atom_point,
            atom_mass,
            tail_low,
            tail_high,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn discrete(grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        let d = Distribution::DiscreteCdf { grid, cdf };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        match self {
            Distribution::PointMass { a } => {
                if !finite_nonneg(*a) {
                    return bad(format!("point mass at {a}"));
                }
            }
            Distribution::Binary { low, high, p_low } => {
                if !(finite_nonneg(*low) && high.is_finite() && low < high && prob(*p_low)) {
                    return bad(format!("binary({low}, {high}, {p_low})"));
                }
            }
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                if !(finite_nonneg(*atom_point)
                    && tail_high.is_finite()
                    && atom_point <= tail_low
                    && tail_low < tail_high
                    && prob(*atom_mass))
                {
                    return bad(format!(
                        "atom_uniform({atom_point}, {atom_mass}, {tail_low}, {tail_high})"
                    ));
                }
            }
            Distribution::AtomQuantileTail(g) => g.validate()?,
            Distribution::DiscreteCdf { grid, cdf } => {
                if grid.is_empty() || grid.len() != cdf.len() {
                    return bad("grid and cdf must be nonempty and of equal length".into());
                }
                if !finite_nonneg(grid[0]) || grid.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("grid must be nonnegative and strictly ascending".into());
                }
                if cdf.iter().any(|&p| !prob(p)) || cdf.windows(2).any(|w| w[1] < w[0]) {
                    return bad("cdf values must be nondecreasing in [0, 1]".into());
                }
                if (cdf[cdf.len() - 1] - 1.0).abs() > 1e-12 {
                    return bad("last cdf value must be 1".into());
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Distribution = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// `F(v) = P(X <= v)`.
    pub fn cdf(&self, v: f64) -> f64 {
        match self {
            Distribution::PointMass { a } => {
                if v < *a {
                    0.0
                } else {
                    1.0
                }
            }
            Distribution::Binary { low, high, p_low } => {
                if v < *low {
                    0.0
                } else if v < *high {
                    *p_low
                } else {
                    1.0
                }
            }
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                if v < *atom_point {
                    0.0
                } else if v >= *tail_high {
                    1.0
                } else {
                    let frac = ((v - tail_low) / (tail_high - tail_low)).clamp(0.0, 1.0);
                    atom_mass + (1.0 - atom_mass) * frac
                }
            }
            Distribution::AtomQuantileTail(g) => g.cdf(v),
            Distribution::DiscreteCdf { grid, cdf } => {
                let idx = grid.partition_point(|&x| x <= v);
                if idx == 0 {
                    0.0
                } else {
                    cdf[idx - 1]
                }
            }
        }
    }

    /// Left limit `F(v-) = P(X < v)`.
    pub fn cdf_left(&self, v: f64) -> f64 {
        match self {
            Distribution::PointMass { a } => {
                if v <= *a {
                    0.0
                } else {
                    1.0
                }
            }
            Distribution::Binary { low, high, p_low } => {
                if v <= *low {
                    0.0
                } else if v <= *high {
                    *p_low
                } else {
                    1.0
                }
            }
            Distribution::AtomUniformTail { atom_point, .. } => {
                if v <= *atom_point {
                    0.0
                } else {
                    self.cdf(v)
                }
            }
            Distribution::AtomQuantileTail(g) => {
                if v <= g.rho {
                    0.0
                } else {
                    g.cdf(v)
                }
            }
            Distribution::DiscreteCdf { grid, cdf } => {
                let idx = grid.partition_point(|&x| x < v);
                if idx == 0 {
                    0.0
                } else {
                    cdf[idx - 1]
                }
            }
        }
    }

    /// Generalized inverse `inf { v : F(v) > u }` for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Distribution::PointMass { a } => *a,
            Distribution::Binary { low, high, p_low } => {
                if u < *p_low {
                    *low
                } else {
                    *high
                }
            }
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                if u < *atom_mass {
                    *atom_point
                } else {
                    let frac = (u - atom_mass) / (1.0 - atom_mass);
                    tail_low + frac * (tail_high - tail_low)
                }
            }
            Distribution::AtomQuantileTail(g) => {
                if u < g.q {
                    g.rho
                } else {
                    g.quantile(u)
                }
            }
            Distribution::DiscreteCdf { grid, cdf } => {
                let idx = cdf.partition_point(|&p| p <= u);
                grid[idx.min(grid.len() - 1)]
            }
        }
    }

    /// Lowest and highest points of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::PointMass { a } => (*a, *a),
            Distribution::Binary { low, high, p_low } => {
                let lo = if *p_low > 0.0 { *low } else { *high };
                let hi = if *p_low < 1.0 { *high } else { *low };
                (lo, hi)
            }
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                let lo = if *atom_mass > 0.0 { *atom_point } else { *tail_low };
                let hi = if *atom_mass < 1.0 { *tail_high } else { *atom_point };
                (lo, hi)
            }
            Distribution::AtomQuantileTail(g) => (g.rho, g.top()),
            Distribution::DiscreteCdf { grid, cdf } => {
                let first = cdf.iter().position(|&p| p > 0.0).unwrap_or(0);
                let last = cdf.iter().position(|&p| p >= 1.0).unwrap_or(grid.len() - 1);
                (grid[first], grid[last])
            }
        }
    }

    /// Points where the cdf may jump or change formula, ascending.
    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            Distribution::PointMass { a } => vec![*a],
            Distribution::Binary { low, high, .. } => vec![*low, *high],
            Distribution::AtomUniformTail {
                atom_point,
                tail_low,
                tail_high,
                ..
            } => vec![*atom_point, *tail_low, *tail_high],
            Distribution::AtomQuantileTail(g) => vec![g.rho, g.top()],
            Distribution::DiscreteCdf { grid, .. } => grid.clone(),
        };
        pts.dedup();
        pts
    }

    /// Mean and variance from closed forms.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let m = match self {
            Distribution::PointMass { a } => (*a, 0.0),
            Distribution::Binary { low, high, p_low } => {
                let mean = p_low * low + (1.0 - p_low) * high;
                (mean, p_low * (1.0 - p_low) * (high - low).powi(2))
            }
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                let w = *atom_mass;
                let mid = 0.5 * (tail_low + tail_high);
                let mean = w * atom_point + (1.0 - w) * mid;
                let spread = (tail_high - tail_low).powi(2) / 12.0;
                let var = w * (atom_point - mean).powi(2) + (1.0 - w) * ((mid - mean).powi(2) + spread);
                (mean, var)
            }
            Distribution::AtomQuantileTail(g) => {
                // Q is a polynomial of degree n-1 in the quantile level.
                let rule = gauss_legendre(g.n as usize);
                let mean = g.q * g.rho + rule.integrate(g.q, 1.0, |u| g.quantile(u));
                let var = g.q * (g.rho - mean).powi(2) + rule.integrate(g.q, 1.0, |u| (g.quantile(u) - mean).powi(2));
                (mean, var)
            }
            Distribution::DiscreteCdf { grid, cdf } => {
                let masses = atom_masses(cdf);
                let mean: f64 = grid.iter().zip(&masses).map(|(x, p)| x * p).sum();
                let var: f64 = grid.iter().zip(&masses).map(|(x, p)| p * (x - mean).powi(2)).sum();
                (mean, var)
            }
        };
        Ok(m)
    }

    /// Mean and variance from `∫(1 - F)` and `∫ 2v (1 - F)` by adaptive quadrature.
    pub fn moments_by_quadrature(&self) -> Result<(f64, f64)> {
        let mut pts = vec![0.0];
        pts.extend(self.breakpoints());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut first = 0.0;
        let mut second = 0.0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            // Evaluate strictly inside the piece so atoms at the ends do not leak in.
            let inner = |v: f64| self.cdf(v.clamp(a + (b - a) * 1e-15, b - (b - a) * 1e-15));
            first += integrate_adaptive(|v| 1.0 - inner(v), a, b, QUAD_TOL)?;
            second += integrate_adaptive(|v| 2.0 * v * (1.0 - inner(v)), a, b, QUAD_TOL * b.max(1.0))?;
        }
        Ok((first, second - first * first))
    }

    /// `∫_r^∞ g(F(v)) dv` for a polynomial `g` of degree at most `degree` with `g(1) = 0`.
    pub fn integral_above<G>(&self, r: f64, degree: u32, g: G) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        let gap = |a: f64, b: f64| (b - a.max(r)).max(0.0);
        let total = match self {
            Distribution::PointMass { a } => gap(0.0, *a).min((a - r).max(0.0)) * g(0.0),
            Distribution::Binary { low, high, p_low } => (low - r).max(0.0) * g(0.0) + gap(*low, *high) * g(*p_low),
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                let mut acc = (atom_point - r).max(0.0) * g(0.0) + gap(*atom_point, *tail_low) * g(*atom_mass);
                let lo = tail_low.max(r);
                if lo < *tail_high {
                    // F is linear here, so the integrand is a polynomial of known degree
                    let w = *atom_mass;
                    let span = tail_high - tail_low;
                    let rule = gauss_legendre((degree / 2 + 1) as usize);
                    acc += rule.integrate(lo, *tail_high, |v| g(w + (1.0 - w) * (v - tail_low) / span));
                }
                acc
            }
            Distribution::AtomQuantileTail(gp) => {
                let mut acc = (gp.rho - r).max(0.0) * g(0.0);
                if r < gp.top() {
                    // substitute v = Q(u): integrand g(u) Q'(u) is a polynomial
                    let u0 = if r <= gp.rho { gp.q } else { gp.cdf(r) };
                    let points = ((degree + gp.n) / 2 + 1) as usize;
                    let rule = gauss_legendre(points);
                    acc += rule.integrate(u0, 1.0, |u| g(u) * gp.quantile_slope(u));
                }
                acc
            }
            Distribution::DiscreteCdf { grid, cdf } => {
                let mut acc = (grid[0] - r).max(0.0) * g(0.0);
                for j in 0..grid.len() - 1 {
                    let len = gap(grid[j], grid[j + 1]);
                    if len > 0.0 {
                        acc += len * g(cdf[j]);
                    }
                }
                acc
            }
        };
        Ok(total)
    }
}

fn atom_masses(cdf: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    cdf.iter()
        .map(|&p| {
            let mass = p - prev;
            prev = p;
            mass
        })
        .collect()
}

/// Expected seller revenue of a second-price auction with reserve `r`.
pub fn expected_revenue(dist: &Distribution, r: f64, setting: &AuctionSetting, tie: TieRule) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("reserve must be >= 0, got {r}")));
    }
    let n = setting.bidders();
    let c = setting.cost();
    let f_r = match tie {
        TieRule::NoSaleAtReserve => dist.cdf(r),
        TieRule::SaleAtReserve => dist.cdf_left(r),
    };
    let tail = dist.integral_above(r, n, |f| second_order_survival(f, n))?;
    Ok(r - (r - c) * f_r.powi(n as i32) + tail)
}

/// Expected highest value among `n` draws, `∫ (1 - F^n)`.
pub fn expected_max_value(dist: &Distribution, n: u32) -> Result<f64> {
    dist.integral_above(0.0, n, |f| 1.0 - f.powi(n as i32))
}

// Quantile-tail kernel used by GParams; kept here so the revenue engine's
// integrand stays next to its substitution.
pub(crate) fn tail_slope(u: f64, n: u32, lambda2: f64) -> f64 {
    let nn1 = (n * (n - 1)) as f64;
    nn1 * z_prime(u, n) / (2.0 * lambda2)
}

pub(crate) fn tail_quantile(u: f64, n: u32, lambda1: f64, lambda2: f64) -> f64 {
    let nn1 = (n * (n - 1)) as f64;
    (nn1 * z(u, n) - lambda1) / (2.0 * lambda2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(n: u32, c: f64) -> AuctionSetting {
        AuctionSetting::bounded(n, c, 0.5, 1.0).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let p = Distribution::point(1.0).unwrap();
        assert_eq!(p.cdf(0.5), 0.0);
        let b = Distribution::binary(1.0 / 3.0, 1.0, 0.75).unwrap();
        assert_eq!(b.cdf(0.5), 0.75);
        let u = Distribution::atom_uniform(0.5, 11.0 / 15.0, 0.5, 4.25).unwrap();
        assert_eq!(u.cdf(4.25), 1.0);
        assert_eq!(u.cdf(0.49), 0.0);
        assert!((u.cdf(0.5) - 11.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn moments_examples() {
        assert_eq!(Distribution::point(1.0).unwrap().moments().unwrap(), (1.0, 0.0));
        let (mean, _) = Distribution::binary(1.0 / 3.0, 1.0, 0.75).unwrap().moments().unwrap();
        assert!((mean - 0.5).abs() < 1e-15);
        let (mean, var) = Distribution::atom_uniform(0.5, 11.0 / 15.0, 0.5, 4.25)
            .unwrap()
            .moments()
            .unwrap();
        assert!((mean - 1.0).abs() < 1e-10 && (var - 1.0).abs() < 1e-10);
    }

    #[test]
    fn revenue_point_mass_sells_at_value() {
        let p = Distribution::point(1.0).unwrap();
        let s = AuctionSetting::bounded(2, 0.0, 0.5, 2.0).unwrap();
        let r = expected_revenue(&p, 0.5, &s, TieRule::NoSaleAtReserve).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn revenue_worst_case_example() {
        let b = Distribution::binary(1.0 / 3.0, 1.0, 0.75).unwrap();
        let r = expected_revenue(&b, 0.0, &setting(3, 0.0), TieRule::NoSaleAtReserve).unwrap();
        assert!((r - 7.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn revenue_fair_coin_second_order_statistic() {
        // four equally likely profiles; only (1, 1) has v(2) = 1
        let b = Distribution::binary(0.0, 1.0, 0.5).unwrap();
        let r = expected_revenue(&b, 0.0, &setting(2, 0.0), TieRule::NoSaleAtReserve).unwrap();
        assert!((r - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tie_rule_difference_is_atom_term() {
        let b = Distribution::binary(0.3, 1.0, 0.6).unwrap();
        let s = setting(3, 0.1);
        let sale = expected_revenue(&b, 0.3, &s, TieRule::SaleAtReserve).unwrap();
        let none = expected_revenue(&b, 0.3, &s, TieRule::NoSaleAtReserve).unwrap();
        assert!((sale - none - (0.3 - 0.1) * 0.6f64.powi(3)).abs() < 1e-15);
        // at r = c the two coincide exactly
        let s = setting(3, 0.3);
        let sale = expected_revenue(&b, 0.3, &s, TieRule::SaleAtReserve).unwrap();
        let none = expected_revenue(&b, 0.3, &s, TieRule::NoSaleAtReserve).unwrap();
        assert_eq!(sale, none);
    }

    #[test]
    fn left_limits() {
        let b = Distribution::binary(0.2, 1.0, 0.4).unwrap();
        assert_eq!(b.cdf_left(0.2), 0.0);
        assert_eq!(b.cdf(0.2), 0.4);
        let d = Distribution::discrete(vec![0.0, 0.5, 1.0], vec![0.2, 0.7, 1.0]).unwrap();
        assert_eq!(d.cdf_left(0.5), 0.2);
        assert_eq!(d.cdf(0.5), 0.7);
        assert_eq!(d.cdf(0.75), 0.7);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(Distribution::binary(1.0, 0.5, 0.5).is_err());
        assert!(Distribution::binary(0.0, 1.0, 1.5).is_err());
        assert!(Distribution::atom_uniform(1.0, 0.5, 0.5, 2.0).is_err());
        assert!(Distribution::discrete(vec![0.0, 0.0], vec![0.5, 1.0]).is_err());
        assert!(Distribution::discrete(vec![0.0, 1.0], vec![0.6, 0.5]).is_err());
        assert!(Distribution::discrete(vec![0.0, 1.0], vec![0.5, 0.9]).is_err());
    }

    #[test]
    fn setting_validation() {
        assert!(AuctionSetting::bounded(1, 0.0, 0.5, 1.0).is_err());
        assert!(AuctionSetting::bounded(2, 0.5, 0.5, 1.0).is_err());
        assert!(AuctionSetting::bounded(2, 0.0, 0.5, 0.5).is_err());
        assert!(AuctionSetting::variance(2, 0.0, 1.0, 0.0).is_err());
        assert!(AuctionSetting::variance(2, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn json_uses_type_tags() {
        let b = Distribution::binary(0.25, 1.0, 0.5).unwrap();
        let text = b.to_json().unwrap();
        assert_eq!(text, r#"{"type":"binary","low":0.25,"high":1.0,"p_low":0.5}"#);
        assert_eq!(Distribution::from_json(&text).unwrap(), b);
        assert!(Distribution::from_json(r#"{"type":"binary","low":1,"high":0,"p_low":0.5}"#).is_err());
    }

    #[test]
    fn expected_max_under_point_mass_is_the_mean() {
        let p = Distribution::point(0.7).unwrap();
        for n in 2..8 {
            assert!((expected_max_value(&p, n).unwrap() - 0.7).abs() < 1e-15);
        }
    }
}
