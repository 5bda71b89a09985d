//! Known mean and an upper bound on the variance.
//!
//! Worst cases and threats come from the family `G_rho`: an atom of mass `q`
//! at `rho` followed by a continuous tail with quantile function
//!
//! ```text
//! G^{-1}(u) = (n(n-1) z(u) - lambda1) / (2 lambda2),   u in [q, 1].
//! ```
//!
//! The triple `(lambda1, lambda2, q)` is pinned by the mean and variance
//! constraints. Everything reduces to integrals of polynomials in the cdf
//! level, which are evaluated exactly.
//!
//! The variance bound is an inequality, but every constructed distribution
//! binds it, so the same results hold when the variance is known exactly.

use serde::{Deserialize, Serialize};

use crate::asymptotics::alpha_n;
use crate::bounded::{is_unique, q_star, z, z_prime, PriceSet};
use crate::dist::{expected_revenue, tail_quantile, tail_slope, AuctionSetting, Constraint, Distribution, TieRule};
use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

/// Smallest tail mass `1 - q` the solvers will work with.
pub const MIN_TAIL_MASS: f64 = 1e-9;

/// Parameters of one member of the `G_rho` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GParams {
    pub rho: f64,
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub n: u32,
    pub m: f64,
    pub sigma: f64,
}

impl GParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        if self.n < 2 {
            return bad(format!("g_tail needs n >= 2, got {}", self.n));
        }
        let finite = [self.rho, self.q, self.lambda1, self.lambda2, self.m, self.sigma]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.rho < 0.0 || self.sigma <= 0.0 || self.rho >= self.m {
            return bad(format!("g_tail fields out of range: {self:?}"));
        }
        if !(self.q >= q_star(self.n) - 1e-12 && self.q < 1.0) {
            return bad(format!("g_tail atom mass {} outside [q*, 1)", self.q));
        }
        if !(self.lambda1 < 0.0 && self.lambda2 > 0.0) {
            return bad(format!("g_tail needs lambda1 < 0 < lambda2: {self:?}"));
        }
        let nn1 = (self.n * (self.n - 1)) as f64;
        let lhs = self.lambda1 + 2.0 * self.lambda2 * self.rho;
        if (lhs - nn1 * z(self.q, self.n)).abs() > 1e-9 * self.lambda1.abs().max(1.0) {
            return bad(format!("g_tail quantile does not start at rho: {self:?}"));
        }
        Ok(())
    }

    /// Quantile map on `[q, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        tail_quantile(u, self.n, self.lambda1, self.lambda2)
    }

    pub fn quantile_slope(&self, u: f64) -> f64 {
        tail_slope(u, self.n, self.lambda2)
    }

    /// Upper end of the support.
    pub fn top(&self) -> f64 {
        -self.lambda1 / (2.0 * self.lambda2)
    }

    pub fn cdf(&self, v: f64) -> f64 {
        if v < self.rho {
            return 0.0;
        }
        if v >= self.top() {
            return 1.0;
        }
        if self.quantile(self.q) >= v {
            return self.q;
        }
        bisect_increasing(|u| self.quantile(u) - v, self.q, 1.0, 1e-16)
    }
}

/// Binomial pmf of `k` successes in `trials` draws with success rate `l`.
fn binomial_pmf(trials: u32, l: f64) -> Vec<f64> {
    let mut out = vec![0.0; trials as usize + 1];
    if l >= 1.0 {
        out[trials as usize] = 1.0;
        return out;
    }
    let ln_l = l.ln();
    let ln_q = (-l).ln_1p();
    let mut ln_choose = 0.0;
    for k in 0..=trials {
        if k > 0 {
            ln_choose += ((trials - k + 1) as f64 / k as f64).ln();
        }
        out[k as usize] = (ln_choose + k as f64 * ln_l + (trials - k) as f64 * ln_q).exp();
    }
    out
}

/// `(∫_q^1 (z(y) - z(q)) dy, ∫_q^1 (z(y) - z(q))^2 dy)` in terms of `l = 1 - q`.
///
/// With `y = q + l w`, `y^N` expands into binomial probabilities in `w`, so
/// `z(y) - z(q) = Σ_{k>=1} b_k w^k` with nonnegative-sum coefficients.
fn tail_integrals(l: f64, n: u32) -> (f64, f64) {
    let upper = binomial_pmf(n - 1, l);
    let lower = binomial_pmf(n - 2, l);
    let coeffs: Vec<(f64, f64)> = (1..upper.len())
        .map(|k| (k as f64, upper[k] - lower.get(k).copied().unwrap_or(0.0)))
        .filter(|&(_, b)| b != 0.0)
        .collect();
    let i1 = l * coeffs.iter().map(|&(k, b)| b / (k + 1.0)).sum::<f64>();
    let mut i2 = 0.0;
    for &(j, bj) in &coeffs {
        for &(k, bk) in &coeffs {
            i2 += bj * bk / (j + k + 1.0);
        }
    }
    (i1, l * i2)
}

fn phi_tail(l: f64, n: u32) -> f64 {
    let (i1, i2) = tail_integrals(l, n);
    i2 / (i1 * i1)
}

fn check_level(q: f64, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !(0.0..=1.0 - MIN_TAIL_MASS).contains(&q) {
        return Err(Error::QuantileDomain { q });
    }
    Ok(1.0 - q)
}

/// Ratio of the second tail integral to the squared first one.
pub fn phi(q: f64, n: u32) -> Result<f64> {
    Ok(phi_tail(check_level(q, n)?, n))
}

/// `phi(q) (1 - q)`.
pub fn psi(q: f64, n: u32) -> Result<f64> {
    let l = check_level(q, n)?;
    Ok(phi_tail(l, n) * l)
}

/// Derivative of [`phi`] in `q`.
pub fn phi_prime(q: f64, n: u32) -> Result<f64> {
    let l = check_level(q, n)?;
    let (i1, i2) = tail_integrals(l, n);
    Ok(2.0 * z_prime(q, n) * (l * i2 - i1 * i1) / (i1 * i1 * i1))
}

/// Lowest worst-case support point when `c` is ignored.
pub fn v_min_star2(m: f64, sigma: f64, n: u32) -> f64 {
    let l = 1.0 / ((n - 1) as f64).powi(2);
    (m - sigma / (phi_tail(l, n) - 1.0).sqrt()).max(0.0)
}

/// Largest atom location the solver accepts; the tail mass there is [`MIN_TAIL_MASS`].
pub fn rho_max(m: f64, sigma: f64, n: u32) -> f64 {
    m - sigma / (phi_tail(MIN_TAIL_MASS, n) - 1.0).sqrt()
}

/// Tail mass `1 - q(rho)` solving `phi(q) = 1 + sigma^2 / (m - rho)^2`.
fn solve_tail(rho: f64, m: f64, sigma: f64, n: u32) -> Result<f64> {
    let low = v_min_star2(m, sigma, n);
    let high = rho_max(m, sigma, n);
    let out_of_range = Err(Error::RhoOutOfRange { rho, low, high });
    if !(rho.is_finite() && rho >= 0.0 && rho < m) {
        return out_of_range;
    }
    let target = 1.0 + sigma * sigma / ((m - rho) * (m - rho));
    let l_star = 1.0 / ((n - 1) as f64).powi(2);
    let phi_star = phi_tail(l_star, n);
    if target <= phi_star * (1.0 + 1e-13) {
        if target >= phi_star * (1.0 - 1e-10) {
            return Ok(l_star);
        }
        return out_of_range;
    }
    if target > phi_tail(MIN_TAIL_MASS, n) {
        return out_of_range;
    }
    // phi decreases in the tail mass; bisect geometrically
    let (mut lo, mut hi) = (MIN_TAIL_MASS, l_star);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if phi_tail(mid, n) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Atom mass `q(rho)` of `G_rho`.
pub fn solve_q(rho: f64, m: f64, sigma: f64, n: u32) -> Result<f64> {
    Ok(1.0 - solve_tail(rho, m, sigma, n)?)
}

/// The triple `(lambda1, lambda2, q)` for atom location `rho`.
pub fn solve_g_params(rho: f64, m: f64, sigma: f64, n: u32) -> Result<GParams> {
    let l = solve_tail(rho, m, sigma, n)?;
    let (i1, i2) = tail_integrals(l, n);
    let nn1 = (n * (n - 1)) as f64;
    let two_l2 = nn1 * i1 / (m - rho);
    // z(q) = -q^{n-2} l, written to keep precision when l is tiny
    let z_q = -(1.0 - l).powi(n as i32 - 2) * l;
    let lambda1 = nn1 * z_q - two_l2 * rho;
    let lhs = nn1 * nn1 * i2;
    let rhs = two_l2 * two_l2 * ((m - rho).powi(2) + sigma * sigma);
    if (lhs - rhs).abs() > 1e-8 * rhs.abs() {
        return Err(Error::Numerical(format!(
            "variance equation residual {:e} at rho = {rho}",
            (lhs - rhs) / rhs
        )));
    }
    Ok(GParams {
        rho,
        q: 1.0 - l,
        lambda1,
        lambda2: 0.5 * two_l2,
        n,
        m,
        sigma,
    })
}

/// Distribution for a parameter triple; linear quantiles become uniform tails.
pub fn build_g(params: &GParams) -> Result<Distribution> {
    params.validate()?;
    if params.n == 2 {
        return Distribution::atom_uniform(params.rho, params.q, params.rho, params.top());
    }
    Ok(Distribution::AtomQuantileTail(*params))
}

fn variance_params(setting: &AuctionSetting) -> Result<(f64, f64)> {
    match setting.constraint() {
        Constraint::VarianceBound { mean, sigma } => Ok((mean, sigma)),
        _ => Err(Error::WrongConstraint("expected a variance-bound setting")),
    }
}

fn closed_form(g: &GParams, c: f64, tie: TieRule) -> f64 {
    let (n, q, r) = (g.n, g.q, g.rho);
    let qn = q.powi(n as i32);
    let second = g.m * g.m + g.sigma * g.sigma;
    let base =
        -g.lambda1 * (g.m - q * r) - 2.0 * g.lambda2 * (second - q * r * r) - n as f64 * z(q, n) * r * q + c * qn;
    match tie {
        TieRule::NoSaleAtReserve => base,
        TieRule::SaleAtReserve => base + (r - c) * qn,
    }
}

/// Revenue of `G_r` at reserve `r`; `SaleAtReserve` gives the limit from above.
pub fn revenue_g_closed(r: f64, setting: &AuctionSetting, tie: TieRule) -> Result<f64> {
    let (m, sigma) = variance_params(setting)?;
    let g = solve_g_params(r, m, sigma, setting.bidders())?;
    Ok(closed_form(&g, setting.cost(), tie))
}

/// Derivative of `R(G_r, r)` in `r`.
pub fn revenue_g_derivative(r: f64, setting: &AuctionSetting) -> Result<f64> {
    let (m, sigma) = variance_params(setting)?;
    let n = setting.bidders();
    let l = solve_tail(r, m, sigma, n)?;
    let q = 1.0 - l;
    let (i1, i2) = tail_integrals(l, n);
    let dphi = 2.0 * z_prime(q, n) * (l * i2 - i1 * i1) / (i1 * i1 * i1);
    let dq = 2.0 * sigma * sigma / (m - r).powi(3) / dphi;
    let nf = n as f64;
    Ok(nf * (nf - 2.0) * q * z(q, n) - nf * q.powi(n as i32 - 1) * dq * (r - setting.cost()))
}

/// Worst case at `r = c`: `G` at `max(v**, c)`.
pub fn worst_case_variance(setting: &AuctionSetting) -> Result<Distribution> {
    let (m, sigma) = variance_params(setting)?;
    let n = setting.bidders();
    let rho = v_min_star2(m, sigma, n).max(setting.cost());
    build_g(&solve_g_params(rho, m, sigma, n)?)
}

/// Threat distribution for reserve `r`.
///
/// Reserves between the solver's largest atom location and `m` reuse the
/// distribution at that location.
pub fn threat_variance(r: f64, setting: &AuctionSetting) -> Result<(Distribution, TieRule)> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("reserve must be >= 0, got {r}")));
    }
    let (m, sigma) = variance_params(setting)?;
    let n = setting.bidders();
    let c = setting.cost();
    let vs = v_min_star2(m, sigma, n);
    let g_at =
        |rho: f64| -> Result<Distribution> { build_g(&solve_g_params(rho.min(rho_max(m, sigma, n)), m, sigma, n)?) };
    let out = if r < vs {
        (g_at(vs)?, TieRule::NoSaleAtReserve)
    } else if r < c {
        (g_at(r)?, TieRule::SaleAtReserve)
    } else if r < m {
        (g_at(r)?, TieRule::NoSaleAtReserve)
    } else {
        (Distribution::point(m)?, TieRule::NoSaleAtReserve)
    };
    Ok(out)
}

pub fn threat_revenue_variance(r: f64, setting: &AuctionSetting) -> Result<f64> {
    let (dist, tie) = threat_variance(r, setting)?;
    expected_revenue(&dist, r, setting, tie)
}

/// Coefficient of `sigma` in the low-variance revenue guarantee `m - gamma_n sigma`.
pub fn gamma_n(n: u32) -> f64 {
    let l = 1.0 / ((n - 1) as f64).powi(2);
    let k2 = ((n - 1) as f64).powi(2);
    let psi = phi_tail(l, n) * l;
    alpha_n(n) * (k2 * psi - 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceSolution {
    pub v_min_star2: f64,
    pub worst_case: Distribution,
    pub params: GParams,
    pub maxmin_revenue: f64,
    /// Present when the lowest support point is not clamped at zero.
    pub gamma_n: Option<f64>,
    pub price_set: PriceSet,
    pub unique: bool,
}

pub fn maxmin_variance(setting: &AuctionSetting) -> Result<VarianceSolution> {
    let (m, sigma) = variance_params(setting)?;
    let n = setting.bidders();
    let c = setting.cost();
    let vs = v_min_star2(m, sigma, n);
    let params = solve_g_params(vs.max(c), m, sigma, n)?;
    let worst_case = build_g(&params)?;
    // revenue at reserve c equals the atom-location revenue with sale at the atom
    let maxmin_revenue = closed_form(&params, c, TieRule::SaleAtReserve);
    let gamma = (vs > 0.0).then(|| gamma_n(n));
    if let Some(g) = gamma {
        if c <= vs {
            let shortcut = m - g * sigma;
            if (shortcut - maxmin_revenue).abs() > 1e-9 * m.max(1.0) {
                return Err(Error::Numerical(format!(
                    "low-variance revenue {maxmin_revenue} disagrees with m - gamma sigma = {shortcut}"
                )));
            }
        }
    }
    let unique = is_unique(vs, c);
    Ok(VarianceSolution {
        v_min_star2: vs,
        worst_case,
        params,
        maxmin_revenue,
        gamma_n: gamma,
        price_set: PriceSet::for_cost(c, unique),
        unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn unit(n: u32, c: f64) -> AuctionSetting {
        AuctionSetting::variance(n, c, 1.0, 1.0).unwrap()
    }

    #[test]
    fn phi_and_psi_values() {
        assert_relative_eq!(phi(0.0, 2).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(phi(0.75, 3).unwrap(), 5.7, max_relative = 1e-13);
        assert_relative_eq!(phi(0.5, 2).unwrap(), 8.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(phi(8.0 / 9.0, 4).unwrap(), 223504.0 / 17745.0, max_relative = 1e-12);
        assert_relative_eq!(
            phi(15.0 / 16.0, 5).unwrap(),
            1345840525.0 / 60752412.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(psi(0.0, 2).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(psi(0.75, 3).unwrap(), 1.425, max_relative = 1e-13);
        assert_relative_eq!(psi(0.5, 2).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn phi_domain_guard() {
        assert!(matches!(phi(1.0 - 1e-10, 3), Err(Error::QuantileDomain { .. })));
        assert!(phi(1.0, 2).is_err());
        assert!(phi(-0.1, 2).is_err());
    }

    #[test]
    fn phi_prime_matches_differences() {
        for n in 2..7 {
            for &q in &[0.3f64, 0.8, 0.95, 0.999] {
                let q = q.max(q_star(n));
                let h = 1e-6 * (1.0 - q);
                let fd = (phi(q + h, n).unwrap() - phi(q - h, n).unwrap()) / (2.0 * h);
                assert_relative_eq!(phi_prime(q, n).unwrap(), fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn v_min_star2_examples() {
        assert_abs_diff_eq!(v_min_star2(5.0, 1.0, 2), 5.0 - 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(v_min_star2(1.0, 1.0, 2), 0.0);
        assert_abs_diff_eq!(v_min_star2(1.0, 0.2, 3), 1.0 - 0.2 / 4.7f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn solve_q_examples() {
        assert_abs_diff_eq!(solve_q(0.5, 1.0, 1.0, 2).unwrap(), 11.0 / 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solve_q(0.0, 1.0, 1.0, 2).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let vs = v_min_star2(1.0, 0.2, 3);
        assert_eq!(solve_q(vs, 1.0, 0.2, 3).unwrap(), 0.75);
        assert!(matches!(solve_q(0.5, 1.0, 0.2, 3), Err(Error::RhoOutOfRange { .. })));
        assert!(matches!(solve_q(1.0, 1.0, 1.0, 2), Err(Error::RhoOutOfRange { .. })));
    }

    #[test]
    fn g_params_examples() {
        let g = solve_g_params(0.0, 1.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(g.q, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.lambda2, 2.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.lambda1, -4.0 / 3.0, epsilon = 1e-12);
        let g = solve_g_params(0.5, 1.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(g.top(), 4.25, epsilon = 1e-10);
        let g = solve_g_params(v_min_star2(1.0, 1.0, 3), 1.0, 1.0, 3).unwrap();
        assert_eq!(g.q, 0.75);
        assert_abs_diff_eq!(g.lambda1, -1.27099354235848499, epsilon = 1e-12);
        assert_abs_diff_eq!(g.lambda2, 0.135496771179242496, epsilon = 1e-12);
        assert_abs_diff_eq!(g.top(), 4.69012483211554033, epsilon = 1e-10);
    }

    #[test]
    fn two_bidder_closed_forms() {
        let (m, sigma) = (1.3, 0.9);
        let vs = v_min_star2(m, sigma, 2);
        for i in 0..20 {
            let r = vs + (m - 0.05 - vs) * i as f64 / 19.0;
            let d2 = (m - r) * (m - r);
            let q = (sigma * sigma - d2 / 3.0) / (sigma * sigma + d2);
            let b = 0.5 * (3.0 * m - r) + 1.5 * sigma * sigma / (m - r);
            let g = solve_g_params(r, m, sigma, 2).unwrap();
            assert_abs_diff_eq!(g.q, q, epsilon = 1e-10);
            assert_abs_diff_eq!(g.top(), b, epsilon = 1e-10);
        }
    }

    #[test]
    fn build_g_examples() {
        let g = solve_g_params(0.5, 1.0, 1.0, 2).unwrap();
        match build_g(&g).unwrap() {
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                assert_eq!(atom_point, 0.5);
                assert_eq!(tail_low, 0.5);
                assert_abs_diff_eq!(atom_mass, 11.0 / 15.0, epsilon = 1e-12);
                assert_abs_diff_eq!(tail_high, 4.25, epsilon = 1e-10);
            }
            other => panic!("{other:?}"),
        }
        let vs = v_min_star2(1.0, 0.2, 3);
        let g = solve_g_params(vs, 1.0, 0.2, 3).unwrap();
        assert_eq!(g.q, 0.75);
        assert!(matches!(build_g(&g).unwrap(), Distribution::AtomQuantileTail(_)));
    }

    #[test]
    fn quantile_starts_at_atom() {
        for n in 2..7 {
            let vs = v_min_star2(2.0, 0.7, n);
            for i in 0..10 {
                let rho = vs + (1.9 - vs) * i as f64 / 9.0;
                let g = solve_g_params(rho, 2.0, 0.7, n).unwrap();
                assert_abs_diff_eq!(g.quantile(g.q), rho, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn closed_revenue_examples() {
        assert_abs_diff_eq!(
            revenue_g_closed(0.0, &unit(2, 0.0), TieRule::NoSaleAtReserve).unwrap(),
            4.0 / 9.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            revenue_g_closed(0.5, &unit(2, 0.0), TieRule::SaleAtReserve).unwrap(),
            0.32 + 0.5 * (11.0f64 / 15.0).powi(2),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            revenue_g_closed(0.5, &unit(2, 0.0), TieRule::NoSaleAtReserve).unwrap(),
            0.32,
            epsilon = 1e-10
        );
    }

    #[test]
    fn closed_revenue_tends_to_cost_near_mean() {
        let s = AuctionSetting::variance(3, 0.3, 1.0, 1.0).unwrap();
        let near = revenue_g_closed(1.0 - 1e-3, &s, TieRule::NoSaleAtReserve).unwrap();
        let nearer = revenue_g_closed(1.0 - 1e-4, &s, TieRule::NoSaleAtReserve).unwrap();
        assert!((nearer - 0.3).abs() < (near - 0.3).abs());
        assert!((nearer - 0.3).abs() < 1e-2);
    }

    #[test]
    fn closed_matches_quadrature() {
        for n in 2..7 {
            for &c in &[0.0, 0.35] {
                let s = AuctionSetting::variance(n, c, 1.0, 0.6).unwrap();
                let vs = v_min_star2(1.0, 0.6, n);
                for i in 0..8 {
                    let r = vs + (0.97 - vs) * i as f64 / 7.0;
                    let g = solve_g_params(r, 1.0, 0.6, n).unwrap();
                    let d = build_g(&g).unwrap();
                    for tie in [TieRule::NoSaleAtReserve, TieRule::SaleAtReserve] {
                        let quad = expected_revenue(&d, r, &s, tie).unwrap();
                        let closed = revenue_g_closed(r, &s, tie).unwrap();
                        assert_abs_diff_eq!(quad, closed, epsilon = 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_examples() {
        assert_abs_diff_eq!(revenue_g_derivative(0.2, &unit(2, 0.2)).unwrap(), 0.0, epsilon = 1e-15);
        let s = unit(3, 0.1);
        for &r in &[0.6, 0.75, 0.9] {
            assert!(revenue_g_derivative(r, &s).unwrap() < 0.0);
        }
        let s = unit(2, 0.0);
        let h = 1e-5;
        let fd = (revenue_g_closed(0.5 + h, &s, TieRule::NoSaleAtReserve).unwrap()
            - revenue_g_closed(0.5 - h, &s, TieRule::NoSaleAtReserve).unwrap())
            / (2.0 * h);
        assert_relative_eq!(revenue_g_derivative(0.5, &s).unwrap(), fd, max_relative = 1e-4);
    }

    #[test]
    fn worst_case_examples() {
        match worst_case_variance(&unit(2, 0.0)).unwrap() {
            Distribution::AtomUniformTail {
                atom_point,
                atom_mass,
                tail_low,
                tail_high,
            } => {
                assert_eq!((atom_point, tail_low), (0.0, 0.0));
                assert_abs_diff_eq!(atom_mass, 1.0 / 3.0, epsilon = 1e-12);
                assert_abs_diff_eq!(tail_high, 3.0, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let s = AuctionSetting::variance(2, 0.0, 1.0, 0.2).unwrap();
        match worst_case_variance(&s).unwrap() {
            Distribution::AtomUniformTail {
                atom_mass,
                tail_low,
                tail_high,
                ..
            } => {
                let w = 3f64.sqrt() * 0.2;
                assert_abs_diff_eq!(atom_mass, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(tail_low, 1.0 - w, epsilon = 1e-12);
                assert_abs_diff_eq!(tail_high, 1.0 + w, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let s = AuctionSetting::variance(3, 0.6, 1.0, 1.0).unwrap();
        let (lo, _) = worst_case_variance(&s).unwrap().support();
        assert_eq!(lo, 0.6);
    }

    #[test]
    fn threat_branches() {
        let s = AuctionSetting::variance(3, 0.95, 1.0, 0.2).unwrap();
        let vs = v_min_star2(1.0, 0.2, 3);
        let (d, tie) = threat_variance(0.1, &s).unwrap();
        assert_eq!(tie, TieRule::NoSaleAtReserve);
        assert_eq!(d.support().0, vs);
        let (d, tie) = threat_variance(0.93, &s).unwrap();
        assert_eq!((d.support().0, tie), (0.93, TieRule::SaleAtReserve));
        let (d, tie) = threat_variance(0.97, &s).unwrap();
        assert_eq!((d.support().0, tie), (0.97, TieRule::NoSaleAtReserve));
        assert_eq!(threat_variance(1.5, &s).unwrap().0, Distribution::PointMass { a: 1.0 });
    }

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(gamma_n(2), 3f64.sqrt() / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_n(3), 470f64.sqrt() / 80.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_n(4), 0.18217068742240214294, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma_n(5), 0.13783078940514758090, epsilon = 1e-12);
        for n in 2..40 {
            assert!(gamma_n(n + 1) < gamma_n(n));
        }
    }

    #[test]
    fn maxmin_examples() {
        let sol = maxmin_variance(&unit(2, 0.0)).unwrap();
        assert_abs_diff_eq!(sol.maxmin_revenue, 4.0 / 9.0, epsilon = 1e-12);
        assert!(sol.unique && sol.gamma_n.is_none());
        let s = AuctionSetting::variance(2, 0.0, 1.0, 0.2).unwrap();
        let sol = maxmin_variance(&s).unwrap();
        assert_abs_diff_eq!(sol.maxmin_revenue, 1.0 - 0.2 * 3f64.sqrt() / 3.0, epsilon = 1e-12);
        let s = AuctionSetting::variance(3, 0.0, 1.0, 0.5).unwrap();
        let sol = maxmin_variance(&s).unwrap();
        assert_abs_diff_eq!(sol.maxmin_revenue, 0.8645, epsilon = 2e-4);
        assert_abs_diff_eq!(sol.maxmin_revenue, 1.0 - gamma_n(3) * 0.5, epsilon = 1e-10);
        assert!(!sol.unique);
    }

    #[test]
    fn threat_never_beats_maxmin() {
        for &(n, c, sigma) in &[
            (2, 0.0, 1.0),
            (3, 0.0, 0.2),
            (3, 0.95, 0.2),
            (4, 0.3, 0.5),
            (3, 0.5, 1.0),
        ] {
            let s = AuctionSetting::variance(n, c, 1.0, sigma).unwrap();
            let sol = maxmin_variance(&s).unwrap();
            for i in 0..=240 {
                let r = 1.5 * i as f64 / 240.0;
                let rev = threat_revenue_variance(r, &s).unwrap();
                assert!(
                    rev <= sol.maxmin_revenue + 1e-9,
                    "n={n} c={c} r={r}: {rev} > {}",
                    sol.maxmin_revenue
                );
                if r < sol.v_min_star2 && c <= sol.v_min_star2 {
                    assert_abs_diff_eq!(rev, sol.maxmin_revenue, epsilon = 1e-9);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn g_family_binds_both_moments(
            n in 2u32..7,
            m in 0.2f64..5.0,
            ratio in 0.05f64..3.0,
            frac in 0.0f64..0.999,
        ) {
            let sigma = ratio * m;
            let vs = v_min_star2(m, sigma, n);
            let rho = vs + (m - vs) * frac;
            prop_assume!(rho <= rho_max(m, sigma, n));
            let g = solve_g_params(rho, m, sigma, n).unwrap();
            let (mean, var) = build_g(&g).unwrap().moments().unwrap();
            prop_assert!((mean - m).abs() < 1e-8 * m.max(1.0));
            prop_assert!((var - sigma * sigma).abs() < 1e-8 * (sigma * sigma).max(1.0));
        }

        #[test]
        fn phi_is_strictly_increasing(n in 2u32..7, t in 0.0f64..1.0) {
            let lo = q_star(n);
            let q = lo + (1.0 - 1e-6 - lo) * t;
            let h = 1e-9_f64.max(1e-6 * (1.0 - q));
            prop_assume!(q + h <= 1.0 - 1e-6);
            prop_assert!(phi(q + h, n).unwrap() > phi(q, n).unwrap());
        }
    }
}
