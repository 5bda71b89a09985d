//! Projected-gradient search over step cdfs on a fixed value grid.
//!
//! Decision variables are the survival levels `s_j = 1 - F` on each grid cell.
//! The mean is `Σ Δ_j s_j` and the second moment `Σ Δ_j (v_j + v_{j+1}) s_j`,
//! both linear, so feasibility is a monotone box with one equality and at
//! most one inequality. Projection in the `Δ`-weighted norm reduces to
//! isotonic regression of a shifted point followed by clipping, with the two
//! multipliers found by one-dimensional root finding.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::isotonic::pav_nonincreasing;
use crate::bounded::z;
use crate::dist::{Distribution, TieRule};

pub(crate) struct Problem {
    pub grid: Vec<f64>,
    delta: Vec<f64>,
    width: Vec<f64>,
    reserve_idx: usize,
    r: f64,
    c: f64,
    n: u32,
    tie: TieRule,
    mean: f64,
    second_moment: Option<f64>,
}

pub(crate) struct Outcome {
    pub dist: Distribution,
    pub iterations: usize,
}

impl Problem {
    /// `None` when the reserve is at or beyond the top of the grid.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid_size: usize,
        grid_max: f64,
        r: f64,
        c: f64,
        n: u32,
        tie: TieRule,
        mean: f64,
        second_moment: Option<f64>,
    ) -> Option<Self> {
        if r >= grid_max {
            return None;
        }
        let mut grid = crate::numeric::linspace(0.0, grid_max, grid_size);
        grid.extend([r, c]);
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * grid_max);
        let reserve_idx = grid.iter().position(|&v| (v - r).abs() <= 1e-12 * grid_max)?;
        grid[reserve_idx] = r;
        let delta: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
        let width: Vec<f64> = grid.windows(2).map(|w| w[1] + w[0]).collect();
        Some(Problem {
            grid,
            delta,
            width,
            reserve_idx,
            r,
            c,
            n,
            tie,
            mean,
            second_moment,
        })
    }

    fn tie_idx(&self) -> Option<usize> {
        match self.tie {
            TieRule::NoSaleAtReserve => Some(self.reserve_idx),
            TieRule::SaleAtReserve => self.reserve_idx.checked_sub(1),
        }
    }

    fn revenue(&self, s: &[f64]) -> f64 {
        let n = self.n as i32;
        let f_r = self.tie_idx().map_or(0.0, |j| 1.0 - s[j]);
        let mut tail = 0.0;
        for j in self.reserve_idx..s.len() {
            let f = 1.0 - s[j];
            tail += self.delta[j] * (1.0 - self.n as f64 * f.powi(n - 1) + (n - 1) as f64 * f.powi(n));
        }
        self.r - (self.r - self.c) * f_r.powi(n) + tail
    }

    /// Gradient with respect to `s` in the `Δ`-weighted inner product.
    fn gradient(&self, s: &[f64]) -> Vec<f64> {
        let nn1 = (self.n * (self.n - 1)) as f64;
        let mut g = vec![0.0; s.len()];
        for j in self.reserve_idx..s.len() {
            g[j] = -nn1 * z(1.0 - s[j], self.n);
        }
        if let Some(j) = self.tie_idx() {
            let f = 1.0 - s[j];
            g[j] += (self.r - self.c) * self.n as f64 * f.powi(self.n as i32 - 1) / self.delta[j];
        }
        g
    }

    fn first_moment(&self, s: &[f64]) -> f64 {
        s.iter().zip(&self.delta).map(|(a, b)| a * b).sum()
    }

    fn second(&self, s: &[f64]) -> f64 {
        s.iter()
            .zip(&self.delta)
            .zip(&self.width)
            .map(|((a, d), w)| a * d * w)
            .sum()
    }

    fn project_with(&self, x: &[f64], mu: f64, nu: f64) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&self.width).map(|(xi, w)| xi - mu - nu * w).collect();
        let mut s = pav_nonincreasing(&y, &self.delta);
        for v in &mut s {
            *v = v.clamp(0.0, 1.0);
        }
        s
    }

    /// Mean-matching shift for a given second-moment multiplier.
    fn solve_mu(&self, x: &[f64], nu: f64, guess: f64) -> (f64, Vec<f64>) {
        let f = |mu: f64| {
            let s = self.project_with(x, mu, nu);
            (self.first_moment(&s) - self.mean, s)
        };
        solve_decreasing(f, guess, 1.0, 1e-14 * self.mean.max(1.0))
    }

    /// Weighted projection onto the feasible set; `warm` carries multipliers between calls.
    fn project(&self, x: &[f64], warm: &mut (f64, f64)) -> Vec<f64> {
        let (mu, s) = self.solve_mu(x, 0.0, warm.0);
        let Some(limit) = self.second_moment else {
            warm.0 = mu;
            return s;
        };
        if self.second(&s) <= limit {
            *warm = (mu, 0.0);
            return s;
        }
        let mut mu_cache = mu;
        let f = |nu: f64| {
            let (m, s) = self.solve_mu(x, nu.max(0.0), mu_cache);
            mu_cache = m;
            (self.second(&s) - limit, (m, s))
        };
        let guess = if warm.1 > 0.0 { warm.1 } else { 1e-3 };
        let (nu, (mu, s)) = solve_decreasing_positive(f, guess, 1e-13 * limit);
        *warm = (mu, nu);
        s
    }

    fn norm_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.delta)
            .map(|((x, y), d)| d * (x - y).powi(2))
            .sum()
    }

    fn descend(&self, start: Vec<f64>, max_iterations: usize, tolerance: f64) -> (Vec<f64>, f64, usize) {
        let mut warm = (0.0, 0.0);
        let mut s = self.project(&start, &mut warm);
        let mut value = self.revenue(&s);
        let mut step: f64 = 1.0;
        let mut quiet = 0;
        let mut iterations = 0;
        for it in 0..max_iterations {
            iterations = it + 1;
            let g = self.gradient(&s);
            let mut accepted = None;
            for _ in 0..40 {
                let x: Vec<f64> = s.iter().zip(&g).map(|(a, b)| a - step * b).collect();
                let cand = self.project(&x, &mut warm);
                let cand_value = self.revenue(&cand);
                let moved = self.norm_sq(&cand, &s);
                if cand_value <= value - 1e-4 * moved / step {
                    accepted = Some((cand, cand_value));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, cand_value)) = accepted else { break };
            let gain = value - cand_value;
            s = cand;
            value = cand_value;
            step = (step * 2.0).min(1e6);
            quiet = if gain < 1e-3 * tolerance { quiet + 1 } else { 0 };
            if quiet >= 5 {
                break;
            }
        }
        (s, value, iterations)
    }

    fn to_distribution(&self, s: &[f64]) -> Option<Distribution> {
        let mut cdf: Vec<f64> = s.iter().map(|v| 1.0 - v).collect();
        cdf.push(1.0);
        Distribution::discrete(self.grid.clone(), cdf).ok()
    }

    /// Survival levels of `dist` on this grid, as a starting point.
    pub fn levels_of(&self, dist: &Distribution) -> Vec<f64> {
        self.grid[..self.delta.len()]
            .iter()
            .map(|&v| 1.0 - dist.cdf(v))
            .collect()
    }

    /// Best of `starts` random starts plus the given warm starts.
    pub fn solve(
        &self,
        starts: usize,
        warm_starts: Vec<Vec<f64>>,
        seed: u64,
        max_iterations: usize,
        tolerance: f64,
    ) -> Option<Outcome> {
        let cells = self.delta.len();
        let mut inits: Vec<Vec<f64>> = (0..starts)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let mut start: Vec<f64> = (0..cells).map(|_| rng.random::<f64>()).collect();
                start.sort_by(|a, b| b.total_cmp(a));
                start
            })
            .collect();
        inits.extend(warm_starts);
        let runs: Vec<(Vec<f64>, f64, usize)> = inits
            .into_par_iter()
            .map(|start| self.descend(start, max_iterations, tolerance))
            .collect();
        let total_iterations = runs.iter().map(|r| r.2).sum();
        let best = runs
            .into_iter()
            .enumerate()
            .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))?
            .1;
        Some(Outcome {
            dist: self.to_distribution(&best.0)?,
            iterations: total_iterations,
        })
    }
}

/// Root of a nonincreasing function, expanding a bracket from `guess`.
///
/// The closure also returns a payload, which is handed back for the final point.
fn solve_decreasing<T, F>(mut f: F, guess: f64, scale: f64, tol: f64) -> (f64, T)
where
    F: FnMut(f64) -> (f64, T),
{
    let (f0, p0) = f(guess);
    if f0 == 0.0 {
        return (guess, p0);
    }
    // march away from the guess until the sign flips
    let dir = if f0 > 0.0 { 1.0 } else { -1.0 };
    let (mut a, mut fa, mut pa) = (guess, f0, p0);
    let mut width = scale * 1e-3;
    loop {
        let b = guess + dir * width;
        let (fb, pb) = f(b);
        if fb == 0.0 {
            return (b, pb);
        }
        if fb.signum() != fa.signum() {
            return illinois(f, (a, fa, pa), (b, fb, pb), tol);
        }
        a = b;
        fa = fb;
        pa = pb;
        width *= 4.0;
        if width > 1e12 {
            return (a, pa);
        }
    }
}

fn solve_decreasing_positive<T, F>(mut f: F, guess: f64, tol: f64) -> (f64, T)
where
    F: FnMut(f64) -> (f64, T),
{
    let (mut lo, mut flo, mut plo) = {
        let (v, p) = f(0.0);
        (0.0, v, p)
    };
    let mut hi = guess;
    loop {
        let (v, p) = f(hi);
        if v <= 0.0 {
            return illinois(f, (lo, flo, plo), (hi, v, p), tol);
        }
        lo = hi;
        flo = v;
        plo = p;
        hi *= 4.0;
        if hi > 1e12 {
            return (lo, plo);
        }
    }
}

/// Regula falsi with the Illinois modification on a sign-changing bracket.
fn illinois<T, F>(mut f: F, a: (f64, f64, T), b: (f64, f64, T), tol: f64) -> (f64, T)
where
    F: FnMut(f64) -> (f64, T),
{
    let (mut xa, mut fa, mut pa) = a;
    let (mut xb, mut fb, mut pb) = b;
    let mut side = 0i8;
    for _ in 0..200 {
        let x = if fa != fb {
            (xa * fb - xb * fa) / (fb - fa)
        } else {
            0.5 * (xa + xb)
        };
        let x = if x.is_finite() && x > xa.min(xb) && x < xa.max(xb) {
            x
        } else {
            0.5 * (xa + xb)
        };
        let (fx, px) = f(x);
        if fx.abs() <= tol || (xb - xa).abs() <= 1e-15 * x.abs().max(1e-300) {
            return (x, px);
        }
        if fx.signum() == fb.signum() {
            xb = x;
            fb = fx;
            pb = px;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            xa = x;
            fa = fx;
            pa = px;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        (xa, pa)
    } else {
        (xb, pb)
    }
}
