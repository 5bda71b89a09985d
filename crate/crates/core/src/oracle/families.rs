//! Low-dimensional distribution families with the moment constraints solved
//! in closed form, searched on a grid and polished by compass search.

use rayon::prelude::*;

use super::Family;
use crate::dist::{expected_revenue, AuctionSetting, Constraint, Distribution, TieRule};
use crate::numeric::linspace;

/// Everything a family needs to turn a parameter vector into a distribution.
pub(crate) struct Context<'a> {
    pub setting: &'a AuctionSetting,
    pub r: f64,
    pub tie: TieRule,
    /// Atom locations worth trying exactly.
    pub special_atoms: Vec<f64>,
    pub resolution: usize,
}

pub(crate) struct Found {
    pub revenue: f64,
    pub dist: Distribution,
    pub iterations: usize,
}

impl Context<'_> {
    fn mean(&self) -> f64 {
        self.setting.mean()
    }

    fn revenue(&self, d: &Distribution) -> f64 {
        expected_revenue(d, self.r, self.setting, self.tie).unwrap_or(f64::INFINITY)
    }

    /// Distribution for parameters `x = [a, u1, u2, ...]`, `a` the atom and `u` in `[0, 1]`.
    fn build(&self, family: Family, x: &[f64]) -> Option<Distribution> {
        let m = self.mean();
        let a = x[0];
        if !(a >= 0.0 && a < m) {
            return None;
        }
        let mu = m - a;
        match (family, self.setting.constraint()) {
            (Family::Binary, Constraint::Bounded { vmax, .. }) => {
                let b = m + x[1] * (vmax - m);
                Distribution::binary(a, b, (b - m) / (b - a)).ok()
            }
            (Family::Binary, Constraint::VarianceBound { sigma, .. }) => {
                let b = m + x[1] * sigma * sigma / mu;
                Distribution::binary(a, b, (b - m) / (b - a)).ok()
            }
            (Family::AtomPlusUniform, constraint) => {
                let d = match constraint {
                    Constraint::Bounded { vmax, .. } => 2.0 * mu + x[1] * (vmax - a - 2.0 * mu),
                    Constraint::VarianceBound { sigma, .. } => 1.5 * (x[1] * sigma * sigma + mu * mu) / mu,
                };
                if !(d >= 2.0 * mu && d > 0.0) {
                    return None;
                }
                Distribution::atom_uniform(a, 1.0 - 2.0 * mu / d, a, a + d).ok()
            }
            (Family::AtomPlusGapUniform, constraint) => {
                let (d1, d2) = match constraint {
                    Constraint::Bounded { vmax, .. } => {
                        let d2 = x[2] * (vmax - a);
                        (x[1] * d2, d2)
                    }
                    Constraint::VarianceBound { sigma, .. } => {
                        // second moment about a is k * mu, with the variance at t * sigma^2
                        let k = (x[2] * sigma * sigma + mu * mu) / mu;
                        let d1 = x[1] * 1.5 * k;
                        let disc = -12.0 * d1 * d1 + 12.0 * k * d1 + 9.0 * k * k;
                        if disc < 0.0 {
                            return None;
                        }
                        (d1, (3.0 * k - 2.0 * d1 + disc.sqrt()) / 4.0)
                    }
                };
                if !(d2 > d1 && d1 + d2 >= 2.0 * mu) {
                    return None;
                }
                Distribution::atom_uniform(a, 1.0 - 2.0 * mu / (d1 + d2), a + d1, a + d2).ok()
            }
            (Family::PointMass, _) => Distribution::point(m).ok(),
            (Family::DiscretizedCdf, _) => None,
        }
    }

    fn dims(family: Family) -> usize {
        match family {
            Family::Binary | Family::AtomPlusUniform => 2,
            Family::AtomPlusGapUniform => 3,
            Family::PointMass | Family::DiscretizedCdf => 0,
        }
    }

    fn atom_grid(&self, count: usize) -> Vec<f64> {
        let m = self.mean();
        let mut out: Vec<f64> = linspace(0.0, m, count + 1);
        out.pop();
        out.extend(self.special_atoms.iter().copied().filter(|&a| a >= 0.0 && a < m));
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn value(&self, family: Family, x: &[f64]) -> f64 {
        self.build(family, x).map_or(f64::INFINITY, |d| self.revenue(&d))
    }

    /// Coordinate-wise pattern search inside the parameter box.
    fn compass(&self, family: Family, mut x: Vec<f64>, mut best: f64, mut steps: Vec<f64>) -> (Vec<f64>, f64, usize) {
        let m = self.mean();
        let upper = |i: usize| if i == 0 { m * (1.0 - 1e-12) } else { 1.0 };
        let mut iterations = 0;
        while iterations < 4000 && steps.iter().any(|&s| s > 1e-13) {
            iterations += 1;
            let mut improved = false;
            for i in 0..x.len() {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[i] = (y[i] + sign * steps[i]).clamp(0.0, upper(i));
                    let v = self.value(family, &y);
                    if v < best {
                        best = v;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                for s in &mut steps {
                    *s *= 0.5;
                }
            }
        }
        (x, best, iterations)
    }

    pub fn search(&self, family: Family) -> Option<Found> {
        if family == Family::PointMass {
            let dist = self.build(family, &[0.0])?;
            return Some(Found {
                revenue: self.revenue(&dist),
                dist,
                iterations: 1,
            });
        }
        let dims = Self::dims(family);
        let (atoms, inner) = match dims {
            2 => (
                self.atom_grid(4 * self.resolution),
                linspace(0.0, 1.0, 4 * self.resolution + 1),
            ),
            _ => (self.atom_grid(self.resolution), linspace(0.0, 1.0, self.resolution + 1)),
        };
        let grid: Vec<Vec<f64>> = atoms
            .iter()
            .flat_map(|&a| {
                let inner = &inner;
                inner.iter().flat_map(move |&u1| {
                    if dims == 2 {
                        vec![vec![a, u1]]
                    } else {
                        inner.iter().map(|&u2| vec![a, u1, u2]).collect()
                    }
                })
            })
            .collect();
        let values: Vec<f64> = grid.par_iter().map(|x| self.value(family, x)).collect();
        let mut order: Vec<usize> = (0..grid.len()).filter(|&i| values[i].is_finite()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let seeds: Vec<usize> = order.into_iter().take(6).collect();
        let a_step = self.mean() / atoms.len() as f64;
        let u_step = 1.0 / (inner.len() - 1) as f64;
        let polished: Vec<(Vec<f64>, f64, usize)> = seeds
            .par_iter()
            .map(|&i| {
                let mut steps = vec![u_step; dims];
                steps[0] = a_step;
                self.compass(family, grid[i].clone(), values[i], steps)
            })
            .collect();
        let iterations = grid.len() + polished.iter().map(|p| p.2).sum::<usize>();
        let (x, revenue, _) = polished.into_iter().min_by(|a, b| a.1.total_cmp(&b.1))?;
        Some(Found {
            revenue,
            dist: self.build(family, &x)?,
            iterations,
        })
    }
}
