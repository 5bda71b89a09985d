//! Inverse-cdf sampling and direct simulation of the auction.
//!
//! Draws are split into fixed chunks of [`CHUNK`] trials. Chunk `k` uses its
//! own ChaCha stream keyed by `(seed, k)`, so results do not depend on how
//! chunks are scheduled across threads.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{expected_revenue, AuctionSetting, Distribution, TieRule};
use crate::error::{Error, Result};

pub const CHUNK: usize = 4096;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_bounds(total: usize) -> Vec<(usize, usize)> {
    (0..total.div_ceil(CHUNK))
        .map(|k| (k, CHUNK.min(total - k * CHUNK)))
        .collect()
}

/// `count` iid draws from `dist`.
pub fn sample(dist: &Distribution, count: usize, seed: u64) -> Vec<f64> {
    chunk_bounds(count)
        .into_par_iter()
        .flat_map_iter(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            (0..len)
                .map(move |_| dist.quantile(rng.random::<f64>()))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Welford {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Seller revenue in one auction given the bidders' values.
fn auction_outcome(values: &mut [f64], r: f64, c: f64, tie: TieRule) -> f64 {
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in values.iter() {
        if v > first {
            second = first;
            first = v;
        } else if v > second {
            second = v;
        }
    }
    let sells = match tie {
        TieRule::NoSaleAtReserve => first > r,
        TieRule::SaleAtReserve => first >= r,
    };
    if sells {
        second.max(r)
    } else {
        c
    }
}

/// Sample mean and standard error of simulated revenue.
pub fn monte_carlo_revenue(
    dist: &Distribution,
    r: f64,
    setting: &AuctionSetting,
    tie: TieRule,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!("reserve must be >= 0, got {r}")));
    }
    let n = setting.bidders() as usize;
    let c = setting.cost();
    let parts: Vec<Welford> = chunk_bounds(samples)
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            let mut acc = Welford::default();
            let mut values = vec![0.0; n];
            for _ in 0..len {
                for v in values.iter_mut() {
                    *v = dist.quantile(rng.random::<f64>());
                }
                acc.push(auction_outcome(&mut values, r, c, tie));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Welford::default(), Welford::merge);
    let sd = (total.m2 / (total.count - 1.0)).max(0.0).sqrt();
    Ok((total.mean, sd / total.count.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevenueReport {
    pub analytic: Option<f64>,
    pub quadrature: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Revenue by quadrature and by simulation, with an optional closed-form value.
pub fn revenue_report(
    dist: &Distribution,
    r: f64,
    setting: &AuctionSetting,
    tie: TieRule,
    samples: usize,
    seed: u64,
    analytic: Option<f64>,
) -> Result<RevenueReport> {
    let quadrature = expected_revenue(dist, r, setting, tie)?;
    let (mc_estimate, mc_stderr) = monte_carlo_revenue(dist, r, setting, tie, samples, seed)?;
    Ok(RevenueReport {
        analytic,
        quadrature,
        mc_estimate,
        mc_stderr,
        samples,
        seed,
    })
}
