use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_reserve::simulate::monte_carlo_revenue;
use robust_reserve::variance::{build_g, rho_max, solve_g_params, v_min_star2};
use robust_reserve::{expected_revenue, AuctionSetting, Distribution, TieRule};

fn random_dist(rng: &mut ChaCha8Rng) -> Distribution {
    match rng.random_range(0..5u8) {
        0 => Distribution::point(rng.random_range(0.1..2.0)).unwrap(),
        1 => {
            let low = rng.random_range(0.0..1.0);
            Distribution::binary(low, low + rng.random_range(0.1..2.0), rng.random_range(0.05..0.95)).unwrap()
        }
        2 => {
            let a = rng.random_range(0.0..1.0);
            let lo = a + rng.random_range(0.0..0.5);
            Distribution::atom_uniform(a, rng.random_range(0.0..0.9), lo, lo + rng.random_range(0.1..2.0)).unwrap()
        }
        3 => {
            let n = rng.random_range(2..7u32);
            let (m, sigma) = (1.0, rng.random_range(0.2..1.5));
            let lo = v_min_star2(m, sigma, n);
            let rho = lo + rng.random_range(0.0..0.9) * (rho_max(m, sigma, n).min(m) - lo);
            build_g(&solve_g_params(rho, m, sigma, n).unwrap()).unwrap()
        }
        _ => {
            let k = rng.random_range(2..8usize);
            let mut grid: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..2.0)).collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let mut cdf: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(0.0..1.0)).collect();
            cdf.sort_by(f64::total_cmp);
            *cdf.last_mut().unwrap() = 1.0;
            Distribution::discrete(grid, cdf).unwrap()
        }
    }
}

#[test]
fn simulation_agrees_with_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let dist = random_dist(&mut rng);
        let (mean, _) = dist.moments().unwrap();
        let n = rng.random_range(2..6u32);
        let c = rng.random_range(0.0..0.8) * mean;
        let r = rng.random_range(0.0..1.5) * mean;
        let tie = if rng.random::<bool>() {
            TieRule::SaleAtReserve
        } else {
            TieRule::NoSaleAtReserve
        };
        let s = AuctionSetting::variance(n, c, mean, 1.0).unwrap();
        let exact = expected_revenue(&dist, r, &s, tie).unwrap();
        let (est, se) = monte_carlo_revenue(&dist, r, &s, tie, 200_000, case).unwrap();
        assert!(
            (est - exact).abs() <= 4.0 * se + 1e-12,
            "case {case}: {dist:?} r = {r} n = {n} c = {c} {tie:?}: {est} +- {se} vs {exact}"
        );
    }
}

#[test]
fn json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let d = random_dist(&mut rng);
        let back = Distribution::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(d, back);
    }
}

#[test]
fn json_rejects_invalid_members() {
    assert!(Distribution::from_json(r#"{"type":"binary","low":1.0,"high":0.5,"p_low":0.5}"#).is_err());
    assert!(Distribution::from_json(r#"{"type":"discrete","grid":[0.0,1.0],"cdf":[0.7,0.4]}"#).is_err());
    assert!(Distribution::from_json(r#"{"type":"triangle"}"#).is_err());
    let d = Distribution::from_json(r#"{"type":"point","a":2.5}"#).unwrap();
    assert_eq!(d, Distribution::point(2.5).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_survival_integrals(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_dist(&mut rng);
        let (m1, v1) = d.moments().unwrap();
        let (m2, v2) = d.moments_by_quadrature().unwrap();
        prop_assert!((m1 - m2).abs() < 1e-8, "{:?}: {} {}", d, m1, m2);
        prop_assert!((v1 - v2).abs() < 1e-8, "{:?}: {} {}", d, v1, v2);
    }
}
