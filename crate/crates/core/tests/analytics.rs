use num_bigint::BigUint;
mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trojan_forge::aig::to_aig;
use trojan_forge::aig::{from_aig, FromAigOptions};
use trojan_forge::analytics::{
    binomial, expected_game_length, extract_features, ht_space_size, pca_fit, pca_project, pca_reconstruct,
    seek_simulate, Strategy, StrategyProfile, FEATURE_DIM, FEATURE_NAMES,
};
use trojan_forge::generate::{random_netlist, RandomSpec};
use trojan_forge::netlist::parse_netlist;
use common::{brute_force_game, brute_force_space, pascal};

#[test]
fn space_matches_subset_enumeration() {
    // every profile with N <= 2, r + g <= 12 per circuit and M <= 5
    let pairs: Vec<(u64, u64)> = (0..=12u64).flat_map(|r| (0..=12 - r).map(move |g| (r, g))).collect();
    for m in 2..=5 {
        for &a in &pairs {
            let p = StrategyProfile { circuits: vec![a], max_width: m };
            assert_eq!(ht_space_size(&p).unwrap(), BigUint::from(brute_force_space(&[a], m)), "{a:?} M={m}");
        }
        for (i, &a) in pairs.iter().enumerate().step_by(7) {
            let b = pairs[(i * 13 + 5) % pairs.len()];
            let p = StrategyProfile { circuits: vec![a, b], max_width: m };
            assert_eq!(ht_space_size(&p).unwrap(), BigUint::from(brute_force_space(&[a, b], m)));
        }
    }
}

#[test]
fn binomials_match_pascal_triangle() {
    let t = pascal(220);
    for n in 0..=220u64 {
        for k in 0..=n {
            assert_eq!(binomial(n, k), t[n as usize][k as usize]);
        }
        assert_eq!(binomial(n, n + 1), BigUint::from(0u32));
    }
}

proptest! {
    #[test]
    fn vandermonde(r in 0u64..40, g in 0u64..40, q in 0u64..12) {
        let lhs: BigUint = (0..=q).map(|p| binomial(r, p) * binomial(g, q - p)).sum();
        prop_assert_eq!(lhs, binomial(r + g, q));
    }

    #[test]
    fn single_circuit_space_is_sum_of_binomials(r in 0u64..60, g in 0u64..60, m in 2u64..8) {
        let p = StrategyProfile { circuits: vec![(r, g)], max_width: m };
        let expect: BigUint = (2..=m).map(|q| binomial(r + g, q)).sum();
        prop_assert_eq!(ht_space_size(&p).unwrap(), expect);
    }
}

fn rank2_rows(rows: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let base: Vec<f64> = (0..32).map(|_| rng.gen_range(-5.0..5.0)).collect();
    (0..rows)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
            (0..32).map(|j| base[j] + a * u[j] + b * v[j]).collect()
        })
        .collect()
}

fn covariance_of(coords: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = coords[0].len();
    let n = coords.len() as f64;
    let mean: Vec<f64> = (0..k).map(|j| coords.iter().map(|c| c[j]).sum::<f64>() / n).collect();
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| coords.iter().map(|c| (c[a] - mean[a]) * (c[b] - mean[b])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect()
}

#[test]
fn pca_on_rank_two_data() {
    let rows = rank2_rows(60, 4);
    let m = pca_fit(&rows, 8).unwrap();
    for v in &m.explained_variance[2..] {
        assert!(*v < 1e-9, "{v}");
    }
    for a in 0..8 {
        for b in 0..8 {
            let dot: f64 = m.components[a].iter().zip(&m.components[b]).map(|(x, y)| x * y).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((dot - expect).abs() < 1e-9, "G^T G [{a}][{b}] = {dot}");
        }
    }
    let coords = pca_project(&m, &rows).unwrap();
    let cov = covariance_of(&coords);
    for a in 0..8 {
        for b in 0..8 {
            let expect = if a == b { m.explained_variance[a] } else { 0.0 };
            assert!((cov[a][b] - expect).abs() < 1e-8, "cov[{a}][{b}] = {}", cov[a][b]);
        }
    }
}

#[test]
fn pca_reconstruction_with_all_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<f64>> = (0..12).map(|_| (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let m = pca_fit(&rows, 6).unwrap();
    let back = pca_reconstruct(&m, &pca_project(&m, &rows).unwrap()).unwrap();
    for (r, b) in rows.iter().zip(&back) {
        for (x, y) in r.iter().zip(b) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn pca_matches_closed_form_two_by_two() {
    // eigenvalues of [[a, b], [b, c]] from the quadratic formula
    let rows = vec![vec![2.0, 1.0], vec![0.0, 0.5], vec![1.0, 2.5], vec![3.0, 2.0], vec![-1.0, 0.0]];
    let n = rows.len() as f64;
    let mx = rows.iter().map(|r| r[0]).sum::<f64>() / n;
    let my = rows.iter().map(|r| r[1]).sum::<f64>() / n;
    let a = rows.iter().map(|r| (r[0] - mx).powi(2)).sum::<f64>() / (n - 1.0);
    let c = rows.iter().map(|r| (r[1] - my).powi(2)).sum::<f64>() / (n - 1.0);
    let b = rows.iter().map(|r| (r[0] - mx) * (r[1] - my)).sum::<f64>() / (n - 1.0);
    let disc = ((a - c).powi(2) + 4.0 * b * b).sqrt();
    let (l1, l2) = ((a + c + disc) / 2.0, (a + c - disc) / 2.0);
    let m = pca_fit(&rows, 2).unwrap();
    assert!((m.explained_variance[0] - l1).abs() < 1e-12);
    assert!((m.explained_variance[1] - l2).abs() < 1e-12);
    // eigenvector (b, l1 - a), normalized, largest entry positive
    let norm = (b * b + (l1 - a).powi(2)).sqrt();
    let mut e = [b / norm, (l1 - a) / norm];
    let lead = if e[1].abs() > e[0].abs() { 1 } else { 0 };
    if e[lead] < 0.0 {
        e = [-e[0], -e[1]];
    }
    assert!((m.components[0][0] - e[0]).abs() < 1e-9 && (m.components[0][1] - e[1]).abs() < 1e-9);
}

#[test]
fn pca_isotropic_data_has_equal_variances() {
    let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
    let m = pca_fit(&rows, 2).unwrap();
    assert!((m.explained_variance[0] - m.explained_variance[1]).abs() < 1e-12);
    // ties keep index order; the sign convention makes the lead entry positive
    assert_eq!(m.components[0], vec![1.0, 0.0]);
    assert_eq!(m.components[1], vec![0.0, 1.0]);
}

#[test]
fn features_are_stable_under_restructuring_interface() {
    let fa = parse_netlist(include_str!("../data/full_adder.v")).unwrap();
    let f = extract_features(&fa).unwrap();
    assert_eq!(f.0.len(), FEATURE_DIM);
    let at = |name: &str| f.0[FEATURE_NAMES.iter().position(|n| *n == name).unwrap()];
    assert_eq!((at("n_and"), at("n_xor"), at("n_or"), at("pis"), at("pos")), (2.0, 2.0, 1.0, 3.0, 2.0));

    for seed in 0..10 {
        let n = random_netlist(&RandomSpec::mixed(8, 50), seed);
        let a = extract_features(&n).unwrap();
        assert_eq!(a, extract_features(&n).unwrap());
        let back = from_aig(&to_aig(&n).unwrap().strash(), FromAigOptions::default());
        let b = extract_features(&back).unwrap();
        for name in ["pis", "pos"] {
            let i = FEATURE_NAMES.iter().position(|n| *n == name).unwrap();
            assert_eq!(a.0[i], b.0[i]);
        }
    }
}

#[test]
fn game_expectation_matches_enumeration() {
    for n in 1..=6 {
        for k in 1..=n {
            assert!((brute_force_game(n, k) - expected_game_length(n, k)).abs() < 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn game_simulation_is_within_three_standard_errors() {
    for (n, k) in [(6, 1), (6, 3), (30, 1), (30, 4)] {
        let s = seek_simulate(n, k, Strategy::Uniform, Strategy::Uniform, 20_000, 8, n as u64).unwrap();
        let e = expected_game_length(n, k);
        assert!((s.mean - e).abs() <= 3.0 * s.std_error.max(1e-9), "n={n} k={k}: {} vs {e}", s.mean);
        assert_eq!(s.histogram.values().sum::<u64>(), 20_000);
    }
}

#[test]
fn game_is_schedule_independent() {
    let a = seek_simulate(50, 3, Strategy::Uniform, Strategy::Uniform, 3000, 5, 50).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| seek_simulate(50, 3, Strategy::Uniform, Strategy::Uniform, 3000, 5, 50).unwrap());
    assert_eq!(a, b);
}
