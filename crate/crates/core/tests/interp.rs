use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherepd::constructions::cm_exponential;
use spherepd::interp::{loo_error, problem_gram, residual, solve, InterpolationProblem};
use spherepd::oracle::{sample_points, Distinctness, ProductPointSet};
use spherepd::SphereDim;

fn d(m: u32) -> SphereDim {
    SphereDim::Finite(m)
}

fn smooth(x: &[f64], z: &[f64]) -> f64 {
    (x[0] + 0.5 * z[1]).exp() * (1.0 + x[2] * z[0]).cos()
}

fn fit(p: ProductPointSet, h: impl Fn(&[f64], &[f64]) -> f64) -> InterpolationProblem {
    let targets = p.xs().iter().zip(p.zs()).map(|(x, z)| h(x, z)).collect();
    InterpolationProblem::new(p, targets, cm_exponential(1.0, 1.0).unwrap()).unwrap()
}

#[test]
fn exactness_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..20 {
        let n = rng.gen_range(1..=50);
        let (m, mm) = [(1, 2), (2, 2), (2, 3), (3, 4)][seed % 4];
        let p = sample_points(d(m), d(mm), n, seed as u64, Distinctness::Pairs).unwrap();
        let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let norm = targets.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let p = InterpolationProblem::new(p, targets, cm_exponential(1.0, 1.0).unwrap()).unwrap();
        let s = solve(&p, 0.0).unwrap();
        assert_eq!(s.regularization(), 0.0);
        let r = residual(&p, &s).unwrap();
        assert!(r <= 1e-8 * (1.0 + norm), "seed {seed} n {n}: {r:e}");
        for (i, t) in p.targets().iter().enumerate() {
            let v = s.evaluate(&p.nodes().xs()[i], &p.nodes().zs()[i]).unwrap();
            assert!((v - t).abs() <= 1e-8 * norm.max(1.0));
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let p = fit(
        sample_points(d(2), d(3), 30, 3, Distinctness::Pairs).unwrap(),
        smooth,
    );
    let a = solve(&p, 0.0).unwrap();
    let b = solve(&p, 0.0).unwrap();
    assert_eq!(a.coefficients(), b.coefficients());
    assert_eq!(a.condition_estimate(), b.condition_estimate());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permuting_nodes_permutes_coefficients(seed in 0u64..1000, n in 2usize..25, shift in 1usize..24) {
        let p = sample_points(d(2), d(2), n, seed, Distinctness::Pairs).unwrap();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let q = ProductPointSet::new(
            d(2),
            d(2),
            perm.iter().map(|&i| p.xs()[i].clone()).collect(),
            perm.iter().map(|&i| p.zs()[i].clone()).collect(),
        )
        .unwrap();
        let a = solve(&fit(p, smooth), 0.0).unwrap();
        let b = solve(&fit(q, smooth), 0.0).unwrap();
        let scale = a.coefficients().iter().fold(1.0f64, |s, v| s.max(v.abs()));
        for (j, &i) in perm.iter().enumerate() {
            prop_assert!((b.coefficients()[j] - a.coefficients()[i]).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn error_decreases_with_more_nodes() {
    let all = sample_points(d(2), d(2), 40, 21, Distinctness::Pairs).unwrap();
    let probe = sample_points(d(2), d(2), 200, 999, Distinctness::Pairs).unwrap();
    let errors: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| {
            let nodes =
                ProductPointSet::new(d(2), d(2), all.xs()[..n].to_vec(), all.zs()[..n].to_vec())
                    .unwrap();
            let s = solve(&fit(nodes, smooth), 0.0).unwrap();
            probe
                .xs()
                .iter()
                .zip(probe.zs())
                .map(|(x, z)| (s.evaluate(x, z).unwrap() - smooth(x, z)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let inversions: Vec<f64> = errors
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| w[1] / w[0] - 1.0)
        .collect();
    assert!(
        inversions.len() <= 1 && inversions.iter().all(|&r| r <= 0.1),
        "{errors:?}"
    );
}

#[test]
fn loo_on_span_targets_is_below_max_target() {
    let nodes = sample_points(d(2), d(2), 25, 8, Distinctness::Pairs).unwrap();
    let k = cm_exponential(1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mu = nalgebra::DVector::from_fn(25, |_, _| rng.gen_range(-1.0..1.0));
    let probe = InterpolationProblem::new(nodes.clone(), vec![0.0; 25], k.clone()).unwrap();
    let targets: Vec<f64> = (problem_gram(&probe).unwrap() * mu)
        .iter()
        .copied()
        .collect();
    let top = targets.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let p = InterpolationProblem::new(nodes, targets, k).unwrap();
    let e = loo_error(&p).unwrap();
    assert!(e < top, "{e} vs {top}");
}

#[test]
fn duplicated_targets_are_fine() {
    let nodes = sample_points(d(3), d(1), 8, 2, Distinctness::Pairs).unwrap();
    let p =
        InterpolationProblem::new(nodes, vec![1.5; 8], cm_exponential(2.0, 0.5).unwrap()).unwrap();
    assert!(loo_error(&p).unwrap().is_finite());
    let s = solve(&p, 0.0).unwrap();
    assert!(residual(&p, &s).unwrap() < 1e-10);
}
