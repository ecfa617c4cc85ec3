use langevin::metrics::{
    gaussian_chain_law, gaussian_w2, scaled_error_check, wasserstein_1d, wasserstein_empirical, GaussianLaw, Provenance,
    SampleCloud,
};
use langevin::planner::{plan, PlannerInputs, Recipe};
use langevin::potentials::{make_capped_quadratic_potential, make_gaussian_potential};
use langevin::samplers::{final_states, run_chains, Algorithm, SamplerConfig};
use langevin::Error;
use nalgebra::{DMatrix, DVector};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..n {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

fn brute_force_wq(a: &SampleCloud, b: &SampleCloud, q: u8) -> f64 {
    let n = a.n();
    let cost = |i: usize, j: usize| -> f64 {
        let d2: f64 = a.point(i).iter().zip(b.point(j)).map(|(x, y)| (x - y).powi(2)).sum();
        d2.sqrt().powi(q as i32)
    };
    let best = permutations(n)
        .iter()
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| cost(i, j)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    (best / n as f64).powf(1.0 / q as f64)
}

fn cloud(n: usize, p: usize, seed: u64, shift: f64) -> SampleCloud {
    let law = GaussianLaw::new(DVector::from_element(p, shift), DMatrix::identity(p, p)).unwrap();
    law.sample(n, seed, 0).unwrap()
}

#[test]
fn one_dimensional_matches_permutation_search() {
    for seed in 0..10 {
        let a = cloud(6, 1, seed, 0.0);
        let b = cloud(6, 1, seed + 100, 0.5);
        for q in [1, 2] {
            let fast = wasserstein_1d(&a.coordinate(0), &b.coordinate(0), q).unwrap();
            let slow = brute_force_wq(&a, &b, q);
            assert!((fast - slow).abs() < 1e-12, "seed {seed} q {q}: {fast} vs {slow}");
            let matched = wasserstein_empirical(&a, &b, q).unwrap();
            assert!((matched - fast).abs() < 1e-12);
        }
    }
}

#[test]
fn planar_matches_permutation_search() {
    for seed in 0..10 {
        let a = cloud(5, 2, seed, 0.0);
        let b = cloud(5, 2, seed + 50, 1.0);
        for q in [1, 2] {
            let w = wasserstein_empirical(&a, &b, q).unwrap();
            let slow = brute_force_wq(&a, &b, q);
            assert!((w - slow).abs() < 1e-12, "seed {seed} q {q}: {w} vs {slow}");
        }
    }
}

#[test]
fn permuted_cloud_is_at_distance_zero() {
    let a = cloud(40, 3, 1, 0.0);
    let rows: Vec<Vec<f64>> = (0..40).rev().map(|i| a.point(i).to_vec()).collect();
    let b = SampleCloud::new(&rows, Provenance::IidTarget).unwrap();
    assert!(wasserstein_empirical(&a, &b, 2).unwrap() < 1e-12);
}

#[test]
fn empirical_metric_axioms() {
    for seed in 0..8 {
        let n = 8 + 7 * seed as usize;
        let x = cloud(n, 2, 3 * seed, 0.0);
        let y = cloud(n, 2, 3 * seed + 1, 0.7);
        let z = cloud(n, 2, 3 * seed + 2, -0.4);
        for q in [1, 2] {
            let xy = wasserstein_empirical(&x, &y, q).unwrap();
            let yx = wasserstein_empirical(&y, &x, q).unwrap();
            let yz = wasserstein_empirical(&y, &z, q).unwrap();
            let xz = wasserstein_empirical(&x, &z, q).unwrap();
            assert!((xy - yx).abs() < 1e-9);
            assert!(xy > 0.0);
            assert_eq!(wasserstein_empirical(&x, &x, q).unwrap(), 0.0);
            assert!(xz <= xy + yz + 1e-9, "triangle n={n} q={q}");
        }
        let w1 = wasserstein_empirical(&x, &y, 1).unwrap();
        let w2 = wasserstein_empirical(&x, &y, 2).unwrap();
        assert!(w1 <= w2 + 1e-12);
    }
}

#[test]
fn capacity_cap_is_enforced() {
    let a = cloud(4097, 2, 0, 0.0);
    let b = cloud(4097, 2, 1, 0.0);
    assert!(matches!(wasserstein_empirical(&a, &b, 2), Err(Error::Capacity(_))));
}

#[test]
fn iid_clouds_agree_with_closed_form() {
    let a = GaussianLaw::new(DVector::from_vec(vec![0.0, 0.0]), DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]))
        .unwrap();
    let b = GaussianLaw::new(DVector::from_vec(vec![3.0, -2.0]), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]))
        .unwrap();
    let exact = gaussian_w2(&a, &b).unwrap();
    let emp = wasserstein_empirical(&a.sample(2000, 5, 0).unwrap(), &b.sample(2000, 5, 1).unwrap(), 2).unwrap();
    assert!((emp / exact - 1.0).abs() < 0.10, "{emp} vs {exact}");
}

#[test]
fn one_dimensional_gaussian_w2() {
    let a = GaussianLaw::diagonal(&[4.0]).unwrap();
    let b = GaussianLaw::diagonal(&[0.25]).unwrap();
    assert!((gaussian_w2(&a, &b).unwrap() - 1.5).abs() < 1e-14);
    assert_eq!(gaussian_w2(&a, &a).unwrap(), 0.0);
}

#[test]
fn lmc_law_reaches_ar1_fixed_point() {
    let h = 0.1;
    let pot = make_gaussian_potential(1, &[1.0]).unwrap();
    let law = gaussian_chain_law(&SamplerConfig::lmc(0.0, h, 100_000, 0), &pot).unwrap();
    let exact = 2.0 * h / (1.0 - (1.0 - h) * (1.0 - h));
    assert!((law.theta.covariance[(0, 0)] - exact).abs() < 1e-10);
    let law0 = gaussian_chain_law(&SamplerConfig::lmc(0.0, h, 0, 0).with_initial_theta(vec![2.0]), &pot).unwrap();
    assert_eq!(law0.theta.mean[0], 2.0);
    assert_eq!(law0.theta.covariance[(0, 0)], 0.0);
}

#[test]
fn klmc_chains_match_propagated_law() {
    let pot = make_gaussian_potential(2, &[1.0, 3.0]).unwrap();
    let config = SamplerConfig::kinetic(Algorithm::Klmc, 0.1, 0.05, 2.0, 100, 17)
        .with_initial_theta(vec![1.5, -1.0])
        .with_stride(100);
    let n = 10_000;
    let trajs = run_chains(&config, &pot, n).unwrap();
    let law = gaussian_chain_law(&config, &pot).unwrap().joint.unwrap();
    // joint vector (v, θ)
    let rows: Vec<Vec<f64>> = trajs
        .iter()
        .map(|t| {
            let mut r = t.velocities.as_ref().unwrap().last().unwrap().clone();
            r.extend_from_slice(t.final_state());
            r
        })
        .collect();
    let emp = SampleCloud::new(&rows, Provenance::ChainFinalStates).unwrap();
    let (mean, cov) = (emp.mean(), emp.covariance());
    let nf = n as f64;
    for i in 0..4 {
        let sd = (law.covariance[(i, i)] / nf).sqrt();
        assert!((mean[i] - law.mean[i]).abs() < 5.0 * sd, "mean {i}");
        for j in 0..4 {
            let s = law.covariance[(i, i)] * law.covariance[(j, j)] + law.covariance[(i, j)].powi(2);
            let sd = (s / nf).sqrt();
            assert!((cov[(i, j)] - law.covariance[(i, j)]).abs() < 5.0 * sd, "cov ({i},{j})");
        }
    }
}

#[test]
fn planned_pipeline_meets_scaled_target() {
    let pot = make_gaussian_potential(2, &[1.0, 1.0]).unwrap();
    let target = GaussianLaw::target_of(&pot).unwrap();
    let mu2 = target.second_moment();
    let eps = 0.5;
    for recipe in [Recipe::Lmc, Recipe::Klmc] {
        let planned = plan(recipe, &PlannerInputs::new(2, 1.0, mu2, eps, 2)).unwrap();
        let law = gaussian_chain_law(&planned.sampler_config(0), &pot).unwrap();
        let w2 = gaussian_w2(&law.theta, &target).unwrap();
        assert!(scaled_error_check(w2, mu2, eps), "{recipe:?}: {w2}");
    }
    assert!(scaled_error_check(0.3, 4.0, 0.2));
    assert!(!scaled_error_check(0.5, 4.0, 0.2));
}

#[test]
fn chain_law_needs_quadratic_potential() {
    let pot = make_capped_quadratic_potential(2).unwrap();
    let config = SamplerConfig::lmc(0.01, 0.1, 10, 0);
    assert!(matches!(gaussian_chain_law(&config, &pot), Err(Error::Capability(_))));
    assert!(final_states(&config, &pot, 2).is_ok());
}
