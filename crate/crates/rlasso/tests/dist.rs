//! Sampling-identity tests: the scale-mixture constructions must reproduce
//! the inverse double exponential / inverse generalized Gaussian laws, and
//! the truncated samplers must match analytic CDFs and rejection oracles.

use nalgebra::{DMatrix, DVector};
use rlasso::dist::{
    ide_cdf, ide_sample, igg_cdf, ks_two_sample, ks_vs_cdf, sample_ide_via_smdp,
    sample_ide_via_smtn, sample_igg_via_bridge, sample_inverse_gaussian,
    sample_mid_truncated_mvn, sample_mid_truncated_normal,
    sample_upper_truncated_inverse_gamma, special::norm_cdf, DistError, MvnScale, Rng,
};

fn draw_many(n: usize, mut f: impl FnMut() -> f64) -> Vec<f64> {
    (0..n).map(|_| f()).collect()
}

#[test]
fn smdp_composition_reproduces_ide() {
    // Inverse gamma scale, then double Pareto: the two-layer construction
    // must be indistinguishable from direct inverse double exponential
    // sampling.
    let n = 100_000;
    for (i, lambda) in [0.5, 1.0, 5.0].into_iter().enumerate() {
        let mut rng = Rng::with_stream(2024, i as u64);
        let mut a = draw_many(n, || sample_ide_via_smdp(lambda, &mut rng).unwrap());
        let mut rng2 = Rng::with_stream(2025, i as u64);
        let mut b = draw_many(n, || ide_sample(lambda, &mut rng2).unwrap());
        let ks = ks_two_sample(&mut a, &mut b);
        assert!(ks < 0.02, "lambda {lambda}: KS {ks:.5}");
    }
}

#[test]
fn smtn_composition_reproduces_ide() {
    // The truncated-normal mixture, collapsed over the normal's scale, is an
    // exact inverse double exponential sampler.
    let n = 100_000;
    let lambda = 1.0;
    let mut rng = Rng::from_seed(2026);
    let mut a = draw_many(n, || sample_ide_via_smtn(lambda, &mut rng).unwrap());
    let ks = ks_vs_cdf(&mut a, |x| ide_cdf(x, lambda));
    assert!(ks < 0.02, "KS {ks:.5}");
}

#[test]
fn smtn_literal_per_tau_truncation_is_a_different_margin() {
    // Characterization, not a target: expanding the hierarchy all the way
    // down and renormalizing the normal's truncation separately for every
    // drawn scale tau produces a close but structurally different margin
    // (the exact route marginalizes tau before truncating). The deviation
    // from the inverse double exponential is stable near KS ~ 0.023; this
    // test pins that gap so a regression in either direction is caught.
    let n = 100_000;
    let lambda = 1.0;
    let mut rng = Rng::from_seed(2027);
    let mut draws = Vec::with_capacity(n);
    while draws.len() < n {
        let eta = rng.inverse_gamma(2.0, lambda);
        let zeta = rng.exp_rate(eta);
        let tau = rng.exp_rate(zeta * zeta / 2.0);
        match sample_mid_truncated_normal(0.0, tau, eta, &mut rng) {
            Ok(b) => draws.push(b),
            // The per-tau route occasionally proposes an unreachable
            // truncation (tiny tau, huge eta); redraw the whole tuple.
            Err(DistError::TruncationUnreachable { .. }) => continue,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    let ks = ks_vs_cdf(&mut draws, |x| ide_cdf(x, lambda));
    assert!(
        (0.015..0.035).contains(&ks),
        "expected the literal composition's structural gap near 0.023, got KS {ks:.5}"
    );
}

#[test]
fn bridge_composition_reproduces_igg() {
    let n = 100_000;
    let lambda = 1.0;
    for (i, alpha) in [0.5, 2.0].into_iter().enumerate() {
        let mut rng = Rng::with_stream(2028, i as u64);
        let mut a = draw_many(n, || sample_igg_via_bridge(lambda, alpha, &mut rng).unwrap());
        let ks = ks_vs_cdf(&mut a, |x| igg_cdf(x, lambda, alpha));
        assert!(ks < 0.02, "alpha {alpha}: KS {ks:.5}");
    }
}

#[test]
fn mid_truncated_normal_matches_analytic_cdf() {
    // mu = 0.5, sigma^2 = 1, c = 1: compare against the normal-CDF
    // arithmetic for the mid-truncated law.
    let (mu, sigma, c) = (0.5, 1.0, 1.0);
    let z = norm_cdf((-c - mu) / sigma) + 1.0 - norm_cdf((c - mu) / sigma);
    let cdf = move |x: f64| -> f64 {
        if x < -c {
            norm_cdf((x - mu) / sigma) / z
        } else if x < c {
            norm_cdf((-c - mu) / sigma) / z
        } else {
            (norm_cdf((-c - mu) / sigma) + norm_cdf((x - mu) / sigma)
                - norm_cdf((c - mu) / sigma))
                / z
        }
    };
    let mut rng = Rng::from_seed(2029);
    let mut draws =
        draw_many(100_000, || sample_mid_truncated_normal(mu, sigma * sigma, c, &mut rng).unwrap());
    assert!(draws.iter().all(|&x| x.abs() > c));
    let ks = ks_vs_cdf(&mut draws, cdf);
    assert!(ks < 0.01, "KS {ks:.5}");
}

#[test]
fn mid_truncated_mvn_diagonal_matches_univariate_marginals() {
    // With a diagonal covariance every sweep draws each coordinate from its
    // own (exact) univariate conditional, so successive calls are iid.
    let n = 40_000;
    let mean = DVector::from_vec(vec![0.3, -0.2, 0.0]);
    let vars = [1.0, 0.5, 2.0];
    let cov = DMatrix::from_diagonal(&DVector::from_row_slice(&vars));
    let thresholds = DVector::from_vec(vec![0.4, 0.3, 1.0]);
    let mut state = DVector::from_vec(vec![1.0, 1.0, 2.0]);
    let mut rng = Rng::from_seed(2030);
    let mut marginals: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 3];
    for _ in 0..n {
        state = sample_mid_truncated_mvn(
            &mean,
            MvnScale::Covariance(&cov),
            &thresholds,
            &state,
            10,
            &mut rng,
        )
        .unwrap();
        for j in 0..3 {
            marginals[j].push(state[j]);
        }
    }
    let mut rng2 = Rng::from_seed(2031);
    for j in 0..3 {
        let mut uni = draw_many(n, || {
            sample_mid_truncated_normal(mean[j], vars[j], thresholds[j], &mut rng2).unwrap()
        });
        let ks = ks_two_sample(&mut marginals[j], &mut uni);
        assert!(ks < 0.015, "coordinate {j}: KS {ks:.5}");
    }
}

#[test]
fn mid_truncated_mvn_moments_match_rejection_oracle() {
    // p = 2, correlation 0.7, thresholds (0.5, 0.8): first and second
    // moments per coordinate against brute-force rejection sampling.
    let n = 100_000;
    let mean = DVector::from_vec(vec![0.0, 0.0]);
    let cov = DMatrix::from_vec(2, 2, vec![1.0, 0.7, 0.7, 1.0]);
    let thresholds = DVector::from_vec(vec![0.5, 0.8]);

    // Gibbs samples (10 sweeps between retained draws).
    let mut state = DVector::from_vec(vec![1.0, 1.5]);
    let mut rng = Rng::from_seed(2032);
    let mut gibbs: Vec<DVector<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        state = sample_mid_truncated_mvn(
            &mean,
            MvnScale::Covariance(&cov),
            &thresholds,
            &state,
            10,
            &mut rng,
        )
        .unwrap();
        gibbs.push(state.clone());
    }

    // Rejection oracle: unrestricted MVN via Cholesky, keep when both
    // coordinates clear their thresholds.
    let chol = cov.clone().cholesky().unwrap();
    let l = chol.l();
    let mut rng2 = Rng::from_seed(2033);
    let mut oracle: Vec<DVector<f64>> = Vec::with_capacity(n);
    while oracle.len() < n {
        let z = DVector::from_fn(2, |_, _| rng2.standard_normal());
        let x = &l * z;
        if x[0].abs() > thresholds[0] && x[1].abs() > thresholds[1] {
            oracle.push(x);
        }
    }

    let stats = |xs: &[DVector<f64>], j: usize, power: i32| -> (f64, f64) {
        let vals: Vec<f64> = xs.iter().map(|v| v[j].powi(power)).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (vals.len() as f64 - 1.0);
        (m, (var / vals.len() as f64).sqrt())
    };
    for j in 0..2 {
        for power in [1, 2] {
            let (mg, sg) = stats(&gibbs, j, power);
            let (mo, so) = stats(&oracle, j, power);
            let combined = (sg * sg + so * so).sqrt();
            assert!(
                (mg - mo).abs() < 3.0 * combined,
                "coordinate {j} moment {power}: {mg:.4} vs {mo:.4} (3se = {:.4})",
                3.0 * combined
            );
        }
    }
}

#[test]
fn upper_truncated_inverse_gamma_matches_rejection_oracle() {
    let n = 10_000;
    let (shape, scale, upper) = (2.0, 1.0, 0.5);
    let mut rng = Rng::from_seed(2034);
    let mut a = draw_many(n, || {
        sample_upper_truncated_inverse_gamma(shape, scale, upper, &mut rng).unwrap()
    });
    assert!(a.iter().all(|&x| x < upper && x > 0.0));

    let mut rng2 = Rng::from_seed(2035);
    let mut b = Vec::with_capacity(n);
    while b.len() < n {
        let x = rng2.inverse_gamma(shape, scale);
        if x < upper {
            b.push(x);
        }
    }
    let ks = ks_two_sample(&mut a, &mut b);
    assert!(ks < 0.015, "KS {ks:.5}");
}

#[test]
fn inverse_gaussian_variance_example() {
    // mean mu, variance mu^3/shape: (2, 1) gives variance 8.
    let n = 100_000;
    let mut rng = Rng::from_seed(2036);
    let draws = draw_many(n, || sample_inverse_gaussian(2.0, 1.0, &mut rng).unwrap());
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
    assert!((var - 8.0).abs() < 0.5, "variance {var}");
}
