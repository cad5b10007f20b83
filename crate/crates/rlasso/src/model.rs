//! Core data structures shared by every part of the toolkit: standardized
//! regression data, prior and chain configuration, chain state, stored
//! posterior draws, and posterior summaries.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::sampler::SamplerKind;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("column {column} is constant; cannot standardize")]
    ConstantColumn { column: usize },
    #[error("response is constant; cannot scale it")]
    ConstantResponse,
    #[error("non-finite value at row {row}{}", match .column { Some(c) => format!(", column {c}"), None => " of the response".to_string() })]
    NonFinite { row: usize, column: Option<usize> },
    #[error("need at least 2 rows, got {rows}")]
    TooFewRows { rows: usize },
    #[error("dimension mismatch: y has {y_len} entries but X has {x_rows} rows")]
    DimensionMismatch { y_len: usize, x_rows: usize },
    #[error("matrix must have at least one column")]
    NoColumns,
    #[error("no post-burn-in draws to summarize")]
    EmptyDraws,
    #[error("credible level must lie strictly in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("invalid prior parameter: {0}")]
    InvalidPrior(String),
    #[error("invalid MCMC configuration: {0}")]
    InvalidConfig(String),
}

// ---------------------------------------------------------------------------
// Regression data
// ---------------------------------------------------------------------------

/// Centered response and standardized design matrix, with the moments needed
/// to map coefficients back to the raw scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    /// Centered (optionally scaled) response, length n.
    pub y: DVector<f64>,
    /// Standardized design matrix, n x p.
    pub x: DMatrix<f64>,
    pub n: usize,
    pub p: usize,
    pub column_means: DVector<f64>,
    pub column_scales: DVector<f64>,
    pub response_mean: f64,
    /// Sample standard deviation the response was divided by; 1.0 when the
    /// response was centered but not scaled.
    pub response_scale: f64,
}

impl RegressionData {
    /// Wraps already-prepared data without transforming it. Only structural
    /// checks (dimensions, finiteness) are applied; the stored means are zero
    /// and the scales one, so raw-scale reports coincide with the stored
    /// coefficients. Intended for synthetic instances built by tests and the
    /// benchmark module; [`standardize`] is the canonical constructor.
    pub fn from_parts(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self, ModelError> {
        let n = x.nrows();
        let p = x.ncols();
        if p == 0 {
            return Err(ModelError::NoColumns);
        }
        if n < 2 {
            return Err(ModelError::TooFewRows { rows: n });
        }
        if y.len() != n {
            return Err(ModelError::DimensionMismatch { y_len: y.len(), x_rows: n });
        }
        for i in 0..n {
            if !y[i].is_finite() {
                return Err(ModelError::NonFinite { row: i, column: None });
            }
            for j in 0..p {
                if !x[(i, j)].is_finite() {
                    return Err(ModelError::NonFinite { row: i, column: Some(j) });
                }
            }
        }
        Ok(Self {
            y,
            x,
            n,
            p,
            column_means: DVector::zeros(p),
            column_scales: DVector::repeat(p, 1.0),
            response_mean: 0.0,
            response_scale: 1.0,
        })
    }

    /// Residual sum of squares at `beta` on the stored (standardized) scale.
    pub fn rss(&self, beta: &DVector<f64>) -> f64 {
        let r = &self.y - &self.x * beta;
        r.dot(&r)
    }

    /// Maps standardized-scale coefficients to the raw scale, returning
    /// `(raw_coefficients, intercept)` such that predictions on raw
    /// predictors are `intercept + x_raw . raw_coefficients`.
    pub fn coefficients_raw(&self, beta_std: &DVector<f64>) -> (DVector<f64>, f64) {
        let mut raw = DVector::zeros(self.p);
        for j in 0..self.p {
            raw[j] = beta_std[j] * self.response_scale / self.column_scales[j];
        }
        let intercept = self.response_mean - raw.dot(&self.column_means);
        (raw, intercept)
    }
}

/// Centers the response and standardizes each design column to zero mean and
/// unit sample standard deviation (divisor n-1).
pub fn standardize(raw_y: &DVector<f64>, raw_x: &DMatrix<f64>) -> Result<RegressionData, ModelError> {
    standardize_opts(raw_y, raw_x, false)
}

/// [`standardize`] with control over response scaling. When `scale_response`
/// is true the centered response is additionally divided by its sample
/// standard deviation, which is the convention under which standardized-scale
/// coefficient tables are comparable across datasets.
pub fn standardize_opts(
    raw_y: &DVector<f64>,
    raw_x: &DMatrix<f64>,
    scale_response: bool,
) -> Result<RegressionData, ModelError> {
    let n = raw_x.nrows();
    let p = raw_x.ncols();
    if p == 0 {
        return Err(ModelError::NoColumns);
    }
    if n < 2 {
        return Err(ModelError::TooFewRows { rows: n });
    }
    if raw_y.len() != n {
        return Err(ModelError::DimensionMismatch { y_len: raw_y.len(), x_rows: n });
    }
    for i in 0..n {
        if !raw_y[i].is_finite() {
            return Err(ModelError::NonFinite { row: i, column: None });
        }
        for j in 0..p {
            if !raw_x[(i, j)].is_finite() {
                return Err(ModelError::NonFinite { row: i, column: Some(j) });
            }
        }
    }

    let response_mean = raw_y.mean();
    let mut y = raw_y.add_scalar(-response_mean);
    let response_scale = if scale_response {
        let ss: f64 = y.iter().map(|v| v * v).sum();
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        if !(sd > 0.0) {
            return Err(ModelError::ConstantResponse);
        }
        y /= sd;
        sd
    } else {
        1.0
    };

    let mut x = raw_x.clone();
    let mut column_means = DVector::zeros(p);
    let mut column_scales = DVector::zeros(p);
    for j in 0..p {
        let mean = x.column(j).mean();
        let mut ss = 0.0;
        for i in 0..n {
            x[(i, j)] -= mean;
            ss += x[(i, j)] * x[(i, j)];
        }
        let sd = (ss / (n as f64 - 1.0)).sqrt();
        if !(sd > 0.0) {
            return Err(ModelError::ConstantColumn { column: j });
        }
        for i in 0..n {
            x[(i, j)] /= sd;
        }
        column_means[j] = mean;
        column_scales[j] = sd;
    }

    Ok(RegressionData {
        y,
        x,
        n,
        p,
        column_means,
        column_scales,
        response_mean,
        response_scale,
    })
}

// ---------------------------------------------------------------------------
// Prior specification
// ---------------------------------------------------------------------------

/// Penalty family: the inverse double exponential prior, or its inverse
/// generalized Gaussian extension with shape `alpha` (`alpha = 1` is
/// identical to IDE).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyFamily {
    Ide,
    Igg { alpha: f64 },
}

impl PenaltyFamily {
    /// Shape exponent of the family (1 for IDE).
    pub fn alpha(&self) -> f64 {
        match self {
            PenaltyFamily::Ide => 1.0,
            PenaltyFamily::Igg { alpha } => *alpha,
        }
    }
}

/// How the penalty scale lambda is handled over the course of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    /// Hold lambda constant.
    Fixed { lambda: f64 },
    /// Monte Carlo EM: maximize the marginal likelihood over lambda by
    /// alternating Gibbs runs with closed-form EM updates (driven by
    /// `hyper::run_mcem`, not by `sampler::run_chain` directly).
    Mcem { lambda_init: f64, em_iters: usize },
    /// Full Bayes: conjugate Gamma(a, b) hyperprior, lambda redrawn from its
    /// conditional each iteration.
    Hyperprior { a: f64, b: f64 },
}

/// Prior specification: penalty family plus lambda handling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub family: PenaltyFamily,
    pub lambda_mode: LambdaMode,
}

impl PriorSpec {
    pub fn ide_fixed(lambda: f64) -> Self {
        Self { family: PenaltyFamily::Ide, lambda_mode: LambdaMode::Fixed { lambda } }
    }

    pub fn ide_hyperprior(a: f64, b: f64) -> Self {
        Self { family: PenaltyFamily::Ide, lambda_mode: LambdaMode::Hyperprior { a, b } }
    }

    pub fn ide_mcem(lambda_init: f64, em_iters: usize) -> Self {
        Self { family: PenaltyFamily::Ide, lambda_mode: LambdaMode::Mcem { lambda_init, em_iters } }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let PenaltyFamily::Igg { alpha } = self.family {
            if !(alpha > 0.0) {
                return Err(ModelError::InvalidPrior(format!("IGG alpha must be > 0, got {alpha}")));
            }
        }
        match self.lambda_mode {
            LambdaMode::Fixed { lambda } => {
                if !(lambda > 0.0) {
                    return Err(ModelError::InvalidPrior(format!("fixed lambda must be > 0, got {lambda}")));
                }
            }
            LambdaMode::Mcem { lambda_init, em_iters } => {
                if !(lambda_init > 0.0) {
                    return Err(ModelError::InvalidPrior(format!(
                        "MCEM lambda_init must be > 0, got {lambda_init}"
                    )));
                }
                if em_iters == 0 {
                    return Err(ModelError::InvalidPrior("MCEM em_iters must be >= 1".into()));
                }
            }
            LambdaMode::Hyperprior { a, b } => {
                if !(a > 0.0 && b > 0.0) {
                    return Err(ModelError::InvalidPrior(format!(
                        "hyperprior (a, b) must be positive, got ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Chain configuration and state
// ---------------------------------------------------------------------------

/// Gibbs chain configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCMCConfig {
    pub sampler: SamplerKind,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Coordinate-Gibbs sweeps inside each mid-truncated MVN draw.
    pub inner_mvn_sweeps: usize,
    /// Testing hook: hold sigma^2 at this value and skip its update.
    pub fix_sigma2: Option<f64>,
}

impl MCMCConfig {
    pub fn new(sampler: SamplerKind, seed: u64) -> Self {
        Self {
            sampler,
            iterations: 11_000,
            burn_in: 1_000,
            seed,
            inner_mvn_sweeps: 1,
            fix_sigma2: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.iterations == 0 {
            return Err(ModelError::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(ModelError::InvalidConfig(format!(
                "burn_in ({}) must be < iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.inner_mvn_sweeps == 0 {
            return Err(ModelError::InvalidConfig("inner_mvn_sweeps must be >= 1".into()));
        }
        if let Some(s2) = self.fix_sigma2 {
            if !(s2 > 0.0) {
                return Err(ModelError::InvalidConfig(format!("fix_sigma2 must be > 0, got {s2}")));
            }
        }
        Ok(())
    }
}

impl Default for MCMCConfig {
    fn default() -> Self {
        Self::new(SamplerKind::Smtn, 0)
    }
}

/// Current state of one Gibbs chain. `tau` and `zeta` are populated only by
/// the SMTN sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: DVector<f64>,
    pub u: DVector<f64>,
    pub tau: Option<DVector<f64>>,
    pub zeta: Option<DVector<f64>>,
    pub sigma2: f64,
    pub lambda: f64,
}

// ---------------------------------------------------------------------------
// Posterior draws and summaries
// ---------------------------------------------------------------------------

/// Post-burn-in draws with full configuration provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    /// Kept iterations x p.
    pub beta_draws: DMatrix<f64>,
    pub sigma2_draws: DVector<f64>,
    /// Empty when lambda was held fixed.
    pub lambda_draws: DVector<f64>,
    /// Latent scale draws, kept iterations x p (the EM update consumes these).
    pub u_draws: DMatrix<f64>,
    pub config_echo: MCMCConfig,
    /// Prior under which the stored draws were produced. A chain run at a
    /// point lambda echoes `LambdaMode::Fixed`, which is how downstream
    /// selection recovers the value when `lambda_draws` is empty.
    pub prior_echo: PriorSpec,
}

impl PosteriorDraws {
    /// Number of stored (post-burn-in) iterations.
    pub fn kept(&self) -> usize {
        self.beta_draws.nrows()
    }
}

/// Posterior summary of a fitted chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub posterior_mean: DVector<f64>,
    pub posterior_median: DVector<f64>,
    pub ci_lower: DVector<f64>,
    pub ci_upper: DVector<f64>,
    /// Batch-means Monte Carlo standard error of each posterior mean.
    pub mcse: DVector<f64>,
    pub lambda_mean: Option<f64>,
    pub lambda_median: Option<f64>,
    pub level: f64,
}

/// Linear-interpolation quantile (R type 7) of an ascending-sorted slice.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * q;
    let lo = h.floor() as usize;
    let hi = lo + 1;
    if hi >= n {
        return sorted[n - 1];
    }
    let w = h - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

/// Batch-means Monte Carlo standard error of the mean of a (possibly
/// autocorrelated) sequence, using floor(sqrt(len)) batches. Returns 0 when
/// fewer than two batches fit.
pub fn batch_means_mcse(xs: &[f64]) -> f64 {
    let n = xs.len();
    let b = (n as f64).sqrt().floor() as usize;
    if b < 2 {
        return 0.0;
    }
    let m = n / b; // batch length; leading remainder dropped
    let start = n - b * m;
    let mut means = Vec::with_capacity(b);
    for k in 0..b {
        let s: f64 = xs[start + k * m..start + (k + 1) * m].iter().sum();
        means.push(s / m as f64);
    }
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|v| (v - grand) * (v - grand)).sum::<f64>() / (b as f64 - 1.0);
    (var / b as f64).sqrt()
}

/// Elementwise posterior means, medians, equal-tailed credible intervals at
/// the given level, and batch-means MCSEs.
pub fn summarize(draws: &PosteriorDraws, level: f64) -> Result<FitSummary, ModelError> {
    let kept = draws.kept();
    if kept == 0 {
        return Err(ModelError::EmptyDraws);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(ModelError::InvalidLevel(level));
    }
    let p = draws.beta_draws.ncols();
    let q_lo = (1.0 - level) / 2.0;
    let q_hi = 1.0 - q_lo;

    let mut posterior_mean = DVector::zeros(p);
    let mut posterior_median = DVector::zeros(p);
    let mut ci_lower = DVector::zeros(p);
    let mut ci_upper = DVector::zeros(p);
    let mut mcse = DVector::zeros(p);
    let mut col = vec![0.0f64; kept];
    for j in 0..p {
        for i in 0..kept {
            col[i] = draws.beta_draws[(i, j)];
        }
        posterior_mean[j] = col.iter().sum::<f64>() / kept as f64;
        mcse[j] = batch_means_mcse(&col);
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        posterior_median[j] = quantile_type7(&col, 0.5);
        ci_lower[j] = quantile_type7(&col, q_lo);
        ci_upper[j] = quantile_type7(&col, q_hi);
    }

    let (lambda_mean, lambda_median) = if draws.lambda_draws.is_empty() {
        (None, None)
    } else {
        let mut l: Vec<f64> = draws.lambda_draws.iter().copied().collect();
        let mean = l.iter().sum::<f64>() / l.len() as f64;
        l.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (Some(mean), Some(quantile_type7(&l, 0.5)))
    };

    Ok(FitSummary {
        posterior_mean,
        posterior_median,
        ci_lower,
        ci_upper,
        mcse,
        lambda_mean,
        lambda_median,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SamplerKind;

    fn draws_from_rows(rows: Vec<Vec<f64>>) -> PosteriorDraws {
        let kept = rows.len();
        let p = rows[0].len();
        let beta = DMatrix::from_fn(kept, p, |i, j| rows[i][j]);
        PosteriorDraws {
            beta_draws: beta,
            sigma2_draws: DVector::repeat(kept, 1.0),
            lambda_draws: DVector::zeros(0),
            u_draws: DMatrix::zeros(kept, p),
            config_echo: MCMCConfig::new(SamplerKind::Smtn, 1),
            prior_echo: PriorSpec::ide_fixed(1.0),
        }
    }

    #[test]
    fn standardize_reference_example() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = DMatrix::from_vec(3, 1, vec![10.0, 20.0, 30.0]);
        let d = standardize(&y, &x).unwrap();
        assert!((d.y[0] + 1.0).abs() < 1e-12 && d.y[1].abs() < 1e-12 && (d.y[2] - 1.0).abs() < 1e-12);
        for i in 0..3 {
            assert!((d.x[(i, 0)] - d.y[i]).abs() < 1e-12);
        }
        assert!((d.column_scales[0] - 10.0).abs() < 1e-12);
        assert!((d.response_mean - 2.0).abs() < 1e-12);
        assert_eq!(d.response_scale, 1.0);
    }

    #[test]
    fn standardize_rejects_bad_input() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let constant = DMatrix::from_vec(3, 1, vec![5.0, 5.0, 5.0]);
        assert!(matches!(
            standardize(&y, &constant),
            Err(ModelError::ConstantColumn { column: 0 })
        ));
        let with_nan = DMatrix::from_vec(3, 1, vec![1.0, f64::NAN, 3.0]);
        assert!(matches!(
            standardize(&y, &with_nan),
            Err(ModelError::NonFinite { row: 1, column: Some(0) })
        ));
        let bad_y = DVector::from_vec(vec![1.0, f64::INFINITY, 3.0]);
        let ok_x = DMatrix::from_vec(3, 1, vec![1.0, 2.0, 4.0]);
        assert!(matches!(
            standardize(&bad_y, &ok_x),
            Err(ModelError::NonFinite { row: 1, column: None })
        ));
    }

    #[test]
    fn standardized_moments_are_exact() {
        // Deterministic but irregular design.
        let n = 40;
        let p = 3;
        let x = DMatrix::from_fn(n, p, |i, j| ((i * 7 + j * 13) % 23) as f64 + (i as f64).sin());
        let y = DVector::from_fn(n, |i, _| (i as f64).cos() * 3.0 + 1.0);
        let d = standardize(&y, &x).unwrap();
        assert!(d.y.mean().abs() < 1e-10);
        for j in 0..p {
            let col = d.x.column(j);
            assert!(col.mean().abs() < 1e-10, "column {j} mean");
            let ss: f64 = col.iter().map(|v| v * v).sum();
            let sd = (ss / (n as f64 - 1.0)).sqrt();
            assert!((sd - 1.0).abs() < 1e-10, "column {j} sd = {sd}");
        }
    }

    #[test]
    fn raw_scale_round_trip() {
        let n = 30;
        let p = 2;
        let x = DMatrix::from_fn(n, p, |i, j| ((i + 1) as f64).ln() * (j + 1) as f64 + (i % 5) as f64);
        let y = DVector::from_fn(n, |i, _| 2.0 + 0.5 * x[(i, 0)] - 1.5 * x[(i, 1)] + (i as f64).sin());
        for scale_response in [false, true] {
            let d = standardize_opts(&y, &x, scale_response).unwrap();
            let beta_std = DVector::from_vec(vec![0.7, -0.3]);
            let (raw, intercept) = d.coefficients_raw(&beta_std);
            for i in 0..n {
                let fitted_std: f64 = d.response_mean
                    + d.response_scale * (d.x.row(i) * &beta_std)[0];
                let fitted_raw: f64 = intercept + x[(i, 0)] * raw[0] + x[(i, 1)] * raw[1];
                assert!(
                    (fitted_std - fitted_raw).abs() < 1e-10,
                    "row {i}: {fitted_std} vs {fitted_raw}"
                );
            }
        }
    }

    #[test]
    fn summarize_degenerate_and_alternating() {
        let d = draws_from_rows(vec![vec![2.5, -1.0]; 50]);
        let s = summarize(&d, 0.95).unwrap();
        assert_eq!(s.posterior_mean[0], 2.5);
        assert_eq!(s.posterior_median[1], -1.0);
        assert_eq!(s.ci_lower[0], 2.5);
        assert_eq!(s.ci_upper[0], 2.5);
        assert_eq!(s.mcse[0], 0.0);
        assert!(s.lambda_mean.is_none());

        let rows: Vec<Vec<f64>> = (0..1000).map(|i| vec![if i % 2 == 0 { -1.0 } else { 1.0 }]).collect();
        let d = draws_from_rows(rows);
        let s = summarize(&d, 0.95).unwrap();
        assert!(s.posterior_mean[0].abs() < 1e-12);
        assert_eq!(s.ci_lower[0], -1.0);
        assert_eq!(s.ci_upper[0], 1.0);
    }

    #[test]
    fn summarize_iid_normal_reference() {
        let mut rng = crate::dist::Rng::from_seed(301);
        let n = 10_000;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.standard_normal()]).collect();
        let d = draws_from_rows(rows);
        let s = summarize(&d, 0.95).unwrap();
        assert!(s.posterior_mean[0].abs() < 4.0 / (n as f64).sqrt());
        assert!((s.ci_lower[0] + 1.96).abs() < 0.08, "lower = {}", s.ci_lower[0]);
        assert!((s.ci_upper[0] - 1.96).abs() < 0.08, "upper = {}", s.ci_upper[0]);
        // MCSE of an iid-normal mean should be close to 1/sqrt(n).
        let expect = 1.0 / (n as f64).sqrt();
        assert!(s.mcse[0] > 0.5 * expect && s.mcse[0] < 2.0 * expect, "mcse = {}", s.mcse[0]);
    }

    #[test]
    fn summarize_rejects_empty_and_bad_level() {
        let d = PosteriorDraws {
            beta_draws: DMatrix::zeros(0, 2),
            sigma2_draws: DVector::zeros(0),
            lambda_draws: DVector::zeros(0),
            u_draws: DMatrix::zeros(0, 2),
            config_echo: MCMCConfig::default(),
            prior_echo: PriorSpec::ide_fixed(1.0),
        };
        assert!(matches!(summarize(&d, 0.95), Err(ModelError::EmptyDraws)));
        let d = draws_from_rows(vec![vec![1.0]; 10]);
        assert!(matches!(summarize(&d, 1.0), Err(ModelError::InvalidLevel(_))));
    }

    #[test]
    fn quantile_type7_reference() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&xs, 0.5), 2.5);
        assert_eq!(quantile_type7(&xs, 0.0), 1.0);
        assert_eq!(quantile_type7(&xs, 1.0), 4.0);
        assert!((quantile_type7(&xs, 0.25) - 1.75).abs() < 1e-15);
        let odd = [1.0, 2.0, 10.0];
        assert_eq!(quantile_type7(&odd, 0.5), 2.0);
    }

    #[test]
    fn config_and_prior_validation() {
        assert!(MCMCConfig::new(SamplerKind::Smdp, 0).validate().is_ok());
        let mut c = MCMCConfig::new(SamplerKind::Smtn, 0);
        c.burn_in = c.iterations;
        assert!(c.validate().is_err());
        assert!(PriorSpec::ide_fixed(0.0).validate().is_err());
        assert!(PriorSpec::ide_hyperprior(0.001, 0.001).validate().is_ok());
        assert!(PriorSpec::ide_mcem(1.0, 0).validate().is_err());
        let igg = PriorSpec {
            family: PenaltyFamily::Igg { alpha: -1.0 },
            lambda_mode: LambdaMode::Fixed { lambda: 1.0 },
        };
        assert!(igg.validate().is_err());
    }
}
