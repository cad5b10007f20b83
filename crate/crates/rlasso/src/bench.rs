//! Synthetic-data benchmarking: named simulation scenarios, design and
//! response generation, evaluation metrics (out-of-sample MSE, balanced
//! accuracy, model size), repeated k-fold cross-validation, and a scenario
//! runner that fits several methods on replicated train/test splits.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::RngCore;
use thiserror::Error;

use crate::dist::Rng;
use crate::freq::{
    exhaustive_search, fbp_select, s5_search, FreqError, ModelSelection, S5Config,
    DEFAULT_MAX_EXHAUSTIVE_P,
};
use crate::hyper::{default_overlap_bound, run_mcem, select_lambda_apriori, HyperError};
use crate::model::{
    quantile_type7, standardize_opts, MCMCConfig, ModelError, PosteriorDraws, PriorSpec,
    RegressionData,
};
use crate::sampler::{run_chain, SamplerError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: design is {n}x{p} but beta0 has length {len}")]
    DimensionMismatch { n: usize, p: usize, len: usize },
    #[error("design covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("need n >= 2k for {k}-fold cross-validation, got n = {n}")]
    FoldTooSmall { n: usize, k: usize },
    #[error("invalid argument: {0}")]
    InvalidParam(String),
    #[error("method {method} failed on every replicate; last error: {last}")]
    AllReplicatesFailed { method: Method, last: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Freq(#[from] FreqError),
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

/// Design covariance structures: isotropic, compound symmetry, first-order
/// autoregressive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignStructure {
    Is,
    Cs,
    Ar,
}

impl fmt::Display for DesignStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignStructure::Is => write!(f, "IS"),
            DesignStructure::Cs => write!(f, "CS"),
            DesignStructure::Ar => write!(f, "AR"),
        }
    }
}

impl FromStr for DesignStructure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "IS" => Ok(DesignStructure::Is),
            "CS" => Ok(DesignStructure::Cs),
            "AR" => Ok(DesignStructure::Ar),
            other => Err(format!("unknown design structure '{other}' (expected IS, CS, or AR)")),
        }
    }
}

/// Named benchmark scenarios (Roman numerals) plus `Custom` for ad hoc specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[allow(clippy::upper_case_acronyms)]
pub enum ScenarioId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
    XI,
    XII,
    XIII,
    XIV,
    XV,
    XVI,
    XVII,
    XVIII,
    XIX,
    XX,
    XXI,
    XXII,
    XXIII,
    XXIV,
    Custom,
}

impl ScenarioId {
    pub const ALL_NAMED: [ScenarioId; 24] = [
        ScenarioId::I,
        ScenarioId::II,
        ScenarioId::III,
        ScenarioId::IV,
        ScenarioId::V,
        ScenarioId::VI,
        ScenarioId::VII,
        ScenarioId::VIII,
        ScenarioId::IX,
        ScenarioId::X,
        ScenarioId::XI,
        ScenarioId::XII,
        ScenarioId::XIII,
        ScenarioId::XIV,
        ScenarioId::XV,
        ScenarioId::XVI,
        ScenarioId::XVII,
        ScenarioId::XVIII,
        ScenarioId::XIX,
        ScenarioId::XX,
        ScenarioId::XXI,
        ScenarioId::XXII,
        ScenarioId::XXIII,
        ScenarioId::XXIV,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::I => "I",
            ScenarioId::II => "II",
            ScenarioId::III => "III",
            ScenarioId::IV => "IV",
            ScenarioId::V => "V",
            ScenarioId::VI => "VI",
            ScenarioId::VII => "VII",
            ScenarioId::VIII => "VIII",
            ScenarioId::IX => "IX",
            ScenarioId::X => "X",
            ScenarioId::XI => "XI",
            ScenarioId::XII => "XII",
            ScenarioId::XIII => "XIII",
            ScenarioId::XIV => "XIV",
            ScenarioId::XV => "XV",
            ScenarioId::XVI => "XVI",
            ScenarioId::XVII => "XVII",
            ScenarioId::XVIII => "XVIII",
            ScenarioId::XIX => "XIX",
            ScenarioId::XX => "XX",
            ScenarioId::XXI => "XXI",
            ScenarioId::XXII => "XXII",
            ScenarioId::XXIII => "XXIII",
            ScenarioId::XXIV => "XXIV",
            ScenarioId::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase();
        ScenarioId::ALL_NAMED
            .iter()
            .find(|id| id.name() == up)
            .copied()
            .ok_or_else(|| format!("unknown scenario '{s}' (expected I through XXIV)"))
    }
}

/// A simulation configuration: dimensions, design covariance, noise level,
/// true coefficients, and the train fraction of each replicate split.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub n: usize,
    pub p: usize,
    pub structure: DesignStructure,
    pub rho: f64,
    pub sigma: f64,
    pub beta0: DVector<f64>,
    pub train_fraction: f64,
}

/// True coefficients of the highly sparse family: (5, 0, ..., 0).
fn beta0_highly_sparse(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[0] = 5.0;
    b
}

/// True coefficients of the fairly sparse family: (3, 1.5, 0, 0, 2, 0, ..., 0).
fn beta0_fairly_sparse(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[0] = 3.0;
    b[1] = 1.5;
    b[4] = 2.0;
    b
}

/// True coefficients of the moderately sparse family:
/// (1/2, 3/4, 1, 5/4, 3/2, 0, ..., 0) with per-coefficient alternating signs.
fn beta0_moderately_sparse(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    let mags = [0.5, 0.75, 1.0, 1.25, 1.5];
    for (j, &m) in mags.iter().enumerate() {
        b[j] = if j % 2 == 0 { m } else { -m };
    }
    b
}

/// True coefficients of the highly dense family: all entries 0.85.
fn beta0_highly_dense(p: usize) -> DVector<f64> {
    DVector::repeat(p, 0.85)
}

impl ScenarioSpec {
    /// Builds one of the named benchmark scenarios.
    pub fn table1(id: ScenarioId) -> Result<Self, BenchError> {
        use DesignStructure::{Ar, Cs, Is};
        use ScenarioId::*;
        let (n, p, structure, rho, sigma, beta0): (usize, usize, _, f64, f64, DVector<f64>) =
            match id {
                I => (50, 20, Is, 0.0, 3.0, beta0_highly_sparse(20)),
                II => (100, 10, Cs, 0.5, 3.0, beta0_highly_sparse(10)),
                III => (100, 50, Ar, 0.95, 1.5, beta0_highly_sparse(50)),
                IV => (50, 50, Is, 0.0, 1.5, beta0_highly_sparse(50)),
                V => (100, 200, Cs, 0.5, 3.0, beta0_highly_sparse(200)),
                VI => (50, 100, Ar, 0.95, 1.5, beta0_highly_sparse(100)),
                VII => (400, 20, Is, 0.0, 3.0, beta0_fairly_sparse(20)),
                VIII => (50, 20, Cs, 0.5, 3.0, beta0_fairly_sparse(20)),
                IX => (100, 10, Ar, 0.95, 3.0, beta0_fairly_sparse(10)),
                X => (100, 100, Is, 0.0, 1.5, beta0_fairly_sparse(100)),
                XI => (50, 50, Cs, 0.5, 1.5, beta0_fairly_sparse(50)),
                XII => (100, 200, Ar, 0.95, 1.5, beta0_fairly_sparse(200)),
                XIII => (400, 50, Is, 0.0, 3.0, beta0_moderately_sparse(50)),
                XIV => (400, 200, Cs, 0.5, 1.5, beta0_moderately_sparse(200)),
                XV => (100, 50, Ar, 0.95, 1.5, beta0_moderately_sparse(50)),
                XVI => (50, 50, Is, 0.0, 1.5, beta0_moderately_sparse(50)),
                XVII => (100, 200, Cs, 0.5, 3.0, beta0_moderately_sparse(200)),
                XVIII => (50, 200, Ar, 0.95, 3.0, beta0_moderately_sparse(200)),
                XIX => (50, 20, Is, 0.0, 3.0, beta0_highly_dense(20)),
                XX => (400, 100, Cs, 0.5, 1.5, beta0_highly_dense(100)),
                XXI => (400, 200, Ar, 0.95, 3.0, beta0_highly_dense(200)),
                XXII => (100, 200, Is, 0.0, 1.5, beta0_highly_dense(200)),
                XXIII => (100, 200, Cs, 0.5, 3.0, beta0_highly_dense(200)),
                XXIV => (50, 50, Ar, 0.95, 1.5, beta0_highly_dense(50)),
                Custom => {
                    return Err(BenchError::InvalidSpec(
                        "Custom has no table entry; use ScenarioSpec::custom".into(),
                    ))
                }
            };
        let spec =
            ScenarioSpec { id, n, p, structure, rho, sigma, beta0, train_fraction: 0.5 };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds an ad hoc scenario with the same validation as named ones.
    pub fn custom(
        n: usize,
        p: usize,
        structure: DesignStructure,
        rho: f64,
        sigma: f64,
        beta0: DVector<f64>,
        train_fraction: f64,
    ) -> Result<Self, BenchError> {
        let spec =
            ScenarioSpec { id: ScenarioId::Custom, n, p, structure, rho, sigma, beta0, train_fraction };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n < 4 || self.p == 0 {
            return Err(BenchError::InvalidSpec(format!(
                "need n >= 4 and p >= 1, got ({}, {})",
                self.n, self.p
            )));
        }
        if self.beta0.len() != self.p {
            return Err(BenchError::InvalidSpec(format!(
                "beta0 has length {} but p = {}",
                self.beta0.len(),
                self.p
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(BenchError::InvalidSpec(format!("rho must be in [0, 1), got {}", self.rho)));
        }
        if !(self.sigma > 0.0) {
            return Err(BenchError::InvalidSpec(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(BenchError::InvalidSpec(format!(
                "train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// Indices (0-based) of the nonzero true coefficients.
    pub fn truth_support(&self) -> Vec<usize> {
        (0..self.p).filter(|&j| self.beta0[j] != 0.0).collect()
    }
}

// ---------------------------------------------------------------------------
// Data generation
// ---------------------------------------------------------------------------

/// Draws an n x p design with iid N(0, Sigma) rows, Sigma determined by the
/// structure and correlation strength, generated through the Cholesky factor
/// of Sigma.
pub fn generate_design(
    n: usize,
    p: usize,
    structure: DesignStructure,
    rho: f64,
    rng: &mut Rng,
) -> Result<DMatrix<f64>, BenchError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(BenchError::InvalidParam(format!("rho must be in [0, 1), got {rho}")));
    }
    let sigma = match structure {
        DesignStructure::Is => DMatrix::identity(p, p),
        DesignStructure::Cs => DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho }),
        DesignStructure::Ar => {
            DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
        }
    };
    let chol = Cholesky::new(sigma).ok_or(BenchError::NotPositiveDefinite)?;
    let z = DMatrix::from_fn(n, p, |_, _| rng.standard_normal());
    // Rows x_i' = z_i' L' have covariance L L' = Sigma.
    Ok(z * chol.l().transpose())
}

/// Draws y = X beta0 + sigma * z with iid standard normal z. `sigma = 0`
/// yields the noiseless response.
pub fn generate_response(
    x: &DMatrix<f64>,
    beta0: &DVector<f64>,
    sigma: f64,
    rng: &mut Rng,
) -> Result<DVector<f64>, BenchError> {
    if x.ncols() != beta0.len() {
        return Err(BenchError::DimensionMismatch {
            n: x.nrows(),
            p: x.ncols(),
            len: beta0.len(),
        });
    }
    if !(sigma >= 0.0) {
        return Err(BenchError::InvalidParam(format!("sigma must be >= 0, got {sigma}")));
    }
    let mut y = x * beta0;
    for i in 0..y.len() {
        y[i] += sigma * rng.standard_normal();
    }
    Ok(y)
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Balanced accuracy rate of a selected support against the true support:
/// (TP/(TP+FN) + TN/(TN+FP)) / 2 over p candidate predictors (0-based
/// indices). Returns None (undefined) when the truth has no positives or no
/// negatives, which makes one of the denominators vanish.
pub fn balanced_accuracy(selected: &[usize], truth_support: &[usize], p: usize) -> Option<f64> {
    let sel: BTreeSet<usize> = selected.iter().copied().collect();
    let truth: BTreeSet<usize> = truth_support.iter().copied().collect();
    assert!(
        sel.iter().chain(truth.iter()).all(|&j| j < p),
        "support indices must lie in 0..p"
    );
    let tp = sel.intersection(&truth).count();
    let fp = sel.difference(&truth).count();
    let fn_ = truth.difference(&sel).count();
    let tn = p - tp - fp - fn_;
    if tp + fn_ == 0 || tn + fp == 0 {
        return None;
    }
    Some(0.5 * (tp as f64 / (tp + fn_) as f64 + tn as f64 / (tn + fp) as f64))
}

// ---------------------------------------------------------------------------
// Methods
// ---------------------------------------------------------------------------

/// Fitting methods for cross-validation and scenario runs. The Bayesian
/// variants differ only in how the penalty scale is chosen: before sampling
/// (BayesA), by Monte Carlo EM (BayesB), or by a full hyperprior (BayesC).
/// `Rlasso` is the frequentist search with least-squares refitting; `Ols`
/// is the unpenalized baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ols,
    BayesA,
    BayesB,
    BayesC,
    Rlasso,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::Ols, Method::BayesA, Method::BayesB, Method::BayesC, Method::Rlasso];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ols => write!(f, "ols"),
            Method::BayesA => write!(f, "bayesA"),
            Method::BayesB => write!(f, "bayesB"),
            Method::BayesC => write!(f, "bayesC"),
            Method::Rlasso => write!(f, "rlasso"),
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ols" => Ok(Method::Ols),
            "bayesa" => Ok(Method::BayesA),
            "bayesb" => Ok(Method::BayesB),
            "bayesc" => Ok(Method::BayesC),
            "rlasso" => Ok(Method::Rlasso),
            other => Err(format!(
                "unknown method '{other}' (expected ols, bayesA, bayesB, bayesC, or rlasso)"
            )),
        }
    }
}

/// Monte Carlo EM budget used when `Method::BayesB` is fitted inside
/// cross-validation or a scenario run.
const BAYES_B_EM_ITERS: usize = 15;
const BAYES_B_INNER_ITERS: usize = 500;

/// A fitted method on standardized training data: coefficients on the
/// standardized scale (used for prediction) and the selected support (used
/// for model size and balanced accuracy).
struct FitOutcome {
    beta_std: DVector<f64>,
    support: Vec<usize>,
}

fn posterior_mean(draws: &PosteriorDraws) -> DVector<f64> {
    let kept = draws.kept() as f64;
    DVector::from_fn(draws.beta_draws.ncols(), |j, _| draws.beta_draws.column(j).sum() / kept)
}

fn bayes_select(
    draws: &PosteriorDraws,
    data: &RegressionData,
    seed: u64,
) -> Result<Vec<usize>, BenchError> {
    let s5 = S5Config::for_data(data, seed.wrapping_add(0x5e1ec7));
    Ok(fbp_select(draws, data, &s5)?.support)
}

/// Fits one method on standardized training data. `seed` drives every
/// stochastic element (chains, searches) so replicates are reproducible.
fn fit_standardized(
    data: &RegressionData,
    method: Method,
    base: &MCMCConfig,
    seed: u64,
) -> Result<FitOutcome, BenchError> {
    let mut config = base.clone();
    config.seed = seed;
    match method {
        Method::Ols => {
            if data.n <= data.p {
                return Err(BenchError::InvalidParam(format!(
                    "OLS needs n > p, got ({}, {})",
                    data.n, data.p
                )));
            }
            let xtx = data.x.tr_mul(&data.x);
            let chol = Cholesky::new(xtx).ok_or(FreqError::RankDeficient)?;
            let beta = chol.solve(&data.x.tr_mul(&data.y));
            Ok(FitOutcome { beta_std: beta, support: (0..data.p).collect() })
        }
        Method::BayesA => {
            let lambda = select_lambda_apriori(data, default_overlap_bound(data.p))?;
            let draws = run_chain(data, &PriorSpec::ide_fixed(lambda), &config)?;
            let support = bayes_select(&draws, data, seed)?;
            Ok(FitOutcome { beta_std: posterior_mean(&draws), support })
        }
        Method::BayesB => {
            let (_, draws) =
                run_mcem(data, &config, 1.0, BAYES_B_EM_ITERS, BAYES_B_INNER_ITERS)?;
            let support = bayes_select(&draws, data, seed)?;
            Ok(FitOutcome { beta_std: posterior_mean(&draws), support })
        }
        Method::BayesC => {
            let draws = run_chain(data, &PriorSpec::ide_hyperprior(0.001, 0.001), &config)?;
            let support = bayes_select(&draws, data, seed)?;
            Ok(FitOutcome { beta_std: posterior_mean(&draws), support })
        }
        Method::Rlasso => {
            let lambda = select_lambda_apriori(data, default_overlap_bound(data.p))?;
            let selection: ModelSelection = if data.p <= DEFAULT_MAX_EXHAUSTIVE_P {
                exhaustive_search(data, lambda, DEFAULT_MAX_EXHAUSTIVE_P)?
            } else {
                s5_search(data, lambda, &S5Config::for_data(data, seed))?
            };
            // Debiased prediction: least-squares refit on the selected set
            // (beta_refit is already a full-length vector, zeros elsewhere).
            Ok(FitOutcome { beta_std: selection.beta_refit, support: selection.support })
        }
    }
}

/// Predicts raw-scale responses for the given raw rows from a standardized
/// fit: converts coefficients back to the raw scale with the training
/// standardization and applies the training intercept.
fn predict_raw(train: &RegressionData, beta_std: &DVector<f64>, raw_x: &DMatrix<f64>, rows: &[usize]) -> Vec<f64> {
    let (raw_coef, intercept) = train.coefficients_raw(beta_std);
    rows.iter()
        .map(|&i| {
            let mut v = intercept;
            for j in 0..raw_x.ncols() {
                v += raw_coef[j] * raw_x[(i, j)];
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

/// Result of repeated k-fold cross-validation: the median of per-fold mean
/// squared prediction errors, the mean selected model size, and the raw
/// per-fold errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub mspe: f64,
    pub model_size: f64,
    pub fold_mses: Vec<f64>,
}

/// Random equal partition of 0..n into k folds (sizes differ by at most 1).
pub(crate) fn partition_indices(n: usize, k: usize, rng: &mut Rng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    // Fisher-Yates shuffle driven by the chain RNG for reproducibility.
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0usize;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(idx[start..start + size].to_vec());
        start += size;
    }
    folds
}

/// Fits `method` on the training rows (predictors standardized, response
/// centered but kept on its raw scale) and returns the test-row mean squared
/// prediction error on the raw scale plus the selected support. Exposed so
/// tests can verify folds independently; `kfold_cv` and `run_scenario` are
/// the drivers.
pub fn fold_fit_predict(
    raw_y: &DVector<f64>,
    raw_x: &DMatrix<f64>,
    train_rows: &[usize],
    test_rows: &[usize],
    method: Method,
    base: &MCMCConfig,
    seed: u64,
) -> Result<(f64, Vec<usize>), BenchError> {
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(BenchError::InvalidParam("train and test rows must be nonempty".into()));
    }
    let tr_y = DVector::from_fn(train_rows.len(), |i, _| raw_y[train_rows[i]]);
    let tr_x = DMatrix::from_fn(train_rows.len(), raw_x.ncols(), |i, j| raw_x[(train_rows[i], j)]);
    let train = standardize_opts(&tr_y, &tr_x, false)?;
    let fit = fit_standardized(&train, method, base, seed)?;
    let preds = predict_raw(&train, &fit.beta_std, raw_x, test_rows);
    let mse = test_rows
        .iter()
        .zip(preds.iter())
        .map(|(&i, &p)| (raw_y[i] - p) * (raw_y[i] - p))
        .sum::<f64>()
        / test_rows.len() as f64;
    Ok((mse, fit.support))
}

/// Repeated k-fold cross-validation on raw data. Each fold's model is fitted
/// on the standardized training fold only; held-out predictions are made on
/// the raw scale with the training fold's standardization parameters. The
/// reported MSPE is the median of per-fold mean squared errors across all
/// folds and repeats; model size is the mean selected-support size.
pub fn kfold_cv(
    raw_y: &DVector<f64>,
    raw_x: &DMatrix<f64>,
    k: usize,
    repeats: usize,
    method: Method,
    base: &MCMCConfig,
    rng: &mut Rng,
) -> Result<CvResult, BenchError> {
    let n = raw_y.len();
    if raw_x.nrows() != n {
        return Err(BenchError::DimensionMismatch { n, p: raw_x.ncols(), len: raw_x.nrows() });
    }
    if k < 2 || n < 2 * k {
        return Err(BenchError::FoldTooSmall { n, k });
    }
    if repeats == 0 {
        return Err(BenchError::InvalidParam("repeats must be >= 1".into()));
    }
    let mut fold_mses = Vec::with_capacity(k * repeats);
    let mut sizes = Vec::with_capacity(k * repeats);
    for _ in 0..repeats {
        let folds = partition_indices(n, k, rng);
        for f in 0..k {
            let test_rows = &folds[f];
            let train_rows: Vec<usize> =
                (0..k).filter(|&g| g != f).flat_map(|g| folds[g].iter().copied()).collect();
            let seed = rng.next_u64();
            let (mse, support) =
                fold_fit_predict(raw_y, raw_x, &train_rows, test_rows, method, base, seed)?;
            fold_mses.push(mse);
            sizes.push(support.len() as f64);
        }
    }
    let mut sorted = fold_mses.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mspe = quantile_type7(&sorted, 0.5);
    let model_size = sizes.iter().sum::<f64>() / sizes.len() as f64;
    Ok(CvResult { mspe, model_size, fold_mses })
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

/// One replicate's evaluation of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub method: Method,
    /// Out-of-sample mean squared error (per test point, raw scale).
    pub mse: f64,
    /// Balanced accuracy; None when undefined for the scenario's truth.
    pub bar: Option<f64>,
    pub model_size: usize,
}

/// Median evaluation of one method across scenario replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub method: Method,
    /// Median out-of-sample MSE across successful replicates.
    pub mse: f64,
    /// Median balanced accuracy; None when undefined for every replicate.
    pub bar: Option<f64>,
    /// Median selected model size.
    pub model_size: f64,
    /// Replicates dropped because the fit failed.
    pub failures: usize,
    pub records: Vec<ReplicateRecord>,
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_type7(values, 0.5)
}

/// Runs a scenario: per replicate, draws a fresh design and response, splits
/// into train/test, standardizes the training half, fits each method, and
/// scores out-of-sample MSE, balanced accuracy, and model size. Reports
/// per-method medians across replicates; failed fits are excluded with a
/// count.
pub fn run_scenario(
    spec: &ScenarioSpec,
    replications: usize,
    methods: &[Method],
    base: &MCMCConfig,
    master_seed: u64,
) -> Result<Vec<EvalResult>, BenchError> {
    spec.validate()?;
    if replications == 0 || methods.is_empty() {
        return Err(BenchError::InvalidParam("need >= 1 replication and >= 1 method".into()));
    }
    let truth = spec.truth_support();
    let mut per_method: Vec<Vec<ReplicateRecord>> = vec![Vec::new(); methods.len()];
    let mut failures = vec![0usize; methods.len()];
    let mut last_error = vec![String::new(); methods.len()];

    for r in 0..replications {
        let mut rng = Rng::with_stream(master_seed, r as u64);
        let x = generate_design(spec.n, spec.p, spec.structure, spec.rho, &mut rng)?;
        let y = generate_response(&x, &spec.beta0, spec.sigma, &mut rng)?;
        let split = partition_indices(spec.n, 2, &mut rng);
        // partition_indices(n, 2) halves the data; resize the train side to
        // the requested fraction.
        let mut all: Vec<usize> = split[0].iter().chain(split[1].iter()).copied().collect();
        let train_count =
            ((spec.n as f64 * spec.train_fraction).round() as usize).clamp(2, spec.n - 1);
        let test_rows: Vec<usize> = all.split_off(train_count);
        let train_rows = all;

        for (m, &method) in methods.iter().enumerate() {
            let seed = rng.next_u64();
            match fold_fit_predict(&y, &x, &train_rows, &test_rows, method, base, seed) {
                Ok((mse, support)) => {
                    let bar = balanced_accuracy(&support, &truth, spec.p);
                    per_method[m].push(ReplicateRecord {
                        replicate: r,
                        method,
                        mse,
                        bar,
                        model_size: support.len(),
                    });
                }
                Err(e) => {
                    failures[m] += 1;
                    last_error[m] = e.to_string();
                }
            }
        }
    }

    let mut out = Vec::with_capacity(methods.len());
    for (m, &method) in methods.iter().enumerate() {
        let records = std::mem::take(&mut per_method[m]);
        if records.is_empty() {
            return Err(BenchError::AllReplicatesFailed {
                method,
                last: last_error[m].clone(),
            });
        }
        let mut mses: Vec<f64> = records.iter().map(|r| r.mse).collect();
        let mut sizes: Vec<f64> = records.iter().map(|r| r.model_size as f64).collect();
        let mut bars: Vec<f64> = records.iter().filter_map(|r| r.bar).collect();
        let bar = if bars.is_empty() { None } else { Some(median(&mut bars)) };
        out.push(EvalResult {
            method,
            mse: median(&mut mses),
            bar,
            model_size: median(&mut sizes),
            failures: failures[m],
            records,
        });
    }
    Ok(out)
}
