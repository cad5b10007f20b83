//! Serializable result documents. Field order is declaration order and no
//! timestamps are recorded, so identical runs serialize byte-identically.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct DataEcho {
    pub path: String,
    pub n: usize,
    pub p: usize,
    pub response: String,
    pub predictors: Vec<String>,
}

#[derive(Serialize)]
pub struct ConfigEcho {
    pub sampler: String,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub lambda_mode: String,
    pub scale_response: bool,
    pub level: f64,
}

#[derive(Serialize)]
pub struct LambdaReport {
    pub mode: String,
    /// Point value for fixed/apriori modes and the MCEM terminal value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Posterior summaries when lambda was sampled under a hyperprior.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    /// Overlap bound used by the apriori selector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_bound: Option<f64>,
    /// EM path (first entry is the initial value) for MCEM runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcem_path: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcem_converged: Option<bool>,
}

#[derive(Serialize)]
pub struct ScalarSummary {
    pub mean: f64,
    pub median: f64,
}

#[derive(Serialize)]
pub struct CoefficientReport {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub mcse: f64,
    /// Effective sample size; null when the chain is too short to estimate.
    pub ess: Option<f64>,
    /// Point estimate mapped back to the raw predictor scale.
    pub raw_estimate: f64,
}

#[derive(Serialize)]
pub struct SelectionReport {
    pub support: Vec<String>,
    pub support_indices: Vec<usize>,
    pub beta_refit: Vec<f64>,
    pub objective: f64,
    pub lambda_used: f64,
}

#[derive(Serialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub data: DataEcho,
    pub config: ConfigEcho,
    pub lambda: LambdaReport,
    pub sigma2: ScalarSummary,
    pub intercept_raw: f64,
    pub coefficients: Vec<CoefficientReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionReport>,
}

#[derive(Serialize)]
pub struct ScenarioEcho {
    pub id: String,
    pub n: usize,
    pub p: usize,
    pub structure: String,
    pub rho: f64,
    pub sigma: f64,
    pub train_fraction: f64,
    pub beta0: Vec<f64>,
}

#[derive(Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub median_mse: f64,
    /// Median balanced accuracy; null when undefined for the scenario truth.
    pub median_bar: Option<f64>,
    pub median_model_size: f64,
    pub failures: usize,
}

#[derive(Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub scenario: ScenarioEcho,
    pub replications: usize,
    pub seed: u64,
    pub sampler: String,
    pub iterations: usize,
    pub burn_in: usize,
    pub results: Vec<MethodSummary>,
}

#[derive(Serialize)]
pub struct CvReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub data: DataEcho,
    pub method: String,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub sampler: String,
    pub iterations: usize,
    pub burn_in: usize,
    pub mspe: f64,
    pub model_size: f64,
    pub fold_mses: Vec<f64>,
}
