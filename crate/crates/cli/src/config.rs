//! Experiment configuration: one JSON file per run, with command-line flags
//! overriding individual keys.

use seqbound_core::hypotheses::{BoundedLoss, HypothesisClass};
use seqbound_core::partitions::{Partition, PartitionConstruction};
use seqbound_core::processes::ProcessSpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// How to partition the series index set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionConfig {
    Hierarchical { depth: u32, cut_depth: u32 },
    Whole,
    Singleton,
    Explicit { sets: Vec<Vec<usize>> },
}

impl PartitionConfig {
    pub fn build(&self, m: usize) -> seqbound_core::Result<Partition> {
        match self {
            PartitionConfig::Hierarchical { depth, cut_depth } => {
                seqbound_core::partitions::hierarchical_partition(*depth, *cut_depth)
            }
            PartitionConfig::Whole => Ok(Partition::whole(m)),
            PartitionConfig::Singleton => Ok(Partition::singletons(m)),
            PartitionConfig::Explicit { sets } => {
                Partition::new(sets.clone(), m, PartitionConstruction::Custom)
            }
        }
    }
}

/// Cell of the regime-experiment grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegimeCell {
    pub m: usize,
    pub t_len: usize,
}

/// Generator template instantiated per regime cell (shared AR weights,
/// independent noise).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegimeTemplate {
    pub weights: Vec<f64>,
    pub noise_std: f64,
    pub burn_in: usize,
}

impl Default for RegimeTemplate {
    fn default() -> Self {
        RegimeTemplate {
            weights: vec![0.4, 0.2],
            noise_std: 0.2,
            burn_in: 200,
        }
    }
}

/// Frozen fixture for the tent counterexample demonstration. The defaults
/// were calibrated against the brute-force grid and spectral oracles.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TentExampleConfig {
    pub t_len: usize,
    /// Series count of the panel used for the local discrepancy average.
    pub m_local: usize,
    /// Series per Monte-Carlo trial in the expected-discrepancy estimate.
    pub trial_m: usize,
    pub b_lo: f64,
    pub b_hi: f64,
    /// Norm cap of the last-value linear class used on the two-point setup.
    pub two_point_cap: f64,
    /// Norm cap of the full-window linear class used on the drift setup.
    pub drift_cap: f64,
    pub n_trials: usize,
}

impl Default for TentExampleConfig {
    fn default() -> Self {
        TentExampleConfig {
            t_len: 24,
            m_local: 400,
            trial_m: 4,
            b_lo: 0.5,
            b_hi: 1.0,
            two_point_cap: 0.25,
            drift_cap: 0.2,
            n_trials: 2000,
        }
    }
}

/// Explicit ingredient values for `evaluate-bounds`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BoundInputs {
    pub max_rademacher: Option<f64>,
    pub discrepancy: Option<f64>,
    pub partition_sizes: Option<Vec<usize>>,
    pub betas_per_collection: Option<Vec<f64>>,
    pub m: Option<usize>,
    pub t_len: Option<usize>,
    pub mean_local_discrepancy: Option<f64>,
    pub log_covering: Option<f64>,
    pub mean_delta_t: Option<f64>,
    pub bar_beta_mass: Option<f64>,
    pub min_collection_size: Option<usize>,
    pub k: Option<usize>,
    pub loss_cap: Option<f64>,
}

/// The single structured configuration shared by all subcommands; each
/// command reads the keys it needs and rejects runs missing required ones.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ExperimentConfig {
    // data sources
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel: Option<String>,

    // model
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<HypothesisClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<BoundedLoss>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,

    // shared numeric knobs
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_repetitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cond_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sigma_draws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_histories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    /// Which dataset split feeds example-based estimators:
    /// "seq2seq" (default), "local", or "hybrid".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,

    // optimizer budget
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_random_probes: Option<usize>,

    // mixing estimation
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_halfwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,

    // regime experiment
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<RegimeCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds_per_cell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub template: Option<RegimeTemplate>,

    // independence-surrogate check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yu_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yu_seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yu_joint: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yu_f: Option<Vec<Vec<f64>>>,

    // tent counterexample
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tent: Option<TentExampleConfig>,

    // bound evaluation
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_inputs: Option<BoundInputs>,

    // output
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config JSON: {e}"))
    }

    /// Apply command-line overrides (flags win over config keys).
    pub fn with_overrides(
        mut self,
        seed: Option<u64>,
        out: Option<String>,
        format: Option<OutputFormat>,
    ) -> Self {
        if seed.is_some() {
            self.seed = seed;
        }
        if out.is_some() {
            self.out = out;
        }
        if format.is_some() {
            self.format = format;
        }
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(d) = self.delta {
            if !(0.0 < d && d < 1.0) {
                return Err(format!("delta must lie in (0, 1), got {d}"));
            }
        }
        if let Some(path) = &self.panel {
            if !Path::new(path).exists() {
                return Err(format!("panel file does not exist: {path}"));
            }
        }
        Ok(())
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn budget(&self) -> seqbound_core::optim::OptBudget {
        let mut b = seqbound_core::optim::OptBudget::default();
        if let Some(r) = self.opt_restarts {
            b.restarts = r;
        }
        if let Some(i) = self.opt_iters {
            b.max_iters = i;
        }
        if let Some(p) = self.opt_random_probes {
            b.random_probes = p;
        }
        b
    }

    pub fn loss_or_default(&self) -> BoundedLoss {
        self.loss.unwrap_or_else(BoundedLoss::squared)
    }

    pub fn split_or_default(&self) -> &str {
        self.split.as_deref().unwrap_or("seq2seq")
    }
}
