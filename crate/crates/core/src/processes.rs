//! Seeded synthetic generators: correlated Gaussian AR panels (hierarchical
//! and geodesic noise covariances) and periodic tent-function panels.
//!
//! All generators are pure functions of their spec, including the seed:
//! equal specs produce bit-identical panels.

use crate::error::{CoreError, Result};
use crate::linalg::{psd_factor, symmetric_eigen, Matrix};
use crate::panel::TimeSeriesPanel;
use crate::rng::{derive_seed, rng_from_seed, standard_normal};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// AR coefficients: one shared vector or one vector per series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    Shared(Vec<f64>),
    PerSeries(Vec<Vec<f64>>),
}

impl WeightSpec {
    pub fn for_series(&self, i: usize) -> &[f64] {
        match self {
            WeightSpec::Shared(w) => w,
            WeightSpec::PerSeries(ws) => &ws[i],
        }
    }

    pub fn lag(&self) -> usize {
        match self {
            WeightSpec::Shared(w) => w.len(),
            WeightSpec::PerSeries(ws) => ws.first().map_or(0, Vec::len),
        }
    }
}

/// Spec for the correlated-noise autoregressive panel generator:
/// `y_{t+1}(i) = w_i . (y_{t-p+1}^t(i)) + eps_{t+1}(i)` with
/// `eps_t ~ N(0, noise_cov)` drawn jointly across series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArCorrelatedSpec {
    pub m: usize,
    pub t_len: usize,
    pub weights: WeightSpec,
    pub noise_cov: Matrix,
    /// Steps simulated and discarded before recording; history starts at zero.
    pub burn_in: usize,
    pub seed: u64,
}

pub const DEFAULT_BURN_IN: usize = 200;

impl ArCorrelatedSpec {
    pub fn lag(&self) -> usize {
        self.weights.lag()
    }

    /// Noise standard deviation of series `i`.
    pub fn noise_std(&self, i: usize) -> f64 {
        self.noise_cov[(i, i)].max(0.0).sqrt()
    }

    /// Noise correlation between series `i` and `j`.
    pub fn noise_correlation(&self, i: usize, j: usize) -> f64 {
        let d = self.noise_std(i) * self.noise_std(j);
        if d == 0.0 {
            0.0
        } else {
            self.noise_cov[(i, j)] / d
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.t_len < 2 {
            return Err(CoreError::InvalidParameter(
                "AR spec requires m >= 1 and T >= 2".into(),
            ));
        }
        if self.noise_cov.nrows() != self.m || self.noise_cov.ncols() != self.m {
            return Err(CoreError::InvalidParameter(
                "noise covariance must be m x m".into(),
            ));
        }
        if !self.noise_cov.is_symmetric(1e-12) {
            return Err(CoreError::InvariantViolation(
                "noise covariance must be symmetric within 1e-12".into(),
            ));
        }
        if self.lag() == 0 {
            return Err(CoreError::InvalidParameter(
                "AR weights must have lag >= 1".into(),
            ));
        }
        if let WeightSpec::PerSeries(ws) = &self.weights {
            if ws.len() != self.m || ws.iter().any(|w| w.len() != self.lag()) {
                return Err(CoreError::InvalidParameter(
                    "per-series weights must be m vectors of equal lag".into(),
                ));
            }
        }
        Ok(())
    }

    /// Spectral radius of the AR companion matrix; < 1 means the recursion
    /// is stationary (after burn-in). Shared-weight specs only need one
    /// evaluation; per-series specs take the maximum.
    pub fn companion_spectral_radius(&self) -> f64 {
        match &self.weights {
            WeightSpec::Shared(w) => companion_spectral_radius(w),
            WeightSpec::PerSeries(ws) => ws
                .iter()
                .map(|w| companion_spectral_radius(w))
                .fold(0.0, f64::max),
        }
    }
}

/// Phase scheme for tent panels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TentPhaseMode {
    /// Start time uniform over the full period: the window law is exactly
    /// shift-invariant.
    UniformOverPeriod,
    /// Start time 0 or T/2 with equal probability (period = T).
    TwoPoint,
    /// All series start at 0 on a tent of period 2T, so every observed
    /// window (and the one-step-ahead continuation) lies on the rising ramp.
    DriftHalfPeriod,
}

/// Spec for panels of sampled tent functions. Each row i observes
/// `f_{b_i}(s_i), ..., f_{b_i}(s_i + T - 1)` where `f_b` is the periodic
/// tent of height `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TentSpec {
    pub m: usize,
    pub t_len: usize,
    /// Peak heights are sampled uniformly from this sub-interval of [0, 1].
    pub b_range: (f64, f64),
    pub phase_mode: TentPhaseMode,
    pub seed: u64,
}

impl TentSpec {
    /// Tent period implied by the phase mode.
    pub fn period(&self) -> usize {
        match self.phase_mode {
            TentPhaseMode::DriftHalfPeriod => 2 * self.t_len,
            _ => self.t_len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.t_len < 2 {
            return Err(CoreError::InvalidParameter(
                "tent spec requires m >= 1 and T >= 2".into(),
            ));
        }
        if !self.t_len.is_multiple_of(2) {
            return Err(CoreError::InvalidParameter(
                "tent spec requires even T".into(),
            ));
        }
        let (lo, hi) = self.b_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(CoreError::InvalidParameter(
                "b_range must be an interval within [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Any generator this toolkit knows how to simulate and condition on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProcessSpec {
    ArCorrelated(ArCorrelatedSpec),
    Tent(TentSpec),
}

impl ProcessSpec {
    pub fn m(&self) -> usize {
        match self {
            ProcessSpec::ArCorrelated(s) => s.m,
            ProcessSpec::Tent(s) => s.m,
        }
    }

    pub fn t_len(&self) -> usize {
        match self {
            ProcessSpec::ArCorrelated(s) => s.t_len,
            ProcessSpec::Tent(s) => s.t_len,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ProcessSpec::ArCorrelated(s) => s.seed,
            ProcessSpec::Tent(s) => s.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> ProcessSpec {
        let mut s = self.clone();
        match &mut s {
            ProcessSpec::ArCorrelated(a) => a.seed = seed,
            ProcessSpec::Tent(t) => t.seed = seed,
        }
        s
    }

    pub fn simulate(&self) -> Result<TimeSeriesPanel> {
        match self {
            ProcessSpec::ArCorrelated(s) => simulate_ar_panel(s),
            ProcessSpec::Tent(s) => simulate_tent_panel(s),
        }
    }
}

/// Result of a covariance construction, including whether the PSD repair
/// path had to clip slightly negative eigenvalues.
#[derive(Clone, Debug)]
pub struct CovarianceBuild {
    pub matrix: Matrix,
    pub repaired: bool,
    pub min_eigenvalue_before: f64,
}

/// Maximum entry-wise change the PSD repair is allowed to introduce.
pub const PSD_REPAIR_TOL: f64 = 1e-6;
/// Eigenvalues below this are treated as genuinely indefinite.
pub const PSD_NEG_EIGEN_TOL: f64 = 1e-9;

/// Validate PSD-ness; clip eigenvalues in [-1e-9, 0] to zero and rebuild if
/// needed. Any entry moving by more than `PSD_REPAIR_TOL` is an error.
pub fn validate_psd(matrix: Matrix) -> Result<CovarianceBuild> {
    let eig = symmetric_eigen(&matrix)?;
    let min_ev = eig.values.first().copied().unwrap_or(0.0);
    if min_ev >= 0.0 {
        return Ok(CovarianceBuild {
            matrix,
            repaired: false,
            min_eigenvalue_before: min_ev,
        });
    }
    if min_ev < -PSD_NEG_EIGEN_TOL {
        return Err(CoreError::CovarianceConstruction(format!(
            "covariance indefinite: min eigenvalue {min_ev:.3e}"
        )));
    }
    let n = matrix.nrows();
    let mut repaired = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += eig.vectors[(i, k)] * eig.values[k].max(0.0) * eig.vectors[(j, k)];
            }
            repaired[(i, j)] = s;
        }
    }
    // keep exact symmetry after the rebuild
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (repaired[(i, j)] + repaired[(j, i)]);
            repaired[(i, j)] = avg;
            repaired[(j, i)] = avg;
        }
    }
    let change = matrix.max_abs_diff(&repaired);
    if change > PSD_REPAIR_TOL {
        return Err(CoreError::CovarianceConstruction(format!(
            "PSD repair would change an entry by {change:.3e} > {PSD_REPAIR_TOL:.1e}"
        )));
    }
    Ok(CovarianceBuild {
        matrix: repaired,
        repaired: true,
        min_eigenvalue_before: min_ev,
    })
}

/// Covariance of a depth-D binary hierarchy over m = 2^D leaves:
/// `cov_ij = decay_base^{-d(i,j)}` where `d(i,j)` is the number of levels
/// from a leaf up to the lowest common ancestor.
pub fn hierarchical_covariance(depth: u32, decay_base: f64) -> Result<CovarianceBuild> {
    if depth < 1 {
        return Err(CoreError::InvalidParameter("tree depth must be >= 1".into()));
    }
    if decay_base <= 1.0 {
        return Err(CoreError::InvalidParameter(
            "decay base must be > 1".into(),
        ));
    }
    let m = 1usize << depth;
    let mut cov = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let d = leaf_distance(i, j, depth);
            cov[(i, j)] = decay_base.powi(-(d as i32));
        }
    }
    validate_psd(cov)
}

/// Levels from a leaf up to the lowest common ancestor of leaves i and j in
/// a complete binary tree of the given depth (0 when i == j).
pub fn leaf_distance(i: usize, j: usize, depth: u32) -> u32 {
    if i == j {
        return 0;
    }
    let diff = (i ^ j) as u64;
    // highest differing bit among the `depth` leaf-index bits
    let highest = 63 - diff.leading_zeros();
    debug_assert!(highest < depth);
    highest + 1
}

/// Covariance over points of the unit sphere:
/// `cov_ij = decay_base^{-arccos(<x_i, x_j>)}`.
pub fn geodesic_covariance(points: &[[f64; 3]], decay_base: f64) -> Result<CovarianceBuild> {
    if decay_base <= 1.0 {
        return Err(CoreError::InvalidParameter(
            "decay base must be > 1".into(),
        ));
    }
    for (idx, p) in points.iter().enumerate() {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidParameter(format!(
                "grid point {idx} has norm {n}, expected unit"
            )));
        }
    }
    let m = points.len();
    let mut cov = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let d = geodesic_distance(&points[i], &points[j]);
            cov[(i, j)] = (-d * decay_base.ln()).exp();
        }
    }
    validate_psd(cov)
}

/// Great-circle distance between two unit vectors.
pub fn geodesic_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    dot.clamp(-1.0, 1.0).acos()
}

/// Reusable AR sampler: the covariance factorization is done once and every
/// draw streams from a seed derived from `(spec.seed, draw_tag)`.
pub struct ArSampler {
    spec: ArCorrelatedSpec,
    factor: Matrix,
    pub factor_clipped: bool,
}

impl ArSampler {
    pub fn new(spec: &ArCorrelatedSpec) -> Result<Self> {
        spec.validate()?;
        let psd = psd_factor(&spec.noise_cov, PSD_NEG_EIGEN_TOL)?;
        Ok(ArSampler {
            spec: spec.clone(),
            factor: psd.factor,
            factor_clipped: psd.clipped,
        })
    }

    /// Simulate one panel; `draw_tag = 0` reproduces `simulate_ar_panel`.
    pub fn draw(&self, draw_tag: u64) -> TimeSeriesPanel {
        let spec = &self.spec;
        let m = spec.m;
        let p = spec.lag();
        let total = spec.burn_in + spec.t_len;
        let mut rng = rng_from_seed(derive_seed(spec.seed, draw_tag));
        let mut history = vec![vec![0.0f64; p]; m]; // ring buffers, zero init
        let mut pos = 0usize;
        let mut out = vec![Vec::with_capacity(spec.t_len); m];
        let mut z = vec![0.0f64; m];
        let mut eps = vec![0.0f64; m];
        for t in 0..total {
            for zi in z.iter_mut() {
                *zi = standard_normal(&mut rng);
            }
            for (i, e) in eps.iter_mut().enumerate() {
                *e = crate::linalg::dot(self.factor.row(i), &z);
            }
            for i in 0..m {
                let w = spec.weights.for_series(i);
                let mut mean = 0.0;
                // w[0] multiplies the most recent value
                for (k, wk) in w.iter().enumerate() {
                    let idx = (pos + p - 1 - k) % p;
                    mean += wk * history[i][idx];
                }
                let y = mean + eps[i];
                history[i][pos % p] = y;
                if t >= spec.burn_in {
                    out[i].push(y);
                }
            }
            pos = (pos + 1) % p.max(1);
        }
        let ids = (0..m).map(|i| format!("s{i}")).collect();
        TimeSeriesPanel::new(out, ids, None).expect("AR simulation produced invalid panel")
    }

    /// Conditional mean of the next value of series `i` given a realized
    /// prefix (reads the last `lag` values; shorter prefixes are zero-padded
    /// on the left, matching the simulator's zero initial history).
    pub fn conditional_mean(&self, i: usize, prefix: &[f64]) -> f64 {
        let w = self.spec.weights.for_series(i);
        let mut mean = 0.0;
        for (k, wk) in w.iter().enumerate() {
            if k < prefix.len() {
                mean += wk * prefix[prefix.len() - 1 - k];
            }
        }
        mean
    }

    /// Conditional standard deviation of any next value of series `i`.
    pub fn conditional_std(&self, i: usize) -> f64 {
        self.spec.noise_std(i)
    }

    pub fn spec(&self) -> &ArCorrelatedSpec {
        &self.spec
    }
}

/// Simulate the correlated AR panel of the spec.
pub fn simulate_ar_panel(spec: &ArCorrelatedSpec) -> Result<TimeSeriesPanel> {
    Ok(ArSampler::new(spec)?.draw(0))
}

/// Tent of height `b` and the given period, evaluated at real `s >= 0`:
/// rises linearly from 0 to `b` over the first half period, falls back to 0
/// over the second, and extends periodically.
pub fn tent_value(b: f64, s: f64, period: f64) -> f64 {
    let s_mod = s.rem_euclid(period);
    if s_mod <= period / 2.0 {
        2.0 * b * s_mod / period
    } else {
        -2.0 * b * s_mod / period + 2.0 * b
    }
}

/// Simulate the tent panel of the spec; phase start times are recorded in
/// the panel metadata.
pub fn simulate_tent_panel(spec: &TentSpec) -> Result<TimeSeriesPanel> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let period = spec.period() as f64;
    let mut values = Vec::with_capacity(spec.m);
    let mut phases = Vec::with_capacity(spec.m);
    for _ in 0..spec.m {
        let (lo, hi) = spec.b_range;
        let b = lo + (hi - lo) * rng.gen::<f64>();
        let s = match spec.phase_mode {
            TentPhaseMode::UniformOverPeriod => rng.gen_range(0..spec.period()) as i64,
            TentPhaseMode::TwoPoint => {
                if rng.gen::<bool>() {
                    (spec.t_len / 2) as i64
                } else {
                    0
                }
            }
            TentPhaseMode::DriftHalfPeriod => 0,
        };
        let row: Vec<f64> = (0..spec.t_len)
            .map(|j| tent_value(b, s as f64 + j as f64, period))
            .collect();
        values.push(row);
        phases.push(s);
    }
    let ids = (0..spec.m).map(|i| format!("s{i}")).collect();
    TimeSeriesPanel::new(values, ids, Some(phases))
}

/// Recover the tent parameters (height, start time) of a simulated row.
///
/// Heights are identifiable from the realized values: modes observing a full
/// period contain the peak; the drift mode is a ramp of slope `b / T`.
pub fn tent_params_from_row(spec: &TentSpec, row: &[f64], phase: i64) -> (f64, i64) {
    let b = match spec.phase_mode {
        TentPhaseMode::DriftHalfPeriod => (row[1] - row[0]) * spec.t_len as f64,
        _ => row.iter().copied().fold(0.0, f64::max),
    };
    (b, phase)
}

/// Spectral radius of the companion matrix of the AR polynomial, i.e. the
/// largest root modulus of `z^p - w_1 z^{p-1} - ... - w_p`.
pub fn companion_spectral_radius(weights: &[f64]) -> f64 {
    let p = weights.len();
    if p == 0 {
        return 0.0;
    }
    // Durand-Kerner on the monic polynomial.
    let coeffs: Vec<f64> = weights.iter().map(|w| -w).collect(); // z^p + c_1 z^{p-1} + ... + c_p
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (1.0, 0.0);
        for c in &coeffs {
            acc = cmul(acc, z);
            acc.0 += c;
        }
        acc
    };
    let mut roots: Vec<(f64, f64)> = (0..p)
        .map(|k| cpow((0.4, 0.9), k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut max_step: f64 = 0.0;
        for i in 0..p {
            let mut denom = (1.0, 0.0);
            for j in 0..p {
                if j != i {
                    denom = cmul(denom, csub(roots[i], roots[j]));
                }
            }
            let step = cdiv(eval(roots[i]), denom);
            roots[i] = csub(roots[i], step);
            max_step = max_step.max(cabs(step));
        }
        if max_step < 1e-13 {
            break;
        }
    }
    roots.iter().map(|r| cabs(*r)).fold(0.0, f64::max)
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn cabs(a: (f64, f64)) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

fn cpow(a: (f64, f64), k: u32) -> (f64, f64) {
    let mut out = (1.0, 0.0);
    for _ in 0..k {
        out = cmul(out, a);
    }
    out
}
