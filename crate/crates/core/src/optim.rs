//! Supremum estimation over hypothesis members by multi-start projected
//! gradient ascent plus random search.
//!
//! The discrepancy and Rademacher definitions are all suprema of smooth (or
//! piecewise-smooth) objectives over norm balls; this module provides a
//! deterministic lower-bound estimator for them. Gradients are numerical
//! (central differences), steps use backtracking halving, and every restart
//! draws from a stream derived from the caller's seed, so more budget can
//! only improve the best value found.

use crate::hypotheses::HypothesisClass;
use crate::rng::{derive_seed, rng_from_seed};

/// Search budget and optimizer constants. The defaults are the toolkit-wide
/// choice: 16 restarts of 200 projected-gradient iterations with central
/// differences of step 1e-5 and initial step size 0.1, plus 256 random
/// probes.
#[derive(Clone, Copy, Debug)]
pub struct OptBudget {
    pub restarts: usize,
    pub max_iters: usize,
    pub random_probes: usize,
    pub init_step: f64,
    pub fd_step: f64,
}

impl Default for OptBudget {
    fn default() -> Self {
        OptBudget {
            restarts: 16,
            max_iters: 200,
            random_probes: 256,
            init_step: 0.1,
            fd_step: 1e-5,
        }
    }
}

impl OptBudget {
    /// A cheaper budget for inner loops (per-repetition bound validation).
    pub fn light() -> Self {
        OptBudget {
            restarts: 4,
            max_iters: 60,
            random_probes: 64,
            ..OptBudget::default()
        }
    }

    /// Random search only.
    pub fn random_only(probes: usize) -> Self {
        OptBudget {
            restarts: 0,
            max_iters: 0,
            random_probes: probes,
            ..OptBudget::default()
        }
    }
}

/// A feasible search domain: one member, or an (h, h') pair.
pub struct MemberSpace<'a> {
    classes: Vec<&'a HypothesisClass>,
}

impl<'a> MemberSpace<'a> {
    pub fn single(class: &'a HypothesisClass) -> Self {
        MemberSpace {
            classes: vec![class],
        }
    }

    pub fn pair(class: &'a HypothesisClass) -> Self {
        MemberSpace {
            classes: vec![class, class],
        }
    }

    pub fn dim(&self) -> usize {
        self.classes.iter().map(|c| c.param_dim()).sum()
    }

    pub fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for c in &self.classes {
            out.extend(c.sample_member(rng));
        }
        out
    }

    pub fn project(&self, x: &mut [f64]) {
        let mut offset = 0;
        for c in &self.classes {
            let d = c.param_dim();
            c.project(&mut x[offset..offset + d]);
            offset += d;
        }
    }

    /// Split a flat point into its member slices.
    pub fn split<'b>(&self, x: &'b [f64]) -> Vec<&'b [f64]> {
        let mut out = Vec::with_capacity(self.classes.len());
        let mut offset = 0;
        for c in &self.classes {
            let d = c.param_dim();
            out.push(&x[offset..offset + d]);
            offset += d;
        }
        out
    }
}

/// Outcome of a supremum search.
#[derive(Clone, Debug)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// True when the best point came from a gradient run rather than a
    /// random probe.
    pub from_gradient: bool,
}

/// Maximize `f` over the member space. Deterministic given the seed; the
/// value is monotone nondecreasing in the budget's restart/probe counts
/// because probes and restarts are consumed as a prefix of a fixed stream.
pub fn maximize<F>(space: &MemberSpace, f: F, budget: &OptBudget, seed: u64) -> SupEstimate
where
    F: Fn(&[f64]) -> f64,
{
    let mut best_x = {
        let mut rng = rng_from_seed(derive_seed(seed, 0));
        let mut x0 = space.sample(&mut rng);
        space.project(&mut x0);
        x0
    };
    let mut best_v = f(&best_x);
    let mut best_grad = false;

    // random probes: stream 1
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    for _ in 0..budget.random_probes {
        let mut x = space.sample(&mut rng);
        space.project(&mut x);
        let v = f(&x);
        if v > best_v {
            best_v = v;
            best_x = x;
            best_grad = false;
        }
    }

    // gradient restarts: streams 2..
    for r in 0..budget.restarts {
        let mut rng = rng_from_seed(derive_seed(seed, 2 + r as u64));
        let mut x = space.sample(&mut rng);
        space.project(&mut x);
        let (v, xv) = ascend(space, &f, x, budget);
        if v > best_v {
            best_v = v;
            best_x = xv;
            best_grad = true;
        }
    }

    SupEstimate {
        value: best_v,
        argmax: best_x,
        from_gradient: best_grad,
    }
}

fn ascend<F>(space: &MemberSpace, f: &F, mut x: Vec<f64>, budget: &OptBudget) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let mut fx = f(&x);
    let mut grad = vec![0.0; n];
    for _ in 0..budget.max_iters {
        for i in 0..n {
            let orig = x[i];
            x[i] = orig + budget.fd_step;
            let fp = f(&x);
            x[i] = orig - budget.fd_step;
            let fm = f(&x);
            x[i] = orig;
            grad[i] = (fp - fm) / (2.0 * budget.fd_step);
        }
        let gnorm = crate::linalg::norm2(&grad);
        if gnorm < 1e-12 {
            break;
        }
        let mut step = budget.init_step;
        let mut improved = false;
        for _ in 0..30 {
            let mut cand: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi + step * gi / gnorm)
                .collect();
            space.project(&mut cand);
            let fc = f(&cand);
            if fc > fx + 1e-15 {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (fx, x)
}
