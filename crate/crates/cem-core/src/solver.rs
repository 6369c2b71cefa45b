//! Projected FISTA with an elastic-net proximal step, plus the outer search
//! over the loss weight `c`.
//!
//! One run minimizes `g(δ) + beta·‖δ‖₁` over a per-feature box, where `g` is
//! the smooth part of the mode's objective. Starting from `δ⁰ = y⁰ = 0`,
//! iteration `k` (counted from 0, so the first update carries no momentum)
//! performs
//!
//! ```text
//! α_k   = lr0 / sqrt(k + 1)
//! δ^k+1 = Π( S(y^k − α_k ∇g(y^k), α_k·beta) )
//! y^k+1 = Π( δ^k+1 + k/(k+3) · (δ^k+1 − δ^k) )
//! ```
//!
//! with `S` the element-wise shrinkage-thresholding operator and `Π` the
//! projection onto the feasible box (both sequences are projected). The
//! shrinkage threshold scales with the step size — the standard proximal
//! treatment of `beta·‖δ‖₁`, and the reading under which the iteration's
//! fixed points are the elastic-net minimizers for every step size.
//!
//! Among all iterates that satisfy the mode's success predicate, the one
//! with the smallest elastic-net value `beta·‖δ‖₁ + ‖δ‖₂²` is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DenseAutoencoder, DenseNetwork};
use crate::objective::{
    argmax, meets_margin, smooth_gradient, Example, Mode, ObjectiveParams,
};

/// Per-feature box bounds of the data space plus the mode-specific rules
/// that carve out the perturbation box.
///
/// With anchor `x0` and background `b` (the per-feature "no signal" level):
///
/// - PN mode: `0 ≤ δᵢ ≤ hiᵢ − x0ᵢ` — additions only, staying inside the
///   data box.
/// - PP mode: `0 ≤ δᵢ ≤ max(x0ᵢ − bᵢ, 0)` — a sub-part of the existing
///   signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSpace {
    lo: Vec<f64>,
    hi: Vec<f64>,
    background: Vec<f64>,
    mode: Mode,
    anchor: Vec<f64>,
    /// Upper bound of the perturbation box (lower bound is 0).
    delta_hi: Vec<f64>,
}

impl FeasibleSpace {
    pub fn new(
        lo: Vec<f64>,
        hi: Vec<f64>,
        background: Vec<f64>,
        mode: Mode,
        anchor: Vec<f64>,
    ) -> Result<Self> {
        let dim = lo.len();
        for (name, v) in [("hi", &hi), ("background", &background), ("anchor", &anchor)] {
            if v.len() != dim {
                return Err(Error::dim(format!("feasible space {name}"), dim, v.len()));
            }
        }
        for i in 0..dim {
            if !(lo[i] <= background[i] && background[i] <= hi[i]) {
                return Err(Error::InvalidConfig(format!(
                    "feature {i}: background {} outside bounds [{}, {}]",
                    background[i], lo[i], hi[i]
                )));
            }
            if !(lo[i] <= anchor[i] && anchor[i] <= hi[i]) {
                return Err(Error::InvalidConfig(format!(
                    "feature {i}: example value {} outside bounds [{}, {}]",
                    anchor[i], lo[i], hi[i]
                )));
            }
        }
        let delta_hi = match mode {
            Mode::Pn => hi.iter().zip(&anchor).map(|(h, x)| h - x).collect(),
            Mode::Pp => anchor
                .iter()
                .zip(&background)
                .map(|(x, b)| (x - b).max(0.0))
                .collect(),
        };
        Ok(Self {
            lo,
            hi,
            background,
            mode,
            anchor,
            delta_hi,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn anchor(&self) -> &[f64] {
        self.anchor
            .as_slice()
    }

    pub fn background(&self) -> &[f64] {
        &self.background
    }

    pub fn data_bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Upper bounds of the perturbation box (the lower bound is 0 in both
    /// modes).
    pub fn delta_upper(&self) -> &[f64] {
        &self.delta_hi
    }

    /// Componentwise clamp onto the perturbation box. Idempotent.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::dim("projection input", self.dim(), v.len()));
        }
        Ok(v.iter()
            .zip(&self.delta_hi)
            .map(|(x, h)| x.clamp(0.0, (*h).max(0.0)))
            .collect())
    }

    /// Exact componentwise feasibility (no epsilon).
    pub fn contains(&self, delta: &[f64]) -> bool {
        delta.len() == self.dim()
            && delta
                .iter()
                .zip(&self.delta_hi)
                .all(|(d, h)| *d >= 0.0 && *d <= (*h).max(0.0))
    }
}

/// Element-wise shrinkage-thresholding: maps `z` toward zero by `threshold`,
/// producing exact zeros inside `[-threshold, threshold]`. Total function;
/// callers pass a non-negative threshold.
pub fn shrink(z: &[f64], threshold: f64) -> Vec<f64> {
    debug_assert!(threshold >= 0.0);
    z.iter()
        .map(|&v| {
            if v > threshold {
                v - threshold
            } else if v < -threshold {
                v + threshold
            } else {
                0.0
            }
        })
        .collect()
}

/// `beta·‖δ‖₁ + ‖δ‖₂²` — the candidate-selection criterion.
pub fn elastic_net_value(delta: &[f64], beta: f64) -> f64 {
    let l1: f64 = delta.iter().map(|d| d.abs()).sum();
    let l2: f64 = delta.iter().map(|d| d * d).sum();
    beta * l1 + l2
}

/// Solver settings. Defaults follow the reference schedule: `beta = 0.1`,
/// `c0 = 0.1`, 9 searches, 1000 iterations, initial step 0.01 with
/// square-root decay, `gamma ∈ {0, 100}` (0 unless an autoencoder is used).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kappa: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Initial loss weight for the outer search.
    pub c0: f64,
    pub num_searches: usize,
    pub iterations: usize,
    /// Initial step size; iteration `k` uses `lr0 / sqrt(k + 1)`.
    pub lr0: f64,
    /// Carried for reproducibility bookkeeping; the solver itself is
    /// deterministic and draws no randomness.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kappa: 0.0,
            beta: 0.1,
            gamma: 0.0,
            c0: 0.1,
            num_searches: 9,
            iterations: 1000,
            lr0: 0.01,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.num_searches == 0 {
            return Err(Error::InvalidConfig("num_searches must be >= 1".into()));
        }
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            return Err(Error::InvalidConfig("kappa must be >= 0".into()));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidConfig("beta must be >= 0".into()));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidConfig("gamma must be >= 0".into()));
        }
        if !self.c0.is_finite() || self.c0 <= 0.0 {
            return Err(Error::InvalidConfig("c0 must be > 0".into()));
        }
        if !self.lr0.is_finite() || self.lr0 <= 0.0 {
            return Err(Error::InvalidConfig("lr0 must be > 0".into()));
        }
        Ok(())
    }
}

/// One line of the per-search audit trail: the best elastic-net value the
/// search produced and whether that search succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLogEntry {
    pub search: usize,
    pub elastic_net: f64,
    pub success: bool,
}

/// Outcome of a solve: the selected perturbation with its diagnostics.
///
/// On success the delta satisfies the mode's margin predicate exactly as
/// re-scored through the model, and lies inside the feasible box
/// componentwise with no tolerance. On failure the final iterate and its
/// diagnostics are returned instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub delta: Vec<f64>,
    pub success: bool,
    pub achieved_class: usize,
    pub elastic_net_value: f64,
    pub c_used: f64,
    pub iterations_run: usize,
    pub candidate_log: Vec<CandidateLogEntry>,
}

impl PerturbationResult {
    /// Exact count of nonzero components (shrinkage produces exact zeros).
    pub fn nonzero_count(&self) -> usize {
        self.delta.iter().filter(|d| **d != 0.0).count()
    }
}

/// Core projected-FISTA loop over an arbitrary smooth gradient. `on_iterate`
/// sees every `δ^(k+1)`, `k ∈ {0, …, iterations−1}`; the final iterate is
/// returned.
fn fista_loop<G, F>(
    mut grad: G,
    project: impl Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    beta: f64,
    iterations: usize,
    lr0: f64,
    mut on_iterate: F,
) -> Result<Vec<f64>>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
    F: FnMut(usize, &[f64]),
{
    let mut delta = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    for k in 0..iterations {
        let alpha = lr0 / ((k + 1) as f64).sqrt();
        let g = grad(&y)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverAbort {
                iteration: k,
                message: "non-finite gradient".into(),
            });
        }
        let stepped: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - alpha * gi).collect();
        let next = project(&shrink(&stepped, alpha * beta));
        let momentum = k as f64 / (k as f64 + 3.0);
        let slack: Vec<f64> = next
            .iter()
            .zip(&delta)
            .map(|(n, d)| n + momentum * (n - d))
            .collect();
        y = project(&slack);
        delta = next;
        on_iterate(k, &delta);
    }
    Ok(delta)
}

/// Minimizes `g(δ) + beta·‖δ‖₁` over the box `[lo, hi]` with projected
/// FISTA and returns the final iterate. This is the same update loop
/// [`fista_run`] drives with the full objective; exposed separately so
/// arbitrary smooth objectives (e.g. separable quadratics with a closed-form
/// solution) can exercise it directly.
pub fn fista_minimize<G>(
    grad: G,
    lo: &[f64],
    hi: &[f64],
    beta: f64,
    iterations: usize,
    lr0: f64,
) -> Result<Vec<f64>>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if lo.len() != hi.len() {
        return Err(Error::dim("box bounds", lo.len(), hi.len()));
    }
    let dim = lo.len();
    let project = move |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (l, h))| x.clamp(*l, *h))
            .collect()
    };
    fista_loop(grad, project, dim, beta, iterations, lr0, |_, _| {})
}

struct SearchBest {
    delta: Vec<f64>,
    elastic_net: f64,
    achieved_class: usize,
}

/// Runs `cfg.iterations` projected-FISTA iterations of the mode's objective
/// at the fixed loss weight `p.c` and selects, among the iterates whose
/// hinge reached its floor, the one with minimal elastic-net value. If no
/// iterate succeeds the final iterate is returned with `success = false`.
pub fn fista_run(
    ex: &Example,
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    space: &FeasibleSpace,
    p: &ObjectiveParams,
    cfg: &SolverConfig,
) -> Result<PerturbationResult> {
    cfg.validate()?;
    if space.mode() != p.mode {
        return Err(Error::InvalidConfig(
            "feasible space mode does not match objective mode".into(),
        ));
    }
    if space.dim() != ex.x0.len() {
        return Err(Error::dim("feasible space", ex.x0.len(), space.dim()));
    }
    if space.anchor() != ex.x0.as_slice() {
        return Err(Error::InvalidConfig(
            "feasible space anchor differs from the example".into(),
        ));
    }
    if net.input_dim() != ex.x0.len() {
        return Err(Error::dim("network input", net.input_dim(), ex.x0.len()));
    }

    let mut best: Option<SearchBest> = None;
    let score_point = |delta: &[f64]| -> Vec<f64> {
        match p.mode {
            Mode::Pn => ex.x0.iter().zip(delta).map(|(x, d)| x + d).collect(),
            Mode::Pp => delta.to_vec(),
        }
    };

    let mut track_err: Option<Error> = None;
    let final_delta = fista_loop(
        |y| smooth_gradient(y, ex, net, ae, p),
        |v| space.project(v).expect("dimension checked"),
        space.dim(),
        p.beta,
        cfg.iterations,
        cfg.lr0,
        |_, delta| {
            if track_err.is_some() {
                return;
            }
            let scores = match net.predict(&score_point(delta)) {
                Ok(s) => s,
                Err(e) => {
                    track_err = Some(e);
                    return;
                }
            };
            match meets_margin(&scores, ex.t0, p.kappa, p.mode) {
                Ok(true) => {
                    let en = elastic_net_value(delta, p.beta);
                    if best.as_ref().is_none_or(|b| en < b.elastic_net) {
                        best = Some(SearchBest {
                            delta: delta.to_vec(),
                            elastic_net: en,
                            achieved_class: argmax(&scores),
                        });
                    }
                }
                Ok(false) => {}
                Err(e) => track_err = Some(e),
            }
        },
    )?;
    if let Some(e) = track_err {
        return Err(e);
    }

    let result = match best {
        Some(b) => PerturbationResult {
            candidate_log: vec![CandidateLogEntry {
                search: 0,
                elastic_net: b.elastic_net,
                success: true,
            }],
            delta: b.delta,
            success: true,
            achieved_class: b.achieved_class,
            elastic_net_value: b.elastic_net,
            c_used: p.c,
            iterations_run: cfg.iterations,
        },
        None => {
            let scores = net.predict(&score_point(&final_delta))?;
            let en = elastic_net_value(&final_delta, p.beta);
            PerturbationResult {
                candidate_log: vec![CandidateLogEntry {
                    search: 0,
                    elastic_net: en,
                    success: false,
                }],
                delta: final_delta,
                success: false,
                achieved_class: argmax(&scores),
                elastic_net_value: en,
                c_used: p.c,
                iterations_run: cfg.iterations,
            }
        }
    };
    Ok(result)
}

/// Outer search over the loss weight `c`, bracketing the smallest weight
/// that still succeeds: on failure the lower bound rises and `c` is
/// multiplied by 10 (until an upper bound exists, after which the bracket is
/// bisected); on success `c` becomes the midpoint of the known-failing and
/// known-succeeding weights. Returns the successful result with minimal
/// elastic-net value across all searches, or the last failed run when
/// nothing succeeds. The candidate log keeps one entry per search for later
/// audit of the selection rule.
pub fn c_search(
    ex: &Example,
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    space: &FeasibleSpace,
    cfg: &SolverConfig,
) -> Result<PerturbationResult> {
    cfg.validate()?;
    if cfg.gamma > 0.0 && ae.is_none() {
        return Err(Error::MissingAutoencoder);
    }

    let mut c = cfg.c0;
    let mut c_lo: f64 = 0.0;
    let mut c_hi: Option<f64> = None;
    let mut log = Vec::with_capacity(cfg.num_searches);
    let mut best: Option<PerturbationResult> = None;
    let mut last_failure: Option<PerturbationResult> = None;

    for search in 0..cfg.num_searches {
        let p = ObjectiveParams::new(c, cfg.beta, cfg.gamma, cfg.kappa, space.mode())?;
        let run = fista_run(ex, net, ae, space, &p, cfg)?;
        log.push(CandidateLogEntry {
            search,
            elastic_net: run.elastic_net_value,
            success: run.success,
        });
        if run.success {
            c_hi = Some(c_hi.map_or(c, |h| h.min(c)));
            if best
                .as_ref()
                .is_none_or(|b| run.elastic_net_value < b.elastic_net_value)
            {
                best = Some(run);
            }
            c = (c_lo + c_hi.expect("just set")) / 2.0;
        } else {
            c_lo = c_lo.max(c);
            last_failure = Some(run);
            c = match c_hi {
                None => c * 10.0,
                Some(h) => (c_lo + h) / 2.0,
            };
        }
    }

    let mut result = best.or(last_failure).expect("num_searches >= 1");
    result.candidate_log = log;
    Ok(result)
}
