//! Contrastive explanation of a single prediction: a pertinent-negative
//! solve followed by a pertinent-positive solve, assembled into one record.
//!
//! The narrative follows a fixed template:
//!
//! ```text
//! classified as class <t0> because features [<pp indices>] are present
//! and because features [<pn indices>] are absent
//! ```
//!
//! Nonzero components are listed in ascending feature order, by name when a
//! name list is supplied and by index otherwise. A mode that failed or
//! produced an all-zero delta renders as "no pertinent positive features
//! were found" / "no pertinent negative features were found".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DenseAutoencoder, DenseNetwork};
use crate::objective::{argmax, Example, Mode};
use crate::solver::{c_search, FeasibleSpace, PerturbationResult, SolverConfig};

/// Data-space bounds shared by every example of a run; per-example feasible
/// spaces are anchored from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub background: Vec<f64>,
}

impl SpaceSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, background: Vec<f64>) -> Result<Self> {
        if hi.len() != lo.len() || background.len() != lo.len() {
            return Err(Error::dim("space bounds", lo.len(), hi.len().max(background.len())));
        }
        for i in 0..lo.len() {
            if !(lo[i] <= background[i] && background[i] <= hi[i]) {
                return Err(Error::InvalidConfig(format!(
                    "feature {i}: background {} outside bounds [{}, {}]",
                    background[i], lo[i], hi[i]
                )));
            }
        }
        Ok(Self { lo, hi, background })
    }

    /// Uniform scalar bounds across `dim` features.
    pub fn uniform(dim: usize, lo: f64, hi: f64, background: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], vec![background; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn feasible_space(&self, mode: Mode, anchor: &[f64]) -> Result<FeasibleSpace> {
        FeasibleSpace::new(
            self.lo.clone(),
            self.hi.clone(),
            self.background.clone(),
            mode,
            anchor.to_vec(),
        )
    }
}

/// The assembled contrastive explanation for one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub example_id: String,
    pub t0: usize,
    /// Pertinent negative (δ added to `x0` flips the class).
    pub pn: PerturbationResult,
    /// Pertinent positive (δ alone keeps the class).
    pub pp: PerturbationResult,
    /// Class reached by `x0 + pn.delta`; emergent, not user-chosen.
    pub pn_target_class: usize,
    pub narrative: String,
}

impl Explanation {
    /// Indices and values of the nonzero components of a mode's delta.
    pub fn nonzeros(delta: &[f64]) -> Vec<(usize, f64)> {
        delta
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect()
    }
}

fn feature_token(index: usize, names: Option<&[String]>) -> String {
    match names {
        Some(list) => list[index].clone(),
        None => index.to_string(),
    }
}

fn mode_clause(result: &PerturbationResult, names: Option<&[String]>, mode: Mode) -> String {
    let nz = Explanation::nonzeros(&result.delta);
    let (word, none_msg) = match mode {
        Mode::Pp => ("present", "no pertinent positive features were found"),
        Mode::Pn => ("absent", "no pertinent negative features were found"),
    };
    if !result.success || nz.is_empty() {
        return none_msg.to_string();
    }
    let tokens: Vec<String> = nz.iter().map(|(i, _)| feature_token(*i, names)).collect();
    format!("features [{}] are {}", tokens.join(", "), word)
}

/// Renders the narrative, optionally substituting feature names for indices.
pub fn render_narrative(expl: &Explanation, feature_names: Option<&[String]>) -> Result<String> {
    if let Some(names) = feature_names {
        if names.len() != expl.pp.delta.len() {
            return Err(Error::dim("feature names", expl.pp.delta.len(), names.len()));
        }
    }
    Ok(format!(
        "classified as class {} because {} and because {}",
        expl.t0,
        mode_clause(&expl.pp, feature_names, Mode::Pp),
        mode_clause(&expl.pn, feature_names, Mode::Pn),
    ))
}

/// Runs both solves for one example: first the pertinent negative, then the
/// pertinent positive. `ex.t0` must match the model's prediction on `x0`.
/// Failed solves are reported in the result rather than raised as errors.
pub fn explain(
    ex: &Example,
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<Explanation> {
    let scores = net.predict(&ex.x0)?;
    let predicted = argmax(&scores);
    if predicted != ex.t0 {
        return Err(Error::LabelMismatch {
            id: ex.id.clone(),
            declared: ex.t0,
            predicted,
        });
    }
    if space.dim() != ex.x0.len() {
        return Err(Error::dim("space", ex.x0.len(), space.dim()));
    }

    let pn_space = space.feasible_space(Mode::Pn, &ex.x0)?;
    let pn = c_search(ex, net, ae, &pn_space, cfg)?;
    let pp_space = space.feasible_space(Mode::Pp, &ex.x0)?;
    let pp = c_search(ex, net, ae, &pp_space, cfg)?;

    let mut expl = Explanation {
        example_id: ex.id.clone(),
        t0: ex.t0,
        pn_target_class: pn.achieved_class,
        pn,
        pp,
        narrative: String::new(),
    };
    expl.narrative = render_narrative(&expl, None)?;
    Ok(expl)
}

/// Explains a batch sequentially, in input order.
pub fn explain_batch_seq(
    examples: &[Example],
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<Vec<Explanation>> {
    examples
        .iter()
        .map(|ex| explain(ex, net, ae, cfg, space))
        .collect()
}

/// Explains a batch, data-parallel across examples when the `parallel`
/// feature is enabled (the output order is the input order either way).
#[cfg(feature = "parallel")]
pub fn explain_batch(
    examples: &[Example],
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<Vec<Explanation>> {
    use rayon::prelude::*;
    examples
        .par_iter()
        .map(|ex| explain(ex, net, ae, cfg, space))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn explain_batch(
    examples: &[Example],
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<Vec<Explanation>> {
    explain_batch_seq(examples, net, ae, cfg, space)
}

/// One solve's share of the serialized explanation record. The delta is
/// stored sparsely as `(index, value)` pairs in ascending index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub success: bool,
    pub c_used: f64,
    pub achieved_class: usize,
    pub elastic_net: f64,
    pub iterations_run: usize,
    pub delta: Vec<(usize, f64)>,
}

impl ModeRecord {
    fn from_result(r: &PerturbationResult) -> Self {
        Self {
            success: r.success,
            c_used: r.c_used,
            achieved_class: r.achieved_class,
            elastic_net: r.elastic_net_value,
            iterations_run: r.iterations_run,
            delta: Explanation::nonzeros(&r.delta),
        }
    }
}

/// The documented wire schema of one explanation, serialized as a single
/// JSON object (one line per example in record files).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub example_id: String,
    pub t0: usize,
    pub pn: ModeRecord,
    pub pp: ModeRecord,
    pub pn_target_class: usize,
    pub narrative: String,
}

impl Explanation {
    pub fn record(&self) -> ExplanationRecord {
        ExplanationRecord {
            example_id: self.example_id.clone(),
            t0: self.t0,
            pn: ModeRecord::from_result(&self.pn),
            pp: ModeRecord::from_result(&self.pp),
            pn_target_class: self.pn_target_class,
            narrative: self.narrative.clone(),
        }
    }
}

impl ExplanationRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: 0,
            message: format!("explanation record: {e}"),
        })
    }
}
