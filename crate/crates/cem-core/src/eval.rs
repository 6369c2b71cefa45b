//! Quantitative evaluation: feed each pertinent positive, and each original
//! input plus its pertinent negative, back through the classifier and report
//! class-retention and class-switch rates together with sparsity statistics.
//!
//! Rates condition on solver success — a failed solve produces nothing to
//! evaluate — and the denominators are always reported. With zero successes
//! a rate is undefined and serialized as `null`, never as 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{explain_batch, explain_batch_seq, Explanation, SpaceSpec};
use crate::model::{DenseAutoencoder, DenseNetwork};
use crate::objective::{argmax, Example};
use crate::solver::SolverConfig;

/// Per-example evaluation outcome. `pn_switched` / `pp_matched` are `None`
/// when the corresponding solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub example_id: String,
    pub t0: usize,
    pub pn_success: bool,
    /// Class of `x0 + pn.delta` under the evaluator's own forward pass.
    pub pn_class: usize,
    pub pn_switched: Option<bool>,
    pub pn_nonzeros: usize,
    pub pn_elastic_net: f64,
    pub pp_success: bool,
    /// Class of `pp.delta` under the evaluator's own forward pass.
    pub pp_class: usize,
    pub pp_matched: Option<bool>,
    pub pp_nonzeros: usize,
    pub pp_elastic_net: f64,
}

/// Aggregate report. Success rates are over all examples; match/switch
/// rates and mean nonzero counts are over solver-successful examples only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_examples: usize,
    pub pn_success_count: usize,
    pub pp_success_count: usize,
    pub pn_solver_success_rate: f64,
    pub pp_solver_success_rate: f64,
    pub pn_switch_rate: Option<f64>,
    pub pp_match_rate: Option<f64>,
    pub mean_pn_nonzeros: Option<f64>,
    pub mean_pp_nonzeros: Option<f64>,
    pub rows: Vec<EvalRow>,
}

/// The report without its per-example rows, for the structured summary
/// record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub n_examples: usize,
    pub pn_success_count: usize,
    pub pp_success_count: usize,
    pub pn_solver_success_rate: f64,
    pub pp_solver_success_rate: f64,
    pub pn_switch_rate: Option<f64>,
    pub pp_match_rate: Option<f64>,
    pub mean_pn_nonzeros: Option<f64>,
    pub mean_pp_nonzeros: Option<f64>,
}

impl EvalReport {
    pub fn summary(&self) -> EvalSummary {
        EvalSummary {
            n_examples: self.n_examples,
            pn_success_count: self.pn_success_count,
            pp_success_count: self.pp_success_count,
            pn_solver_success_rate: self.pn_solver_success_rate,
            pp_solver_success_rate: self.pp_solver_success_rate,
            pn_switch_rate: self.pn_switch_rate,
            pp_match_rate: self.pp_match_rate,
            mean_pn_nonzeros: self.mean_pn_nonzeros,
            mean_pp_nonzeros: self.mean_pp_nonzeros,
        }
    }
}

impl EvalSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serialization cannot fail")
    }
}

fn row_from_explanation(net: &DenseNetwork, ex: &Example, expl: &Explanation) -> Result<EvalRow> {
    let with_pn: Vec<f64> = ex
        .x0
        .iter()
        .zip(&expl.pn.delta)
        .map(|(x, d)| x + d)
        .collect();
    let pn_class = argmax(&net.predict(&with_pn)?);
    let pp_class = argmax(&net.predict(&expl.pp.delta)?);
    Ok(EvalRow {
        example_id: ex.id.clone(),
        t0: ex.t0,
        pn_success: expl.pn.success,
        pn_class,
        pn_switched: expl.pn.success.then_some(pn_class != ex.t0),
        pn_nonzeros: expl.pn.nonzero_count(),
        pn_elastic_net: expl.pn.elastic_net_value,
        pp_success: expl.pp.success,
        pp_class,
        pp_matched: expl.pp.success.then_some(pp_class == ex.t0),
        pp_nonzeros: expl.pp.nonzero_count(),
        pp_elastic_net: expl.pp.elastic_net_value,
    })
}

fn aggregate(rows: Vec<EvalRow>) -> EvalReport {
    let n = rows.len();
    let pn_successes: Vec<&EvalRow> = rows.iter().filter(|r| r.pn_success).collect();
    let pp_successes: Vec<&EvalRow> = rows.iter().filter(|r| r.pp_success).collect();
    let rate = |hits: usize, total: usize| -> Option<f64> {
        (total > 0).then(|| hits as f64 / total as f64)
    };
    let mean = |values: Vec<usize>| -> Option<f64> {
        (!values.is_empty()).then(|| values.iter().sum::<usize>() as f64 / values.len() as f64)
    };
    EvalReport {
        n_examples: n,
        pn_success_count: pn_successes.len(),
        pp_success_count: pp_successes.len(),
        pn_solver_success_rate: pn_successes.len() as f64 / n as f64,
        pp_solver_success_rate: pp_successes.len() as f64 / n as f64,
        pn_switch_rate: rate(
            pn_successes.iter().filter(|r| r.pn_switched == Some(true)).count(),
            pn_successes.len(),
        ),
        pp_match_rate: rate(
            pp_successes.iter().filter(|r| r.pp_matched == Some(true)).count(),
            pp_successes.len(),
        ),
        mean_pn_nonzeros: mean(pn_successes.iter().map(|r| r.pn_nonzeros).collect()),
        mean_pp_nonzeros: mean(pp_successes.iter().map(|r| r.pp_nonzeros).collect()),
        rows,
    }
}

/// Builds the report from explanations computed elsewhere (`explanations[i]`
/// must belong to `examples[i]`).
pub fn report_from_explanations(
    examples: &[Example],
    net: &DenseNetwork,
    explanations: &[Explanation],
) -> Result<EvalReport> {
    if examples.len() != explanations.len() {
        return Err(Error::dim("explanations", examples.len(), explanations.len()));
    }
    let rows: Result<Vec<EvalRow>> = examples
        .iter()
        .zip(explanations)
        .map(|(ex, expl)| row_from_explanation(net, ex, expl))
        .collect();
    Ok(aggregate(rows?))
}

/// Explains every example and aggregates the re-fed classifications.
/// Parallel across examples when the `parallel` feature is on.
pub fn evaluate(
    examples: &[Example],
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let explanations = explain_batch(examples, net, ae, cfg, space)?;
    report_from_explanations(examples, net, &explanations)
}

/// Sequential variant of [`evaluate`].
pub fn evaluate_seq(
    examples: &[Example],
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    cfg: &SolverConfig,
    space: &SpaceSpec,
) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let explanations = explain_batch_seq(examples, net, ae, cfg, space)?;
    report_from_explanations(examples, net, &explanations)
}

fn opt_cell<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "-".to_string(),
    }
}

/// Tab-separated table with one line per example.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::from(
        "example_id\tt0\tpn_success\tpn_class\tpn_switched\tpn_nonzeros\tpn_elastic_net\
         \tpp_success\tpp_class\tpp_matched\tpp_nonzeros\tpp_elastic_net\n",
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.example_id,
            r.t0,
            r.pn_success,
            r.pn_class,
            opt_cell(&r.pn_switched),
            r.pn_nonzeros,
            r.pn_elastic_net,
            r.pp_success,
            r.pp_class,
            opt_cell(&r.pp_matched),
            r.pp_nonzeros,
            r.pp_elastic_net,
        ));
    }
    out
}
