//! Pertinent-negative and pertinent-positive objectives.
//!
//! Both objectives share the same shape: a confidence-margin hinge on the
//! classifier scores weighted by `c`, an elastic-net penalty on the
//! perturbation, and an optional autoencoder reconstruction penalty weighted
//! by `gamma`. The `beta·‖δ‖₁` part is not handled here — it belongs to the
//! solver's proximal step — so this module exposes the *smooth* part of each
//! objective and its gradient:
//!
//! - PN mode: `c·loss_pn(Pred(x₀+δ)) + ‖δ‖₂² + γ·‖x₀+δ − AE(x₀+δ)‖₂²`,
//!   pushing the perturbed input toward a different class.
//! - PP mode: `c·loss_pp(Pred(δ)) + ‖δ‖₂² + γ·‖δ − AE(δ)‖₂²`, asking the
//!   perturbation alone to be classified as the original class.
//!
//! All functions here are pure over immutable inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DenseAutoencoder, DenseNetwork};

/// An input to explain: feature vector plus the class the model assigns it.
///
/// `t0` must equal the model's argmax on `x0`; the explain entry point
/// re-checks this rather than trusting the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    pub x0: Vec<f64>,
    pub t0: usize,
}

impl Example {
    pub fn new(id: impl Into<String>, x0: Vec<f64>, t0: usize) -> Result<Self> {
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("example features must be finite".into()));
        }
        Ok(Self {
            id: id.into(),
            x0,
            t0,
        })
    }

    /// Builds an example whose class label is the model's own prediction.
    pub fn from_model(id: impl Into<String>, x0: Vec<f64>, net: &DenseNetwork) -> Result<Self> {
        let scores = net.predict(&x0)?;
        let t0 = argmax(&scores);
        Self::new(id, x0, t0)
    }
}

/// Which perturbation is being solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Pertinent negative: additions that flip the class of `x0 + δ`.
    Pn,
    /// Pertinent positive: a sub-part `δ` of the input classified as `t0`.
    Pp,
}

/// Coefficients of one objective instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams {
    /// Weight on the hinge loss (searched over by the solver's outer loop).
    pub c: f64,
    /// L1 weight; applied by the solver's shrinkage step, and part of the
    /// elastic-net value used for candidate selection.
    pub beta: f64,
    /// Autoencoder penalty weight.
    pub gamma: f64,
    /// Confidence margin of the hinge.
    pub kappa: f64,
    pub mode: Mode,
}

impl ObjectiveParams {
    pub fn new(c: f64, beta: f64, gamma: f64, kappa: f64, mode: Mode) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidConfig(format!("c must be > 0, got {c}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidConfig(format!("beta must be >= 0, got {beta}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {gamma}")));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::InvalidConfig(format!("kappa must be >= 0, got {kappa}")));
        }
        Ok(Self {
            c,
            beta,
            gamma,
            kappa,
            mode,
        })
    }
}

/// Index of the largest score; ties go to the lowest class index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest score excluding `t0`; ties go to the lowest index.
pub fn runner_up(scores: &[f64], t0: usize) -> Result<usize> {
    if t0 >= scores.len() {
        return Err(Error::InvalidConfig(format!(
            "class index {t0} out of range for {} classes",
            scores.len()
        )));
    }
    if scores.len() < 2 {
        return Err(Error::SingleClass);
    }
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if i == t0 {
            continue;
        }
        match best {
            Some(b) if *s <= scores[b] => {}
            _ => best = Some(i),
        }
    }
    Ok(best.expect("at least two classes"))
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::InvalidConfig(format!("kappa must be >= 0, got {kappa}")));
    }
    Ok(())
}

/// PN hinge: `max(scores[t0] − max_{i≠t0} scores[i], −kappa)`.
///
/// Zero (the floor at `kappa = 0`) exactly when some other class matches or
/// beats `t0`; in general the floor `−kappa` certifies a class flip with
/// margin `kappa`.
pub fn loss_pn(scores: &[f64], t0: usize, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let ru = runner_up(scores, t0)?;
    Ok((scores[t0] - scores[ru]).max(-kappa))
}

/// PP hinge: `max(max_{i≠t0} scores[i] − scores[t0], −kappa)`; at its floor
/// exactly when `t0` wins by at least `kappa`.
pub fn loss_pp(scores: &[f64], t0: usize, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let ru = runner_up(scores, t0)?;
    Ok((scores[ru] - scores[t0]).max(-kappa))
}

/// The mode's hinge loss.
pub fn hinge_loss(scores: &[f64], t0: usize, kappa: f64, mode: Mode) -> Result<f64> {
    match mode {
        Mode::Pn => loss_pn(scores, t0, kappa),
        Mode::Pp => loss_pp(scores, t0, kappa),
    }
}

/// Success predicate used by the solver: the hinge sits at its floor `−kappa`
/// *and* the deterministic argmax agrees with the mode's goal (the argmax
/// check only matters on exact score ties, where lowest-index wins).
pub fn meets_margin(scores: &[f64], t0: usize, kappa: f64, mode: Mode) -> Result<bool> {
    let ru = runner_up(scores, t0)?;
    let top = argmax(scores);
    Ok(match mode {
        Mode::Pn => scores[t0] - scores[ru] <= -kappa && top != t0,
        Mode::Pp => scores[ru] - scores[t0] <= -kappa && top == t0,
    })
}

/// The point the classifier (and autoencoder) sees for a given perturbation.
fn eval_point(delta: &[f64], ex: &Example, mode: Mode) -> Vec<f64> {
    match mode {
        Mode::Pn => ex.x0.iter().zip(delta).map(|(x, d)| x + d).collect(),
        Mode::Pp => delta.to_vec(),
    }
}

fn check_objective_inputs(
    delta: &[f64],
    ex: &Example,
    ae: Option<&DenseAutoencoder>,
    p: &ObjectiveParams,
) -> Result<()> {
    if delta.len() != ex.x0.len() {
        return Err(Error::dim("delta", ex.x0.len(), delta.len()));
    }
    if p.gamma > 0.0 && ae.is_none() {
        return Err(Error::MissingAutoencoder);
    }
    Ok(())
}

/// Smooth part of the mode's objective (everything except `beta·‖δ‖₁`).
pub fn smooth_objective(
    delta: &[f64],
    ex: &Example,
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    p: &ObjectiveParams,
) -> Result<f64> {
    check_objective_inputs(delta, ex, ae, p)?;
    let z = eval_point(delta, ex, p.mode);
    let scores = net.predict(&z)?;
    let hinge = hinge_loss(&scores, ex.t0, p.kappa, p.mode)?;
    let l2: f64 = delta.iter().map(|d| d * d).sum();
    let mut value = p.c * hinge + l2;
    if p.gamma > 0.0 {
        let ae = ae.expect("checked above");
        value += p.gamma * ae.reconstruction_error(&z)?;
    }
    Ok(value)
}

/// Gradient of [`smooth_objective`] with respect to `delta`.
///
/// When the hinge sits strictly below its switch point (value `−kappa` with
/// the score difference strictly inside the max) its gradient is zero; at
/// exactly the switch point the score-difference branch is used. Both modes
/// evaluate the chain rule through the same point the classifier sees, and
/// `d(point)/d(delta)` is the identity in each mode.
pub fn smooth_gradient(
    delta: &[f64],
    ex: &Example,
    net: &DenseNetwork,
    ae: Option<&DenseAutoencoder>,
    p: &ObjectiveParams,
) -> Result<Vec<f64>> {
    check_objective_inputs(delta, ex, ae, p)?;
    let z = eval_point(delta, ex, p.mode);
    let scores = net.predict(&z)?;
    let ru = runner_up(&scores, ex.t0)?;
    let diff = match p.mode {
        Mode::Pn => scores[ex.t0] - scores[ru],
        Mode::Pp => scores[ru] - scores[ex.t0],
    };

    let mut grad = vec![0.0; delta.len()];
    if diff >= -p.kappa {
        let mut class_weights = vec![0.0; scores.len()];
        let sign = match p.mode {
            Mode::Pn => 1.0,
            Mode::Pp => -1.0,
        };
        class_weights[ex.t0] = sign * p.c;
        class_weights[ru] = -sign * p.c;
        grad = net.input_gradient(&z, &class_weights)?;
    }
    for (g, d) in grad.iter_mut().zip(delta) {
        *g += 2.0 * d;
    }
    if p.gamma > 0.0 {
        let ae = ae.expect("checked above");
        let ae_grad = ae.reconstruction_gradient(&z)?;
        for (g, a) in grad.iter_mut().zip(&ae_grad) {
            *g += p.gamma * a;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activation, DenseAutoencoder, DenseLayer};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn loss_pn_examples() {
        assert_eq!(loss_pn(&[2.0, 5.0, 1.0], 1, 0.0).unwrap(), 3.0);
        assert_eq!(loss_pn(&[5.0, 2.0, 1.0], 1, 0.0).unwrap(), 0.0);
        assert_eq!(loss_pn(&[5.0, 2.0, 1.0], 1, 1.0).unwrap(), -1.0);
    }

    #[test]
    fn loss_pp_examples() {
        assert_eq!(loss_pp(&[1.0, 4.0, 2.0], 1, 0.0).unwrap(), 0.0);
        assert_eq!(loss_pp(&[1.0, 4.0, 2.0], 0, 0.0).unwrap(), 3.0);
        assert_eq!(loss_pp(&[4.0, 1.0], 0, 2.0).unwrap(), -2.0);
    }

    #[test]
    fn losses_error_on_bad_inputs() {
        assert!(matches!(
            loss_pn(&[1.0, 2.0], 5, 0.0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(loss_pn(&[1.0], 0, 0.0), Err(Error::SingleClass)));
        assert!(matches!(
            loss_pp(&[1.0, 2.0], 0, -1.0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn hinge_floor_and_shift_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let n = rng.random_range(2..6);
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let t0 = rng.random_range(0..n);
            let kappa = rng.random_range(0.0..2.0);
            let pn = loss_pn(&scores, t0, kappa).unwrap();
            let pp = loss_pp(&scores, t0, kappa).unwrap();
            assert!(pn >= -kappa && pp >= -kappa);

            let shift = rng.random_range(-3.0..3.0);
            let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
            assert!((loss_pn(&shifted, t0, kappa).unwrap() - pn).abs() < 1e-12);
            assert!((loss_pp(&shifted, t0, kappa).unwrap() - pp).abs() < 1e-12);
        }
    }

    #[test]
    fn floor_biconditional_matches_margin_predicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.random_range(2..5);
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let t0 = rng.random_range(0..n);
            let kappa = rng.random_range(0.0..1.0);
            let ru = runner_up(&scores, t0).unwrap();

            let pn_floor = loss_pn(&scores, t0, kappa).unwrap() == -kappa;
            assert_eq!(pn_floor, scores[ru] - scores[t0] >= kappa);
            let pp_floor = loss_pp(&scores, t0, kappa).unwrap() == -kappa;
            assert_eq!(pp_floor, scores[t0] - scores[ru] >= kappa);
        }
    }

    #[test]
    fn runner_up_breaks_ties_by_lowest_index() {
        assert_eq!(runner_up(&[1.0, 3.0, 3.0, 2.0], 0).unwrap(), 1);
        assert_eq!(runner_up(&[5.0, 9.0, 5.0], 1).unwrap(), 0);
        assert_eq!(argmax(&[2.0, 2.0, 1.0]), 0);
    }

    fn linear_net(w: Vec<f64>, classes: usize, dim: usize) -> DenseNetwork {
        let layer = DenseLayer::new(dim, classes, w, vec![0.0; classes], Activation::Identity).unwrap();
        DenseNetwork::new(vec![layer]).unwrap()
    }

    fn identity_ae(dim: usize) -> DenseAutoencoder {
        let mut w = vec![0.0; dim * dim];
        for i in 0..dim {
            w[i * dim + i] = 1.0;
        }
        let enc = DenseLayer::new(dim, dim, w.clone(), vec![0.0; dim], Activation::Identity).unwrap();
        let dec = DenseLayer::new(dim, dim, w, vec![0.0; dim], Activation::Identity).unwrap();
        DenseAutoencoder::new(vec![enc], vec![dec], None).unwrap()
    }

    #[test]
    fn objective_at_zero_delta_is_pure_loss() {
        // PN mode, gamma = 0: norms vanish at delta = 0.
        let net = linear_net(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let ex = Example::new("e", vec![2.0, -1.0], 0).unwrap();
        let p = ObjectiveParams::new(3.0, 0.1, 0.0, 0.0, Mode::Pn).unwrap();
        let value = smooth_objective(&[0.0, 0.0], &ex, &net, None, &p).unwrap();
        let scores = net.predict(&ex.x0).unwrap();
        assert_eq!(value, 3.0 * loss_pn(&scores, 0, 0.0).unwrap());
    }

    #[test]
    fn objective_tie_at_origin_in_pp_mode() {
        // All-equal scores at the origin put the hinge argument at exactly
        // zero, which is above the floor for any kappa > 0: the objective is
        // c·max(0, −kappa) = 0 regardless of kappa.
        let net = linear_net(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let ex = Example::new("e", vec![0.4, 0.1], 0).unwrap();
        for kappa in [0.0, 0.5] {
            let p = ObjectiveParams::new(2.0, 0.1, 0.0, kappa, Mode::Pp).unwrap();
            assert_eq!(
                smooth_objective(&[0.0, 0.0], &ex, &net, None, &p).unwrap(),
                0.0
            );
        }
        // The floor is reached once t0 wins by at least kappa.
        let ex1 = Example::new("e", vec![0.4, 0.1], 1).unwrap();
        let p = ObjectiveParams::new(2.0, 0.1, 0.0, 0.5, Mode::Pp).unwrap();
        let delta = [0.0, 0.9];
        assert_eq!(
            smooth_objective(&delta, &ex1, &net, None, &p).unwrap(),
            2.0 * -0.5 + 0.81
        );
    }

    #[test]
    fn objective_matches_term_by_term_oracle() {
        // Re-evaluate each term independently and compare.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let net = linear_net(w, 2, 3);
        let ae = identity_ae(3);
        let ex = Example::new("e", vec![0.3, 0.2, 0.4], 0).unwrap();
        for mode in [Mode::Pn, Mode::Pp] {
            let p = ObjectiveParams::new(1.7, 0.1, 5.0, 0.25, mode).unwrap();
            let delta = [0.05, 0.0, 0.2];
            let got = smooth_objective(&delta, &ex, &net, Some(&ae), &p).unwrap();

            let z: Vec<f64> = match mode {
                Mode::Pn => ex.x0.iter().zip(&delta).map(|(a, b)| a + b).collect(),
                Mode::Pp => delta.to_vec(),
            };
            let scores = net.predict(&z).unwrap();
            let loss = hinge_loss(&scores, ex.t0, p.kappa, mode).unwrap();
            let l2: f64 = delta.iter().map(|d| d * d).sum();
            let rec = ae.reconstruct(&z).unwrap();
            let ae_term: f64 = z.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum();
            let want = p.c * loss + l2 + p.gamma * ae_term;
            assert!((got - want).abs() < 1e-12, "mode {mode:?}: {got} vs {want}");
        }
    }

    #[test]
    fn identity_autoencoder_term_is_inert() {
        // gamma = 0 and an identity AE with any gamma agree for all delta.
        let net = linear_net(vec![0.5, -0.2, 0.1, 0.9], 2, 2);
        let ae = identity_ae(2);
        let ex = Example::new("e", vec![0.3, 0.6], 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let delta = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
            let base = ObjectiveParams::new(1.0, 0.1, 0.0, 0.0, Mode::Pn).unwrap();
            let with_ae = ObjectiveParams::new(1.0, 0.1, 100.0, 0.0, Mode::Pn).unwrap();
            let a = smooth_objective(&delta, &ex, &net, None, &base).unwrap();
            let b = smooth_objective(&delta, &ex, &net, Some(&ae), &with_ae).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gradient_at_hinge_floor_is_two_delta() {
        // Scores give the hinge a strictly interior floor; only ‖δ‖₂² acts.
        let net = linear_net(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        // Class 1 wins by a lot, so PN loss for t0 = 0 sits at its floor.
        let ex = Example::new("e", vec![0.0, 5.0], 0).unwrap();
        let p = ObjectiveParams::new(1.0, 0.1, 0.0, 1.0, Mode::Pn).unwrap();
        let delta = [0.3, -0.2];
        let grad = smooth_gradient(&delta, &ex, &net, None, &p).unwrap();
        assert_eq!(grad, vec![0.6, -0.4]);
    }

    #[test]
    fn gradient_of_linear_classifier_closed_form() {
        // Active hinge on a linear model: 2δ + c·(W[t0,:] − W[i*,:]).
        let w = vec![1.0, 2.0, -0.5, 0.25];
        let net = linear_net(w.clone(), 2, 2);
        let ex = Example::new("e", vec![0.5, 0.5], 0).unwrap();
        let c = 2.0;
        let p = ObjectiveParams::new(c, 0.1, 0.0, 0.0, Mode::Pn).unwrap();
        let delta = [0.1, 0.2];
        let grad = smooth_gradient(&delta, &ex, &net, None, &p).unwrap();
        let want = [
            2.0 * delta[0] + c * (w[0] - w[2]),
            2.0 * delta[1] + c * (w[1] - w[3]),
        ];
        assert_eq!(grad, want.to_vec());
    }

    fn random_relu_net(rng: &mut ChaCha8Rng, dims: &[usize]) -> DenseNetwork {
        let n = dims.len() - 1;
        let layers = (0..n)
            .map(|k| {
                let act = if k + 1 == n {
                    Activation::Identity
                } else {
                    Activation::Relu
                };
                let weights = (0..dims[k] * dims[k + 1])
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let bias = (0..dims[k + 1]).map(|_| rng.random_range(-0.3..0.3)).collect();
                DenseLayer::new(dims[k], dims[k + 1], weights, bias, act).unwrap()
            })
            .collect();
        DenseNetwork::new(layers).unwrap()
    }

    fn random_ae(rng: &mut ChaCha8Rng, dim: usize) -> DenseAutoencoder {
        let stack = |rng: &mut ChaCha8Rng, dims: &[usize]| -> Vec<DenseLayer> {
            let n = dims.len() - 1;
            (0..n)
                .map(|k| {
                    let act = if k + 1 == n {
                        Activation::Identity
                    } else {
                        Activation::Relu
                    };
                    let weights = (0..dims[k] * dims[k + 1])
                        .map(|_| rng.random_range(-0.7..0.7))
                        .collect();
                    let bias = (0..dims[k + 1]).map(|_| rng.random_range(-0.2..0.2)).collect();
                    DenseLayer::new(dims[k], dims[k + 1], weights, bias, act).unwrap()
                })
                .collect()
        };
        DenseAutoencoder::new(stack(rng, &[dim, 4, 2]), stack(rng, &[2, 4, dim]), None).unwrap()
    }

    #[test]
    fn smooth_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let eps = 1e-5;
        for gamma in [0.0, 100.0] {
            let mut checked = 0;
            while checked < 8 {
                let net = random_relu_net(&mut rng, &[3, 5, 3]);
                let ae = random_ae(&mut rng, 3);
                let x0: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..0.9)).collect();
                let t0 = argmax(&net.predict(&x0).unwrap());
                let ex = Example::new("e", x0, t0).unwrap();
                let mode = if checked % 2 == 0 { Mode::Pn } else { Mode::Pp };
                let p = ObjectiveParams::new(1.5, 0.1, gamma, 0.1, mode).unwrap();
                let delta: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..0.3)).collect();
                let z = eval_point(&delta, &ex, mode);

                // Skip non-generic points: relu kinks, AE kinks, hinge
                // switches, and runner-up near-ties.
                if net.kink_margin(&z).unwrap() < 1e-3 {
                    continue;
                }
                if gamma > 0.0 && ae.kink_margin(&z).unwrap() < 1e-3 {
                    continue;
                }
                let scores = net.predict(&z).unwrap();
                let ru = runner_up(&scores, ex.t0).unwrap();
                let diff = match mode {
                    Mode::Pn => scores[ex.t0] - scores[ru],
                    Mode::Pp => scores[ru] - scores[ex.t0],
                };
                if (diff + p.kappa).abs() < 1e-3 {
                    continue;
                }
                let others: Vec<f64> = scores
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != ex.t0)
                    .map(|(_, s)| *s)
                    .collect();
                let mut sorted = others.clone();
                sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
                if sorted.len() > 1 && (sorted[0] - sorted[1]).abs() < 1e-3 {
                    continue;
                }

                let ae_opt = if gamma > 0.0 { Some(&ae) } else { None };
                let analytic = smooth_gradient(&delta, &ex, &net, ae_opt, &p).unwrap();
                for i in 0..delta.len() {
                    let mut dp = delta.clone();
                    let mut dm = delta.clone();
                    dp[i] += eps;
                    dm[i] -= eps;
                    let fp = smooth_objective(&dp, &ex, &net, ae_opt, &p).unwrap();
                    let fm = smooth_objective(&dm, &ex, &net, ae_opt, &p).unwrap();
                    let numeric = (fp - fm) / (2.0 * eps);
                    let scale = analytic[i].abs().max(numeric.abs()).max(1.0);
                    assert!(
                        (analytic[i] - numeric).abs() / scale < 1e-4,
                        "gamma {gamma} component {i}: analytic {} vs numeric {}",
                        analytic[i],
                        numeric
                    );
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn gamma_without_autoencoder_errors() {
        let net = linear_net(vec![1.0, 0.0, 0.0, 1.0], 2, 2);
        let ex = Example::new("e", vec![0.1, 0.2], 1).unwrap();
        let p = ObjectiveParams::new(1.0, 0.1, 100.0, 0.0, Mode::Pn).unwrap();
        assert!(matches!(
            smooth_objective(&[0.0, 0.0], &ex, &net, None, &p),
            Err(Error::MissingAutoencoder)
        ));
        assert!(matches!(
            smooth_gradient(&[0.0, 0.0], &ex, &net, None, &p),
            Err(Error::MissingAutoencoder)
        ));
    }
}
