//! Deterministic toy datasets for tests, benchmarks, and demos.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Feature rows plus integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // Box-Muller.
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Two 2-D Gaussian blobs inside `[0, 1]²`, centered so that each class can
/// reach the other side by nonnegative additions alone (centers off the main
/// diagonal). `n` is the total count, split evenly; sigma 0.08 keeps the
/// classes linearly separable.
pub fn gaussian_blobs(n: usize, seed: u64) -> ToyDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [(0.25, 0.7), (0.7, 0.25)];
    let sigma = 0.08;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let (cx, cy) = centers[label];
        let (dx, dy) = normal_pair(&mut rng);
        features.push(vec![
            (cx + sigma * dx).clamp(0.0, 1.0),
            (cy + sigma * dy).clamp(0.0, 1.0),
        ]);
        labels.push(label);
    }
    ToyDataset { features, labels }
}

/// Cell indices (row, col) of the two 8×8 glyphs.
fn glyph_cells(label: usize) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    match label {
        // A plus sign through the middle.
        0 => {
            for r in 1..7 {
                cells.push((r, 3));
                cells.push((r, 4));
            }
            for c in 1..7 {
                if c != 3 && c != 4 {
                    cells.push((3, c));
                    cells.push((4, c));
                }
            }
        }
        // A hollow box along the border ring.
        _ => {
            for c in 1..7 {
                cells.push((1, c));
                cells.push((6, c));
            }
            for r in 2..6 {
                cells.push((r, 1));
                cells.push((r, 6));
            }
        }
    }
    cells
}

/// 8×8 two-glyph "digits": a plus sign versus a hollow box on a zero
/// background, with per-pixel intensities drawn from `[0.5, 1.0]`. Off-glyph
/// pixels are exactly zero, so presence means deviation from background.
pub fn glyph_digits(n: usize, seed: u64) -> ToyDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let mut pixels = vec![0.0; 64];
        for (r, c) in glyph_cells(label) {
            pixels[r * 8 + c] = rng.random_range(0.5..1.0);
        }
        features.push(pixels);
        labels.push(label);
    }
    ToyDataset { features, labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_are_deterministic_and_in_bounds() {
        let a = gaussian_blobs(50, 42);
        let b = gaussian_blobs(50, 42);
        assert_eq!(a, b);
        assert!(a
            .features
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0).contains(v)));
        assert!(a.labels.contains(&0) && a.labels.contains(&1));
    }

    #[test]
    fn glyphs_have_disjoint_signal_and_zero_background() {
        let d = glyph_digits(10, 7);
        for (x, label) in d.features.iter().zip(&d.labels) {
            assert_eq!(x.len(), 64);
            let on: Vec<usize> = (0..64).filter(|i| x[*i] != 0.0).collect();
            let expected: Vec<usize> = glyph_cells(*label)
                .into_iter()
                .map(|(r, c)| r * 8 + c)
                .collect();
            let mut expected_sorted = expected;
            expected_sorted.sort_unstable();
            assert_eq!(on, expected_sorted);
            assert!(on.iter().all(|i| (0.5..1.0).contains(&x[*i])));
        }
    }

    #[test]
    fn the_two_glyphs_differ() {
        let plus: std::collections::BTreeSet<_> = glyph_cells(0).into_iter().collect();
        let boxg: std::collections::BTreeSet<_> = glyph_cells(1).into_iter().collect();
        assert!(plus.difference(&boxg).count() > 8);
        assert!(boxg.difference(&plus).count() > 8);
    }
}
