//! CSV dataset files: comma-separated feature floats with a trailing
//! integer label per row. Floats are written with 17 significant digits so
//! write-then-read round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cem_core::{Error, Result};

pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, |r| r.len())
    }
}

/// Parses a dataset, checking each row's width against the first row (and
/// against `expected_dim` when a model is already loaded) and each feature
/// against `bounds`. Errors cite the 1-based line number.
pub fn load_dataset(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
    bounds: Option<(f64, f64)>,
) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    parse_dataset(&text, expected_dim, bounds)
}

pub fn parse_dataset(
    text: &str,
    expected_dim: Option<usize>,
    bounds: Option<(f64, f64)>,
) -> Result<Dataset> {
    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = expected_dim;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "row needs at least one feature and a label".into(),
            });
        }
        let (feature_cells, label_cell) = cells.split_at(cells.len() - 1);
        match width {
            Some(w) if feature_cells.len() != w => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row has {} features, expected {w}", feature_cells.len()),
                });
            }
            Some(_) => {}
            None => width = Some(feature_cells.len()),
        }
        let mut row = Vec::with_capacity(feature_cells.len());
        for (col, cell) in feature_cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("column {}: invalid float {:?}", col + 1, cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("column {}: non-finite feature", col + 1),
                });
            }
            if let Some((lo, hi)) = bounds {
                if v < lo || v > hi {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!(
                            "column {}: feature {v} outside declared bounds [{lo}, {hi}]",
                            col + 1
                        ),
                    });
                }
            }
            row.push(v);
        }
        let label: usize = label_cell[0].trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid integer label {:?}", label_cell[0].trim()),
        })?;
        features.push(row);
        labels.push(label);
    }

    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset { features, labels })
}

pub fn dataset_to_string(features: &[Vec<f64>], labels: &[usize]) -> String {
    let mut out = String::new();
    for (row, label) in features.iter().zip(labels) {
        for v in row {
            write!(out, "{v:.16e},").expect("write to string");
        }
        writeln!(out, "{label}").expect("write to string");
    }
    out
}

pub fn save_dataset(
    features: &[Vec<f64>],
    labels: &[usize],
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, dataset_to_string(features, labels))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_features_and_label() {
        let d = parse_dataset("0.0,0.5,1\n", None, None).unwrap();
        assert_eq!(d.features, vec![vec![0.0, 0.5]]);
        assert_eq!(d.labels, vec![1]);
    }

    #[test]
    fn wrong_width_cites_line() {
        let err = parse_dataset("0.1,0.2,0.3,0\n", Some(2), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(err.to_string().contains("expected 2"));

        let err = parse_dataset("0.1,0.2,0\n0.1,0.2,0.3,1\n", None, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn bad_cells_cite_line_and_column() {
        let err = parse_dataset("0.1,zebra,0\n", None, None).unwrap_err();
        assert!(err.to_string().contains("column 2"));
        let err = parse_dataset("0.1,0.2,maybe\n", None, None).unwrap_err();
        assert!(err.to_string().contains("label"));
    }

    #[test]
    fn out_of_bounds_feature_is_rejected() {
        let err = parse_dataset("0.1,1.5,0\n", None, Some((0.0, 1.0))).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(err.to_string().contains("outside declared bounds"));
    }

    #[test]
    fn round_trip_is_exact() {
        let features = vec![vec![0.1, 0.25, 1.0 / 3.0], vec![1e-12, 0.999999, 0.5]];
        let labels = vec![0, 1];
        let text = dataset_to_string(&features, &labels);
        let back = parse_dataset(&text, None, None).unwrap();
        for (a, b) in features.iter().flatten().zip(back.features.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(labels, back.labels);
    }
}
