//! Experiment datasets: cosine regression data, IDX image ingestion with
//! PCA reduction, and fraud-detection CSV ingestion. Every emitted feature
//! lies in the encoding domain [0, π]; the scaling applied per feature is
//! recorded so the transform can be inverted.

pub mod idx;
pub mod pca;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Task;
use crate::rng;

/// One labelled example. `y` holds the regression target or a {0, 1} label.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRow {
    pub x: Vec<f64>,
    pub y: f64,
}

/// Per-feature affine map from the original range onto [0, π].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureScale {
    pub min: f64,
    pub max: f64,
}

impl FeatureScale {
    fn apply(&self, v: f64) -> f64 {
        if self.max == self.min {
            0.0
        } else {
            (v - self.min) / (self.max - self.min) * PI
        }
    }

    fn invert(&self, scaled: f64) -> f64 {
        if self.max == self.min {
            self.min
        } else {
            self.min + scaled / PI * (self.max - self.min)
        }
    }
}

/// Scaling used on each feature column; sufficient to invert the transform.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalingRecord {
    pub per_feature: Vec<FeatureScale>,
}

impl ScalingRecord {
    fn fit(rows: &[Vec<f64>], dim: usize) -> Self {
        let mut per_feature = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for row in rows {
                min = min.min(row[j]);
                max = max.max(row[j]);
            }
            per_feature.push(FeatureScale { min, max });
        }
        ScalingRecord { per_feature }
    }

    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter().zip(&self.per_feature).map(|(v, s)| s.apply(*v)).collect()
    }

    pub fn invert(&self, scaled: &[f64]) -> Vec<f64> {
        scaled.iter().zip(&self.per_feature).map(|(v, s)| s.invert(*v)).collect()
    }
}

/// Where a dataset came from and how it was preprocessed.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub source: String,
    pub seed: u64,
    pub scaling: ScalingRecord,
    /// Loader-specific detail: chosen digits, PCA basis, selected columns.
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub rows: Vec<DataRow>,
    pub task: Task,
    pub dim: usize,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn batch_rows(&self) -> Vec<(Vec<f64>, f64)> {
        self.rows.iter().map(|r| (r.x.clone(), r.y)).collect()
    }

    /// Canonical dump: CSV with columns x_1..x_J,y plus a JSON sidecar
    /// carrying scaling and provenance.
    pub fn dump_csv<P: AsRef<Path>>(&self, csv_path: P, sidecar_path: P) -> Result<()> {
        let mut writer = csv::Writer::from_path(csv_path.as_ref())
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x_{j}")).collect();
        header.push("y".to_string());
        writer
            .write_record(&header)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        for row in &self.rows {
            let mut record: Vec<String> = row.x.iter().map(|v| format!("{v:.17e}")).collect();
            record.push(format!("{:.17e}", row.y));
            writer
                .write_record(&record)
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        }
        writer.flush()?;
        let mut sidecar = std::fs::File::create(sidecar_path.as_ref())?;
        sidecar.write_all(serde_json::to_string_pretty(&self.provenance)?.as_bytes())?;
        Ok(())
    }
}

/// y = 0.7 · (1/J) · Σ_j cos(x_j) over x uniform in [0, π]^J.
pub fn gen_cosine(n: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || dim == 0 {
        return Err(Error::Config("cosine dataset needs n >= 1 and dim >= 1".into()));
    }
    let mut rng = rng::stream(seed, "data-cosine");
    let rows = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..PI)).collect();
            let y = cosine_target(&x);
            DataRow { x, y }
        })
        .collect();
    let scaling = ScalingRecord {
        per_feature: vec![FeatureScale { min: 0.0, max: PI }; dim],
    };
    Ok(Dataset {
        rows,
        task: Task::Regression,
        dim,
        provenance: Provenance {
            source: "cosine".into(),
            seed,
            scaling,
            detail: serde_json::json!({ "n": n }),
        },
    })
}

/// The regression target for a (possibly multi-dimensional) input.
pub fn cosine_target(x: &[f64]) -> f64 {
    0.7 * x.iter().map(|v| v.cos()).sum::<f64>() / x.len() as f64
}

/// Load a two-digit subset of an IDX image/label pair, reduce to `dim`
/// principal components fit on the kept rows, and scale each component to
/// [0, π]. Labels become 0 for `digits.0` and 1 for `digits.1`.
pub fn load_mnist<P: AsRef<Path>>(
    images_path: P,
    labels_path: P,
    dim: usize,
    digits: (u8, u8),
    per_class: usize,
    seed: u64,
) -> Result<Dataset> {
    if digits.0 == digits.1 {
        return Err(Error::Config("digit pair must be distinct".into()));
    }
    if per_class == 0 || dim == 0 {
        return Err(Error::Config("need per_class >= 1 and dim >= 1".into()));
    }
    let images = idx::read_idx_images(images_path.as_ref())?;
    let labels = idx::read_idx_labels(labels_path.as_ref())?;
    if images.count() != labels.count() {
        return Err(Error::Format(format!(
            "image count {} does not match label count {}",
            images.count(),
            labels.count()
        )));
    }

    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &label) in labels.data.iter().enumerate() {
        if label == digits.0 {
            by_class[0].push(i);
        } else if label == digits.1 {
            by_class[1].push(i);
        }
    }
    let mut rng = rng::stream(seed, "data-mnist");
    let mut picked: Vec<(usize, f64)> = Vec::with_capacity(2 * per_class);
    for (class, indices) in by_class.iter_mut().enumerate() {
        if indices.is_empty() {
            return Err(Error::Input(format!(
                "digit {} absent from the label file",
                if class == 0 { digits.0 } else { digits.1 }
            )));
        }
        if indices.len() < per_class {
            return Err(Error::Input(format!(
                "requested {} rows of digit {}, only {} available (short by {})",
                per_class,
                if class == 0 { digits.0 } else { digits.1 },
                indices.len(),
                per_class - indices.len()
            )));
        }
        indices.shuffle(&mut rng);
        picked.extend(indices[..per_class].iter().map(|&i| (i, class as f64)));
    }

    let pixels: Vec<Vec<f64>> = picked
        .iter()
        .map(|&(i, _)| images.row(i).iter().map(|&b| b as f64).collect())
        .collect();
    let projection = pca::fit(&pixels, dim)?;
    let projected: Vec<Vec<f64>> = pixels.iter().map(|p| projection.project(p)).collect();
    let scaling = ScalingRecord::fit(&projected, dim);
    let rows = projected
        .iter()
        .zip(&picked)
        .map(|(p, &(_, y))| DataRow { x: scaling.apply(p), y })
        .collect();

    Ok(Dataset {
        rows,
        task: Task::BinaryClassification,
        dim,
        provenance: Provenance {
            source: "mnist".into(),
            seed,
            scaling,
            detail: serde_json::json!({
                "digits": [digits.0, digits.1],
                "per_class": per_class,
                "pca": projection,
            }),
        },
    })
}

/// Load a fraud-style CSV: numeric feature columns plus a binary `Class`
/// column. Keeps the `dim` features most correlated (point-biserial) with
/// the class, subsamples `per_class` rows per class, scales to [0, π].
pub fn load_fraud<P: AsRef<Path>>(
    path: P,
    dim: usize,
    per_class: usize,
    seed: u64,
) -> Result<Dataset> {
    if per_class == 0 || dim == 0 {
        return Err(Error::Config("need per_class >= 1 and dim >= 1".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.as_ref().display())))?;
    let headers: Vec<String> =
        reader.headers().map_err(|e| Error::Format(e.to_string()))?.iter().map(String::from).collect();
    let class_col = headers
        .iter()
        .position(|h| h == "Class")
        .ok_or_else(|| Error::Format("missing Class column in header".into()))?;
    let feature_cols: Vec<usize> =
        (0..headers.len()).filter(|&c| c != class_col).collect();
    if feature_cols.len() < dim {
        return Err(Error::Input(format!(
            "requested {} features but the file has only {}",
            dim,
            feature_cols.len()
        )));
    }

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut classes: Vec<f64> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("record {}: {e}", line + 2)))?;
        let parse = |c: usize| -> Result<f64> {
            record
                .get(c)
                .ok_or_else(|| Error::Format(format!("record {}: missing column {c}", line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| {
                    Error::Format(format!("record {}, column {}: {e}", line + 2, headers[c]))
                })
        };
        let class = parse(class_col)?;
        if class != 0.0 && class != 1.0 {
            return Err(Error::Format(format!(
                "record {}: Class must be 0 or 1, got {class}",
                line + 2
            )));
        }
        features.push(feature_cols.iter().map(|&c| parse(c)).collect::<Result<Vec<f64>>>()?);
        classes.push(class);
    }
    if features.is_empty() {
        return Err(Error::Input("fraud file has no data rows".into()));
    }

    // Point-biserial correlation of each feature with the class label, with
    // ties broken by column order.
    let selected = select_by_correlation(&features, &classes, dim)?;

    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &c) in classes.iter().enumerate() {
        by_class[c as usize].push(i);
    }
    let mut rng = rng::stream(seed, "data-fraud");
    let mut picked: Vec<usize> = Vec::with_capacity(2 * per_class);
    for (class, indices) in by_class.iter_mut().enumerate() {
        if indices.len() < per_class {
            return Err(Error::Input(format!(
                "requested {} rows of class {}, only {} available (short by {})",
                per_class,
                class,
                indices.len(),
                per_class - indices.len()
            )));
        }
        indices.shuffle(&mut rng);
        picked.extend_from_slice(&indices[..per_class]);
    }

    let raw: Vec<Vec<f64>> = picked
        .iter()
        .map(|&i| selected.iter().map(|&(col, _)| features[i][col]).collect())
        .collect();
    let scaling = ScalingRecord::fit(&raw, dim);
    let rows = raw
        .iter()
        .zip(&picked)
        .map(|(x, &i)| DataRow { x: scaling.apply(x), y: classes[i] })
        .collect();

    let selected_names: Vec<(String, f64)> = selected
        .iter()
        .map(|&(col, corr)| (headers[feature_cols[col]].clone(), corr))
        .collect();
    Ok(Dataset {
        rows,
        task: Task::BinaryClassification,
        dim,
        provenance: Provenance {
            source: "fraud".into(),
            seed,
            scaling,
            detail: serde_json::json!({
                "per_class": per_class,
                "selected": selected_names.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
                "correlations": selected_names.into_iter().collect::<BTreeMap<String, f64>>(),
            }),
        },
    })
}

fn select_by_correlation(
    features: &[Vec<f64>],
    classes: &[f64],
    dim: usize,
) -> Result<Vec<(usize, f64)>> {
    let n = features.len() as f64;
    let cols = features[0].len();
    let class_mean = classes.iter().sum::<f64>() / n;
    let class_var = classes.iter().map(|c| (c - class_mean).powi(2)).sum::<f64>();
    let mut scored: Vec<(usize, f64)> = (0..cols)
        .map(|j| {
            let mean = features.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = features.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>();
            let cov: f64 = features
                .iter()
                .zip(classes)
                .map(|(r, c)| (r[j] - mean) * (c - class_mean))
                .sum();
            let denom = (var * class_var).sqrt();
            let corr = if denom == 0.0 { 0.0 } else { cov / denom };
            (j, corr)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.abs().partial_cmp(&a.1.abs()).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0))
    });
    scored.truncate(dim);
    scored.sort_by_key(|&(j, _)| j);
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cosine_target_endpoints() {
        assert_abs_diff_eq!(cosine_target(&[0.0, 0.0]), 0.7);
        assert_abs_diff_eq!(cosine_target(&[PI, PI]), -0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(cosine_target(&[PI / 2.0]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cosine_rows_in_domain_and_reproducible() {
        let a = gen_cosine(50, 3, 7).unwrap();
        let b = gen_cosine(50, 3, 7).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra, rb);
            assert!(ra.x.iter().all(|&v| (0.0..=PI).contains(&v)));
        }
        assert_ne!(a.rows, gen_cosine(50, 3, 8).unwrap().rows);
    }

    #[test]
    fn scaling_round_trip() {
        let raw = vec![vec![-3.0, 10.0], vec![5.0, 20.0], vec![1.0, 15.0]];
        let scaling = ScalingRecord::fit(&raw, 2);
        for row in &raw {
            let scaled = scaling.apply(row);
            assert!(scaled.iter().all(|&v| (-1e-12..=PI + 1e-12).contains(&v)));
            let back = scaling.invert(&scaled);
            for (a, b) in back.iter().zip(row) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        // Endpoints map exactly.
        assert_abs_diff_eq!(scaling.apply(&[-3.0, 10.0])[0], 0.0);
        assert_abs_diff_eq!(scaling.apply(&[5.0, 20.0])[0], PI);
    }

    fn fraud_csv(path: &Path, rows: &[(f64, f64, f64, u8)]) {
        let mut s = String::from("V1,V2,Amount,Class\n");
        for (a, b, c, y) in rows {
            s.push_str(&format!("{a},{b},{c},{y}\n"));
        }
        std::fs::write(path, s).unwrap();
    }

    #[test]
    fn fraud_loader_selects_and_balances() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fraud.csv");
        // V1 tracks the class, V2 is noise-ish, Amount anti-tracks.
        let rows: Vec<(f64, f64, f64, u8)> = (0..40)
            .map(|i| {
                let y = (i % 2) as u8;
                (y as f64 * 2.0 + (i % 5) as f64 * 0.01, (i % 7) as f64, 10.0 - y as f64, y)
            })
            .collect();
        fraud_csv(&path, &rows);
        let ds = load_fraud(&path, 2, 10, 3).unwrap();
        assert_eq!(ds.rows.len(), 20);
        let ones = ds.rows.iter().filter(|r| r.y == 1.0).count();
        assert_eq!(ones, 10);
        assert!(ds.rows.iter().all(|r| r.x.iter().all(|&v| (0.0..=PI + 1e-12).contains(&v))));
        // Deterministic given the seed.
        let again = load_fraud(&path, 2, 10, 3).unwrap();
        assert_eq!(ds.rows, again.rows);
    }

    #[test]
    fn fraud_missing_class_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "A,B\n1,2\n").unwrap();
        assert!(matches!(load_fraud(&path, 1, 1, 0), Err(Error::Format(_))));
    }

    #[test]
    fn fraud_class_deficit_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("small.csv");
        fraud_csv(&path, &[(1.0, 2.0, 3.0, 0), (2.0, 1.0, 0.0, 1)]);
        let err = load_fraud(&path, 1, 5, 0).unwrap_err();
        match err {
            Error::Input(msg) => assert!(msg.contains("short by 4"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dump_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let ds = gen_cosine(10, 2, 11).unwrap();
        let a = dir.path().join("a.csv");
        let aj = dir.path().join("a.json");
        let b = dir.path().join("b.csv");
        let bj = dir.path().join("b.json");
        ds.dump_csv(&a, &aj).unwrap();
        gen_cosine(10, 2, 11).unwrap().dump_csv(&b, &bj).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(std::fs::read(&aj).unwrap(), std::fs::read(&bj).unwrap());
    }
}
