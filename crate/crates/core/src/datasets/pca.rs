//! Principal component analysis for down-projecting pixel rows.
//!
//! Fits via eigendecomposition of the covariance; when there are fewer rows
//! than features the Gram-matrix form (n×n instead of d×d) is decomposed
//! instead, which is the common case for the small subsets used here.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PcaProjection {
    pub mean: Vec<f64>,
    /// Row-major principal axes, strongest first; each has unit norm.
    pub components: Vec<Vec<f64>>,
    /// Covariance eigenvalue per kept component.
    pub explained: Vec<f64>,
}

/// Fit `k` principal components on the given rows.
pub fn fit(rows: &[Vec<f64>], k: usize) -> Result<PcaProjection> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::Input("pca needs at least two rows".into()));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Input("pca rows have inconsistent lengths".into()));
    }
    if k == 0 || k > d.min(n - 1) {
        return Err(Error::Config(format!(
            "cannot keep {k} components from {n} rows of dimension {d}"
        )));
    }

    let mean: Vec<f64> =
        (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, d, |i, j| rows[i][j] - mean[j]);
    let denom = (n - 1) as f64;

    let mut pairs: Vec<(f64, Vec<f64>)> = if n < d {
        let gram = &centered * centered.transpose() / denom;
        let eigen = SymmetricEigen::new(gram);
        (0..n)
            .map(|i| {
                let u = eigen.eigenvectors.column(i);
                let axis = centered.transpose() * u;
                let norm = axis.norm();
                let axis = if norm > 0.0 { axis / norm } else { axis };
                (eigen.eigenvalues[i], axis.iter().copied().collect())
            })
            .collect()
    } else {
        let cov = centered.transpose() * &centered / denom;
        let eigen = SymmetricEigen::new(cov);
        (0..d)
            .map(|i| (eigen.eigenvalues[i], eigen.eigenvectors.column(i).iter().copied().collect()))
            .collect()
    };

    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.truncate(k);

    // Fix each axis's sign so the largest-magnitude entry is positive.
    for (_, axis) in &mut pairs {
        let lead = axis
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0.0);
        if lead < 0.0 {
            for v in axis.iter_mut() {
                *v = -*v;
            }
        }
    }

    Ok(PcaProjection {
        mean,
        explained: pairs.iter().map(|(e, _)| e.max(0.0)).collect(),
        components: pairs.into_iter().map(|(_, v)| v).collect(),
    })
}

impl PcaProjection {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|axis| {
                row.iter().zip(axis).zip(&self.mean).map(|((v, a), m)| (v - m) * a).sum()
            })
            .collect()
    }

    pub fn reconstruct(&self, projected: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (p, axis) in projected.iter().zip(&self.components) {
            for (o, a) in out.iter_mut().zip(axis) {
                *o += p * a;
            }
        }
        out
    }

    /// Mean squared reconstruction error over rows.
    pub fn reconstruction_mse(&self, rows: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for row in rows {
            let back = self.reconstruct(&self.project(row));
            total += row.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            count += row.len();
        }
        total / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn sample_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::stream(seed, "pca-test");
        // Data concentrated along two latent directions plus noise.
        (0..n)
            .map(|_| {
                let a: f64 = rng.random_range(-3.0..3.0);
                let b: f64 = rng.random_range(-1.0..1.0);
                (0..d)
                    .map(|j| {
                        a * (j as f64 / d as f64)
                            + b * ((d - j) as f64 / d as f64)
                            + rng.random_range(-0.01..0.01)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn projection_round_trip_on_low_rank_data() {
        let rows = sample_rows(30, 8, 1);
        let pca = fit(&rows, 2).unwrap();
        // Two latent factors, so two components capture almost everything.
        assert!(pca.reconstruction_mse(&rows) < 1e-3);
    }

    #[test]
    fn reconstruction_error_non_increasing_in_k() {
        let rows = sample_rows(40, 10, 2);
        let mse: Vec<f64> = (1..=4).map(|k| fit(&rows, k).unwrap().reconstruction_mse(&rows)).collect();
        for pair in mse.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{mse:?}");
        }
    }

    #[test]
    fn gram_and_covariance_paths_agree() {
        // 5 rows of dimension 3 exercises the covariance path; 3 rows of
        // dimension 5 the Gram path. Compare on a shared low-rank set.
        let rows = sample_rows(20, 6, 3);
        let wide = fit(&rows, 2).unwrap();
        let tall_rows: Vec<Vec<f64>> = rows.iter().take(4).cloned().collect();
        let tall = fit(&tall_rows, 2).unwrap();
        assert_eq!(wide.dim(), 2);
        assert_eq!(tall.dim(), 2);
        for axis in &tall.components {
            let norm: f64 = axis.iter().map(|v| v * v).sum::<f64>();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn component_count_validated() {
        let rows = sample_rows(5, 3, 4);
        assert!(fit(&rows, 0).is_err());
        assert!(fit(&rows, 4).is_err());
        assert!(fit(&rows[..1], 1).is_err());
    }
}
