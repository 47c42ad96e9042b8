use serde::{Deserialize, Serialize};

use super::AnalyticsError;

/// Off-diagonal tolerance of the eigensolver, relative to the matrix norm.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal rows, by decreasing explained variance.
    pub components: Vec<Vec<f64>>,
    /// Variance of the data along each component (n - 1 denominator).
    pub explained_variance: Vec<f64>,
    pub total_variance: f64,
    /// Each component is flipped so its largest-magnitude entry (first one
    /// on ties) is positive.
    pub sign_convention: String,
    /// All rows were identical.
    pub degenerate: bool,
    pub sweeps: usize,
}

fn check_rows(rows: &[Vec<f64>], dim: usize) -> Result<(), AnalyticsError> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(AnalyticsError::Dimension { row: i, expected: dim, got: r.len() });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(AnalyticsError::NonFinite { row: i });
        }
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and the eigenvectors as columns of `v`, plus the sweep count.
fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>, usize) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let norm = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off.sqrt() <= JACOBI_TOL * norm {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v, sweeps)
}

/// Principal components of `rows` from the eigendecomposition of their
/// covariance matrix.
pub fn pca_fit(rows: &[Vec<f64>], components: usize) -> Result<PcaModel, AnalyticsError> {
    if rows.len() < 2 {
        return Err(AnalyticsError::TooFewRows { needed: 2, got: rows.len() });
    }
    let dim = rows[0].len();
    check_rows(rows, dim)?;
    let max = (rows.len() - 1).min(dim);
    if components > max {
        return Err(AnalyticsError::TooManyComponents { components, max });
    }
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; dim]; dim];
    for r in rows {
        let c: Vec<f64> = r.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..dim {
            for j in i..dim {
                cov[i][j] += c[i] * c[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    let total_variance: f64 = (0..dim).map(|i| cov[i][i]).sum();
    let degenerate = total_variance == 0.0;
    if degenerate {
        log::warn!("all {} rows are identical; the model has zero variance", rows.len());
    }
    let (vals, vecs, sweeps) = jacobi(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut comps = Vec::with_capacity(components);
    let mut explained = Vec::with_capacity(components);
    for &k in order.iter().take(components) {
        let mut c: Vec<f64> = (0..dim).map(|i| vecs[i][k]).collect();
        let lead = c.iter().enumerate().fold(0, |best, (i, x)| if x.abs() > c[best].abs() { i } else { best });
        if c[lead] < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        comps.push(c);
        explained.push(vals[k].max(0.0));
    }
    Ok(PcaModel {
        mean,
        components: comps,
        explained_variance: explained,
        total_variance,
        sign_convention: "largest-abs-entry-positive".into(),
        degenerate,
        sweeps,
    })
}

/// Coordinates of `rows` along the model's components.
pub fn pca_project(model: &PcaModel, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AnalyticsError> {
    check_rows(rows, model.mean.len())?;
    Ok(rows
        .iter()
        .map(|r| {
            let c: Vec<f64> = r.iter().zip(&model.mean).map(|(x, m)| x - m).collect();
            model.components.iter().map(|g| g.iter().zip(&c).map(|(a, b)| a * b).sum()).collect()
        })
        .collect())
}

/// Maps coordinates back into the feature space.
pub fn pca_reconstruct(model: &PcaModel, coords: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, AnalyticsError> {
    check_rows(coords, model.components.len())?;
    Ok(coords
        .iter()
        .map(|c| {
            let mut out = model.mean.clone();
            for (w, g) in c.iter().zip(&model.components) {
                out.iter_mut().zip(g).for_each(|(o, x)| *o += w * x);
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        let m = pca_fit(&rows, 2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((m.components[0][0] - h).abs() < 1e-12 && (m.components[0][1] - h).abs() < 1e-12);
        assert!(m.explained_variance[1].abs() < 1e-12);
        assert!((m.explained_variance[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mean_projects_to_origin() {
        let rows = vec![vec![1.0, 5.0, 2.0], vec![3.0, 1.0, 0.0], vec![0.0, 2.0, 7.0], vec![4.0, 4.0, 4.0]];
        let m = pca_fit(&rows, 3).unwrap();
        let z = pca_project(&m, &[m.mean.clone()]).unwrap();
        assert!(z[0].iter().all(|x| x.abs() < 1e-12));
        let p: Vec<f64> = m.mean.iter().zip(&m.components[0]).map(|(a, b)| a + 2.0 * b).collect();
        let c = pca_project(&m, &[p]).unwrap();
        assert!((c[0][0] - 2.0).abs() < 1e-12 && c[0][1].abs() < 1e-12 && c[0][2].abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(pca_fit(&[vec![1.0]], 1).is_err());
        assert!(pca_fit(&[vec![1.0, 2.0], vec![1.0]], 1).is_err());
        assert!(pca_fit(&[vec![1.0, 2.0], vec![3.0, 1.0]], 2).is_err());
        let m = pca_fit(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]], 2).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.explained_variance, vec![0.0, 0.0]);
    }
}
