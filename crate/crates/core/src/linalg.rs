//! Cyclic Jacobi eigensolver for real symmetric matrices.
//!
//! Plane rotations annihilate off-diagonal entries in row-cyclic order until
//! the off-diagonal Frobenius norm drops below 1e-14 relative to the matrix
//! norm. Eigenvalues are returned sorted ascending with their eigenvectors.

use crate::error::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
///
/// `vectors[k]` is the unit eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * a[p][q] * a[p][q];
        }
    }
    sum.sqrt()
}

fn frobenius_norm(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Diagonalize a real symmetric matrix with cyclic Jacobi rotations.
///
/// The caller is responsible for symmetry; entries above the diagonal are
/// trusted. Fails only if the rotation sequence does not converge.
pub fn jacobi_eigen_symmetric(matrix: &[Vec<f64>]) -> Result<SymmetricEigen> {
    let n = matrix.len();
    assert!(n > 0, "matrix must be non-empty");
    for row in matrix {
        assert_eq!(row.len(), n, "matrix must be square");
    }

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    // v holds the accumulated rotations; column j is the j-th eigenvector.
    let mut v = vec![vec![0.0; n]; n];
    for (j, row) in v.iter_mut().enumerate() {
        row[j] = 1.0;
    }

    let scale = frobenius_norm(&a).max(1.0);
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    let mut sweeps = 0;
    for sweep in 0..MAX_SWEEPS {
        sweeps = sweep + 1;
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle from the stable tan formulation.
                let theta = 0.5 * (a[q][q] - a[p][p]) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let h = t * apq;
                a[p][p] -= h;
                a[q][q] += h;
                a[p][q] = 0.0;
                a[q][p] = 0.0;

                for j in 0..n {
                    if j != p && j != q {
                        let ajp = a[j][p];
                        let ajq = a[j][q];
                        a[j][p] = ajp - s * (ajq + ajp * tau);
                        a[j][q] = ajq + s * (ajp - ajq * tau);
                        a[p][j] = a[j][p];
                        a[q][j] = a[j][q];
                    }
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = vp - s * (vq + vp * tau);
                    row[q] = vq + s * (vp - vq * tau);
                }
            }
        }
    }

    let off = off_diagonal_norm(&a);
    if !converged && off > threshold {
        return Err(Error::EigenNoConvergence {
            off_norm: off,
            sweeps,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));

    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|r| v[r][i]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}
