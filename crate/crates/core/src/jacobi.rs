//! Cyclic Jacobi eigenvalue solver for small dense symmetric matrices.
//!
//! The matrices in this crate are at most a dozen rows, where Jacobi
//! rotations are both simple and robust. Eigenvalues come back sorted
//! ascending.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

fn frobenius_norm(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_symmetric(a: &[Vec<f64>]) -> Result<()> {
    let n = a.len();
    let scale = frobenius_norm(a).max(1.0);
    for row in a {
        if row.len() != n {
            return Err(Error::InvalidParameter("matrix is not square".into()));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::InvalidParameter(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    a[i][j], a[j][i]
                )));
            }
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, sorted ascending. Iterates cyclic
/// sweeps until the off-diagonal norm drops below `tol * ||A||_F`.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    check_symmetric(matrix)?;
    let n = matrix.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    // symmetrize exactly so rotations preserve symmetry bit-for-bit
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let norm = frobenius_norm(&a);
    let threshold = tol.max(f64::EPSILON) * norm.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                // tangent of the rotation angle, smaller root
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn smallest_eigenvalue(matrix: &[Vec<f64>], tol: f64) -> Result<f64> {
    let eigs = symmetric_eigenvalues(matrix, tol)?;
    eigs.first().copied().ok_or_else(|| {
        Error::InvalidParameter("cannot take the smallest eigenvalue of an empty matrix".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let h = 3f64.sqrt() / 2.0;
        let m = vec![vec![1.0, h], vec![h, 1.0]];
        let lo = smallest_eigenvalue(&m, 1e-14).unwrap();
        assert!((lo - (1.0 - h)).abs() < 1e-13, "{lo}");
    }

    #[test]
    fn identity_and_diagonal() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(smallest_eigenvalue(&id, 1e-14).unwrap(), 1.0);
        let d = vec![vec![2.0, 0.0], vec![0.0, 5.0]];
        assert_eq!(smallest_eigenvalue(&d, 1e-14).unwrap(), 2.0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
        assert!(smallest_eigenvalue(&m, 1e-14).is_err());
    }

    #[test]
    fn trace_and_product_recovered() {
        // eigenvalues of a fixed 4x4: compare trace and determinant routes
        let m = vec![
            vec![4.0, 1.0, 0.5, 0.0],
            vec![1.0, 3.0, 0.25, 0.1],
            vec![0.5, 0.25, 2.0, 0.3],
            vec![0.0, 0.1, 0.3, 1.0],
        ];
        let eigs = symmetric_eigenvalues(&m, 1e-14).unwrap();
        let trace: f64 = eigs.iter().sum();
        assert!((trace - 10.0).abs() < 1e-12);
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
    }
}
