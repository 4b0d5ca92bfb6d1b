//! Small dense linear-algebra helpers (column means, covariance, Cholesky)
//! for the low dimensions this crate works in.

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix
/// stored row-major as `d` rows of `d` entries. Fails if a pivot is not
/// strictly positive.
#[allow(clippy::needless_range_loop)]
pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Numeric(format!(
                        "cholesky: nonpositive pivot {s} at row {i}"
                    )));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Solve L y = b with L lower triangular.
pub fn forward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut y = vec![0.0; d];
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    y
}

/// Solve L' x = y with L lower triangular.
pub fn backward_solve_transposed(l: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let d = y.len();
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = y[i];
        for k in (i + 1)..d {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Quadratic form v' A^{-1} v given the Cholesky factor L of A:
/// equals |L^{-1} v|^2.
pub fn quad_form_inv(l: &[Vec<f64>], v: &[f64]) -> f64 {
    let y = forward_solve(l, v);
    y.iter().map(|t| t * t).sum()
}

pub fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = rows.len();
    let d = rows[0].len();
    let mut mu = vec![0.0; d];
    for r in rows {
        for (k, v) in r.iter().enumerate() {
            mu[k] += v;
        }
    }
    for v in &mut mu {
        *v /= m as f64;
    }
    mu
}

/// Sample covariance with divisor m - 1.
#[allow(clippy::needless_range_loop)]
pub fn covariance(rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = rows.len();
    let d = rows[0].len();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "covariance: need at least 2 observations".into(),
        ));
    }
    let mu = column_means(rows);
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            let di = r[i] - mu[i];
            for j in 0..=i {
                cov[i][j] += di * (r[j] - mu[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            cov[i][j] /= (m - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    Ok(cov)
}

/// Cholesky with one ridge retry: if the plain factorization fails, add
/// lambda I with lambda = 1e-10 * trace / d and try once more.
pub fn cholesky_regularized(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    match cholesky(a) {
        Ok(l) => Ok(l),
        Err(_) => {
            let d = a.len();
            let trace: f64 = (0..d).map(|i| a[i][i]).sum();
            let lambda = 1e-10 * trace / d as f64;
            let mut ridged = a.to_vec();
            for (i, row) in ridged.iter_mut().enumerate() {
                row[i] += lambda;
            }
            cholesky(&ridged).map_err(|_| {
                Error::Numeric("covariance matrix singular even after regularization".into())
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_identity_and_solve() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let l = cholesky(&a).unwrap();
        // L L' == A
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..2).map(|k| l[i][k] * l[j][k]).sum();
                assert!((s - a[i][j]).abs() < 1e-12);
            }
        }
        // quad form against hand inverse: A^{-1} = [3,-2;-2,4]/8
        let v = [1.0, 2.0];
        let expect = (3.0 - 2.0 * 2.0 - 2.0 * 2.0 + 4.0 * 4.0) / 8.0;
        assert!((quad_form_inv(&l, &v) - expect).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(cholesky(&a).is_err());
    }

    #[test]
    fn regularized_salvages_near_singular() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(cholesky_regularized(&a).is_ok());
        let z = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(cholesky_regularized(&z).is_err());
    }

    #[test]
    fn covariance_basic() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 2.0],
            vec![2.0, 2.0],
        ];
        let c = covariance(&rows).unwrap();
        assert!((c[0][0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((c[1][1] - 4.0 / 3.0).abs() < 1e-12);
        assert!(c[0][1].abs() < 1e-12);
    }
}
