//! Dense symmetric positive definite solves for the regularized Gram system.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use log::{debug, warn};

use crate::error::{Error, Result};

/// Condition estimate above which a system is declared singular.
pub const MAX_CONDITION: f64 = 1e14;

/// Solves `A x = b` for a symmetric matrix stored column-major in `a`.
///
/// Uses a Cholesky factorization with one step of iterative refinement and
/// falls back to partially pivoted LU if the factorization breaks down.
pub(crate) fn solve_spd(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let am = MatRef::from_column_major_slice(a, n, n);
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);

    let x = match am.llt(Side::Lower) {
        Ok(llt) => {
            let l = llt.L();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..n {
                let d = l[(i, i)];
                lo = lo.min(d);
                hi = hi.max(d);
            }
            let cond = (hi / lo).powi(2);
            debug!("cholesky of order {n}, condition estimate {cond:.3e}");
            if !(cond <= MAX_CONDITION) {
                return Err(Error::Solve(format!(
                    "system of order {n} is numerically singular (condition estimate {cond:.3e})"
                )));
            }
            let mut x = llt.solve(&rhs);
            let r = &rhs - am * &x;
            x += llt.solve(&r);
            x
        }
        Err(_) => {
            warn!("cholesky failed on system of order {n}, retrying with pivoted LU");
            let lu = am.partial_piv_lu();
            let mut x = lu.solve(&rhs);
            let r = &rhs - am * &x;
            x += lu.solve(&r);
            let res = (&rhs - am * &x).norm_l2();
            if !(res <= 1e-6 * rhs.norm_l2().max(1.0)) {
                return Err(Error::Solve(format!(
                    "system of order {n} could not be solved (residual {res:.3e})"
                )));
            }
            x
        }
    };
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solve("solution is not finite".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn matches_nalgebra_solve() {
        let n = 40;
        let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5);
        let a = &m * m.transpose() + DMatrix::identity(n, n) * 0.5;
        let b = DVector::from_fn(n, |i, _| (i as f64).sin());
        let x = solve_spd(a.as_slice(), n, b.as_slice()).unwrap();
        let oracle = a.clone().lu().solve(&b).unwrap();
        for (u, v) in x.iter().zip(oracle.iter()) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_system_rejected() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let a = &v * v.transpose() + DMatrix::identity(3, 3) * 1e-16;
        assert!(matches!(
            solve_spd(a.as_slice(), 3, &[1.0, 0.0, 0.0]),
            Err(Error::Solve(_))
        ));
    }

    #[test]
    fn indefinite_system_uses_lu() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let x = solve_spd(a.as_slice(), 2, &[2.0, 3.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }
}
