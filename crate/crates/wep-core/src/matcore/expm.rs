//! Matrix exponential via scaling-and-squaring with a degree-13 Pade
//! approximant. The scaling power keeps the reduced 1-norm below the
//! approximant's accuracy radius; squarings restore the result.

use super::{lu, CMatrix};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Accuracy radius of the degree-13 approximant in the 1-norm.
const THETA13: f64 = 5.371920351148152;

pub fn mat_exp(a: &CMatrix) -> Result<CMatrix> {
    assert!(a.is_square(), "mat_exp needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if n == 1 {
        let z = a[(0, 0)].exp();
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::ExpOverflow {
                norm: a[(0, 0)].norm(),
            });
        }
        return Ok(CMatrix::from_fn(1, 1, |_, _| z));
    }

    let norm1 = one_norm(a);
    if !norm1.is_finite() {
        return Err(Error::ExpOverflow { norm: norm1 });
    }
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i64
    } else {
        0
    };
    if s > 1024 {
        return Err(Error::ExpOverflow { norm: norm1 });
    }
    let x = a.scale_re(0.5f64.powi(s as i32));

    let ident = CMatrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x2 * &x4;

    let b = &PADE13;
    let u_inner = &(&x6.scale_re(b[13]) + &x4.scale_re(b[11])) + &x2.scale_re(b[9]);
    let u_poly = &(&(&(&x6 * &u_inner) + &x6.scale_re(b[7])) + &x4.scale_re(b[5]))
        + &(&x2.scale_re(b[3]) + &ident.scale_re(b[1]));
    let u = &x * &u_poly;
    let v_inner = &(&x6.scale_re(b[12]) + &x4.scale_re(b[10])) + &x2.scale_re(b[8]);
    let v = &(&(&(&x6 * &v_inner) + &x6.scale_re(b[6])) + &x4.scale_re(b[4]))
        + &(&x2.scale_re(b[2]) + &ident.scale_re(b[0]));

    // (V - U) E = (V + U); the denominator is nonsingular at this scaling.
    let mut e = lu::solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        e = &e * &e;
        if !e.is_finite() {
            return Err(Error::ExpOverflow { norm: norm1 });
        }
    }
    if !e.is_finite() {
        return Err(Error::ExpOverflow { norm: norm1 });
    }
    Ok(e)
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rel_diff;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_zero_is_identity() {
        let e = mat_exp(&CMatrix::zeros(3, 3)).unwrap();
        assert!(rel_diff(&e, &CMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn exp_diagonal() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, std::f64::consts::PI), c(-2.0, 0.5)]);
        let e = mat_exp(&a).unwrap();
        let want = CMatrix::diag(&[
            c(1f64.exp(), 0.0),
            c(-1.0, 0.0),
            Complex64::new(-2.0, 0.5).exp(),
        ]);
        assert!(rel_diff(&e, &want) < 1e-13);
    }

    #[test]
    fn exp_nilpotent_is_polynomial() {
        // exp([[0,t],[0,0]]) = [[1,t],[0,1]]
        let a = CMatrix::from_real_rows(&[&[0.0, 3.5], &[0.0, 0.0]]);
        let e = mat_exp(&a).unwrap();
        let want = CMatrix::from_real_rows(&[&[1.0, 3.5], &[0.0, 1.0]]);
        assert!(rel_diff(&e, &want) < 1e-13);
    }

    #[test]
    fn exp_skew_hermitian_is_unitary() {
        let k = CMatrix::new(
            2,
            2,
            vec![c(0.0, 1.2), c(0.7, 0.3), c(-0.7, 0.3), c(0.0, -2.0)],
        )
        .unwrap();
        // k* = -k by construction
        let e = mat_exp(&k).unwrap();
        let g = &e.adjoint() * &e;
        assert!(rel_diff(&g, &CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn exp_large_norm_uses_scaling() {
        // exp(t J) for the rotation generator stays exactly a rotation.
        let t = 50.0f64;
        let a = CMatrix::from_real_rows(&[&[0.0, -t], &[t, 0.0]]);
        let e = mat_exp(&a).unwrap();
        let want = CMatrix::from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        assert!(rel_diff(&e, &want) < 1e-11);
    }

    #[test]
    fn exp_sum_rule_for_commuting() {
        let a = CMatrix::diag_re(&[0.3, -0.8]);
        let b = CMatrix::diag_re(&[1.1, 0.2]);
        let lhs = mat_exp(&(&a + &b)).unwrap();
        let rhs = &mat_exp(&a).unwrap() * &mat_exp(&b).unwrap();
        assert!(rel_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn exp_overflow_reported() {
        let a = CMatrix::diag_re(&[800.0, 0.0]);
        assert!(matches!(mat_exp(&a), Err(Error::ExpOverflow { .. })));
    }
}
