//! Norm contexts, hermitian and positive element detection, and weights.
//!
//! An element is hermitian for a given norm when every `exp(i t a)` is an
//! isometry. Under the l2 operator norm this coincides with self-adjointness
//! and is decided exactly; under l1 and linf it is probed on a finite grid of
//! parameters `t`, which accepts everything hermitian and can in principle
//! miss a violation between grid points. Detection is therefore sound for
//! rejections and grid-limited for acceptances, which callers must keep in
//! mind when the context is not l2.

use crate::error::{Error, Result};
use crate::matcore::{
    self, eigenvalues, eigh, inverse, mat_exp, op_norm, rel_diff, svd, CMatrix, Tolerance,
};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Base vector norm inducing the operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => write!(f, "l1"),
            NormKind::L2 => write!(f, "l2"),
            NormKind::Linf => write!(f, "linf"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::Linf),
            other => Err(Error::BadNormContext(format!(
                "unknown norm kind {other:?}, expected l1, l2 or linf"
            ))),
        }
    }
}

/// Default parameter grid for the sampled isometry criterion; both signs and
/// several magnitudes so that one-sided growth cannot hide.
pub const DEFAULT_T_GRID: [f64; 10] = [-5.0, -2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0, 5.0];

/// Norm kind plus the sampling grid used by non-l2 hermitian checks.
#[derive(Debug, Clone)]
pub struct NormContext {
    kind: NormKind,
    t_grid: Vec<f64>,
}

impl NormContext {
    pub fn new(kind: NormKind, t_grid: Vec<f64>) -> Result<Self> {
        if t_grid.is_empty() {
            return Err(Error::BadNormContext("empty t grid".into()));
        }
        if t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::BadNormContext("non-finite t grid entry".into()));
        }
        if t_grid.iter().all(|&t| t == 0.0) {
            return Err(Error::BadNormContext(
                "t grid needs at least one nonzero entry".into(),
            ));
        }
        Ok(NormContext { kind, t_grid })
    }

    pub fn from_kind(kind: NormKind) -> Self {
        NormContext {
            kind,
            t_grid: DEFAULT_T_GRID.to_vec(),
        }
    }

    pub fn l1() -> Self {
        Self::from_kind(NormKind::L1)
    }

    pub fn l2() -> Self {
        Self::from_kind(NormKind::L2)
    }

    pub fn linf() -> Self {
        Self::from_kind(NormKind::Linf)
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }
}

/// Verdict plus the measured deviation that produced it.
#[derive(Debug, Clone, Copy)]
pub struct HermitianCheck {
    pub hermitian: bool,
    pub deviation: f64,
}

/// Hermitian test under the context norm.
///
/// l2 measures self-adjointness directly. l1 and linf measure the worst
/// sampled isometry defect `| norm(exp(i t a)) - 1 |` over the context grid,
/// compared against `tol.herm_abs`.
pub fn is_hermitian(a: &CMatrix, ctx: &NormContext, tol: &Tolerance) -> HermitianCheck {
    assert!(a.is_square(), "hermitian test needs a square matrix");
    match ctx.kind() {
        NormKind::L2 => {
            let deviation = rel_diff(a, &a.adjoint());
            HermitianCheck {
                hermitian: deviation <= tol.residual_rel,
                deviation,
            }
        }
        NormKind::L1 | NormKind::Linf => {
            let deviation = sampled_isometry_defect(a, ctx);
            HermitianCheck {
                hermitian: deviation <= tol.herm_abs,
                deviation,
            }
        }
    }
}

/// Worst defect `| norm(exp(i t a)) - 1 |` over the grid; infinite when the
/// exponential overflows, which no hermitian element can do. The empty
/// element is vacuously an isometry generator.
pub fn sampled_isometry_defect(a: &CMatrix, ctx: &NormContext) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    let rot = a.scale(Complex64::new(0.0, 1.0));
    let mut worst = 0.0f64;
    for &t in ctx.t_grid() {
        match mat_exp(&rot.scale_re(t)) {
            Ok(e) => {
                let d = (op_norm(&e, ctx) - 1.0).abs();
                worst = worst.max(d);
            }
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

/// Names the first positivity violation, or `None` for a positive element.
/// Positive means hermitian with spectrum in the closed right half-axis.
pub fn positivity_violation(a: &CMatrix, ctx: &NormContext, tol: &Tolerance) -> Option<String> {
    assert!(a.is_square(), "positivity test needs a square matrix");
    let herm = is_hermitian(a, ctx, tol);
    if !herm.hermitian {
        return Some(format!(
            "not hermitian under the {} norm (deviation {:.3e})",
            ctx.kind(),
            herm.deviation
        ));
    }
    let slack = tol.residual_rel * (1.0 + a.fro_norm());
    match ctx.kind() {
        NormKind::L2 => {
            let h = (a + &a.adjoint()).scale_re(0.5);
            match eigh(&h) {
                Ok((vals, _)) => {
                    let min = vals.first().copied().unwrap_or(0.0);
                    if min < -slack {
                        return Some(format!("negative eigenvalue {min:.6e}"));
                    }
                }
                Err(_) => return Some("eigenvalue iteration did not converge".into()),
            }
        }
        NormKind::L1 | NormKind::Linf => match eigenvalues(a) {
            Ok(vals) => {
                for z in vals {
                    if z.im.abs() > slack {
                        return Some(format!(
                            "eigenvalue {:.6e}{:+.6e}i off the real axis",
                            z.re, z.im
                        ));
                    }
                    if z.re < -slack {
                        return Some(format!("negative eigenvalue {:.6e}", z.re));
                    }
                }
            }
            Err(_) => return Some("eigenvalue iteration did not converge".into()),
        },
    }
    None
}

/// True when the element is hermitian with nonnegative spectrum.
pub fn is_positive(a: &CMatrix, ctx: &NormContext, tol: &Tolerance) -> bool {
    positivity_violation(a, ctx, tol).is_none()
}

/// Positive invertible element together with its principal square root and
/// the root's inverse, which realize the weighted norm as a similarity.
///
/// Construct through [`Weight::new`]; the fields are public for inspection
/// but the constructor is what guarantees the invariants.
#[derive(Debug, Clone)]
pub struct Weight {
    pub u: CMatrix,
    pub u_half: CMatrix,
    pub u_half_inv: CMatrix,
    pub u_inv: CMatrix,
}

impl Weight {
    /// Validates positivity and invertibility, then extracts the root.
    pub fn new(u: CMatrix, ctx: &NormContext, tol: &Tolerance) -> Result<Weight> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.rows(),
                cols: u.cols(),
            });
        }
        if let Some(criterion) = positivity_violation(&u, ctx, tol) {
            return Err(Error::NotPositive { criterion });
        }
        let sing = svd(&u).expect("jacobi svd convergence");
        let smax = sing.s.first().copied().unwrap_or(0.0);
        let smin = sing.s.last().copied().unwrap_or(0.0);
        if u.rows() > 0 && smin <= tol.rank_rel * smax.max(1.0) {
            return Err(Error::NotPositive {
                criterion: format!(
                    "numerically singular (smallest singular value {smin:.3e})"
                ),
            });
        }
        let u_half = matcore::principal_sqrt(&u, ctx, tol)?;
        let u_half_inv = inverse(&u_half)?;
        let u_inv = &u_half_inv * &u_half_inv;
        let id = CMatrix::identity(u.rows());
        let root_err = rel_diff(&(&u_half * &u_half), &u);
        let inv_err = rel_diff(&(&u_half * &u_half_inv), &id);
        if root_err > tol.residual_rel.max(1e-12) || inv_err > tol.residual_rel.max(1e-12) {
            return Err(Error::VerificationFailed(format!(
                "weight root residuals too large (root {root_err:.3e}, inverse {inv_err:.3e})"
            )));
        }
        Ok(Weight {
            u,
            u_half,
            u_half_inv,
            u_inv,
        })
    }

    pub fn identity(n: usize) -> Weight {
        let id = CMatrix::identity(n);
        Weight {
            u: id.clone(),
            u_half: id.clone(),
            u_half_inv: id.clone(),
            u_inv: id,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }
}

/// Weighted operator norm: the context norm of `u^{1/2} x u^{-1/2}`.
pub fn weighted_norm(x: &CMatrix, w: &Weight, ctx: &NormContext) -> f64 {
    assert_eq!(x.rows(), w.dim(), "weight dimension mismatch");
    assert!(x.is_square(), "weighted norm needs a square matrix");
    op_norm(&(&(&w.u_half * x) * &w.u_half_inv), ctx)
}

/// Hermitian test in the weighted algebra: the similarity `u^{1/2} x u^{-1/2}`
/// is tested under the plain context norm. For l2 this is equivalent to the
/// congruence identity `x* u = u x`.
pub fn is_hermitian_weighted(
    x: &CMatrix,
    w: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> HermitianCheck {
    assert_eq!(x.rows(), w.dim(), "weight dimension mismatch");
    let k = &(&w.u_half * x) * &w.u_half_inv;
    is_hermitian(&k, ctx, tol)
}

/// Boundary samples of the numerical range `{ v* a v : |v|_2 = 1 }`.
///
/// For each direction `theta` the extreme point is the top eigenvector of the
/// hermitian part of `e^{i theta} a`. The range is convex; these samples trace
/// its boundary counterclockwise.
pub fn numerical_range(a: &CMatrix, samples: usize) -> Result<Vec<Complex64>> {
    assert!(a.is_square(), "numerical range needs a square matrix");
    assert!(samples >= 1, "need at least one sample");
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut pts = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (samples as f64);
        let rot = a.scale(Complex64::from_polar(1.0, theta));
        let h = (&rot + &rot.adjoint()).scale_re(0.5);
        let (_, vecs) = eigh(&h)?;
        let v = vecs.block(0, n, n - 1, n);
        let val = &(&v.adjoint() * a) * &v;
        pts.push(val[(0, 0)]);
    }
    Ok(pts)
}

/// Largest distance of any numerical-range sample from the real axis,
/// relative to `1 + max |sample|`.
pub fn numerical_range_imag_defect(a: &CMatrix, samples: usize) -> Result<f64> {
    let pts = numerical_range(a, samples)?;
    let scale = 1.0 + pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(pts.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn l2_hermitian_detection() {
        let tol = Tolerance::default();
        let ctx = NormContext::l2();
        let h = CMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)])
            .unwrap();
        assert!(is_hermitian(&h, &ctx, &tol).hermitian);
        let g = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let chk = is_hermitian(&g, &ctx, &tol);
        assert!(!chk.hermitian);
        assert!(chk.deviation > 1e-3);
    }

    #[test]
    fn l1_hermitians_are_real_diagonals() {
        let tol = Tolerance::default();
        let ctx = NormContext::l1();
        assert!(is_hermitian(&CMatrix::diag_re(&[1.0, -2.5, 0.0]), &ctx, &tol).hermitian);
        // real symmetric but not diagonal: fails under l1
        let sym = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let chk = is_hermitian(&sym, &ctx, &tol);
        assert!(!chk.hermitian);
        assert!(chk.deviation > 0.3, "defect {}", chk.deviation);
        // imaginary diagonal: exponential growth on the grid
        let imd = CMatrix::diag(&[c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(!is_hermitian(&imd, &ctx, &tol).hermitian);
    }

    #[test]
    fn linf_sampled_matches_l1_on_diagonals() {
        let tol = Tolerance::default();
        let ctx = NormContext::linf();
        assert!(is_hermitian(&CMatrix::diag_re(&[2.0, 3.0]), &ctx, &tol).hermitian);
        let skew = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(!is_hermitian(&skew, &ctx, &tol).hermitian);
    }

    #[test]
    fn positivity_split() {
        let tol = Tolerance::default();
        let ctx = NormContext::l2();
        assert!(is_positive(&CMatrix::diag_re(&[0.0, 1.0, 5.0]), &ctx, &tol));
        assert!(!is_positive(&CMatrix::diag_re(&[1.0, -0.1]), &ctx, &tol));
        let herm_indef =
            CMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert!(!is_positive(&herm_indef, &ctx, &tol));
        let viol = positivity_violation(&CMatrix::diag_re(&[1.0, -2.0]), &ctx, &tol).unwrap();
        assert!(viol.contains("negative eigenvalue"));
    }

    #[test]
    fn weight_construction_and_rejection() {
        let tol = Tolerance::default();
        let ctx = NormContext::l2();
        let w = Weight::new(CMatrix::diag_re(&[1.0, 4.0]), &ctx, &tol).unwrap();
        assert!(rel_diff(&w.u_half, &CMatrix::diag_re(&[1.0, 2.0])) < 1e-12);
        assert!(rel_diff(&w.u_inv, &CMatrix::diag_re(&[1.0, 0.25])) < 1e-12);
        assert!(Weight::new(CMatrix::diag_re(&[1.0, 0.0]), &ctx, &tol).is_err());
        assert!(Weight::new(CMatrix::diag_re(&[1.0, -1.0]), &ctx, &tol).is_err());
        let nonherm = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(Weight::new(nonherm, &ctx, &tol).is_err());
    }

    #[test]
    fn weighted_hermitian_via_similarity() {
        let tol = Tolerance::default();
        let ctx = NormContext::l2();
        let w = Weight::new(CMatrix::diag_re(&[1.0, 4.0]), &ctx, &tol).unwrap();
        // u^{-1/2} h u^{1/2} for h = [[1,1],[1,0]]
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.5, 0.0]]);
        assert!(is_hermitian_weighted(&m, &w, &ctx, &tol).hermitian);
        assert!(!is_hermitian(&m, &ctx, &tol).hermitian);
        // congruence identity holds: m* u = u m
        let lhs = &m.adjoint() * &w.u;
        let rhs = &w.u * &m;
        assert!(rel_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn weighted_norm_reduces_to_plain_for_identity_weight() {
        let ctx = NormContext::l2();
        let w = Weight::identity(2);
        let a = CMatrix::from_real_rows(&[&[0.0, 3.0], &[0.0, 0.0]]);
        assert!((weighted_norm(&a, &w, &ctx) - op_norm(&a, &ctx)).abs() < 1e-12);
    }

    #[test]
    fn numerical_range_of_nilpotent_is_a_disk() {
        // classical: the range of [[0,1],[0,0]] is the closed disk of radius 1/2
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let pts = numerical_range(&a, 32).unwrap();
        for z in &pts {
            assert!((z.norm() - 0.5).abs() < 1e-10, "boundary point {z}");
        }
        let defect = numerical_range_imag_defect(&a, 32).unwrap();
        assert!(defect > 0.2);
    }

    #[test]
    fn numerical_range_of_hermitian_is_real_segment() {
        let a = CMatrix::diag_re(&[-1.0, 2.0]);
        let pts = numerical_range(&a, 16).unwrap();
        for z in &pts {
            assert!(z.im.abs() < 1e-10);
            assert!(z.re >= -1.0 - 1e-10 && z.re <= 2.0 + 1e-10);
        }
        assert!(numerical_range_imag_defect(&a, 16).unwrap() < 1e-10);
    }

    #[test]
    fn context_validation() {
        assert!(NormContext::new(NormKind::L2, vec![]).is_err());
        assert!(NormContext::new(NormKind::L2, vec![0.0]).is_err());
        assert!(NormContext::new(NormKind::L2, vec![f64::NAN]).is_err());
        assert!(NormContext::new(NormKind::L1, vec![-1.0, 1.0]).is_ok());
        assert!("l2".parse::<NormKind>().is_ok());
        assert!("spectral".parse::<NormKind>().is_err());
    }
}
