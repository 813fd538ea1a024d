//! Column-space and null-space utilities built on the singular value
//! decomposition. Subspace equality is decided by comparing orthogonal
//! projectors, which is basis-independent.

use super::{rank, rel_diff, svd, CMatrix, Tolerance};
use num_complex::Complex64;

/// Orthonormal basis of the column space, one column per singular value
/// above the rank cutoff. Shape m x r.
pub fn range_basis(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let res = svd(a).expect("jacobi svd convergence");
    let r = rank_from_s(&res.s, tol);
    res.u.block(0, a.rows(), 0, r)
}

/// Orthonormal basis of the null space in the domain. Shape n x (n - r).
pub fn null_basis(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let res = svd(a).expect("jacobi svd convergence");
    let r = rank_from_s(&res.s, tol);
    let v = res.vt.adjoint();
    v.block(0, a.cols(), r, a.cols())
}

/// Orthogonal projector onto the column space.
pub fn range_projector(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let b = range_basis(a, tol);
    &b * &b.adjoint()
}

/// Orthogonal projector onto the null space.
pub fn null_projector(a: &CMatrix, tol: &Tolerance) -> CMatrix {
    let b = null_basis(a, tol);
    &b * &b.adjoint()
}

/// Column spaces agree: equal rank and matching orthogonal projectors.
/// Returns the verdict and the projector gap.
pub fn same_range(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> (bool, f64) {
    assert_eq!(a.rows(), b.rows(), "ranges live in different spaces");
    if rank(a, tol) != rank(b, tol) {
        return (false, 1.0);
    }
    let gap = rel_diff(&range_projector(a, tol), &range_projector(b, tol));
    (gap <= tol.residual_rel, gap)
}

/// Null spaces agree, by the same projector comparison.
pub fn same_null(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> (bool, f64) {
    assert_eq!(a.cols(), b.cols(), "null spaces live in different spaces");
    let pa = null_projector(a, tol);
    let pb = null_projector(b, tol);
    if pa.shape() != pb.shape() {
        return (false, 1.0);
    }
    if rank(a, tol) != rank(b, tol) {
        return (false, 1.0);
    }
    let gap = rel_diff(&pa, &pb);
    (gap <= tol.residual_rel, gap)
}

fn rank_from_s(s: &[f64], tol: &Tolerance) -> usize {
    let s0 = s.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rel * s0).count()
}

/// Deterministic unitary from a seeded stream: modified Gram-Schmidt on a
/// random complex square matrix.
pub fn random_unitary(n: usize, rng: &mut impl rand::Rng) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

fn gram_schmidt(g: &CMatrix) -> Option<CMatrix> {
    let n = g.rows();
    let mut q = g.clone();
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..n {
                let sub = q[(i, k)] * dot;
                q[(i, j)] -= sub;
            }
        }
        let nrm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-8 {
            return None;
        }
        for i in 0..n {
            q[(i, j)] = q[(i, j)].scale(1.0 / nrm);
        }
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projectors_are_idempotent_and_self_adjoint() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[0.0, 0.0, 1.0]]);
        let tol = Tolerance::default();
        let p = range_projector(&a, &tol);
        assert!(rel_diff(&(&p * &p), &p) < 1e-12);
        assert!(rel_diff(&p.adjoint(), &p) < 1e-12);
        let q = null_projector(&a, &tol);
        assert!(rel_diff(&(&q * &q), &q) < 1e-12);
        // projector annihilates the matrix from the right
        assert!((&a * &q).fro_norm() < 1e-12);
    }

    #[test]
    fn range_equality_is_basis_independent() {
        let tol = Tolerance::default();
        let a = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        // same column space, different spanning set
        let b = CMatrix::from_real_rows(&[&[2.0, 1.0, 3.0], &[-1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let (ok, gap) = same_range(&a, &b, &tol);
        assert!(ok, "gap {gap}");
        let c = CMatrix::from_real_rows(&[&[1.0], &[0.0], &[1.0]]);
        let (ok2, _) = same_range(&a, &c, &tol);
        assert!(!ok2);
    }

    #[test]
    fn null_space_dimensions() {
        let tol = Tolerance::default();
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let nb = null_basis(&a, &tol);
        assert_eq!(nb.shape(), (2, 1));
        assert!((&a * &nb).fro_norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary_and_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let u1 = random_unitary(5, &mut r1);
        let u2 = random_unitary(5, &mut r2);
        assert_eq!(u1, u2);
        assert!(rel_diff(&(&u1.adjoint() * &u1), &CMatrix::identity(5)) < 1e-12);
    }
}
