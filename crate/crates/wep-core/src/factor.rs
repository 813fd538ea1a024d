//! Factorization forms: full-rank splitting, the reverse-order law for
//! weighted inverses of the factors, block decompositions of weighted EP
//! elements, and the inverse-in-a-corner-algebra helper.

use crate::epcheck;
use crate::error::{Error, Result};
use crate::hermitian::{is_hermitian_weighted, NormContext, Weight};
use crate::matcore::{
    inverse, rank, rel_diff, rel_residual, subspace, svd, CMatrix, Tolerance,
};
use crate::wmp::wmp_inverse;

/// Splitting `a = b * c` with `b` of full column rank and `c` of full row
/// rank; the inner dimension is the rank of `a`.
#[derive(Debug, Clone)]
pub struct FullRankFactorization {
    pub b: CMatrix,
    pub c: CMatrix,
    pub r: usize,
}

impl FullRankFactorization {
    /// Rank zero: both factors are empty.
    pub fn is_degenerate(&self) -> bool {
        self.r == 0
    }
}

/// Full-rank factorization through the singular value decomposition:
/// `b` keeps the scaled left singular vectors, `c` the orthonormal right
/// singular rows, so `c * c.adjoint()` is the identity.
pub fn full_rank_factorize(a: &CMatrix, tol: &Tolerance) -> FullRankFactorization {
    let res = svd(a).expect("jacobi svd convergence");
    let s0 = res.s.first().copied().unwrap_or(0.0);
    let r = if s0 == 0.0 {
        0
    } else {
        res.s.iter().filter(|&&x| x > tol.rank_rel * s0).count()
    };
    let mut b = res.u.block(0, a.rows(), 0, r);
    for k in 0..r {
        for i in 0..a.rows() {
            b[(i, k)] = b[(i, k)].scale(res.s[k]);
        }
    }
    let c = res.vt.block(0, r, 0, a.cols());
    FullRankFactorization { b, c, r }
}

/// Weighted inverses of the factors of `a = b c`, derived from the weighted
/// inverse of `a` itself: `b_dag = c * a_dag` and `c_dag = a_dag * b`, for
/// weights `e` (outer codomain), `f` (inner space) and `h` (outer domain).
///
/// Verifies the one-sided identities `b_dag * b = 1` and `c * c_dag = 1`
/// before returning; their failure beyond tolerance reports both residuals.
pub fn factor_parts_wmp(
    a: &CMatrix,
    fr: &FullRankFactorization,
    e: &Weight,
    f: &Weight,
    h: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<(CMatrix, CMatrix)> {
    if f.dim() != fr.r {
        return Err(Error::DimensionMismatch(format!(
            "inner weight of dimension {} against factor rank {}",
            f.dim(),
            fr.r
        )));
    }
    let a_dag = wmp_inverse(a, e, h, ctx, tol)?;
    if a_dag.verdict == crate::wmp::WmpVerdict::FailedVerification {
        return Err(Error::VerificationFailed(format!(
            "weighted inverse of the product failed verification (residuals {:.3e}, {:.3e})",
            a_dag.res_aba, a_dag.res_bab
        )));
    }
    let b_dag = &fr.c * &a_dag.pinv;
    let c_dag = &a_dag.pinv * &fr.b;
    let ident = CMatrix::identity(fr.r);
    let res_left = rel_diff(&(&b_dag * &fr.b), &ident);
    let res_right = rel_diff(&(&fr.c * &c_dag), &ident);
    if res_left > tol.residual_rel || res_right > tol.residual_rel {
        return Err(Error::VerificationFailed(format!(
            "one-sided factor inverses invalid (b_dag*b residual {res_left:.3e}, c*c_dag residual {res_right:.3e})"
        )));
    }
    Ok((b_dag, c_dag))
}

/// Reverse-order law: the weighted inverse of `a = b c` is the product of the
/// factor inverses in opposite order. Recomputes the direct weighted inverse
/// and cross-checks the product identities; disagreement means an upstream
/// computation broke, so it is an error rather than a report.
#[allow(clippy::too_many_arguments)]
pub fn reverse_order_wmp(
    a: &CMatrix,
    fr: &FullRankFactorization,
    b_dag: &CMatrix,
    c_dag: &CMatrix,
    e: &Weight,
    h: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let rol = c_dag * b_dag;
    let direct = wmp_inverse(a, e, h, ctx, tol)?;
    let gap = rel_diff(&rol, &direct.pinv);
    if gap > tol.residual_rel {
        return Err(Error::VerificationFailed(format!(
            "reverse-order product differs from the direct weighted inverse by {gap:.3e}"
        )));
    }
    let left = rel_diff(&(a * &direct.pinv), &(&fr.b * b_dag));
    let right = rel_diff(&(&direct.pinv * a), &(c_dag * &fr.c));
    if left > tol.residual_rel || right > tol.residual_rel {
        return Err(Error::VerificationFailed(format!(
            "projector identities broken (left {left:.3e}, right {right:.3e})"
        )));
    }
    Ok(rol)
}

/// Similarity that exhibits a weighted EP element as an invertible block plus
/// a zero block: `a = j * (t1 + 0) * j^{-1}` with the basis columns split
/// between the range and null space of the product idempotent.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Basis of the range of `a * a_dag` (equals the range of `a`).
    pub x1_basis: CMatrix,
    /// Basis of the null space of `a * a_dag` (equals the null space of `a`).
    pub x2_basis: CMatrix,
    /// Invertible restriction of `a` to the range block.
    pub t1: CMatrix,
    /// Change of basis `[x1_basis | x2_basis]`.
    pub j: CMatrix,
}

/// Block decomposition of a weighted EP element. Rejects inputs that are not
/// weighted EP; verifies the reconstruction, the invertibility of the range
/// block and the weighted hermitianness of both block idempotents.
pub fn ep_block_decomposition(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<BlockDecomposition> {
    let (is_ep, residual) = epcheck::is_weighted_ep(a, e, f, ctx, tol)?;
    if !is_ep {
        return Err(Error::NotWeightedEp { residual });
    }
    let n = a.rows();
    let a_dag = wmp_inverse(a, e, f, ctx, tol)?;
    let p = a * &a_dag.pinv;
    let x1 = subspace::range_basis(&p, tol);
    let x2 = subspace::null_basis(&p, tol);
    let r = x1.cols();
    let j = CMatrix::hstack(&[&x1, &x2]);
    let j_inv = inverse(&j)?;
    let m = &(&j_inv * a) * &j;
    let t1 = m.block(0, r, 0, r);

    let zero = CMatrix::zeros(n - r, n - r);
    let recon = &(&j * &CMatrix::block_diag(&[&t1, &zero])) * &j_inv;
    let rec_res = rel_diff(&recon, a);
    if rec_res > tol.residual_rel {
        return Err(Error::VerificationFailed(format!(
            "block reconstruction residual {rec_res:.3e}"
        )));
    }
    if r > 0 && rank(&t1, tol) != r {
        return Err(Error::VerificationFailed(
            "range block is numerically singular".into(),
        ));
    }
    let ident_r = CMatrix::identity(r);
    let ident_c = CMatrix::identity(n - r);
    let zero_r = CMatrix::zeros(r, r);
    let q1 = &(&j * &CMatrix::block_diag(&[&ident_r, &CMatrix::zeros(n - r, n - r)])) * &j_inv;
    let q2 = &(&j * &CMatrix::block_diag(&[&zero_r, &ident_c])) * &j_inv;
    let h1 = is_hermitian_weighted(&q1, e, ctx, tol);
    if !h1.hermitian {
        return Err(Error::NotHermitianWeighted {
            algebra: "e",
            deviation: h1.deviation,
        });
    }
    let h2 = is_hermitian_weighted(&q2, f, ctx, tol);
    if !h2.hermitian {
        return Err(Error::NotHermitianWeighted {
            algebra: "f",
            deviation: h2.deviation,
        });
    }
    Ok(BlockDecomposition {
        x1_basis: x1,
        x2_basis: x2,
        t1,
        j,
    })
}

/// Conjugated corner form of a weighted EP element: `a = c p a p c^{-1}`
/// where `p` is the product idempotent and `c` an invertible change of frame.
#[derive(Debug, Clone)]
pub struct EpDecomposition {
    pub c: CMatrix,
    pub p: CMatrix,
    /// Compression `p a p`, invertible in the corner algebra unless degenerate.
    pub core: CMatrix,
    /// True when `p = 0`, so the corner algebra has a zero unit.
    pub degenerate: bool,
}

/// Canonical corner decomposition of a weighted EP element: the frame is the
/// identity and `p` is the product idempotent `a * a_dag` (which equals
/// `a_dag * a` in the EP case). Verifies corner invertibility and the
/// reconstruction before returning.
pub fn canonical_ep_decomposition(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<EpDecomposition> {
    let (is_ep, residual) = epcheck::is_weighted_ep(a, e, f, ctx, tol)?;
    if !is_ep {
        return Err(Error::NotWeightedEp { residual });
    }
    let a_dag = wmp_inverse(a, e, f, ctx, tol)?;
    let p = a * &a_dag.pinv;
    let core = &(&p * a) * &p;
    let degenerate = rank(&p, tol) == 0;
    if !degenerate {
        // must be invertible in the corner; pap_inverse rejects otherwise
        let x = pap_inverse(a, &p, tol)?;
        let res = rel_diff(&(&core * &x), &p).max(rel_diff(&(&x * &core), &p));
        if res > tol.residual_rel {
            return Err(Error::VerificationFailed(format!(
                "corner inverse residual {res:.3e}"
            )));
        }
    }
    let rec = rel_diff(&core, a);
    if rec > tol.residual_rel {
        return Err(Error::VerificationFailed(format!(
            "corner reconstruction residual {rec:.3e}"
        )));
    }
    Ok(EpDecomposition {
        c: CMatrix::identity(a.rows()),
        p,
        core,
        degenerate,
    })
}

/// Inverse of `p a p` inside the corner algebra with unit `p`: the element
/// `x = p x p` with `(p a p) x = x (p a p) = p`. Exists exactly when the
/// compression of `a` to the range of `p` is invertible.
pub fn pap_inverse(a: &CMatrix, p: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    if !a.is_square() || p.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "corner inverse needs matching square shapes, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let idem = rel_residual(&(&(p * p) - p), p.fro_norm());
    if idem > tol.residual_rel {
        return Err(Error::BadWitness(format!(
            "p is not idempotent (residual {idem:.3e})"
        )));
    }
    let n = a.rows();
    let x1 = subspace::range_basis(p, tol);
    if x1.cols() == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    // coordinates on range(p): q x1 = identity, p = x1 q, pap = x1 (q a x1) q
    let q = &x1.adjoint() * p;
    let rr = &(&q * a) * &x1;
    let rr_inv = inverse(&rr).map_err(|_| Error::CornerSingular)?;
    Ok(&(&x1 * &rr_inv) * &q)
}

/// Builds a weighted EP element from decomposition data: an invertible frame
/// `c`, an idempotent `p` whose conjugate `c p c^{-1}` is hermitian in both
/// weighted algebras, and a seed whose compression `p seed p` is invertible
/// in the corner. Returns `c (p seed p) c^{-1}`.
pub fn ep_synthesize_from_decomposition(
    c: &CMatrix,
    p: &CMatrix,
    core_seed: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let n = p.rows();
    if !p.is_square() || c.shape() != (n, n) || core_seed.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "frame, idempotent and seed must share one square shape".into(),
        ));
    }
    let idem = rel_residual(&(&(p * p) - p), p.fro_norm());
    if idem > tol.residual_rel {
        return Err(Error::BadWitness(format!(
            "p is not idempotent (residual {idem:.3e})"
        )));
    }
    let c_inv = inverse(c)?;
    let conj_p = &(c * p) * &c_inv;
    let he = is_hermitian_weighted(&conj_p, e, ctx, tol);
    if !he.hermitian {
        return Err(Error::NotHermitianWeighted {
            algebra: "e",
            deviation: he.deviation,
        });
    }
    let hf = is_hermitian_weighted(&conj_p, f, ctx, tol);
    if !hf.hermitian {
        return Err(Error::NotHermitianWeighted {
            algebra: "f",
            deviation: hf.deviation,
        });
    }
    if rank(p, tol) > 0 {
        pap_inverse(core_seed, p, tol)?;
    }
    let core = &(p * core_seed) * p;
    Ok(&(c * &core) * &c_inv)
}

/// Checks a splitting certificate for weighted EP-ness: an injective `s`, a
/// surjective `u`, an invertible `t1` and an idempotent `p` hermitian in both
/// weighted algebras, with `t = s (t1 + 0) u`, the range of `p` spanned by
/// the leading columns of `s` and the null space of `p` cut out by the
/// leading rows of `u`. A valid certificate forces `t` weighted EP.
#[allow(clippy::too_many_arguments)]
pub fn split_map_certificate(
    t: &CMatrix,
    s: &CMatrix,
    u: &CMatrix,
    t1: &CMatrix,
    p: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<bool> {
    let n = t.rows();
    if !t.is_square() || !t1.is_square() || p.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "certificate needs square t, t1 and p of matching outer size".into(),
        ));
    }
    let k = s.cols();
    let r = t1.rows();
    if s.rows() != n || u.shape() != (k, n) || r > k {
        return Err(Error::DimensionMismatch(format!(
            "splitting shapes inconsistent: s {}x{}, u {}x{}, t1 {}x{}",
            s.rows(),
            s.cols(),
            u.rows(),
            u.cols(),
            r,
            r
        )));
    }
    if rank(t1, tol) != r || rank(s, tol) != k || rank(u, tol) != k {
        return Ok(false);
    }
    let zero = CMatrix::zeros(k - r, k - r);
    let mid = CMatrix::block_diag(&[t1, &zero]);
    if rel_diff(&(&(s * &mid) * u), t) > tol.residual_rel {
        return Ok(false);
    }
    if rel_residual(&(&(p * p) - p), p.fro_norm()) > tol.residual_rel {
        return Ok(false);
    }
    if !is_hermitian_weighted(p, e, ctx, tol).hermitian
        || !is_hermitian_weighted(p, f, ctx, tol).hermitian
    {
        return Ok(false);
    }
    let s_lead = s.block(0, n, 0, r);
    let (range_ok, _) = subspace::same_range(p, &s_lead, tol);
    if !range_ok {
        return Ok(false);
    }
    let u_lead = u.block(0, r, 0, n);
    let (null_ok, _) = subspace::same_null(p, &u_lead, tol);
    Ok(null_ok)
}
