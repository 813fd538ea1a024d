//! Decision procedures for weighted EP-ness: the direct commuting test plus
//! the full families of equivalent statements phrased through factorizations,
//! membership in one-sided ideals, projector links and congruences. Every
//! statement is decided independently so suites can assert cross-agreement.

use crate::error::{Error, Result};
use crate::factor::{ep_synthesize_from_decomposition, FullRankFactorization};
use crate::hermitian::{is_hermitian_weighted, NormContext, NormKind, Weight};
use crate::matcore::{inverse, rank, rel_diff, rel_residual, subspace, CMatrix, Tolerance};
use crate::wmp::{mp_inverse, wmp_inverse, WmpVerdict};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which side of the generator the unknown sits on in `target = ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `target = x * generator`
    Left,
    /// `target = generator * x`
    Right,
    /// both one-sided systems must be consistent
    TwoSided,
}

/// Linear membership question: is `target` in the requested one-sided ideal
/// generated by `generator`?
#[derive(Debug, Clone)]
pub struct MembershipQuery {
    pub target: CMatrix,
    pub side: Side,
    pub generator: CMatrix,
}

/// Outcome of a membership or sandwich decision.
#[derive(Debug, Clone)]
pub struct Membership {
    pub solvable: bool,
    /// Relative residual of the best (minimum-norm) candidate solution.
    pub residual: f64,
    /// A solving witness per decided system, empty when unsolvable.
    pub witnesses: Vec<CMatrix>,
}

/// One decided statement inside a report.
#[derive(Debug, Clone)]
pub struct Statement {
    pub id: &'static str,
    pub verdict: bool,
    pub residual: f64,
    pub witnesses: Vec<CMatrix>,
}

/// Verdicts of a family of equivalent characterizations, compared against
/// the direct commuting oracle.
#[derive(Debug, Clone)]
pub struct EpReport {
    pub direct: bool,
    pub direct_residual: f64,
    pub statements: Vec<Statement>,
    pub consistent: bool,
}

impl EpReport {
    fn close(direct: bool, direct_residual: f64, statements: Vec<Statement>) -> Self {
        let consistent = statements.iter().all(|s| s.verdict == direct);
        EpReport {
            direct,
            direct_residual,
            statements,
            consistent,
        }
    }
}

/// Direct oracle: `a` is weighted EP when its weighted inverse exists and
/// commutes with it. Returns the verdict with the commutator residual.
/// A weighted inverse whose verification fails (or stays undetermined under
/// a sampled norm context) is an error, not a verdict.
pub fn is_weighted_ep(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<(bool, f64)> {
    let w = wmp_inverse(a, e, f, ctx, tol)?;
    match w.verdict {
        WmpVerdict::Verified => {}
        WmpVerdict::FailedVerification => {
            return Err(Error::VerificationFailed(format!(
                "weighted inverse failed verification (residuals {:.3e}, {:.3e}, hermitian deviations {:.3e}, {:.3e})",
                w.res_aba, w.res_bab, w.herm_left_dev, w.herm_right_dev
            )));
        }
        WmpVerdict::Undetermined => {
            return Err(Error::VerificationFailed(format!(
                "weighted inverse undetermined under the sampled {} criterion (deviations {:.3e}, {:.3e})",
                ctx.kind(),
                w.herm_left_dev,
                w.herm_right_dev
            )));
        }
    }
    let left = a * &w.pinv;
    let right = &w.pinv * a;
    let dev = rel_residual(&(&left - &right), left.fro_norm());
    Ok((dev <= tol.residual_rel, dev))
}

/// Decides consistency of `target = generator * x` (Right), `target =
/// x * generator` (Left) or both, through the projector criterion: the
/// system is consistent exactly when the minimum-norm candidate built from
/// the unweighted inverse reproduces the target.
pub fn membership_solvable(q: &MembershipQuery, tol: &Tolerance) -> Membership {
    let g_pinv = mp_inverse(&q.generator, tol);
    let mut residual: f64 = 0.0;
    let mut witnesses = Vec::new();
    if matches!(q.side, Side::Right | Side::TwoSided) {
        assert_eq!(
            q.generator.rows(),
            q.target.rows(),
            "right membership needs matching row counts"
        );
        let x = &g_pinv * &q.target;
        residual = residual.max(rel_diff(&(&q.generator * &x), &q.target));
        witnesses.push(x);
    }
    if matches!(q.side, Side::Left | Side::TwoSided) {
        assert_eq!(
            q.generator.cols(),
            q.target.cols(),
            "left membership needs matching column counts"
        );
        let x = &q.target * &g_pinv;
        residual = residual.max(rel_diff(&(&x * &q.generator), &q.target));
        witnesses.push(x);
    }
    let solvable = residual <= tol.residual_rel;
    if !solvable {
        witnesses.clear();
    }
    Membership {
        solvable,
        residual,
        witnesses,
    }
}

/// Decides consistency of the sandwich system `left * x * right = target`.
/// Equivalent to consistency of the vectorized linear system; realized by
/// the two-sided projector criterion with the candidate `left^+ target
/// right^+`.
pub fn sandwich_solvable(
    left: &CMatrix,
    right: &CMatrix,
    target: &CMatrix,
    tol: &Tolerance,
) -> Membership {
    assert_eq!(left.rows(), target.rows(), "sandwich row counts must match");
    assert_eq!(
        right.cols(),
        target.cols(),
        "sandwich column counts must match"
    );
    let l_pinv = mp_inverse(left, tol);
    let r_pinv = mp_inverse(right, tol);
    let x = &(&l_pinv * target) * &r_pinv;
    let residual = rel_diff(&(&(left * &x) * right), target);
    let solvable = residual <= tol.residual_rel;
    Membership {
        solvable,
        residual,
        witnesses: if solvable { vec![x] } else { Vec::new() },
    }
}

fn statement(id: &'static str, verdict: bool, residual: f64, witnesses: Vec<CMatrix>) -> Statement {
    Statement {
        id,
        verdict,
        residual,
        witnesses,
    }
}

fn verified_pinv(
    what: &str,
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<CMatrix> {
    let w = wmp_inverse(a, e, f, ctx, tol)?;
    if w.verdict != WmpVerdict::Verified {
        return Err(Error::VerificationFailed(format!(
            "weighted inverse of {what} not verified (verdict {:?})",
            w.verdict
        )));
    }
    Ok(w.pinv)
}

/// Statement family phrased through a full-rank factorization `a = b c`:
/// projector equality, range/kernel matches, annihilation laws, the
/// invertible link `u = c b` with witness `z = b_dag c_dag`, membership of
/// `a` and of its inverse in the one-sided ideals of the factors, and the
/// annihilator/row-space matches. Weights: `e` outer codomain, `f` inner,
/// `h` outer domain; the direct oracle uses the pair `(e, h)`.
pub fn ep_statement_suite_bc(
    a: &CMatrix,
    fr: &FullRankFactorization,
    e: &Weight,
    f: &Weight,
    h: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<EpReport> {
    let (direct, direct_residual) = is_weighted_ep(a, e, h, ctx, tol)?;
    let b_dag = verified_pinv("the left factor", &fr.b, e, f, ctx, tol)?;
    let c_dag = verified_pinv("the right factor", &fr.c, f, h, ctx, tol)?;
    let a_dag = verified_pinv("the product", a, e, h, ctx, tol)?;
    let n = a.rows();
    let r = fr.r;
    let ident_n = CMatrix::identity(n);
    let ident_r = CMatrix::identity(r);
    let bbd = &fr.b * &b_dag;
    let cdc = &c_dag * &fr.c;
    let mut st = Vec::new();

    // (ii) the two factor projectors coincide
    let res = rel_diff(&bbd, &cdc);
    st.push(statement("projector_match", res <= tol.residual_rel, res, vec![]));

    // (iii) column spaces of b and c_dag agree, kernels of b_dag and c agree
    let (range_ok, range_gap) = subspace::same_range(&fr.b, &c_dag, tol);
    let (null_ok, null_gap) = subspace::same_null(&b_dag, &fr.c, tol);
    st.push(statement(
        "range_and_kernel_match",
        range_ok && null_ok,
        range_gap.max(null_gap),
        vec![],
    ));

    // (iv) each factor is annihilated by the other's complementary projector
    let r1 = rel_residual(&(&(&ident_n - &cdc) * &fr.b), fr.b.fro_norm());
    let r2 = rel_residual(&(&fr.c * &(&ident_n - &bbd)), fr.c.fro_norm());
    st.push(statement(
        "factor_annihilation",
        r1 <= tol.residual_rel && r2 <= tol.residual_rel,
        r1.max(r2),
        vec![],
    ));

    // (v) same with the factor inverses
    let r1 = rel_residual(&(&b_dag * &(&ident_n - &cdc)), b_dag.fro_norm());
    let r2 = rel_residual(&(&(&ident_n - &bbd) * &c_dag), c_dag.fro_norm());
    st.push(statement(
        "inverse_annihilation",
        r1 <= tol.residual_rel && r2 <= tol.residual_rel,
        r1.max(r2),
        vec![],
    ));

    // (vi) u = c b invertible with inverse z = b_dag c_dag linking the factors
    let u = &fr.c * &fr.b;
    let z = &b_dag * &c_dag;
    let link_res = rel_diff(&(&u * &z), &ident_r)
        .max(rel_diff(&(&z * &u), &ident_r))
        .max(rel_diff(&(&u * &b_dag), &fr.c))
        .max(rel_diff(&(&c_dag * &u), &fr.b));
    st.push(statement(
        "invertible_link",
        link_res <= tol.residual_rel,
        link_res,
        vec![u.clone(), z.clone()],
    ));

    // (vii) one-sided variants of the link; injectivity/surjectivity of the
    // forced witness u = c b collapse to a rank condition
    let eq_res = rel_diff(&(&u * &b_dag), &fr.c).max(rel_diff(&(&c_dag * &u), &fr.b));
    st.push(statement(
        "one_sided_link_ranks",
        eq_res <= tol.residual_rel && rank(&u, tol) == r,
        eq_res,
        vec![u.clone()],
    ));

    // (viii) the four unconstrained membership forms of the link
    let m1 = membership_solvable(
        &MembershipQuery {
            target: fr.c.clone(),
            side: Side::Left,
            generator: b_dag.clone(),
        },
        tol,
    );
    let m2 = membership_solvable(
        &MembershipQuery {
            target: b_dag.clone(),
            side: Side::Left,
            generator: fr.c.clone(),
        },
        tol,
    );
    let m3 = membership_solvable(
        &MembershipQuery {
            target: fr.b.clone(),
            side: Side::Right,
            generator: c_dag.clone(),
        },
        tol,
    );
    let m4 = membership_solvable(
        &MembershipQuery {
            target: c_dag.clone(),
            side: Side::Right,
            generator: fr.b.clone(),
        },
        tol,
    );
    st.push(statement(
        "factor_membership_family",
        m1.solvable && m2.solvable && m3.solvable && m4.solvable,
        m1.residual.max(m2.residual).max(m3.residual).max(m4.residual),
        vec![],
    ));

    // (ix) the shared witness z must link the factors and have full rank
    let zres = rel_diff(&(&fr.b * &z), &c_dag).max(rel_diff(&(&z * &fr.c), &b_dag));
    st.push(statement(
        "shared_witness_ranks",
        zres <= tol.residual_rel && rank(&z, tol) == r,
        zres,
        vec![z.clone()],
    ));

    // (x) a lies in the right ideal of c_dag and the left ideal of b_dag
    let mx1 = membership_solvable(
        &MembershipQuery {
            target: a.clone(),
            side: Side::Right,
            generator: c_dag.clone(),
        },
        tol,
    );
    let mx2 = membership_solvable(
        &MembershipQuery {
            target: a.clone(),
            side: Side::Left,
            generator: b_dag.clone(),
        },
        tol,
    );
    st.push(statement(
        "element_membership",
        mx1.solvable && mx2.solvable,
        mx1.residual.max(mx2.residual),
        vec![],
    ));

    // (xi) the weighted inverse lies in the right ideal of b and left of c
    let mi1 = membership_solvable(
        &MembershipQuery {
            target: a_dag.clone(),
            side: Side::Right,
            generator: fr.b.clone(),
        },
        tol,
    );
    let mi2 = membership_solvable(
        &MembershipQuery {
            target: a_dag.clone(),
            side: Side::Left,
            generator: fr.c.clone(),
        },
        tol,
    );
    st.push(statement(
        "inverse_membership",
        mi1.solvable && mi2.solvable,
        mi1.residual.max(mi2.residual),
        vec![],
    ));

    // (xii) equality of the invertible cosets of the factors; decided through
    // the invertible link, to which it is equivalent
    st.push(statement(
        "coset_match_via_link",
        link_res <= tol.residual_rel,
        link_res,
        vec![u, z],
    ));

    // (xiii) left annihilators of b and c_dag agree, row spaces of c and
    // b_dag agree
    let (ann_ok, ann_gap) = subspace::same_null(&fr.b.adjoint(), &c_dag.adjoint(), tol);
    let (row_ok, row_gap) = subspace::same_range(&fr.c.adjoint(), &b_dag.adjoint(), tol);
    st.push(statement(
        "annihilator_and_row_match",
        ann_ok && row_ok,
        ann_gap.max(row_gap),
        vec![],
    ));

    Ok(EpReport::close(direct, direct_residual, st))
}

/// Statement family phrased through one-sided factors of the weighted
/// inverse itself (`a_dag = s a = a t` and its projector refinements).
pub fn ep_statement_suite_sa(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<EpReport> {
    let (direct, direct_residual) = is_weighted_ep(a, e, f, ctx, tol)?;
    let a_dag = verified_pinv("the element", a, e, f, ctx, tol)?;
    let p_right = a * &a_dag;
    let p_left = &a_dag * a;
    let rank_a = rank(a, tol);
    let rank_ad = rank(&a_dag, tol);
    let mut st = Vec::new();

    let left_factor = membership_solvable(
        &MembershipQuery {
            target: a_dag.clone(),
            side: Side::Left,
            generator: a.clone(),
        },
        tol,
    );
    let right_factor = membership_solvable(
        &MembershipQuery {
            target: a_dag.clone(),
            side: Side::Right,
            generator: a.clone(),
        },
        tol,
    );
    let factor_res = left_factor.residual.max(right_factor.residual);

    // (ii) two-sided factorization with injective/surjective witnesses;
    // an invertible solution of a one-sided system exists exactly when the
    // plain system is consistent and the ranks agree
    st.push(statement(
        "invertible_two_sided_factor",
        left_factor.solvable && right_factor.solvable && rank_a == rank_ad,
        factor_res,
        vec![],
    ));

    // (iii) plain two-sided factorization of the inverse through the element
    st.push(statement(
        "two_sided_factor",
        left_factor.solvable && right_factor.solvable,
        factor_res,
        vec![],
    ));

    // (iv) both product projectors factor through the element and inverse
    let f1 = membership_solvable(
        &MembershipQuery {
            target: p_left.clone(),
            side: Side::Left,
            generator: a_dag.clone(),
        },
        tol,
    );
    let f2 = membership_solvable(
        &MembershipQuery {
            target: p_left.clone(),
            side: Side::Right,
            generator: a.clone(),
        },
        tol,
    );
    let f3 = membership_solvable(
        &MembershipQuery {
            target: p_right.clone(),
            side: Side::Right,
            generator: a_dag.clone(),
        },
        tol,
    );
    let f4 = membership_solvable(
        &MembershipQuery {
            target: p_right.clone(),
            side: Side::Left,
            generator: a.clone(),
        },
        tol,
    );
    st.push(statement(
        "projector_factor_family",
        f1.solvable && f2.solvable && f3.solvable && f4.solvable,
        f1.residual.max(f2.residual).max(f3.residual).max(f4.residual),
        vec![],
    ));

    // (v) mixed family: projectors factor one way, the inverse the other
    st.push(statement(
        "mixed_factor_family",
        f1.solvable && f3.solvable && right_factor.solvable && left_factor.solvable,
        f1.residual
            .max(f3.residual)
            .max(right_factor.residual)
            .max(left_factor.residual),
        vec![],
    ));

    // (vi)-(viii) links between the two product projectors; the witness
    // invertibility/injectivity/surjectivity constraints all collapse to the
    // same rank condition in finite dimension
    let l1 = membership_solvable(
        &MembershipQuery {
            target: p_left.clone(),
            side: Side::Left,
            generator: p_right.clone(),
        },
        tol,
    );
    let l2 = membership_solvable(
        &MembershipQuery {
            target: p_left.clone(),
            side: Side::Right,
            generator: p_right.clone(),
        },
        tol,
    );
    let link_res = l1.residual.max(l2.residual);
    let ranks_eq = rank(&p_left, tol) == rank(&p_right, tol);
    st.push(statement(
        "invertible_projector_link",
        l1.solvable && l2.solvable && ranks_eq,
        link_res,
        vec![],
    ));
    st.push(statement(
        "onto_into_projector_link",
        l1.solvable && l2.solvable && ranks_eq,
        link_res,
        vec![],
    ));
    st.push(statement(
        "into_projector_link",
        l1.solvable && ranks_eq && l2.solvable,
        link_res,
        vec![],
    ));

    // (ix) sandwich systems through the element on both sides
    let s1 = sandwich_solvable(a, &a_dag, &p_left, tol);
    let s2 = sandwich_solvable(&a_dag, a, &p_right, tol);
    st.push(statement(
        "sandwich_projector_link",
        s1.solvable && s2.solvable,
        s1.residual.max(s2.residual),
        vec![],
    ));

    Ok(EpReport::close(direct, direct_residual, st))
}

/// EP-ness is insensitive to swapping or equalizing the two weights: the
/// verdicts for the pairs `(e,f)`, `(f,e)`, `(e,e)` and `(f,f)` must agree.
pub fn weight_swap_suite(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<EpReport> {
    let (direct, direct_residual) = is_weighted_ep(a, e, f, ctx, tol)?;
    let mut st = Vec::new();
    for (id, we, wf) in [
        ("swapped_pair", f, e),
        ("first_weight_pair", e, e),
        ("second_weight_pair", f, f),
    ] {
        let (v, res) = is_weighted_ep(a, we, wf, ctx, tol)?;
        st.push(statement(id, v, res, vec![]));
    }
    Ok(EpReport::close(direct, direct_residual, st))
}

/// For a weighted EP element the product idempotent `p = a a_dag` satisfies
/// both weight congruences `e^{-1} p* e = p` and `f^{-1} p* f = p`. Requires
/// the l2 context (congruences are adjoint statements) and rejects inputs
/// that are not weighted EP.
pub fn cstar_congruence_check(
    a: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<bool> {
    if ctx.kind() != NormKind::L2 {
        return Err(Error::BadNormContext(
            "congruence check requires the l2 norm context".into(),
        ));
    }
    let (is_ep, residual) = is_weighted_ep(a, e, f, ctx, tol)?;
    if !is_ep {
        return Err(Error::NotWeightedEp { residual });
    }
    let a_dag = verified_pinv("the element", a, e, f, ctx, tol)?;
    let p = a * &a_dag;
    let dev_e = rel_diff(&(&(&e.u_inv * &p.adjoint()) * &e.u), &p);
    let dev_f = rel_diff(&(&(&f.u_inv * &p.adjoint()) * &f.u), &p);
    Ok(dev_e <= tol.residual_rel && dev_f <= tol.residual_rel)
}

/// Predicates of the block-form tri-equivalence: for `t = j (t1 + 0) j^{-1}`
/// with invertible `t1`, weighted EP-ness of `t`, weighted hermitianness of
/// the range-block idempotent and of the null-block idempotent are all
/// equivalent. Returns the three predicates for cross-checking.
pub fn block_form_predicates(
    j: &CMatrix,
    t1: &CMatrix,
    e: &Weight,
    f: &Weight,
    ctx: &NormContext,
    tol: &Tolerance,
) -> Result<(bool, bool, bool)> {
    let n = j.rows();
    let r = t1.rows();
    if !j.is_square() || !t1.is_square() || r > n {
        return Err(Error::DimensionMismatch(
            "block predicates need square j and t1 with t1 no larger".into(),
        ));
    }
    let j_inv = inverse(j)?;
    let zero = CMatrix::zeros(n - r, n - r);
    let t = &(j * &CMatrix::block_diag(&[t1, &zero])) * &j_inv;
    let ident_r = CMatrix::identity(r);
    let ident_c = CMatrix::identity(n - r);
    let zero_r = CMatrix::zeros(r, r);
    let q1 = &(j * &CMatrix::block_diag(&[&ident_r, &zero])) * &j_inv;
    let q2 = &(j * &CMatrix::block_diag(&[&zero_r, &ident_c])) * &j_inv;
    let ep = is_weighted_ep(&t, e, f, ctx, tol)?.0;
    let q1_herm = is_hermitian_weighted(&q1, e, ctx, tol).hermitian
        && is_hermitian_weighted(&q1, f, ctx, tol).hermitian;
    let q2_herm = is_hermitian_weighted(&q2, e, ctx, tol).hermitian
        && is_hermitian_weighted(&q2, f, ctx, tol).hermitian;
    Ok((ep, q1_herm, q2_herm))
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Well-conditioned random invertible matrix: unitary x diagonal x unitary
/// with singular values in [0.6, 1.8].
fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let qa = subspace::random_unitary(n, rng);
    let qb = subspace::random_unitary(n, rng);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.6..1.8)).collect();
    &(&qa * &CMatrix::diag_re(&d)) * &qb.adjoint()
}

fn weight_in_basis(u: &CMatrix, rng: &mut ChaCha8Rng, ctx: &NormContext, tol: &Tolerance) -> Weight {
    let n = u.rows();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
    let m = &(u * &CMatrix::diag_re(&d)) * &u.adjoint();
    Weight::new(m, ctx, tol).expect("diagonal-in-basis weight is positive definite")
}

/// Deterministic positive-definite weight of the given dimension.
pub fn random_weight(n: usize, seed: u64) -> Weight {
    let ctx = NormContext::l2();
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = subspace::random_unitary(n, &mut rng);
    weight_in_basis(&u, &mut rng, &ctx, &tol)
}

/// Deterministic instance generator for the l2 context. EP instances are
/// synthesized from a projector and weights sharing one orthonormal
/// eigenbasis plus a well-conditioned core on the projector's range; non-EP
/// instances add an off-block coupling term and reject any draw that stays
/// within 10x the decision margin of EP under any of the four weight pairs,
/// so generated classes are cleanly separated.
///
/// Requesting a non-EP instance needs 0 < rank < n; out-of-range requests
/// are clamped, and for n < 2 (where every square matrix of that size is
/// EP) the EP recipe is used instead.
pub fn generate_instance(n: usize, rank: usize, ep: bool, seed: u64) -> (CMatrix, Weight, Weight) {
    assert!(rank <= n, "rank {rank} exceeds dimension {n}");
    let ctx = NormContext::l2();
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = subspace::random_unitary(n, &mut rng);
    let e = weight_in_basis(&u, &mut rng, &ctx, &tol);
    let f = weight_in_basis(&u, &mut rng, &ctx, &tol);

    if ep || n < 2 {
        let r = if ep { rank } else { n.min(1) };
        let g = random_invertible(r, &mut rng);
        let zero = CMatrix::zeros(n - r, n - r);
        let core_seed = &(&u * &CMatrix::block_diag(&[&g, &zero])) * &u.adjoint();
        let ir = CMatrix::identity(r);
        let zr = CMatrix::zeros(n - r, n - r);
        let p = &(&u * &CMatrix::block_diag(&[&ir, &zr])) * &u.adjoint();
        let a = ep_synthesize_from_decomposition(
            &CMatrix::identity(n),
            &p,
            &core_seed,
            &e,
            &f,
            &ctx,
            &tol,
        )
        .expect("aligned construction synthesizes a weighted EP element");
        return (a, e, f);
    }

    let r = rank.clamp(1, n - 1);
    let g = random_invertible(r, &mut rng);
    for _ in 0..256 {
        let coupling = CMatrix::from_fn(r, n - r, |_, _| random_complex(&mut rng));
        if coupling.fro_norm() < 0.1 {
            continue;
        }
        let top = CMatrix::hstack(&[&g, &coupling]);
        let bottom = CMatrix::zeros(n - r, n);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if i < r { top[(i, j)] } else { bottom[(i - r, j)] });
            }
        }
        let m = CMatrix::new(n, n, entries).expect("assembled block matrix");
        let a = &(&u * &m) * &u.adjoint();
        let mut decisively_non_ep = true;
        for (we, wf) in [(&e, &f), (&f, &e), (&e, &e), (&f, &f)] {
            match is_weighted_ep(&a, we, wf, &ctx, &tol) {
                Ok((false, dev)) if dev > 10.0 * tol.residual_rel => {}
                _ => {
                    decisively_non_ep = false;
                    break;
                }
            }
        }
        if decisively_non_ep {
            return (a, e, f);
        }
    }
    unreachable!("coupled draws failed to produce a non-EP instance");
}

/// Instance generator for the sampled norm contexts (l1/linf): everything is
/// aligned with the coordinate axes so the hermitian sampling certifies the
/// EP construction. Non-EP requests couple the blocks exactly as in the l2
/// generator; under sampled contexts such instances typically come back
/// undetermined rather than refuted, which the caller must tolerate.
pub fn generate_instance_aligned(
    n: usize,
    rank: usize,
    ep: bool,
    seed: u64,
    ctx: &NormContext,
) -> (CMatrix, Weight, Weight) {
    assert!(rank <= n, "rank {rank} exceeds dimension {n}");
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let de: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
    let df: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
    let e = Weight::new(CMatrix::diag_re(&de), ctx, &tol).expect("positive diagonal weight");
    let f = Weight::new(CMatrix::diag_re(&df), ctx, &tol).expect("positive diagonal weight");
    let r = if ep || n < 2 { rank } else { rank.clamp(1, n - 1) };
    let dg: Vec<f64> = (0..r).map(|_| rng.gen_range(0.6..1.8)).collect();
    let mut a = CMatrix::zeros(n, n);
    for i in 0..r {
        a[(i, i)] = Complex64::new(dg[i], 0.0);
    }
    if !ep && n >= 2 {
        for i in 0..r {
            for j in r..n {
                a[(i, j)] = random_complex(&mut rng);
            }
        }
    }
    (a, e, f)
}
