//! Property tests: every algebraic identity the library claims is replayed
//! here against randomized inputs, with the oracle computed by a different
//! route than the code under test.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wep_core::epcheck::{self, generate_instance, is_weighted_ep};
use wep_core::factor::{
    canonical_ep_decomposition, ep_block_decomposition, ep_synthesize_from_decomposition,
    factor_parts_wmp, full_rank_factorize, reverse_order_wmp, split_map_certificate,
};
use wep_core::hermitian::{is_hermitian, is_hermitian_weighted};
use wep_core::matcore::{
    inverse, mat_exp, op_norm, principal_sqrt, rank, rel_diff, subspace, CMatrix,
};
use wep_core::wmp::{group_inverse, mp_inverse, wmp_inverse};
use wep_core::{Error, NormContext, Tolerance, Weight};

const OK: f64 = 1e-9;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_deficient(m: usize, n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let k = 1.max(m.min(n) / 2);
    &random_matrix(m, k, rng) * &random_matrix(k, n, rng)
}

fn random_weight(n: usize, rng: &mut ChaCha8Rng) -> Weight {
    let ctx = NormContext::l2();
    let u = subspace::random_unitary(n, rng);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
    Weight::new(&(&u * &CMatrix::diag_re(&d)) * &u.adjoint(), &ctx, &Tolerance::default())
        .expect("valid weight")
}

fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let b = random_matrix(n, n, rng);
    &b * &b.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The plain pseudoinverse satisfies all four defining conditions.
    #[test]
    fn mp_four_conditions(seed in any::<u64>(), m in 1usize..=7, n in 1usize..=7, full in any::<bool>()) {
        let mut rng = rng_for(seed);
        let tol = Tolerance::default();
        let a = if full { random_matrix(m, n, &mut rng) } else { random_deficient(m, n, &mut rng) };
        let b = mp_inverse(&a, &tol);
        prop_assert!(rel_diff(&(&(&a * &b) * &a), &a) <= OK);
        prop_assert!(rel_diff(&(&(&b * &a) * &b), &b) <= OK);
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert!(rel_diff(&ab.adjoint(), &ab) <= OK);
        prop_assert!(rel_diff(&ba.adjoint(), &ba) <= OK);
        // involution: the pseudoinverse of the pseudoinverse is the element
        prop_assert!(rel_diff(&mp_inverse(&b, &tol), &a) <= OK);
    }

    /// Weighted inverse agrees with the explicit congruence construction,
    /// computed here from scratch with the weight roots.
    #[test]
    fn weighted_inverse_congruence_oracle(seed in any::<u64>(), m in 1usize..=6, n in 1usize..=6) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let a = random_matrix(m, n, &mut rng);
        let e = random_weight(m, &mut rng);
        let f = random_weight(n, &mut rng);
        let got = wmp_inverse(&a, &e, &f, &ctx, &tol).unwrap();
        let scaled = &(&e.u_half * &a) * &f.u_half_inv;
        let oracle = &(&f.u_half_inv * &mp_inverse(&scaled, &tol)) * &e.u_half;
        prop_assert!(got.is_verified());
        prop_assert!(rel_diff(&got.pinv, &oracle) <= OK);
    }

    /// The principal square root of a positive element squares back.
    #[test]
    fn principal_sqrt_squares_back(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let a = random_psd(n, &mut rng);
        let s = principal_sqrt(&a, &ctx, &tol).unwrap();
        prop_assert!(rel_diff(&(&s * &s), &a) <= OK);
        prop_assert!(is_hermitian(&s, &ctx, &tol).hermitian);
    }

    /// exp(x) * exp(-x) = 1 and similarity invariance of the exponential.
    #[test]
    fn exponential_inverse_pair(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = rng_for(seed);
        let a = random_matrix(n, n, &mut rng);
        let pos = mat_exp(&a).unwrap();
        let neg = mat_exp(&a.scale_re(-1.0)).unwrap();
        prop_assert!(rel_diff(&(&pos * &neg), &CMatrix::identity(n)) <= OK);
    }

    /// Group inverse defining identities, on elements built to have index one.
    #[test]
    fn group_inverse_identities(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = rng_for(seed);
        let tol = Tolerance::default();
        let r = rng.gen_range(1..=n);
        // similarity image of an invertible block has rank(a^2) = rank(a)
        let core = loop {
            let c = random_matrix(r, r, &mut rng);
            if rank(&c, &tol) == r {
                break c;
            }
        };
        let j = loop {
            let c = random_matrix(n, n, &mut rng);
            if rank(&c, &tol) == n {
                break c;
            }
        };
        let zero = CMatrix::zeros(n - r, n - r);
        let a = &(&j * &CMatrix::block_diag(&[&core, &zero])) * &inverse(&j).unwrap();
        let g = group_inverse(&a, &tol).unwrap();
        prop_assert!(rel_diff(&(&(&a * &g) * &a), &a) <= OK);
        prop_assert!(rel_diff(&(&(&g * &a) * &g), &g) <= OK);
        prop_assert!(rel_diff(&(&a * &g), &(&g * &a)) <= OK);
    }

    /// Full-rank factorization reproduces the element with factors of the
    /// reported inner rank.
    #[test]
    fn full_rank_factorization_reconstructs(seed in any::<u64>(), m in 1usize..=7, n in 1usize..=7) {
        let mut rng = rng_for(seed);
        let tol = Tolerance::default();
        let a = random_deficient(m, n, &mut rng);
        let fr = full_rank_factorize(&a, &tol);
        prop_assert_eq!(fr.r, rank(&a, &tol));
        prop_assert!(rel_diff(&(&fr.b * &fr.c), &a) <= OK);
        if fr.r > 0 {
            prop_assert_eq!(rank(&fr.b, &tol), fr.r);
            prop_assert_eq!(rank(&fr.c, &tol), fr.r);
        }
    }

    /// Factor inverses built from the element's inverse satisfy the exchange
    /// identities and the reverse-order law.
    #[test]
    fn reverse_order_and_exchange(seed in any::<u64>(), m in 1usize..=6, n in 1usize..=6) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let a = random_deficient(m, n, &mut rng);
        let fr = full_rank_factorize(&a, &tol);
        let e = random_weight(m, &mut rng);
        let f = random_weight(fr.r, &mut rng);
        let h = random_weight(n, &mut rng);
        let (b_dag, c_dag) = factor_parts_wmp(&a, &fr, &e, &f, &h, &ctx, &tol).unwrap();
        let a_dag = reverse_order_wmp(&a, &fr, &b_dag, &c_dag, &e, &h, &ctx, &tol).unwrap();
        // the inverse exchanges factors: b_dag a = c and a c_dag = b
        prop_assert!(rel_diff(&(&b_dag * &a), &fr.c) <= OK);
        prop_assert!(rel_diff(&(&a * &c_dag), &fr.b) <= OK);
        prop_assert!(rel_diff(&(&a * &a_dag), &(&fr.b * &b_dag)) <= OK);
        prop_assert!(rel_diff(&(&a_dag * &a), &(&c_dag * &fr.c)) <= OK);
    }

    /// Weighted hermitian test agrees with the plain test after conjugating
    /// by the weight root.
    #[test]
    fn weighted_hermitian_matches_conjugated(seed in any::<u64>(), n in 1usize..=7, herm in any::<bool>()) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let w = random_weight(n, &mut rng);
        let a = if herm {
            // hermitian in the weighted algebra: pull a plain hermitian back
            let m = random_matrix(n, n, &mut rng);
            let s = (&m + &m.adjoint()).scale_re(0.5);
            &(&w.u_half_inv * &s) * &w.u_half
        } else {
            random_matrix(n, n, &mut rng)
        };
        let weighted = is_hermitian_weighted(&a, &w, &ctx, &tol);
        let conjugated = is_hermitian(&(&(&w.u_half * &a) * &w.u_half_inv), &ctx, &tol);
        prop_assert_eq!(weighted.hermitian, conjugated.hermitian);
        if herm {
            prop_assert!(weighted.hermitian);
        }
    }

    /// Round trip: synthesized EP elements decompose back to the idempotent
    /// they were built from, and the direct oracle accepts them.
    #[test]
    fn synthesize_then_decompose(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let r = rng.gen_range(1..=n);
        let basis = subspace::random_unitary(n, &mut rng);
        let ident_r = CMatrix::identity(r);
        let zero = CMatrix::zeros(n - r, n - r);
        let p = &(&basis * &CMatrix::block_diag(&[&ident_r, &zero])) * &basis.adjoint();
        let e = {
            // weight commuting with p keeps it hermitian in both algebras
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
            Weight::new(&(&basis * &CMatrix::diag_re(&d)) * &basis.adjoint(), &ctx, &tol).unwrap()
        };
        let f = {
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.5)).collect();
            Weight::new(&(&basis * &CMatrix::diag_re(&d)) * &basis.adjoint(), &ctx, &tol).unwrap()
        };
        let seed_mat = loop {
            let s = random_matrix(n, n, &mut rng);
            let compressed = &(&p * &s) * &p;
            if rank(&compressed, &tol) == r {
                break s;
            }
        };
        let ident = CMatrix::identity(n);
        let a = ep_synthesize_from_decomposition(&ident, &p, &seed_mat, &e, &f, &ctx, &tol).unwrap();
        let (ep, _) = is_weighted_ep(&a, &e, &f, &ctx, &tol).unwrap();
        prop_assert!(ep);
        let d = canonical_ep_decomposition(&a, &e, &f, &ctx, &tol).unwrap();
        prop_assert!(rel_diff(&d.p, &p) <= OK);
        prop_assert!(!d.degenerate);
    }

    /// EP instances: group inverse exists and coincides with the weighted
    /// inverse; the block decomposition certifies as a splitting of the map.
    #[test]
    fn ep_split_certificate(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let r = rng.gen_range(0..=n);
        let (a, e, f) = generate_instance(n, r, true, rng.gen());
        let d = ep_block_decomposition(&a, &e, &f, &ctx, &tol).unwrap();
        let dag = wmp_inverse(&a, &e, &f, &ctx, &tol).unwrap();
        let p = &a * &dag.pinv;
        let j_inv = inverse(&d.j).unwrap();
        let cert = split_map_certificate(&a, &d.j, &j_inv, &d.t1, &p, &e, &f, &ctx, &tol).unwrap();
        prop_assert!(cert);
        let g = group_inverse(&a, &tol).unwrap();
        prop_assert!(rel_diff(&g, &dag.pinv) <= OK);
    }

    /// The generator's class labels are honored by the direct oracle.
    #[test]
    fn generator_labels_are_true(seed in any::<u64>(), n in 2usize..=6, ep in any::<bool>()) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let r = rng.gen_range(0..=n);
        let (a, e, f) = generate_instance(n, r, ep, rng.gen());
        let (got, _) = is_weighted_ep(&a, &e, &f, &ctx, &tol).unwrap();
        prop_assert_eq!(got, ep);
    }

    /// The direct oracle, the factorization suite, the solvability suite and
    /// the swap suite never disagree (the library's central claim).
    #[test]
    fn suites_never_disagree(seed in any::<u64>(), n in 2usize..=6, ep in any::<bool>()) {
        let mut rng = rng_for(seed);
        let ctx = NormContext::l2();
        let tol = Tolerance::default();
        let r = rng.gen_range(0..=n);
        let (a, e, f) = generate_instance(n, r, ep, rng.gen());
        let fr = full_rank_factorize(&a, &tol);
        let inner = epcheck::random_weight(fr.r, rng.gen());
        let bc = epcheck::ep_statement_suite_bc(&a, &fr, &e, &inner, &f, &ctx, &tol).unwrap();
        let sa = epcheck::ep_statement_suite_sa(&a, &e, &f, &ctx, &tol).unwrap();
        let swap = epcheck::weight_swap_suite(&a, &e, &f, &ctx, &tol).unwrap();
        prop_assert!(bc.consistent && sa.consistent && swap.consistent);
        prop_assert_eq!(bc.direct, ep);
        prop_assert_eq!(sa.direct, ep);
        prop_assert_eq!(swap.direct, ep);
    }
}

/// Degenerate shapes: rank zero and empty dimensions stay well-defined.
#[test]
fn zero_rank_and_empty_edges() {
    let ctx = NormContext::l2();
    let tol = Tolerance::default();
    let z = CMatrix::zeros(3, 2);
    let zd = mp_inverse(&z, &tol);
    assert_eq!(zd.shape(), (2, 3));
    assert_eq!(zd.fro_norm(), 0.0);
    let e = Weight::identity(3);
    let f = Weight::identity(2);
    let w = wmp_inverse(&z, &e, &f, &ctx, &tol).unwrap();
    assert!(w.is_verified());
    assert_eq!(w.pinv.fro_norm(), 0.0);

    let empty = CMatrix::zeros(0, 0);
    assert!(is_hermitian(&empty, &ctx, &tol).hermitian);
    assert_eq!(rank(&empty, &tol), 0);
    let g = group_inverse(&CMatrix::zeros(3, 3), &tol).unwrap();
    assert_eq!(g.fro_norm(), 0.0);
}

/// Index-two elements are refused by the group inverse with the rank pair.
#[test]
fn group_inverse_refuses_index_two() {
    let tol = Tolerance::default();
    let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    match group_inverse(&a, &tol) {
        Err(Error::GroupInverseAbsent { rank, rank_sq }) => {
            assert_eq!((rank, rank_sq), (1, 0));
        }
        other => panic!("expected absence, got {other:?}"),
    }
}

/// Norm monotonicity sanity for the three contexts on a fixed element.
#[test]
fn op_norm_context_values() {
    let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
    let l1 = op_norm(&a, &NormContext::l1());
    let linf = op_norm(&a, &NormContext::linf());
    let l2 = op_norm(&a, &NormContext::l2());
    assert_eq!(l1, 3.0);
    assert_eq!(linf, 3.0);
    assert!(l2 > 1.0 && l2 < 3.0);
    assert!((l2 * l2 - (3.0 + (8.0f64).sqrt())).abs() < 1e-12);
}
