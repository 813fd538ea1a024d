//! One-sided Jacobi singular value decomposition for complex matrices.
//!
//! Rotations orthogonalize column pairs of the working matrix; the right
//! factor accumulates the same rotations. The left factor is read off the
//! converged columns and completed to a full unitary basis, so `u` is m x m
//! and `vt` is n x n regardless of rank.

use super::CMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Full decomposition `a = u * diag(s) * vt` with unitary `u`, `vt` and
/// singular values sorted in descending order (`s.len() == min(m, n)`).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub vt: CMatrix,
}

pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(SvdResult {
            u: CMatrix::identity(m),
            s: vec![],
            vt: CMatrix::identity(n),
        });
    }
    if m < n {
        // Tall case handles the work; transpose the factors back.
        let t = svd(&a.adjoint())?;
        return Ok(SvdResult {
            u: t.vt.adjoint(),
            s: t.s,
            vt: t.u.adjoint(),
        });
    }

    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    // Pairs closer than round-off of their column norms count as orthogonal;
    // the factor of 8 keeps dot-product noise from firing rotations forever.
    let thresh = 8.0 * (m as f64) * f64::EPSILON;
    // Columns at round-off scale hold cancellation garbage with no usable
    // direction; pairs touching them are treated as orthogonal.
    let scale = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let zero_cut = (m.max(n) as f64) * f64::EPSILON * scale;
    let mut converged = false;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = 0.0f64;
                let mut beta = 0.0f64;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if alpha.sqrt() <= zero_cut || beta.sqrt() <= zero_cut {
                    continue;
                }
                let g = gamma.norm();
                if g <= thresh * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Unimodular phase folds the Gram off-diagonal onto the real
                // axis; then the classical symmetric Jacobi angle applies.
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = pc * w[(i, q)];
                    w[(i, p)] = wp.scale(c) - wq.scale(s);
                    w[(i, q)] = wp.scale(s) + wq.scale(c);
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = pc * v[(i, q)];
                    v[(i, p)] = vp.scale(c) - vq.scale(s);
                    v[(i, q)] = vp.scale(s) + vq.scale(c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            algorithm: "one-sided jacobi svd",
        });
    }

    let mut sig: Vec<f64> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| w[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap().then(i.cmp(&j)));
    let w_sorted = CMatrix::from_fn(m, n, |i, j| w[(i, order[j])]);
    let v_sorted = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    sig = order.iter().map(|&j| sig[j]).collect();

    // Columns at round-off scale have no trustworthy direction; their u
    // columns come from the unitary completion instead.
    let smax = sig.first().copied().unwrap_or(0.0);
    let dir_cut = smax * (m.max(n) as f64) * f64::EPSILON;
    let mut u = CMatrix::zeros(m, m);
    let mut have: Vec<usize> = Vec::new();
    for j in 0..n {
        if sig[j] > dir_cut && sig[j] > 0.0 {
            for i in 0..m {
                u[(i, j)] = w_sorted[(i, j)].scale(1.0 / sig[j]);
            }
            have.push(j);
        }
    }
    complete_basis(&mut u, &mut have, m)?;

    Ok(SvdResult {
        u,
        s: sig,
        vt: v_sorted.adjoint(),
    })
}

/// Fill the columns of `u` outside `have` with an orthonormal completion.
/// Candidates are standard basis vectors, chosen greedily by the size of
/// their residual against the span built so far.
fn complete_basis(u: &mut CMatrix, have: &mut Vec<usize>, m: usize) -> Result<()> {
    for slot in 0..m {
        if have.contains(&slot) {
            continue;
        }
        let mut best_col: Option<Vec<Complex64>> = None;
        let mut best_norm = 0.0f64;
        for k in 0..m {
            let mut cand = vec![Complex64::new(0.0, 0.0); m];
            cand[k] = Complex64::new(1.0, 0.0);
            orthogonalize(&mut cand, u, have);
            orthogonalize(&mut cand, u, have);
            let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > best_norm + 1e-12 {
                best_norm = nrm;
                best_col = Some(cand);
            }
        }
        let col = best_col.ok_or(Error::NoConvergence {
            algorithm: "unitary basis completion",
        })?;
        if best_norm <= 1e-8 {
            return Err(Error::NoConvergence {
                algorithm: "unitary basis completion",
            });
        }
        for i in 0..m {
            u[(i, slot)] = col[i].scale(1.0 / best_norm);
        }
        have.push(slot);
    }
    Ok(())
}

fn orthogonalize(cand: &mut [Complex64], u: &CMatrix, have: &[usize]) {
    let m = cand.len();
    for &j in have {
        let mut proj = Complex64::new(0.0, 0.0);
        for i in 0..m {
            proj += u[(i, j)].conj() * cand[i];
        }
        for i in 0..m {
            let sub = u[(i, j)] * proj;
            cand[i] -= sub;
        }
    }
}
