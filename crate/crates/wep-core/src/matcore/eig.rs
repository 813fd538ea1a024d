//! Eigenvalue kernels: shifted QR on a Hessenberg form for general complex
//! matrices, and a two-sided Jacobi diagonalization for hermitian ones.

use super::CMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigenvalues of a square complex matrix, unordered.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = hessenberg(a);
    let scale = h.fro_norm();
    if scale == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }

    let mut hi = n - 1;
    let mut iters_here = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n;
    loop {
        // Deflate wherever a subdiagonal entry is at round-off level.
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let cut = f64::EPSILON * if local > 0.0 { local } else { scale };
            if sub <= cut {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            // 1x1 block isolated.
            if hi == 0 {
                break;
            }
            hi -= 1;
            iters_here = 0;
            continue;
        }
        let lo = l;

        total += 1;
        iters_here += 1;
        if total > max_total {
            return Err(Error::NoConvergence {
                algorithm: "hessenberg qr eigenvalues",
            });
        }
        let mu = if iters_here.is_multiple_of(12) {
            // Exceptional shift breaks rare cycling.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, mu);
    }
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        // Reflect column k below the subdiagonal onto a single entry.
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm <= f64::EPSILON * h.fro_norm() {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        x[0] += phase.scale(xnorm);
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in x.iter_mut() {
            *z = z.scale(1.0 / vnorm);
        }
        // h <- (I - 2 v v*) h (I - 2 v v*), v supported on rows k+1..n.
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += x[idx].conj() * h[(i, j)];
            }
            dot = dot.scale(2.0);
            for (idx, i) in (k + 1..n).enumerate() {
                let sub = x[idx] * dot;
                h[(i, j)] -= sub;
            }
        }
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += h[(i, j)] * x[idx];
            }
            dot = dot.scale(2.0);
            for (idx, j) in (k + 1..n).enumerate() {
                let sub = dot * x[idx].conj();
                h[(i, j)] -= sub;
            }
        }
    }
    h
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mid = (a + d).scale(0.5);
    let disc = ((a - d).scale(0.5).powi(2) + b * c).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR sweep on the active window `lo..=hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, mu: Complex64) {
    for d in lo..=hi {
        h[(d, d)] -= mu;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let top = h[(k, j)];
            let bot = h[(k + 1, j)];
            h[(k, j)] = top.scale(c) + s * bot;
            h[(k + 1, j)] = bot.scale(c) - s.conj() * top;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (k, (c, s)) in (lo..hi).zip(rots) {
        // R is upper triangular: rows below k+1 are zero in columns k, k+1.
        for i in lo..=(k + 1).min(hi) {
            let left = h[(i, k)];
            let right = h[(i, k + 1)];
            h[(i, k)] = left.scale(c) + right * s.conj();
            h[(i, k + 1)] = right.scale(c) - left * s;
        }
    }
    for d in lo..=hi {
        h[(d, d)] += mu;
    }
}

/// Complex Givens pair with real cosine: [c, s; -conj(s), c] maps (f, g) to (r, 0).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let denom = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / denom;
    let s = (f / fn_) * g.conj().scale(1.0 / denom);
    (c, s)
}

/// Eigendecomposition of a hermitian matrix: `a = v * diag(vals) * v.adjoint()`
/// with real eigenvalues ascending and unitary `v`. The input is symmetrized
/// first, so deviations at round-off scale are tolerated.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let mut h = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()).scale(0.5));
    let mut v = CMatrix::identity(n);
    let off_cut = (n as f64) * f64::EPSILON * h.fro_norm().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = h[(p, q)];
                let g = apq.norm();
                if g <= off_cut {
                    continue;
                }
                rotated = true;
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let phase = apq / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // Column rotation h <- h R with R = [c, s; -s e^{-i phi}, c e^{-i phi}].
                for i in 0..n {
                    let hp = h[(i, p)];
                    let hq = pc * h[(i, q)];
                    h[(i, p)] = hp.scale(c) - hq.scale(s);
                    h[(i, q)] = hp.scale(s) + hq.scale(c);
                }
                // Row rotation h <- R* h.
                let ph = phase;
                for j in 0..n {
                    let hp = h[(p, j)];
                    let hq = ph * h[(q, j)];
                    h[(p, j)] = hp.scale(c) - hq.scale(s);
                    h[(q, j)] = hp.scale(s) + hq.scale(c);
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
            algorithm: "hermitian jacobi eigendecomposition",
        });
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (h[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| v[(i, pairs[j].1)]);
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rel_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn eigenvalues_of_triangular_are_diagonal() {
        let a = CMatrix::from_real_rows(&[
            &[3.0, 1.0, -2.0],
            &[0.0, -1.0, 4.0],
            &[0.0, 0.0, 2.5],
        ]);
        let ev = sorted_by_re(eigenvalues(&a).unwrap());
        let expected = [-1.0, 2.5, 3.0];
        for (z, &x) in ev.iter().zip(&expected) {
            assert!((z.re - x).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn nilpotent_matrix_has_zero_spectrum() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        for z in eigenvalues(&a).unwrap() {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_matrix_has_unit_circle_spectrum() {
        // Plane rotation by t: eigenvalues e^{it}, e^{-it}.
        let t = 0.7f64;
        let a = CMatrix::from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        let ev = sorted_by_re(eigenvalues(&a).unwrap());
        assert!((ev[0].re - t.cos()).abs() < 1e-10);
        assert!((ev[0].im.abs() - t.sin()).abs() < 1e-10);
        assert!((ev[1].re - t.cos()).abs() < 1e-10);
    }

    #[test]
    fn companion_matrix_of_cubic() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = CMatrix::from_real_rows(&[
            &[0.0, 0.0, 6.0],
            &[1.0, 0.0, -11.0],
            &[0.0, 1.0, 6.0],
        ]);
        let ev = sorted_by_re(eigenvalues(&a).unwrap());
        for (z, x) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z.re - x).abs() < 1e-9 && z.im.abs() < 1e-9, "got {z}");
        }
    }

    #[test]
    fn complex_diagonal_similarity() {
        // J D J^{-1} keeps D's complex spectrum.
        let d = CMatrix::diag(&[c(1.0, 2.0), c(-0.5, 0.0), c(0.0, -3.0)]);
        let j = CMatrix::from_real_rows(&[
            &[1.0, 0.3, 0.0],
            &[0.2, 1.0, 0.5],
            &[0.0, -0.4, 1.0],
        ]);
        let jinv = crate::matcore::inverse(&j).unwrap();
        let a = &(&j * &d) * &jinv;
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        let mut expect = vec![c(0.0, -3.0), c(-0.5, 0.0), c(1.0, 2.0)];
        expect.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        for (z, w) in ev.iter().zip(expect) {
            assert!((z - w).norm() < 1e-9, "got {z}, want {w}");
        }
    }

    #[test]
    fn eigh_reconstructs_and_orders() {
        let a = CMatrix::new(
            3,
            3,
            vec![
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.5, 0.0),
                c(0.0, -1.0),
                c(-1.0, 0.0),
                c(0.0, 0.25),
                c(0.5, 0.0),
                c(0.0, -0.25),
                c(3.0, 0.0),
            ],
        )
        .unwrap();
        let (vals, vecs) = eigh(&a).unwrap();
        for k in 1..vals.len() {
            assert!(vals[k - 1] <= vals[k]);
        }
        let recon = &(&vecs * &CMatrix::diag_re(&vals)) * &vecs.adjoint();
        assert!(rel_diff(&recon, &a) < 1e-12);
        assert!(rel_diff(&(&vecs.adjoint() * &vecs), &CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn eigh_pauli_x_eigenvalues() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (vals, _) = eigh(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }
}
