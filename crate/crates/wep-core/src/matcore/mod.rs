//! Dense complex matrix kernels: arithmetic, decompositions, norms and
//! matrix functions consumed by the algebra-level modules.
//!
//! Matrices are row-major with `Complex64` entries. Zero-dimensional shapes
//! are allowed so that degenerate blocks (empty factors, rank-0 ranges) flow
//! through factorizations without special cases.

mod eig;
mod expm;
mod lu;
mod svd;
pub mod subspace;

pub use eig::{eigenvalues, eigh};
pub use expm::mat_exp;
pub use lu::{inverse, solve};
pub use svd::{svd, SvdResult};

use crate::error::{Error, Result};
use crate::hermitian::{NormContext, NormKind};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Numerical tolerances shared by every decision procedure.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel: f64,
    /// Relative residual bound for condition checks; residuals are always
    /// measured against `1 + max input norm`.
    pub residual_rel: f64,
    /// Absolute deviation bound for the sampled hermitian criterion.
    pub herm_abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-10,
            residual_rel: 1e-10,
            herm_abs: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, residual_rel: f64, herm_abs: f64) -> Result<Self> {
        if rank_rel.is_nan() || rank_rel <= 0.0 || rank_rel >= 1.0 {
            return Err(Error::BadTolerance(format!(
                "rank_rel must lie in (0, 1), got {rank_rel}"
            )));
        }
        if residual_rel.is_nan() || residual_rel <= 0.0 {
            return Err(Error::BadTolerance(format!(
                "residual_rel must be positive, got {residual_rel}"
            )));
        }
        if herm_abs.is_nan() || herm_abs <= 0.0 {
            return Err(Error::BadTolerance(format!(
                "herm_abs must be positive, got {herm_abs}"
            )));
        }
        Ok(Tolerance {
            rank_rel,
            residual_rel,
            herm_abs,
        })
    }

    /// Same cutoffs except `residual_rel` replaced by `r`.
    pub fn with_residual(self, r: f64) -> Result<Self> {
        Tolerance::new(self.rank_rel, r, self.herm_abs)
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Build from row-major entries, validating the count and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                got: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k.checked_div(cols).unwrap_or(0),
                    col: k.checked_rem(cols).unwrap_or(0),
                });
            }
        }
        Ok(CMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        CMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn diag(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d[i];
        }
        m
    }

    pub fn diag_re(d: &[f64]) -> Self {
        let v: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::diag(&v)
    }

    /// Real test/input helper: rows of real numbers, zero imaginary parts.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        CMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&w| w * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> CMatrix {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Copy of the block `rows r0..r1`, `cols c0..c1` (half-open).
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> CMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        CMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Horizontal concatenation; all blocks must agree on row count.
    pub fn hstack(blocks: &[&CMatrix]) -> CMatrix {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows));
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = CMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    m[(i, off + j)] = b[(i, j)];
                }
            }
            off += b.cols;
        }
        m
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = CMatrix::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(ro + i, co + j)] = b[(i, j)];
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimension mismatch in mul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.4e}{:+.4e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Frobenius-norm residual of `x` relative to `1 + scale`.
pub fn rel_residual(x: &CMatrix, scale: f64) -> f64 {
    x.fro_norm() / (1.0 + scale)
}

/// Relative difference of two same-shaped matrices.
pub fn rel_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    rel_residual(&(x - y), x.fro_norm().max(y.fro_norm()))
}

/// Induced operator norm under the context's base vector norm: max column
/// absolute sum (l1), largest singular value (l2), max row absolute sum (linf).
pub fn op_norm(a: &CMatrix, ctx: &NormContext) -> f64 {
    match ctx.kind() {
        NormKind::L1 => (0..a.cols())
            .map(|j| (0..a.rows()).map(|i| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Linf => (0..a.rows())
            .map(|i| (0..a.cols()).map(|j| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::L2 => {
            let res = svd(a).expect("jacobi svd convergence");
            res.s.first().copied().unwrap_or(0.0)
        }
    }
}

/// Numerical rank: singular values above `rank_rel` times the largest.
pub fn rank(a: &CMatrix, tol: &Tolerance) -> usize {
    let res = svd(a).expect("jacobi svd convergence");
    let s0 = res.s.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        return 0;
    }
    res.s.iter().filter(|&&x| x > tol.rank_rel * s0).count()
}

/// Principal square root of a positive element.
///
/// Under l2 the input must be self-adjoint positive semidefinite and the root
/// comes from the eigendecomposition with the nonnegative branch. Under l1 and
/// linf positivity is decided by the sampled criterion; diagonal inputs take
/// the entrywise root and the rest go through a Denman-Beavers iteration.
pub fn principal_sqrt(a: &CMatrix, ctx: &NormContext, tol: &Tolerance) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if let Some(criterion) = crate::hermitian::positivity_violation(a, ctx, tol) {
        return Err(Error::NotPositive { criterion });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let scale = a.fro_norm();
    let root = match ctx.kind() {
        NormKind::L2 => {
            // Hermitian route: symmetrize, diagonalize, take nonnegative roots.
            let h = (a + &a.adjoint()).scale_re(0.5);
            let (mut vals, vecs) = eigh(&h)?;
            for v in vals.iter_mut() {
                *v = v.max(0.0).sqrt();
            }
            let d = CMatrix::diag_re(&vals);
            &(&vecs * &d) * &vecs.adjoint()
        }
        NormKind::L1 | NormKind::Linf => {
            let off = off_diag_mass(a);
            if off <= tol.residual_rel * (1.0 + scale) {
                let d: Vec<f64> = (0..n).map(|i| a[(i, i)].re.max(0.0).sqrt()).collect();
                CMatrix::diag_re(&d)
            } else {
                denman_beavers(a)?
            }
        }
    };
    let recon = &root * &root;
    let res = rel_residual(&(&recon - a), scale);
    if res > tol.residual_rel.max(1e-12) {
        return Err(Error::VerificationFailed(format!(
            "square-root residual {res:.3e} exceeds tolerance"
        )));
    }
    Ok(root)
}

fn off_diag_mass(a: &CMatrix) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

/// Coupled Newton iteration for the principal square root; needs an
/// invertible input with no spectrum on the closed negative real axis.
fn denman_beavers(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n);
    for _ in 0..80 {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let y_next = (&y + &z_inv).scale_re(0.5);
        let z_next = (&z + &y_inv).scale_re(0.5);
        let step = (&y_next - &y).fro_norm();
        y = y_next;
        z = z_next;
        if step <= 1e-14 * (1.0 + y.fro_norm()) {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence {
        algorithm: "denman-beavers square root",
    })
}
