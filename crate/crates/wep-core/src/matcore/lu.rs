//! LU factorization with partial pivoting; backs `solve` and `inverse`.

use super::CMatrix;
use crate::error::{Error, Result};

struct Lu {
    /// Combined L (unit lower, below diagonal) and U factors.
    lu: CMatrix,
    /// Row permutation applied to the input: row `perm[i]` of `a` became row `i`.
    perm: Vec<usize>,
}

fn factor(a: &CMatrix) -> Result<Lu> {
    assert!(a.is_square(), "lu factor needs a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    // Pivot cutoff: anything at round-off level of the input counts as singular.
    let cutoff = (n.max(1) as f64) * f64::EPSILON * a.max_abs();
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= cutoff {
            return Err(Error::Singular {
                pivot: best,
                cutoff,
            });
        }
        if piv != k {
            perm.swap(piv, k);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / d;
            lu[(i, k)] = m;
            for j in k + 1..n {
                let sub = m * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n, "right-hand side row mismatch");
        let k = b.cols();
        let mut x = CMatrix::from_fn(n, k, |i, j| b[(self.perm[i], j)]);
        // Forward: L y = P b.
        for col in 0..k {
            for i in 1..n {
                let mut acc = x[(i, col)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc;
            }
            // Back: U x = y.
            for i in (0..n).rev() {
                let mut acc = x[(i, col)];
                for j in i + 1..n {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Solve `a x = b` for square invertible `a`; `b` may have several columns.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(factor(a)?.solve(b))
}

/// Inverse of a square invertible matrix.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    solve(a, &CMatrix::identity(n))
}
