//! Weighted Moore-Penrose inverses, group inverses, factorizations and
//! EP-style characterizations of dense complex matrices viewed as elements
//! of finite-dimensional normed algebras.
//!
//! The base vector norm can be l1, l2 or linf; the algebra norm is the
//! induced operator norm. On top of a matrix kernel ([`matcore`]) the crate
//! decides hermitianness and positivity of algebra elements ([`hermitian`]),
//! computes weighted Moore-Penrose and group inverses ([`wmp`]), produces
//! full-rank and block factorizations ([`factor`]), and evaluates a battery
//! of equivalent characterizations of weighted-EP elements, cross-checked
//! against the direct commuting definition ([`epcheck`]).

pub mod epcheck;
pub mod error;
pub mod factor;
pub mod hermitian;
pub mod matcore;
pub mod wmp;

pub use epcheck::EpReport;
pub use error::{Error, Result};
pub use factor::{EpDecomposition, FullRankFactorization};
pub use hermitian::{NormContext, NormKind, Weight};
pub use matcore::{CMatrix, SvdResult, Tolerance};
pub use wmp::{WmpResult, WmpVerdict};
