//! Exact-arithmetic Berezin-Toeplitz quantization on the quantum disc.
//!
//! The quantum disc algebra is generated by `z`, `z*` subject to
//! `z*z - q^2 zz* = 1 - q^2` with a deformation base `0 < q < 1`. This crate
//! realizes the disc's distribution algebra through its faithful matrix
//! representation, builds the weighted Bergman spaces `H^2_{q,alpha}` at
//! weight parameter `t = q^{4 alpha}`, and computes:
//!
//! - q-Pochhammer symbols, terminating basic hypergeometric sums, and a
//!   truncated formal power series ring in `t` ([`qscalar`]);
//! - normal / anti-normal ordering, invariant and weighted integrals,
//!   q-derivatives and the Laplace-Beltrami machinery ([`disc`]);
//! - Toeplitz-Bergman operators for finite and polynomial symbols, Gram data,
//!   and the normal-ordered operator calculus ([`bergman`]);
//! - the quantized trace, covariant symbols by two independent routes, the
//!   Berezin transform and its `t`-expansion ([`berezin`]);
//! - the formal star product by operator composition and by the asymptotic
//!   bidifferential expansion, with a cross-route comparator ([`star`]);
//! - reproducing kernels and coherent-vector factorizations at half-integer
//!   weights ([`kernels`]);
//! - a machine-readable verification harness over all of the above
//!   ([`verify`]).
//!
//! Every computation is exact: scalars are arbitrary-precision rationals and
//! series are truncated formal power series over them. There is no floating
//! point anywhere and all identity checks are rational equalities.

pub mod bergman;
pub mod berezin;
pub mod disc;
pub mod error;
pub mod kernels;
pub mod qscalar;
pub mod star;
pub mod verify;

pub use error::{Error, Result};
pub use qscalar::{QContext, Rat, Scalar, TSeries};
