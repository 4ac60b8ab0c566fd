//! q-Pochhammer symbols, q-binomial series, and terminating basic
//! hypergeometric sums.

use super::{rat_one, rat_zero, QContext, Rat, Scalar, TSeries};
use crate::error::{Error, Result};
use num::Zero;

/// q-Pochhammer symbol `(a; base)_n = prod_{i=0}^{n-1} (1 - a * base^i)`.
/// The empty product is 1. `a` may be a rational or a series.
pub fn qpoch<S: Scalar>(a: &S, base: &Rat, n: u32) -> S {
    let mut acc = a.one();
    let mut b = rat_one();
    for _ in 0..n {
        let factor = a.one().sub(&a.mul_rat(&b));
        acc = acc.mul(&factor);
        b *= base;
    }
    acc
}

/// Descending Pochhammer `(a; q^{-2})_k = prod_{i<k} (1 - a * q^{-2i})` for a
/// scalar-or-series argument `a`.
pub fn qpoch_desc<S: Scalar>(a: &S, ctx: &QContext, k: u32) -> S {
    let mut acc = a.one();
    for i in 0..k as i64 {
        let factor = a.one().sub(&a.mul_rat(&ctx.q2_pow(-i)));
        acc = acc.mul(&factor);
    }
    acc
}

/// The q-binomial series `sum_m (c; q^2)_m / (q^2; q^2)_m t^m` truncated at
/// order `n_t`; this is the expansion of `(ct; q^2)_inf / (t; q^2)_inf`.
pub fn qbinom_expand(c: &Rat, ctx: &QContext, n_t: usize) -> TSeries {
    let mut s = TSeries::zeros(n_t);
    for m in 0..=n_t {
        let num = qpoch(c, ctx.q2(), m as u32);
        let den = ctx.poch_q2(m as u32);
        s.set_coeff(m, num / den);
    }
    s
}

/// The reciprocal partner of [`qbinom_expand`]: the expansion of
/// `(t; q^2)_inf / (ct; q^2)_inf`, with coefficient
/// `prod_{i<m} (c - q^{2i}) / (q^2; q^2)_m` at `t^m`. The product of the two
/// series is exactly 1.
pub fn qbinom_expand_reciprocal(c: &Rat, ctx: &QContext, n_t: usize) -> TSeries {
    let mut s = TSeries::zeros(n_t);
    for m in 0..=n_t {
        let mut num = rat_one();
        for i in 0..m as i64 {
            num *= c - ctx.q2_pow(i);
        }
        let den = ctx.poch_q2(m as u32);
        s.set_coeff(m, num / den);
    }
    s
}

/// Ring operation selector for [`tseries_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Invert,
}

/// Ring operations on truncated series, with loud errors instead of silent
/// truncation or non-unit inversion. `Invert` ignores `rhs`.
pub fn tseries_arith(lhs: &TSeries, rhs: &TSeries, op: SeriesOp) -> Result<TSeries> {
    match op {
        SeriesOp::Add => lhs.try_add(rhs),
        SeriesOp::Mul => lhs.try_mul(rhs),
        SeriesOp::Invert => lhs.try_invert(),
    }
}

/// Terminating basic hypergeometric sum
/// `sum_{k=0}^{j} (q^{-2j}; q^2)_k / (q^2; q^2)_k^2
///  * prod_{i<k} (1 - q^{2i} a2)(1 - q^{2i} a3) * q^{2k}`.
///
/// The upper parameter `q^{-2j}` makes the series terminate after `j + 1`
/// terms; the sum is exact and symmetric in `a2 <-> a3`.
pub fn phi32_terminating(j: u32, a2: &Rat, a3: &Rat, ctx: &QContext) -> Rat {
    let mut total = rat_zero();
    for k in 0..=j {
        let upper = qpoch(&ctx.q2_pow(-(j as i64)), ctx.q2(), k);
        if Zero::is_zero(&upper) {
            break;
        }
        let den = ctx.poch_q2(k);
        let mut prod = rat_one();
        for i in 0..k as i64 {
            let qi = ctx.q2_pow(i);
            prod *= (rat_one() - &qi * a2) * (rat_one() - &qi * a3);
        }
        total += upper / (&den * &den) * prod * ctx.q2_pow(k as i64);
    }
    total
}

/// Eigenvalue `-(1 - s^{-1})(1 - q^2 s) / (1 - q^2)^2` of the
/// Laplace-Beltrami operator on the radial eigenfunction indexed by
/// `s = q^{2l}`.
pub fn box_eigenvalue(s: &Rat, ctx: &QContext) -> Result<Rat> {
    if Zero::is_zero(s) {
        return Err(Error::DivByZero);
    }
    let one = rat_one();
    let d = &one - ctx.q2();
    Ok(-(&one - s.recip()) * (&one - ctx.q2() * s) / (&d * &d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rat_int};
    use proptest::prelude::*;

    fn ctx_half() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    #[test]
    fn qpoch_empty_product() {
        let ctx = ctx_half();
        assert_eq!(qpoch(&rat(7, 3), ctx.q2(), 0), rat_one());
    }

    #[test]
    fn qpoch_two_factors() {
        // q = 1/2: (q^2; q^2)_2 = (1 - 1/4)(1 - 1/16) = 45/64
        let ctx = ctx_half();
        assert_eq!(qpoch(&ctx.q2().clone(), ctx.q2(), 2), rat(45, 64));
    }

    #[test]
    fn qpoch_vanishes_at_negative_power() {
        // (q^{-2j}; q^2)_k = 0 for k > j: the i = j factor is 1 - 1.
        let ctx = QContext::new(rat(3, 5)).unwrap();
        for j in 0..5i64 {
            for k in (j as u32 + 1)..8 {
                let v = qpoch(&ctx.q2_pow(-j), ctx.q2(), k);
                assert!(num::Zero::is_zero(&v), "j={j} k={k}");
            }
        }
    }

    #[test]
    fn qbinom_geometric_case() {
        // c = q^2 gives coefficient (q^2;q^2)_m / (q^2;q^2)_m = 1: 1/(1-t).
        let ctx = ctx_half();
        let s = qbinom_expand(&ctx.q2().clone(), &ctx, 6);
        for m in 0..=6 {
            assert_eq!(s.coeff(m), &rat_one());
        }
    }

    #[test]
    fn qbinom_zero_parameter() {
        let ctx = ctx_half();
        let s = qbinom_expand(&rat_zero(), &ctx, 5);
        for m in 0..=5u32 {
            assert_eq!(s.coeff(m as usize), &(rat_one() / ctx.poch_q2(m)));
        }
    }

    #[test]
    fn qbinom_reciprocal_pair_multiplies_to_one() {
        for (q, c) in [(rat(1, 2), rat(3, 7)), (rat(2, 3), rat(1, 5)), (rat(3, 5), rat(9, 4))] {
            let ctx = QContext::new(q).unwrap();
            let a = qbinom_expand(&c, &ctx, 8);
            let b = qbinom_expand_reciprocal(&c, &ctx, 8);
            assert_eq!(a.mul(&b), TSeries::constant(rat_one(), 8));
        }
    }

    #[test]
    fn phi32_j_zero_is_one() {
        let ctx = ctx_half();
        assert_eq!(phi32_terminating(0, &rat(5, 7), &rat(2, 9), &ctx), rat_one());
    }

    #[test]
    fn phi32_unit_parameter_collapses() {
        // a2 = 1 kills every k >= 1 term through the (1 - q^0 * 1) factor.
        let ctx = QContext::new(rat(2, 3)).unwrap();
        for j in 0..6 {
            assert_eq!(phi32_terminating(j, &rat_one(), &rat(4, 9), &ctx), rat_one());
        }
    }

    #[test]
    fn box_eigenvalue_zeros_and_value() {
        let ctx = ctx_half();
        assert_eq!(box_eigenvalue(&rat_one(), &ctx).unwrap(), rat_zero());
        assert_eq!(box_eigenvalue(&ctx.q2_pow(-1), &ctx).unwrap(), rat_zero());
        // q = 1/2, s = q^2: -(1-4)(1-1/16)/(9/16) = 5
        assert_eq!(box_eigenvalue(&ctx.q2().clone(), &ctx).unwrap(), rat_int(5));
        assert_eq!(box_eigenvalue(&rat_zero(), &ctx), Err(Error::DivByZero));
    }

    #[test]
    fn series_expansion_of_descending_pochhammer_inverse() {
        // prod_{i<k} (1 - t q^{2(m-i)})^{-1} has t^n coefficient
        // (q^{2k}; q^2)_n / (q^2; q^2)_n * q^{2(m-k+1)n}.
        let ctx = QContext::new(rat(2, 3)).unwrap();
        let n_t = 7;
        for (m, k) in [(0i64, 0u32), (2, 1), (3, 2), (5, 4), (4, 4)] {
            let t = TSeries::variable(n_t);
            let mut prod = TSeries::constant(rat_one(), n_t);
            for i in 0..k as i64 {
                prod = prod.mul(&t.scale(&ctx.q2_pow(m - i)).neg().add_rat(&rat_one()));
            }
            let inv = prod.try_invert().unwrap();
            for n in 0..=n_t {
                let expect = qpoch(&ctx.q2_pow(k as i64), ctx.q2(), n as u32)
                    / ctx.poch_q2(n as u32)
                    * ctx.q2_pow((m - k as i64 + 1) * n as i64);
                assert_eq!(inv.coeff(n), &expect, "m={m} k={k} n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn qpoch_splitting(m in 0u32..12, n in 0u32..12, an in -9i64..9, ad in 1i64..9, bn in 1i64..9, bd in 1i64..9) {
            // (a;b)_{m+n} = (a;b)_m * (a b^m; b)_n
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let lhs = qpoch(&a, &b, m + n);
            let shifted = &a * num::traits::Pow::pow(b.clone(), m as i32);
            let rhs = qpoch(&a, &b, m) * qpoch(&shifted, &b, n);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn phi32_symmetric(j in 0u32..8, a2n in -6i64..6, a2d in 1i64..6, a3n in -6i64..6, a3d in 1i64..6) {
            let ctx = QContext::new(rat(3, 5)).unwrap();
            let a2 = rat(a2n, a2d);
            let a3 = rat(a3n, a3d);
            prop_assert_eq!(
                phi32_terminating(j, &a2, &a3, &ctx),
                phi32_terminating(j, &a3, &a2, &ctx)
            );
        }
    }
}
