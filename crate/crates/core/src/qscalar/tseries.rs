//! Truncated formal power series in the weight parameter `t = q^{4 alpha}`.

use super::{rat_one, rat_zero, Rat, Scalar};
use crate::error::{Error, Result};
use num::Zero;
use std::fmt;

/// A formal power series in `t` truncated at a fixed order: `coeffs[n]` is
/// the coefficient of `t^n` and `coeffs.len() == order + 1`. Arithmetic is
/// exact modulo `t^{order+1}`; operands must share the truncation order.
#[derive(Clone, PartialEq, Eq)]
pub struct TSeries {
    coeffs: Vec<Rat>,
}

impl TSeries {
    /// The zero series truncated at `order`.
    pub fn zeros(order: usize) -> Self {
        TSeries {
            coeffs: vec![rat_zero(); order + 1],
        }
    }

    /// The constant series `r` truncated at `order`.
    pub fn constant(r: Rat, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = r;
        s
    }

    /// The variable `t` truncated at `order` (zero when `order == 0`).
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zeros(order);
        if order >= 1 {
            s.coeffs[1] = rat_one();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least order 0");
        TSeries { coeffs }
    }

    /// Truncation order `N`; the series is exact modulo `t^{N+1}`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rat {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, n: usize, r: Rat) {
        self.coeffs[n] = r;
    }

    /// Constant (order-zero) coefficient.
    pub fn constant_term(&self) -> &Rat {
        &self.coeffs[0]
    }

    fn check_order(&self, o: &Self) -> Result<()> {
        if self.order() != o.order() {
            return Err(Error::OrderMismatch(self.order(), o.order()));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        Ok(TSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        Ok(TSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        let n = self.order();
        let mut out = vec![rat_zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n + 1 - i).enumerate() {
                if Zero::is_zero(b) {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        Ok(TSeries { coeffs: out })
    }

    /// Multiplicative inverse in the truncated ring. The series must be a
    /// unit, i.e. have a nonzero constant term.
    pub fn try_invert(&self) -> Result<Self> {
        if Zero::is_zero(&self.coeffs[0]) {
            return Err(Error::InvertNonUnit);
        }
        let n = self.order();
        let c0 = self.coeffs[0].recip();
        let mut inv = vec![rat_zero(); n + 1];
        inv[0] = c0.clone();
        for k in 1..=n {
            // coefficient of t^k in self * inv must vanish
            let mut acc = rat_zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &inv[k - i];
            }
            inv[k] = -acc * &c0;
        }
        Ok(TSeries { coeffs: inv })
    }

    /// `t^k * self`, dropping coefficients past the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = vec![rat_zero(); n + 1];
        for i in 0..=n.saturating_sub(k) {
            out[i + k] = self.coeffs[i].clone();
        }
        TSeries { coeffs: out }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }
}

impl Scalar for TSeries {
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("series orders agree")
    }

    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("series orders agree")
    }

    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("series orders agree")
    }

    fn neg(&self) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn checked_div(&self, o: &Self) -> Result<Self> {
        self.check_order(o)?;
        self.try_mul(&o.try_invert()?)
    }

    fn lift(&self, r: &Rat) -> Self {
        TSeries::constant(r.clone(), self.order())
    }
}

impl fmt::Debug for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TSeries{:?}", self.coeffs)
    }
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rat_int};
    use proptest::prelude::*;

    fn t(order: usize) -> TSeries {
        TSeries::variable(order)
    }

    #[test]
    fn one_plus_t_times_one_minus_t() {
        let one = TSeries::constant(rat_one(), 4);
        let a = one.add(&t(4));
        let b = one.sub(&t(4));
        let mut expect = TSeries::constant(rat_one(), 4);
        expect.set_coeff(2, -rat_one());
        assert_eq!(a.mul(&b), expect);
    }

    #[test]
    fn geometric_inverse() {
        let one = TSeries::constant(rat_one(), 6);
        let inv = one.sub(&t(6)).try_invert().unwrap();
        for n in 0..=6 {
            assert_eq!(inv.coeff(n), &rat_one());
        }
    }

    #[test]
    fn invert_requires_unit() {
        assert_eq!(t(3).try_invert(), Err(Error::InvertNonUnit));
    }

    #[test]
    fn order_mismatch_is_reported() {
        let a = t(3);
        let b = t(4);
        assert_eq!(a.try_add(&b), Err(Error::OrderMismatch(3, 4)));
    }

    fn arb_series(order: usize) -> impl Strategy<Value = TSeries> {
        proptest::collection::vec((-20i64..20, 1i64..8), order + 1)
            .prop_map(|v| TSeries::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(5), b in arb_series(5), c in arb_series(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_series(5)) {
            let unit = a.add(&TSeries::constant(rat_int(1), 5));
            prop_assume!(!num::Zero::is_zero(unit.constant_term()));
            let inv = unit.try_invert().unwrap();
            prop_assert_eq!(unit.mul(&inv), TSeries::constant(rat_one(), 5));
            prop_assert_eq!(inv.mul(&unit), TSeries::constant(rat_one(), 5));
        }
    }
}
