//! Exact scalars: arbitrary-precision rationals, the deformation context, and
//! the scalar abstraction shared by rational- and series-valued computations.
//!
//! Everything downstream is generic over [`Scalar`], which is implemented by
//! [`Rat`] (a plain rational, used when the weight parameter `t` is numeric)
//! and by [`TSeries`] (a truncated formal power series in `t`, used when the
//! weight is formal). All arithmetic is exact; series arithmetic is exact
//! modulo `t^{N+1}`.

mod qfunc;
mod tseries;

pub use qfunc::{
    box_eigenvalue, phi32_terminating, qbinom_expand, qbinom_expand_reciprocal, qpoch,
    qpoch_desc, tseries_arith, SeriesOp,
};
pub use tseries::TSeries;

use crate::error::{Error, Result};
use num::traits::Pow;
use num::{BigInt, One, Signed, Zero};
use std::fmt;

/// Exact rational scalar. `num` keeps the representation canonical
/// (reduced fraction, positive denominator).
pub type Rat = num::BigRational;

/// Parse a rational from a `"p/q"` or `"p"` string.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::ConfigInvalid(format!("bad rational {s:?}: {e}")))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_zero() -> Rat {
    <Rat as Zero>::zero()
}

pub fn rat_one() -> Rat {
    <Rat as One>::one()
}

/// The deformation base `q` with `0 < q < 1`, together with `q^2` which is
/// what nearly every formula is written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QContext {
    q: Rat,
    q2: Rat,
}

impl QContext {
    pub fn new(q: Rat) -> Result<Self> {
        if !(q.is_positive() && q < rat_one()) {
            return Err(Error::ConfigInvalid(format!(
                "q must satisfy 0 < q < 1, got {q}"
            )));
        }
        let q2 = &q * &q;
        Ok(QContext { q, q2 })
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn q2(&self) -> &Rat {
        &self.q2
    }

    /// `q^k` for any integer `k` (negative exponents allowed).
    pub fn q_pow(&self, k: i64) -> Rat {
        let e = i32::try_from(k.abs()).expect("exponent fits i32");
        let p = self.q.clone().pow(e);
        if k < 0 {
            p.recip()
        } else {
            p
        }
    }

    /// `q^{2k}` for any integer `k`.
    pub fn q2_pow(&self, k: i64) -> Rat {
        self.q_pow(2 * k)
    }

    /// The q-integer `[n]_{q^2} = (1 - q^{2n}) / (1 - q^2)`.
    pub fn qint(&self, n: u32) -> Rat {
        let one = rat_one();
        (&one - self.q2_pow(n as i64)) / (&one - &self.q2)
    }

    /// The q-integer at inverted base, `[n]_{q^{-2}} = q^{-2(n-1)} [n]_{q^2}`.
    pub fn qint_inv(&self, n: u32) -> Rat {
        if n == 0 {
            return rat_zero();
        }
        self.qint(n) * self.q2_pow(-(n as i64 - 1))
    }

    /// `(q^{2m}; q^{-2})_k = prod_{i<k} (1 - q^{2(m-i)})`, the descending
    /// Pochhammer that drives every triangular ordering solve. It vanishes
    /// exactly when `k > m >= 0`.
    pub fn poch_desc(&self, m: i64, k: u32) -> Rat {
        let mut acc = rat_one();
        for i in 0..k as i64 {
            acc *= rat_one() - self.q2_pow(m - i);
            if Zero::is_zero(&acc) {
                break;
            }
        }
        acc
    }

    /// `(q^2; q^2)_m`.
    pub fn poch_q2(&self, m: u32) -> Rat {
        qpoch(&self.q2.clone(), &self.q2, m)
    }
}

/// Exact coefficient scalar: either a rational or a truncated `t`-series.
///
/// Constants are minted through [`Scalar::lift`], which copies the shape
/// (i.e. the truncation order) of the receiver; generic code therefore keeps
/// a prototype value around (usually the weight `t` itself).
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Exact division. Fails when the divisor is zero (rationals) or not a
    /// unit of the truncated series ring (zero constant term).
    fn checked_div(&self, o: &Self) -> Result<Self>;
    /// A constant with the same shape as `self`.
    fn lift(&self, r: &Rat) -> Self;

    fn zero(&self) -> Self {
        self.lift(&rat_zero())
    }

    fn one(&self) -> Self {
        self.lift(&rat_one())
    }

    fn mul_rat(&self, r: &Rat) -> Self {
        self.mul(&self.lift(r))
    }

    fn add_rat(&self, r: &Rat) -> Self {
        self.add(&self.lift(r))
    }
}

impl Scalar for Rat {
    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn sub(&self, o: &Self) -> Self {
        self - o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn neg(&self) -> Self {
        -self.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn checked_div(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            return Err(Error::DivByZero);
        }
        Ok(self / o)
    }

    fn lift(&self, r: &Rat) -> Self {
        r.clone()
    }
}
