//! The faithful representation on the basis `{z^m}` and the exact ordering
//! solves that invert it.
//!
//! Generator actions: `T(z) z^m = z^{m+1}`, `T(z*) z^m = (1 - q^{2m}) z^{m-1}`
//! (zero at `m = 0`), `T(f_n)` the diagonal unit at `(n, n)`, and radial
//! powers `(1 - zz*)^lambda` as diagonals `s^n` with `s = q^{2 lambda}`.

use super::element::{reorder, FiniteElement, OrderTag, OrderedElement, RadialElement};
use super::matrix::OpMatrix;
use crate::error::{Error, Result};
use crate::qscalar::{QContext, Scalar};

/// Generators available through [`rep_generator`].
#[derive(Debug, Clone)]
pub enum Generator<S> {
    Z,
    ZStar,
    /// The diagonal unit finite function `f_n`.
    FiniteUnit(u32),
    /// `(1 - zz*)^lambda` passed through `s = q^{2 lambda}`; diagonal `s^n`.
    RadialPower(S),
}

/// The truncated matrix of a single generator.
pub fn rep_generator<S: Scalar>(
    gen: &Generator<S>,
    dim: usize,
    ctx: &QContext,
    proto: &S,
) -> Result<OpMatrix<S>> {
    let mut m = OpMatrix::zeros(dim, proto);
    match gen {
        Generator::Z => {
            for c in 0..dim - 1 {
                m.set(c + 1, c, proto.one());
            }
            Ok(m.with_support(None, None))
        }
        Generator::ZStar => {
            for c in 1..dim {
                m.set(c - 1, c, proto.lift(&(crate::qscalar::rat_one() - ctx.q2_pow(c as i64))));
            }
            Ok(m.with_support(None, None))
        }
        Generator::FiniteUnit(n) => {
            let n = *n as usize;
            if n >= dim {
                return Err(Error::IndexOutOfRange { index: n, dim });
            }
            m.set(n, n, proto.one());
            Ok(m.with_support(Some(n + 1), Some(n + 1)))
        }
        Generator::RadialPower(s) => {
            let mut p = proto.one();
            for n in 0..dim {
                m.set(n, n, p.clone());
                if n + 1 < dim {
                    p = p.mul(s);
                }
            }
            Ok(m.with_support(None, None))
        }
    }
}

/// `T(z)^j`, built directly (exact everywhere in the block).
pub fn z_pow_matrix<S: Scalar>(j: u32, dim: usize, proto: &S) -> OpMatrix<S> {
    let mut m = OpMatrix::zeros(dim, proto);
    for c in 0..dim.saturating_sub(j as usize) {
        m.set(c + j as usize, c, proto.one());
    }
    if j == 0 {
        return OpMatrix::identity(dim, proto);
    }
    m.with_support(None, None)
}

/// `T(z*)^k`, entries `(q^{2c}; q^{-2})_k` at `(c - k, c)`.
pub fn zstar_pow_matrix<S: Scalar>(k: u32, dim: usize, ctx: &QContext, proto: &S) -> OpMatrix<S> {
    if k == 0 {
        return OpMatrix::identity(dim, proto);
    }
    let mut m = OpMatrix::zeros(dim, proto);
    for c in k as usize..dim {
        m.set(c - k as usize, c, proto.lift(&ctx.poch_desc(c as i64, k)));
    }
    m.with_support(None, None)
}

/// Matrix of an ordered element, from the closed-form monomial actions:
/// normal `z^j z*^k` sends `z^c` to `(q^{2c}; q^{-2})_k z^{c-k+j}`, and
/// anti-normal `z*^j z^k` sends `z^c` to `(q^{2(c+k)}; q^{-2})_j z^{c+k-j}`.
/// Every entry in the block is exact, so `valid_end = dim`.
pub fn to_matrix<S: Scalar>(
    e: &OrderedElement<S>,
    dim: usize,
    ctx: &QContext,
    proto: &S,
) -> OpMatrix<S> {
    let mut m = OpMatrix::zeros(dim, proto);
    for (&(j, k), coeff) in e.terms() {
        match e.ord() {
            OrderTag::Normal => {
                for c in 0..dim {
                    let r = c as i64 - k as i64 + j as i64;
                    if r < 0 || r >= dim as i64 {
                        continue;
                    }
                    let w = ctx.poch_desc(c as i64, k);
                    if num::Zero::is_zero(&w) {
                        continue;
                    }
                    let add = coeff.mul_rat(&w);
                    let cur = m.get(r as usize, c).add(&add);
                    m.set(r as usize, c, cur);
                }
            }
            OrderTag::AntiNormal => {
                for c in 0..dim {
                    let r = c as i64 + k as i64 - j as i64;
                    if r < 0 || r >= dim as i64 {
                        continue;
                    }
                    let w = ctx.poch_desc(c as i64 + k as i64, j);
                    if num::Zero::is_zero(&w) {
                        continue;
                    }
                    let add = coeff.mul_rat(&w);
                    let cur = m.get(r as usize, c).add(&add);
                    m.set(r as usize, c, cur);
                }
            }
        }
    }
    m.with_support(None, None)
}

/// Matrix of a finite element: each `z^a f_n z*^b` occupies the single entry
/// `(a + n, b + n)` with value `(q^{2(b+n)}; q^{-2})_b`.
pub fn finite_to_matrix<S: Scalar>(
    e: &FiniteElement<S>,
    dim: usize,
    ctx: &QContext,
    proto: &S,
) -> Result<OpMatrix<S>> {
    let (rows, cols) = e.support();
    if rows > dim || cols > dim {
        return Err(Error::TruncationTooSmall {
            needed: rows.max(cols),
            have: dim,
        });
    }
    let mut m = OpMatrix::zeros(dim, proto);
    for (&(a, n, b), coeff) in e.terms() {
        let r = (a + n) as usize;
        let c = (b + n) as usize;
        let w = ctx.poch_desc((b + n) as i64, b);
        let cur = m.get(r, c).add(&coeff.mul_rat(&w));
        m.set(r, c, cur);
    }
    Ok(m.with_support(Some(rows), Some(cols)))
}

/// Like [`finite_to_matrix`], but terms whose single entry falls outside the
/// block are skipped instead of raising an error. Since each `z^a f_n z*^b`
/// touches exactly one entry, every entry inside the block is still exact;
/// the declared support is the true (possibly larger) one.
pub fn finite_to_matrix_window<S: Scalar>(
    e: &FiniteElement<S>,
    dim: usize,
    ctx: &QContext,
    proto: &S,
) -> OpMatrix<S> {
    let (rows, cols) = e.support();
    let mut m = OpMatrix::zeros(dim, proto);
    for (&(a, n, b), coeff) in e.terms() {
        let r = (a + n) as usize;
        let c = (b + n) as usize;
        if r >= dim || c >= dim {
            continue;
        }
        let w = ctx.poch_desc((b + n) as i64, b);
        let cur = m.get(r, c).add(&coeff.mul_rat(&w));
        m.set(r, c, cur);
    }
    m.with_support(Some(rows), Some(cols))
}

pub fn radial_to_matrix<S: Scalar>(
    e: &RadialElement<S>,
    dim: usize,
    proto: &S,
) -> Result<OpMatrix<S>> {
    if e.coeffs().len() > dim {
        return Err(Error::TruncationTooSmall {
            needed: e.coeffs().len(),
            have: dim,
        });
    }
    let mut m = OpMatrix::zeros(dim, proto);
    for (n, c) in e.coeffs().iter().enumerate() {
        if !c.is_zero() {
            m.set(n, n, c.clone());
        }
    }
    let end = e.coeffs().len();
    Ok(m.with_support(Some(end), Some(end)))
}

/// Recover the unique normal-ordered coefficients of a banded operator.
///
/// Per diagonal offset `d = j - k`, column `c` of the matrix reads
/// `A[c+d][c] = sum_k a_{k+d,k} (q^{2c}; q^{-2})_k`, which is triangular in
/// `k` because the weight vanishes for `k > c`; forward substitution with
/// pivots `(q^{2c}; q^{-2})_c = (q^2; q^2)_c != 0` is exact.
pub fn normal_order<S: Scalar>(
    a: &OpMatrix<S>,
    max_deg: u32,
    ctx: &QContext,
) -> Result<OrderedElement<S>> {
    let (lo, hi) = match a.band() {
        None => return Ok(OrderedElement::new(OrderTag::Normal)),
        Some(b) => b,
    };
    let d_bound = max_deg as isize;
    if lo < -d_bound || hi > d_bound {
        return Err(Error::NotBanded {
            lo,
            hi,
            max_deg: max_deg as usize,
        });
    }
    let mut out = OrderedElement::new(OrderTag::Normal);
    for d in lo..=hi {
        let k_min = (-d).max(0) as u32;
        let k_max = max_deg - d.max(0) as u32;
        let needed = (k_max as isize + d.max(0)) as usize + 1;
        if needed > a.valid_end() {
            return Err(Error::TruncationTooSmall {
                needed,
                have: a.valid_end(),
            });
        }
        let mut solved: Vec<S> = Vec::new();
        for c in k_min..=k_max {
            let row = (c as isize + d) as usize;
            let mut rhs = a.get_checked(row, c as usize)?.clone();
            for (i, prev) in solved.iter().enumerate() {
                let kp = k_min + i as u32;
                rhs = rhs.sub(&prev.mul_rat(&ctx.poch_desc(c as i64, kp)));
            }
            let pivot = ctx.poch_desc(c as i64, c);
            let coeff = rhs.checked_div(&rhs.lift(&pivot))?;
            solved.push(coeff.clone());
            out.add_term((c as isize + d) as u32, c, coeff);
        }
    }
    Ok(out)
}

/// Recover the unique anti-normal coefficients: solve normal-ordered first
/// (the triangular system), then rewrite exactly. The direct anti-normal
/// column system is not triangular, so the rewrite route is used instead.
pub fn anti_normal_order<S: Scalar>(
    a: &OpMatrix<S>,
    max_deg: u32,
    ctx: &QContext,
) -> Result<OrderedElement<S>> {
    let normal = normal_order(a, max_deg, ctx)?;
    Ok(reorder(&normal, OrderTag::AntiNormal, ctx))
}
