//! The weighted Bergman space `H^2_{q,alpha}` at weight `t = q^{4 alpha}`:
//! Gram data, the shift operators `zhat`, `zhat*`, Toeplitz-Bergman
//! operators for finite and polynomial symbols, and the normal-ordered
//! operator calculus.
//!
//! Two independent routes compute Toeplitz matrix elements for finite
//! symbols: a closed-form trace summation ([`toeplitz`]) and the literal
//! projection-kernel integral built from generic matrix machinery
//! ([`toeplitz_integral_form`]); the verification suites assert they agree
//! exactly. Polynomial symbols `z*^j z^k` quantize to `zhat*^j zhat^k`
//! ([`toeplitz_anti_poly`]).

use crate::disc::{
    finite_to_matrix, integrate_matrix, rep_generator, z_pow_matrix, zstar_pow_matrix,
    FiniteElement, Generator, Measure, OpMatrix, OrderTag, OrderedElement,
};
use crate::error::{Error, Result};
use crate::qscalar::{rat_one, QContext, Rat, Scalar, TSeries};

/// The weighted space: deformation context plus the weight `t = q^{4 alpha}`,
/// which is either a rational in `(0, 1)` or a formal series variable.
///
/// The hat-action ratios are memoized; the cache is interior state only and
/// does not affect value semantics.
#[derive(Debug, Clone)]
pub struct WeightedSpace<S> {
    ctx: QContext,
    t: S,
    ratio_cache: std::cell::RefCell<std::collections::HashMap<(i64, u32), S>>,
}

impl WeightedSpace<Rat> {
    pub fn numeric(ctx: QContext, t: Rat) -> Result<Self> {
        use num::{One, Signed};
        if !(t.is_positive() && t < <Rat as One>::one()) {
            return Err(Error::ConfigInvalid(format!(
                "numeric weight must satisfy 0 < t < 1, got {t}"
            )));
        }
        Ok(WeightedSpace {
            ctx,
            t,
            ratio_cache: Default::default(),
        })
    }
}

impl WeightedSpace<TSeries> {
    pub fn formal(ctx: QContext, n_t: usize) -> Self {
        WeightedSpace {
            ctx,
            t: TSeries::variable(n_t),
            ratio_cache: Default::default(),
        }
    }
}

impl<S: Scalar + 'static> WeightedSpace<S> {
    pub fn new_unchecked(ctx: QContext, t: S) -> Self {
        WeightedSpace {
            ctx,
            t,
            ratio_cache: Default::default(),
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn t(&self) -> &S {
        &self.t
    }

    /// `(t q^2; q^2)_m = prod_{i<m} (1 - t q^{2(i+1)})`.
    pub fn poch_t_q2(&self, m: u32) -> S {
        let mut acc = self.t.one();
        for i in 0..m as i64 {
            let f = self.t.one().sub(&self.t.mul_rat(&self.ctx.q2_pow(i + 1)));
            acc = acc.mul(&f);
        }
        acc
    }

    /// `(t q^{2n}; q^{-2})_k = prod_{i<k} (1 - t q^{2(n-i)})`.
    pub fn poch_t_desc(&self, n: i64, k: u32) -> S {
        let mut acc = self.t.one();
        for i in 0..k as i64 {
            let f = self.t.one().sub(&self.t.mul_rat(&self.ctx.q2_pow(n - i)));
            acc = acc.mul(&f);
        }
        acc
    }

    /// Squared norm of the basis monomial:
    /// `(z^m, z^m)_{q,alpha} = (q^2; q^2)_m / (t q^2; q^2)_m`.
    pub fn gram(&self, m: u32) -> S {
        self.t
            .lift(&self.ctx.poch_q2(m))
            .checked_div(&self.poch_t_q2(m))
            .expect("Gram denominator is a unit")
    }

    /// Action weight of `zhat*` on `z^m`: `(1 - q^{2m}) / (1 - t q^{2m})`.
    pub fn lowering_weight(&self, m: u32) -> S {
        let num = self.t.lift(&(rat_one() - self.ctx.q2_pow(m as i64)));
        let den = self.t.one().sub(&self.t.mul_rat(&self.ctx.q2_pow(m as i64)));
        num.checked_div(&den).expect("denominator is a unit")
    }

    /// The ratio `(q^{2n}; q^{-2})_k / (t q^{2n}; q^{-2})_k` describing the
    /// action of `zhat^j zhat*^k` on `z^n`.
    pub fn hat_ratio(&self, n: i64, k: u32) -> S {
        if (k as i64) > n {
            return self.t.zero();
        }
        if let Some(v) = self.ratio_cache.borrow().get(&(n, k)) {
            return v.clone();
        }
        let num = self.ctx.poch_desc(n, k);
        let v = self
            .t
            .lift(&num)
            .checked_div(&self.poch_t_desc(n, k))
            .expect("denominator is a unit");
        self.ratio_cache
            .borrow_mut()
            .insert((n, k), v.clone());
        v
    }

    /// `1 - t` as a scalar.
    pub fn one_minus_t(&self) -> S {
        self.t.one().sub(&self.t)
    }
}

/// A linear operator on the weighted space in the basis `{z^m}`, optionally
/// carrying its normal-ordered `zhat`/`zhat*` coefficient form. When both
/// forms are present they agree under [`hat_apply`].
#[derive(Debug, Clone)]
pub struct HatOperator<S> {
    pub matrix: OpMatrix<S>,
    pub normal_form: Option<OrderedElement<S>>,
}

impl<S: Scalar> HatOperator<S> {
    pub fn from_matrix(matrix: OpMatrix<S>) -> Self {
        HatOperator {
            matrix,
            normal_form: None,
        }
    }
}

/// The pair `(zhat, zhat*)`: the shift `z^m -> z^{m+1}` and its weighted
/// lowering partner `z^m -> (1 - q^{2m})/(1 - t q^{2m}) z^{m-1}` (zero at
/// `m = 0`).
pub fn hat_generators<S: Scalar + 'static>(
    space: &WeightedSpace<S>,
    dim: usize,
) -> (OpMatrix<S>, OpMatrix<S>) {
    let proto = space.t();
    let mut up = OpMatrix::zeros(dim, proto);
    for c in 0..dim - 1 {
        up.set(c + 1, c, proto.one());
    }
    let mut down = OpMatrix::zeros(dim, proto);
    for c in 1..dim {
        down.set(c - 1, c, space.lowering_weight(c as u32));
    }
    (up.with_support(None, None), down.with_support(None, None))
}

/// Toeplitz-Bergman operator of a finite symbol, by the closed-form trace
/// summation: each `z^a f_n z*^b` term of the symbol contributes
/// `(t q^2; q^2)_m/(q^2; q^2)_m (1-t) (q^{2(b+n)}; q^{-2})_b
///  (q^{2(a+n)}; q^{-2})_m t^{a+n-m}` to the entry `(m, j = m + b - a)`.
pub fn toeplitz<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    space: &WeightedSpace<S>,
    dim: usize,
) -> HatOperator<S> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rows, cols) = f.support();
    let mut m_out = OpMatrix::zeros(dim, proto);
    let one_minus_t = space.one_minus_t();
    for m in 0..dim.min(rows) as u32 {
        let pref = space
            .poch_t_q2(m)
            .checked_div(&proto.lift(&ctx.poch_q2(m)))
            .expect("unit denominator")
            .mul(&one_minus_t);
        for (&(a, n, b), coeff) in f.terms() {
            let j = m as i64 + b as i64 - a as i64;
            if j < 0 || j >= dim as i64 {
                continue;
            }
            let w_sym = ctx.poch_desc((b + n) as i64, b);
            let w_proj = ctx.poch_desc((a + n) as i64, m);
            if num::Zero::is_zero(&w_sym) || num::Zero::is_zero(&w_proj) {
                continue;
            }
            // here a + n >= m, so the t-power is a genuine power
            let mut tpow = proto.one();
            for _ in 0..(a + n - m) {
                tpow = tpow.mul(space.t());
            }
            let add = coeff.mul(&pref).mul_rat(&(w_sym * w_proj)).mul(&tpow);
            let cur = m_out.get(m as usize, j as usize).add(&add);
            m_out.set(m as usize, j as usize, cur);
        }
    }
    let op = m_out
        .with_support(Some(rows.min(dim)), Some(cols.min(dim)))
        .with_valid_end(dim);
    HatOperator::from_matrix(op)
}

/// The same Toeplitz matrix elements through the projection-kernel integral:
/// `(1-t)/(1-q^2) * int P_{z,mj} f dnu` with
/// `P_{z,mj} = (tq^2;q^2)_m/(q^2;q^2)_m q^{2j} z^j (1-zz*)^{2 alpha + 1} z*^m`
/// and the radial power realized as the diagonal `(t q^2)^nu`. Built from
/// generic matrix products and the invariant integral; used as the
/// independent cross-check of [`toeplitz`].
pub fn toeplitz_integral_form<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    space: &WeightedSpace<S>,
    dim: usize,
) -> Result<HatOperator<S>> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rows, cols) = f.support();
    let inner = rows.max(cols) + dim + 2;
    let f_mat = finite_to_matrix(f, inner, ctx, proto)?;
    let radial = rep_generator(
        &Generator::RadialPower(space.t().mul_rat(ctx.q2())),
        inner,
        ctx,
        proto,
    )?;
    let mut out = OpMatrix::zeros(dim, proto);
    let scale = space
        .one_minus_t()
        .checked_div(&proto.lift(&(rat_one() - ctx.q2())))?;
    for m in 0..dim {
        let pref = space
            .poch_t_q2(m as u32)
            .checked_div(&proto.lift(&ctx.poch_q2(m as u32)))?;
        for j in 0..dim {
            let p_zmj = z_pow_matrix(j as u32, inner, proto)
                .mul(&radial)
                .mul(&zstar_pow_matrix(m as u32, inner, ctx, proto))
                .scale(&pref.mul_rat(&ctx.q2_pow(j as i64)));
            let integrand = p_zmj.mul(&f_mat);
            let v = integrate_matrix(&integrand, &Measure::Invariant, ctx)?;
            let entry = v.mul(&scale);
            if !entry.is_zero() {
                out.set(m, j, entry);
            }
        }
    }
    Ok(HatOperator::from_matrix(
        out.with_support(Some(rows.min(dim)), Some(cols.min(dim))),
    ))
}

/// Matrix element through the defining Gram quotient:
/// `fhat_{mj} = (f z^j, z^m)_{q,alpha} / (z^m, z^m)_{q,alpha}`.
pub fn toeplitz_gram_entry<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    m: u32,
    j: u32,
    space: &WeightedSpace<S>,
) -> Result<S> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rows, cols) = f.support();
    let inner = rows.max(cols) + (m.max(j) as usize) + 2;
    let f_mat = finite_to_matrix(f, inner, ctx, proto)?;
    let num_mat = zstar_pow_matrix(m, inner, ctx, proto)
        .mul(&f_mat)
        .mul(&z_pow_matrix(j, inner, proto));
    let num = integrate_matrix(&num_mat, &Measure::Weighted(space.t().clone()), ctx)?;
    num.checked_div(&space.gram(m))
}

/// Toeplitz-Bergman operator of an anti-normal polynomial symbol:
/// `z*^j z^k` quantizes to `zhat*^j zhat^k`, extended linearly.
pub fn toeplitz_anti_poly<S: Scalar + 'static>(
    p: &OrderedElement<S>,
    space: &WeightedSpace<S>,
    dim: usize,
) -> Result<HatOperator<S>> {
    if p.ord() != OrderTag::AntiNormal {
        return Err(Error::OrderIncompatible);
    }
    let proto = space.t();
    let mut acc = OpMatrix::zeros(dim, proto);
    for (&(j, k), coeff) in p.terms() {
        // zhat*^j zhat^k on z^m: lift by k, then lower j times from m + k
        let mut term = OpMatrix::zeros(dim, proto);
        for m in 0..dim {
            let up = m + k as usize;
            let r = up as i64 - j as i64;
            if r < 0 || r >= dim as i64 {
                continue;
            }
            let mut w = proto.one();
            let mut ok = true;
            for i in 0..j {
                let level = up as i64 - i as i64;
                if level <= 0 {
                    ok = false;
                    break;
                }
                w = w.mul(&space.lowering_weight(level as u32));
            }
            if !ok || w.is_zero() {
                continue;
            }
            term.set(r as usize, m, w.mul(coeff));
        }
        acc = acc.add(&term);
    }
    Ok(HatOperator::from_matrix(acc.with_support(None, None)))
}

/// Apply a normal-ordered `zhat`/`zhat*` coefficient map to the basis:
/// `zhat^i zhat*^k` sends `z^n` to
/// `(q^{2n}; q^{-2})_k / (t q^{2n}; q^{-2})_k z^{n-k+i}`. Every entry of the
/// block is exact.
pub fn hat_apply<S: Scalar + 'static>(
    coeffs: &OrderedElement<S>,
    space: &WeightedSpace<S>,
    dim: usize,
) -> Result<OpMatrix<S>> {
    if coeffs.ord() != OrderTag::Normal {
        return Err(Error::OrderIncompatible);
    }
    let proto = space.t();
    let mut out = OpMatrix::zeros(dim, proto);
    for (&(i, k), coeff) in coeffs.terms() {
        for n in 0..dim {
            let r = n as i64 - k as i64 + i as i64;
            if r < 0 || r >= dim as i64 {
                continue;
            }
            let ratio = space.hat_ratio(n as i64, k);
            if ratio.is_zero() {
                continue;
            }
            let cur = out.get(r as usize, n).add(&coeff.mul(&ratio));
            out.set(r as usize, n, cur);
        }
    }
    Ok(out.with_support(None, None))
}

/// Recover the unique normal-ordered `zhat`/`zhat*` coefficients of a banded
/// operator on the weighted space. Triangular per diagonal offset exactly as
/// in the representation solve, with pivots
/// `(q^2; q^2)_c / (t q^2; q^2)_c`, units in both scalar rings.
pub fn hat_normal_order<S: Scalar + 'static>(
    op: &OpMatrix<S>,
    max_deg: u32,
    space: &WeightedSpace<S>,
) -> Result<OrderedElement<S>> {
    let (lo, hi) = match op.band() {
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
        if needed > op.valid_end() {
            return Err(Error::TruncationTooSmall {
                needed,
                have: op.valid_end(),
            });
        }
        let mut solved: Vec<S> = Vec::new();
        for c in k_min..=k_max {
            let row = (c as isize + d) as usize;
            let mut rhs = op.get_checked(row, c as usize)?.clone();
            for (idx, prev) in solved.iter().enumerate() {
                let kp = k_min + idx as u32;
                rhs = rhs.sub(&prev.mul(&space.hat_ratio(c as i64, kp)));
            }
            let pivot = space.hat_ratio(c as i64, c);
            let coeff = rhs.checked_div(&pivot)?;
            solved.push(coeff.clone());
            out.add_term((c as isize + d) as u32, c, coeff);
        }
    }
    Ok(out)
}

/// Adjoint with respect to the Gram form:
/// `(A^dag)_{rc} = A_{cr} gram(c) / gram(r)`.
pub fn hat_adjoint<S: Scalar + 'static>(
    op: &OpMatrix<S>,
    space: &WeightedSpace<S>,
) -> Result<OpMatrix<S>> {
    let dim = op.dim();
    let proto = space.t();
    let mut grams = Vec::with_capacity(dim);
    for m in 0..dim as u32 {
        grams.push(space.gram(m));
    }
    let mut out = OpMatrix::zeros(dim, proto);
    for r in 0..dim {
        for c in 0..dim {
            let a = op.get(c, r);
            if a.is_zero() {
                continue;
            }
            let v = a.mul(&grams[c].checked_div(&grams[r])?);
            out.set(r, c, v);
        }
    }
    Ok(out
        .with_support(op.col_end(), op.row_end())
        .with_valid_end(op.valid_end()))
}

/// The normal-form coefficient of the rank-one Toeplitz operator of `f_0` at
/// `(k, k)`: `(1 - t) prod_{i<k} (t q^2 - q^{2i}) / (q^2; q^2)_k`, a
/// polynomial in `t`.
pub fn f0hat_normal_coeff<S: Scalar + 'static>(k: u32, space: &WeightedSpace<S>) -> S {
    let ctx = space.ctx();
    let proto = space.t();
    let mut acc = space.one_minus_t();
    for i in 0..k as i64 {
        let f = space.t().mul_rat(ctx.q2()).sub(&proto.lift(&ctx.q2_pow(i)));
        acc = acc.mul(&f);
    }
    acc.checked_div(&proto.lift(&ctx.poch_q2(k)))
        .expect("unit denominator")
}

/// The finite delta identity behind the rank-one normal form: for `j >= 1`
/// the sum
/// `sum_{k<=j} prod_{i<k}(t q^2 - q^{2i}) / (q^2; q^2)_k
///  * (q^{2j}; q^{-2})_k / (t q^{2j}; q^{-2})_k`
/// telescopes to zero, and to 1 at `j = 0`. Returns whether the identity
/// holds exactly at the given weight.
pub fn f0_delta_identity<S: Scalar + 'static>(j: u32, space: &WeightedSpace<S>) -> bool {
    let ctx = space.ctx();
    let proto = space.t();
    let mut sum = proto.zero();
    for k in 0..=j {
        let mut head = proto.one();
        for i in 0..k as i64 {
            let f = space.t().mul_rat(ctx.q2()).sub(&proto.lift(&ctx.q2_pow(i)));
            head = head.mul(&f);
        }
        let head = head
            .checked_div(&proto.lift(&ctx.poch_q2(k)))
            .expect("unit denominator");
        sum = sum.add(&head.mul(&space.hat_ratio(j as i64, k)));
    }
    let expect = if j == 0 { proto.one() } else { proto.zero() };
    sum == expect
}

/// Orthogonal projection onto the holomorphic sector through the Gram form:
/// coefficient of `z^s` is `(f, z^s)_{q,alpha} / gram(s)`; the result is
/// exact and supported in `s <` the symbol's row support.
pub fn project_gram<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    space: &WeightedSpace<S>,
) -> Result<Vec<S>> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rows, cols) = f.support();
    let inner = rows.max(cols) + rows + 2;
    let f_mat = finite_to_matrix(f, inner, ctx, proto)?;
    let mut out = Vec::new();
    for s in 0..rows as u32 {
        let pairing = zstar_pow_matrix(s, inner, ctx, proto).mul(&f_mat);
        let num = integrate_matrix(&pairing, &Measure::Weighted(space.t().clone()), ctx)?;
        out.push(num.checked_div(&space.gram(s))?);
    }
    if out.is_empty() {
        out.push(proto.zero());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rat_int};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    fn space_num() -> WeightedSpace<Rat> {
        WeightedSpace::numeric(ctx(), rat(1, 4)).unwrap()
    }

    fn space_formal(n_t: usize) -> WeightedSpace<TSeries> {
        WeightedSpace::formal(ctx(), n_t)
    }

    #[test]
    fn gram_values() {
        let sp = space_num();
        assert_eq!(sp.gram(0), rat_one());
        // q=1/2, t=1/4: m=1 -> (1 - 1/4)/(1 - 1/16) = 4/5
        assert_eq!(sp.gram(1), rat(4, 5));
    }

    #[test]
    fn gram_constant_term_is_limit_space_gram() {
        let sp = space_formal(4);
        for m in 0..5u32 {
            let g = sp.gram(m);
            assert_eq!(g.constant_term(), &sp.ctx().poch_q2(m));
        }
    }

    #[test]
    fn hat_generator_actions() {
        let sp = space_num();
        let (up, down) = hat_generators(&sp, 6);
        // zhat*(z^0) = 0
        for r in 0..6 {
            assert!(num::Zero::is_zero(down.get(r, 0)));
        }
        // zhat*(z^1) = 4/5 z^0 at q=1/2, t=1/4
        assert_eq!(down.get(0, 1), &rat(4, 5));
        assert_eq!(up.get(3, 2), &rat_one());
    }

    fn check_ladder_relation<S: Scalar + 'static>(sp: &WeightedSpace<S>, dim: usize) {
        // zhat* zhat - q^2 zhat zhat* - (1-q^2)
        //   - t (1-q^2)/(1-t) (1 - zhat zhat*)(1 - zhat* zhat) = 0
        let (up, down) = hat_generators(sp, dim);
        let proto = sp.t();
        let idm = OpMatrix::identity(dim, proto);
        let du = down.mul(&up);
        let ud = up.mul(&down);
        let q2 = sp.ctx().q2().clone();
        let one_minus_q2 = proto.lift(&(rat_one() - &q2));
        let tail = idm.sub(&ud).mul(&idm.sub(&du)).scale(
            &sp.t()
                .mul(&one_minus_q2)
                .checked_div(&sp.one_minus_t())
                .unwrap(),
        );
        let lhs = du
            .sub(&ud.scale(&proto.lift(&q2)))
            .sub(&idm.scale(&one_minus_q2))
            .sub(&tail);
        let block = lhs.valid_end();
        assert!(block >= dim - 2);
        for r in 0..block {
            for c in 0..block {
                assert!(lhs.get(r, c).is_zero(), "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn ladder_relation_numeric_and_formal() {
        check_ladder_relation(&space_num(), 8);
        check_ladder_relation(&space_formal(5), 8);
    }

    #[test]
    fn toeplitz_of_f0_is_rank_one() {
        let sp = space_num();
        let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
        let op = toeplitz(&f0, &sp, 6);
        assert_eq!(op.matrix.get(0, 0), &(rat_one() - sp.t()));
        for m in 0..6 {
            for j in 0..6 {
                if (m, j) != (0, 0) {
                    assert!(num::Zero::is_zero(op.matrix.get(m, j)));
                }
            }
        }
    }

    #[test]
    fn toeplitz_trace_and_integral_forms_agree() {
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let mut f = FiniteElement::<Rat>::new();
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
            }
            let dim = 6;
            let a = toeplitz(&f, &sp, dim);
            let b = toeplitz_integral_form(&f, &sp, dim).unwrap();
            assert!(a.matrix.agree_on(&b.matrix, dim));
            // and against the Gram definition
            for m in 0..dim as u32 {
                for j in 0..dim as u32 {
                    let g = toeplitz_gram_entry(&f, m, j, &sp).unwrap();
                    assert_eq!(&g, a.matrix.get(m as usize, j as usize), "({m},{j})");
                }
            }
        }
    }

    #[test]
    fn toeplitz_of_radial_symbol_is_diagonal() {
        let sp = space_num();
        let f = FiniteElement::<Rat>::f_n(2, sp.t());
        let op = toeplitz(&f, &sp, 6);
        for m in 0..6 {
            for j in 0..6 {
                if m != j {
                    assert!(num::Zero::is_zero(op.matrix.get(m, j)));
                }
            }
        }
    }

    #[test]
    fn anti_poly_toeplitz_matches_hat_composition() {
        // zhat*^j zhat^k from the ladder matrices vs the direct weights
        let sp = space_num();
        let dim = 10;
        let (up, down) = hat_generators(&sp, dim);
        for j in 0..=3u32 {
            for k in 0..=3u32 {
                let p = OrderedElement::<Rat>::monomial(OrderTag::AntiNormal, j, k, rat_one());
                let direct = toeplitz_anti_poly(&p, &sp, dim).unwrap();
                let mut composed = OpMatrix::identity(dim, sp.t());
                for _ in 0..k {
                    composed = up.mul(&composed);
                }
                for _ in 0..j {
                    composed = down.mul(&composed);
                }
                let block = composed.valid_end();
                assert!(direct.matrix.agree_on(&composed, block), "j={j} k={k}");
            }
        }
    }

    #[test]
    fn hat_apply_identity() {
        let sp = space_num();
        let e = OrderedElement::<Rat>::one(OrderTag::Normal, sp.t());
        let m = hat_apply(&e, &sp, 5).unwrap();
        assert!(m.agree_on(&OpMatrix::identity(5, sp.t()), 5));
    }

    #[test]
    fn hat_apply_matches_generator_composition() {
        let sp = space_num();
        let dim = 10;
        let (up, down) = hat_generators(&sp, dim);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..8 {
            let i = rng.gen_range(0..=3u32);
            let k = rng.gen_range(0..=3u32);
            let e = OrderedElement::<Rat>::monomial(OrderTag::Normal, i, k, rat_one());
            let m = hat_apply(&e, &sp, dim).unwrap();
            let mut composed = OpMatrix::identity(dim, sp.t());
            for _ in 0..k {
                composed = down.mul(&composed);
            }
            for _ in 0..i {
                composed = up.mul(&composed);
            }
            let block = composed.valid_end();
            assert!(m.agree_on(&composed, block), "i={i} k={k}");
        }
    }

    #[test]
    fn hat_normal_order_roundtrip() {
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..25 {
            let mut e = OrderedElement::<Rat>::new(OrderTag::Normal);
            for _ in 0..rng.gen_range(1..=4) {
                e.add_term(
                    rng.gen_range(0..=4),
                    rng.gen_range(0..=4),
                    rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9)),
                );
            }
            let m = hat_apply(&e, &sp, 12).unwrap();
            let back = hat_normal_order(&m, 4, &sp).unwrap();
            assert_eq!(e, back);
        }
    }

    #[test]
    fn f0hat_normal_form_matches_closed_coeffs() {
        let sp = space_num();
        let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
        let op = toeplitz(&f0, &sp, 8);
        let nf = hat_normal_order(&op.matrix, 6, &sp).unwrap();
        for k in 0..=6u32 {
            let got = nf
                .coeff(k, k)
                .cloned()
                .unwrap_or_else(crate::qscalar::rat_zero);
            assert_eq!(got, f0hat_normal_coeff(k, &sp), "k={k}");
        }
        // formal weight too
        let spf = space_formal(5);
        let f0 = FiniteElement::<TSeries>::f_n(0, spf.t());
        let op = toeplitz(&f0, &spf, 8);
        let nf = hat_normal_order(&op.matrix, 5, &spf).unwrap();
        for k in 0..=5u32 {
            let got = nf.coeff(k, k).cloned().unwrap_or_else(|| spf.t().zero());
            assert_eq!(got, f0hat_normal_coeff(k, &spf), "formal k={k}");
        }
    }

    #[test]
    fn zstar_z_hat_normal_form_classical_layer() {
        // the t^0 layer of the normal form of zhat* zhat is
        // (1 - q^2) + q^2 u
        let sp = space_formal(3);
        let p = OrderedElement::<TSeries>::monomial(OrderTag::AntiNormal, 1, 1, sp.t().one());
        let op = toeplitz_anti_poly(&p, &sp, 10).unwrap();
        let nf = hat_normal_order(&op.matrix, 6, &sp).unwrap();
        let c0 = nf.coeff(0, 0).unwrap();
        let c1 = nf.coeff(1, 1).unwrap();
        assert_eq!(c0.constant_term(), &(rat_one() - sp.ctx().q2()));
        assert_eq!(c1.constant_term(), sp.ctx().q2());
        for k in 2..=6u32 {
            if let Some(c) = nf.coeff(k, k) {
                assert!(num::Zero::is_zero(c.constant_term()), "k={k}");
            }
        }
    }

    #[test]
    fn delta_identity_small() {
        let sp = space_num();
        for j in 0..=8 {
            assert!(f0_delta_identity(j, &sp), "j={j}");
        }
        let sp2 = WeightedSpace::numeric(QContext::new(rat(9, 10)).unwrap(), rat(1, 2)).unwrap();
        assert!(f0_delta_identity(5, &sp2));
    }

    #[test]
    fn project_gram_of_f0() {
        let sp = space_num();
        let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
        let p = project_gram(&f0, &sp).unwrap();
        assert_eq!(p, vec![rat_one() - sp.t()]);
    }

    #[test]
    fn projection_reproduces_toeplitz_pairing() {
        // <toeplitz(f) z^j, z^m> = <f z^j, z^m>_{q,alpha}
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..6 {
            let mut f = FiniteElement::<Rat>::new();
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
            }
            let dim = 7;
            let op = toeplitz(&f, &sp, dim);
            for j in 0..dim as u32 {
                for m in 0..dim as u32 {
                    let lhs = op.matrix.get(m as usize, j as usize).clone() * sp.gram(m);
                    let inner = 12;
                    let f_mat = finite_to_matrix(&f, inner, sp.ctx(), sp.t()).unwrap();
                    let pairing = zstar_pow_matrix(m, inner, sp.ctx(), sp.t())
                        .mul(&f_mat)
                        .mul(&z_pow_matrix(j, inner, sp.t()));
                    let rhs =
                        integrate_matrix(&pairing, &Measure::Weighted(sp.t().clone()), sp.ctx())
                            .unwrap();
                    assert_eq!(lhs, rhs, "j={j} m={m}");
                }
            }
        }
    }

    #[test]
    fn toeplitz_self_adjointness_transport() {
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(53);
        for _ in 0..8 {
            let mut f = FiniteElement::<Rat>::new();
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
            }
            let dim = 8;
            let a = toeplitz(&f, &sp, dim);
            let b = toeplitz(&f.involution(), &sp, dim);
            let adj = hat_adjoint(&a.matrix, &sp).unwrap();
            assert!(adj.agree_on(&b.matrix, dim));
        }
    }

    #[test]
    fn numeric_weight_bounds_checked() {
        assert!(WeightedSpace::numeric(ctx(), rat_int(1)).is_err());
        assert!(WeightedSpace::numeric(ctx(), rat_int(0)).is_err());
        assert!(WeightedSpace::numeric(ctx(), rat(1, 3)).is_ok());
    }
}
