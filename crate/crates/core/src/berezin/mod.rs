//! Covariant symbols, the quantized trace, the Berezin transform for finite
//! and polynomial symbols, and the polynomial family driving its
//! `t`-expansion.
//!
//! Two independent symbol routes are implemented and cross-checked:
//!
//! 1. the trace pairing against the projection kernels, which expands an
//!    operator with matrix elements `fhat_{jm}` into
//!    `sum fhat_{jm} q^{-2j} (tq^2;q^2)_m/(q^2;q^2)_m t^n q^{2(j+n)}
//!     z^j f_n z*^m` ([`covariant_symbol_expansion`]);
//! 2. the coefficient transfer: normal-ordered `zhat`/`zhat*` coefficients
//!    of the operator become `z`/`z*` coefficients of the symbol verbatim
//!    ([`covariant_symbol_poly`]).

use crate::bergman::{hat_normal_order, toeplitz, toeplitz_anti_poly, HatOperator, WeightedSpace};
use crate::disc::{
    finite_to_matrix, finite_to_matrix_window, integrate_matrix, to_matrix, FiniteElement,
    Measure, OpMatrix, OrderedElement,
};
use crate::error::{Error, Result};
use crate::qscalar::{rat_one, rat_zero, QContext, Rat, Scalar, TSeries};
use num::Zero;

/// The quantized trace `tr_q(A) = sum_k a_{kk} q^{-2k}`, defined for
/// operators with certified finite support.
pub fn trace_q<S: Scalar + 'static>(op: &OpMatrix<S>, ctx: &QContext) -> Result<S> {
    let limit = match (op.row_end(), op.col_end()) {
        (Some(r), Some(c)) => r.min(c),
        _ => return Err(Error::NotFinite),
    };
    if limit > op.valid_end() {
        return Err(Error::TruncationTooSmall {
            needed: limit,
            have: op.valid_end(),
        });
    }
    let mut acc = op.proto().zero();
    for k in 0..limit {
        let d = op.get(k, k);
        if !d.is_zero() {
            acc = acc.add(&d.mul_rat(&ctx.q2_pow(-(k as i64))));
        }
    }
    Ok(acc)
}

/// The covariant symbol of a finitely supported operator, truncated at
/// radial order `n_f`: a sum of `z^j f_n z*^m` terms. The truncation drops
/// only the structural `n > n_f` tail.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolExpansion<S> {
    pub terms: FiniteElement<S>,
    pub n_f: u32,
}

impl<S: Scalar + 'static> SymbolExpansion<S> {
    /// The representing matrix on a block. Terms landing outside the block
    /// are skipped; since each term is a single entry, entries inside the
    /// block are exact whenever the radial cut `n_f` covers it.
    pub fn to_matrix(&self, dim: usize, ctx: &QContext, proto: &S) -> OpMatrix<S> {
        finite_to_matrix_window(&self.terms, dim, ctx, proto)
    }

    /// All terms radial? Returns the reduced `f_n` coefficient sequence.
    pub fn reduce_radial(&self, ctx: &QContext) -> Option<Vec<S>> {
        self.terms.reduce_radial(ctx)
    }
}

/// Route 1: the trace-pairing expansion of the covariant symbol of a
/// finitely supported operator.
pub fn covariant_symbol_expansion<S: Scalar + 'static>(
    op: &HatOperator<S>,
    space: &WeightedSpace<S>,
    n_f: u32,
) -> Result<SymbolExpansion<S>> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rows, cols) = match (op.matrix.row_end(), op.matrix.col_end()) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(Error::NotFinite),
    };
    let need = rows.max(cols);
    if need > op.matrix.valid_end() {
        return Err(Error::TruncationTooSmall {
            needed: need,
            have: op.matrix.valid_end(),
        });
    }
    let mut out = FiniteElement::new();
    for j in 0..rows as u32 {
        for m in 0..cols as u32 {
            let fjm = op.matrix.get(j as usize, m as usize);
            if fjm.is_zero() {
                continue;
            }
            let pref = space
                .poch_t_q2(m)
                .checked_div(&proto.lift(&ctx.poch_q2(m)))?
                .mul_rat(&ctx.q2_pow(-(j as i64)));
            let base = fjm.mul(&pref);
            let mut tn = proto.one();
            for n in 0..=n_f {
                let coeff = base.mul(&tn).mul_rat(&ctx.q2_pow((j + n) as i64));
                out.add_term(j, n, m, coeff);
                if n < n_f {
                    tn = tn.mul(space.t());
                }
            }
        }
    }
    Ok(SymbolExpansion { terms: out, n_f })
}

/// Route 2: normal-order the operator over `zhat`/`zhat*` and transfer the
/// coefficients verbatim to `z`/`z*`.
pub fn covariant_symbol_poly<S: Scalar + 'static>(
    op: &HatOperator<S>,
    space: &WeightedSpace<S>,
    max_deg: u32,
) -> Result<OrderedElement<S>> {
    hat_normal_order(&op.matrix, max_deg, space)
}

/// Compare the two symbol routes for a finitely supported operator, as
/// matrices on the block where both truncations are complete: route 1's
/// radial cut covers entries with `min(r, c) <= n_f`, and route 2's degree
/// cut covers columns up to the solve depth the operator block supports.
pub fn symbol_routes_agree<S: Scalar + 'static>(
    op: &HatOperator<S>,
    space: &WeightedSpace<S>,
    n_f: u32,
) -> Result<bool> {
    let ctx = space.ctx();
    let proto = space.t();
    let (lo, hi) = match op.matrix.band() {
        None => return Ok(true), // zero operator, zero symbol on both routes
        Some(b) => b,
    };
    let width = (-lo).max(hi).max(0) as u32;
    let usable = op.matrix.valid_end() as isize - 1 - hi.max(0);
    if usable < width as isize {
        return Err(Error::TruncationTooSmall {
            needed: (width as isize + 1 + hi.max(0)) as usize,
            have: op.matrix.valid_end(),
        });
    }
    let max_deg = usable as u32;
    let route1 = covariant_symbol_expansion(op, space, n_f)?;
    let route2 = covariant_symbol_poly(op, space, max_deg)?;
    let block = (n_f as usize + 1).min(max_deg as usize + 1);
    let dim = block + max_deg as usize + 1;
    let m1 = route1.to_matrix(dim, ctx, proto);
    let m2 = to_matrix(&route2, dim, ctx, proto);
    Ok(m1.agree_on(&m2, block))
}

/// Berezin transform of a finite symbol: the covariant symbol of its
/// Toeplitz-Bergman operator, as a radial-order-`n_f` expansion.
pub fn berezin<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    space: &WeightedSpace<S>,
    n_f: u32,
) -> Result<SymbolExpansion<S>> {
    let (rows, cols) = f.support();
    let dim = rows.max(cols).max(1);
    let op = toeplitz(f, space, dim);
    covariant_symbol_expansion(&op, space, n_f)
}

/// Berezin transform of an anti-normal polynomial symbol `sum b z*^j z^k`,
/// through the coefficient-transfer route. Exact as a formal-series element
/// when the weight is formal; for a numeric weight the result is the
/// truncation of the full expansion to degree `max_deg`.
pub fn berezin_anti_poly<S: Scalar + 'static>(
    p: &OrderedElement<S>,
    space: &WeightedSpace<S>,
    max_deg: u32,
) -> Result<OrderedElement<S>> {
    let dim = 2 * max_deg as usize + 4;
    let op = toeplitz_anti_poly(p, space, dim)?;
    covariant_symbol_poly(&op, space, max_deg)
}

/// Exact duality pairing data: returns
/// `(int (B_{q,alpha} f) psi dnu, (1-q^2)/(1-t) tr_q(fhat psihat))`;
/// the two must agree for all finite `f`, `psi`.
pub fn duality_pairing<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    psi: &FiniteElement<S>,
    space: &WeightedSpace<S>,
) -> Result<(S, S)> {
    let ctx = space.ctx();
    let proto = space.t();
    let (rf, cf) = f.support();
    let (rp, cp) = psi.support();
    let dim_f = rf.max(cf).max(1);
    let dim_p = rp.max(cp).max(1);
    // lhs: entries (r, c) of T(Bf) need radial terms up to n = min(r, c);
    // the symbol itself is an unbounded radial series, so no finite support
    // is claimed for it
    let dim = dim_p + dim_f + 2;
    let n_f = dim as u32;
    let bf = berezin(f, space, n_f)?;
    let bf_mat = bf.to_matrix(dim, ctx, proto).with_support(None, None);
    let psi_mat = finite_to_matrix(psi, dim, ctx, proto)?;
    let lhs = integrate_matrix(&bf_mat.mul(&psi_mat), &Measure::Invariant, ctx)?;
    // rhs
    let op_dim = 2 * (dim_f + dim_p);

    let fhat = toeplitz(f, space, op_dim);
    let phat = toeplitz(psi, space, op_dim);
    let tq = trace_q(&fhat.matrix.mul(&phat.matrix), ctx)?;
    let rhs = tq
        .mul_rat(&(rat_one() - ctx.q2()))
        .checked_div(&space.one_minus_t())?;
    Ok((lhs, rhs))
}

/// An exact polynomial in the Laplace-Beltrami slot.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPoly {
    /// coefficient of `X^i` at index `i`
    pub coeffs: Vec<Rat>,
}

impl BoxPoly {
    pub fn constant(r: Rat) -> Self {
        BoxPoly { coeffs: vec![r] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !Zero::is_zero(c))
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = rat_zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add_assign(&mut self, other: &BoxPoly, scale: &Rat) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), rat_zero());
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            self.coeffs[i] += c * scale;
        }
    }

    fn mul_linear(&self, a: &Rat, b: &Rat) -> BoxPoly {
        // self * (a + b X)
        let mut out = vec![rat_zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c * a;
            out[i + 1] += c * b;
        }
        BoxPoly { coeffs: out }
    }

    pub fn sub(&self, other: &BoxPoly) -> BoxPoly {
        let mut out = self.clone();
        out.add_assign(other, &-rat_one());
        out
    }
}

/// The expansion polynomial `p_j`:
/// `sum_{k<=j} (q^{-2j}; q^2)_k / (q^2; q^2)_k^2 q^{2k}
///  prod_{i<k} ((1 - q^{2i}(1+q^2) + q^{4i+2}) - q^{2i}(1-q^2)^2 X)`,
/// expanded exactly in the slot `X`. `p_0 = 1`, `deg p_j <= j`, and
/// `p_j(0) = 1` for every `j` (the `i = 0` product factor vanishes there).
pub fn p_poly(j: u32, ctx: &QContext) -> BoxPoly {
    let mut total = BoxPoly::constant(rat_zero());
    for k in 0..=j {
        let upper = crate::qscalar::qpoch(&ctx.q2_pow(-(j as i64)), ctx.q2(), k);
        if Zero::is_zero(&upper) {
            break;
        }
        let den = ctx.poch_q2(k);
        let scale = upper / (&den * &den) * ctx.q2_pow(k as i64);
        let mut prod = BoxPoly::constant(rat_one());
        for i in 0..k as i64 {
            let qi = ctx.q2_pow(i);
            let a = rat_one() - &qi * (rat_one() + ctx.q2()) + ctx.q2_pow(2 * i) * ctx.q2();
            let d = rat_one() - ctx.q2();
            let b = -&qi * &d * &d;
            prod = prod.mul_linear(&a, &b);
        }
        total.add_assign(&prod, &scale);
    }
    total
}

/// The `t^n` layer of the Berezin expansion: the identity at `n = 0` and
/// `p_n - p_{n-1}` for `n >= 1`.
pub fn layer_poly(n: u32, ctx: &QContext) -> BoxPoly {
    if n == 0 {
        BoxPoly::constant(rat_one())
    } else {
        p_poly(n, ctx).sub(&p_poly(n - 1, ctx))
    }
}

/// Exact check of the Berezin expansion on the vacuum finite function: the
/// full pipeline value of `B_{q,alpha} f_0` must equal
/// `(1 - t) sum_j t^j q^{2j} f_j` as truncated series, coefficient by
/// coefficient up to orders `(n_t, n_f)`.
pub fn expansion_check_f0(ctx: &QContext, n_t: usize, n_f: u32) -> Result<bool> {
    let space = WeightedSpace::formal(ctx.clone(), n_t);
    let f0 = FiniteElement::<TSeries>::f_n(0, space.t());
    let b = berezin(&f0, &space, n_f)?;
    let radial = match b.reduce_radial(ctx) {
        Some(r) => r,
        None => return Ok(false),
    };
    for n in 0..=n_f as usize {
        let got = radial.get(n).cloned().unwrap_or_else(|| space.t().zero());
        // (1 - t) t^n q^{2n}
        let mut tn = space.t().one();
        for _ in 0..n {
            tn = tn.mul(space.t());
        }
        let expect = space.one_minus_t().mul(&tn).mul_rat(&ctx.q2_pow(n as i64));
        if got != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::OrderTag;
    use crate::qscalar::{box_eigenvalue, phi32_terminating, rat};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    fn space_num() -> WeightedSpace<Rat> {
        WeightedSpace::numeric(ctx(), rat(1, 4)).unwrap()
    }

    #[test]
    fn trace_q_of_rank_one_toeplitz() {
        let sp = space_num();
        let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
        let op = toeplitz(&f0, &sp, 4);
        assert_eq!(trace_q(&op.matrix, sp.ctx()).unwrap(), rat_one() - sp.t());
    }

    #[test]
    fn trace_q_of_zero() {
        let sp = space_num();
        let z = OpMatrix::<Rat>::zeros(4, sp.t());
        assert_eq!(trace_q(&z, sp.ctx()).unwrap(), rat_zero());
    }

    #[test]
    fn trace_q_requires_finite_support() {
        let sp = space_num();
        let idm = OpMatrix::<Rat>::identity(4, sp.t());
        assert_eq!(trace_q(&idm, sp.ctx()), Err(Error::NotFinite));
    }

    #[test]
    fn symbol_of_rank_one_projector() {
        // the operator z^0 -> z^0 has covariant symbol (1-zz*)^{2 alpha + 1},
        // i.e. radial coefficients (t q^2)^n
        let sp = space_num();
        let mut m = OpMatrix::zeros(5, sp.t());
        m.set(0, 0, rat_one());
        let op = HatOperator::from_matrix(m.with_support(Some(1), Some(1)));
        let sym = covariant_symbol_expansion(&op, &sp, 6).unwrap();
        let radial = sym.reduce_radial(sp.ctx()).unwrap();
        let mut expect = rat_one();
        for n in 0..=6usize {
            assert_eq!(radial[n], expect, "n={n}");
            expect *= sp.t() * sp.ctx().q2();
        }
    }

    #[test]
    fn berezin_of_f0_is_scaled_radial_power() {
        let sp = space_num();
        let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
        let b = berezin(&f0, &sp, 6).unwrap();
        let radial = b.reduce_radial(sp.ctx()).unwrap();
        let mut expect = rat_one() - sp.t();
        for n in 0..=6usize {
            assert_eq!(radial[n], expect, "n={n}");
            expect *= sp.t() * sp.ctx().q2();
        }
    }

    #[test]
    fn berezin_of_unit_is_unit() {
        // Toeplitz of the anti-normal unit is the identity; its symbol is 1.
        let sp = space_num();
        let one = OrderedElement::<Rat>::one(OrderTag::AntiNormal, sp.t());
        let b = berezin_anti_poly(&one, &sp, 3).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.coeff(0, 0), Some(&rat_one()));
    }

    #[test]
    fn symbol_routes_agree_on_random_finite_ops() {
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..8 {
            let dim = 5;
            let mut m = OpMatrix::zeros(dim, sp.t());
            for _ in 0..rng.gen_range(1..=4) {
                m.set(
                    rng.gen_range(0..3),
                    rng.gen_range(0..3),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
            }
            let op = HatOperator::from_matrix(m.with_support(Some(3), Some(3)));
            assert!(symbol_routes_agree(&op, &sp, 8).unwrap());
        }
    }

    #[test]
    fn berezin_of_radial_is_radial() {
        let sp = space_num();
        for n in 0..4u32 {
            let f = FiniteElement::<Rat>::f_n(n, sp.t());
            let b = berezin(&f, &sp, 8).unwrap();
            assert!(b.reduce_radial(sp.ctx()).is_some(), "n={n}");
        }
    }

    #[test]
    fn p0_and_p1() {
        let ctx = ctx();
        let p0 = p_poly(0, &ctx);
        assert_eq!(p0.coeffs, vec![rat_one()]);
        let p1 = p_poly(1, &ctx);
        // p_1 = 1 + (1 - q^2) X
        assert_eq!(p1.degree(), 1);
        assert_eq!(p1.eval(&rat_zero()), rat_one());
        assert_eq!(p1.coeffs[1], rat_one() - ctx.q2());
    }

    #[test]
    fn p_j_at_zero_is_one() {
        let ctx = ctx();
        for j in 0..=20u32 {
            assert_eq!(p_poly(j, &ctx).eval(&rat_zero()), rat_one(), "j={j}");
        }
    }

    #[test]
    fn layer_polys() {
        let ctx = ctx();
        assert_eq!(layer_poly(0, &ctx).coeffs, vec![rat_one()]);
        let l1 = layer_poly(1, &ctx);
        assert_eq!(l1.eval(&rat_zero()), rat_zero());
        assert_eq!(l1.coeffs[1], rat_one() - ctx.q2());
    }

    #[test]
    fn telescoped_layers_resum_to_p_n() {
        // sum_{n<=N} layer_n = p_N as exact polynomials
        let ctx = ctx();
        for n_max in 1..=6u32 {
            let mut acc = layer_poly(0, &ctx);
            for n in 1..=n_max {
                acc.add_assign(&layer_poly(n, &ctx), &rat_one());
            }
            let p = p_poly(n_max, &ctx);
            let mut a = acc.coeffs.clone();
            let mut b = p.coeffs.clone();
            let len = a.len().max(b.len());
            a.resize(len, rat_zero());
            b.resize(len, rat_zero());
            assert_eq!(a, b, "N={n_max}");
        }
    }

    #[test]
    fn p_j_matches_terminating_hypergeometric() {
        // p_j(box eigenvalue at s = q^{2l}) = phi32(j; q^{-2l}, q^{2(l+1)})
        for q in [rat(1, 2), rat(3, 5)] {
            let ctx = QContext::new(q).unwrap();
            for j in 0..=6u32 {
                let pj = p_poly(j, &ctx);
                for l in 0..=6i64 {
                    let s = ctx.q2_pow(l);
                    let x = box_eigenvalue(&s, &ctx).unwrap();
                    let lhs = pj.eval(&x);
                    let rhs = phi32_terminating(j, &ctx.q2_pow(-l), &ctx.q2_pow(l + 1), &ctx);
                    assert_eq!(lhs, rhs, "j={j} l={l}");
                }
            }
        }
    }

    #[test]
    fn expansion_check_f0_small_orders() {
        let ctx = QContext::new(rat(3, 5)).unwrap();
        assert!(expansion_check_f0(&ctx, 6, 6).unwrap());
    }

    #[test]
    fn duality_holds_on_random_finite_pairs() {
        let sp = space_num();
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..6 {
            let mut f = FiniteElement::<Rat>::new();
            let mut psi = FiniteElement::<Rat>::new();
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
                psi.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                );
            }
            let (lhs, rhs) = duality_pairing(&f, &psi, &sp).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
