//! Invariant and weighted integrals on the quantum disc, through the trace
//! realization: `int f dnu = (1 - q^2) sum_n F_{nn} q^{-2n}` and
//! `int f dnu_alpha = (1 - t) sum_n F_{nn} t^n` with `F = T(f)` and
//! `t = q^{4 alpha}`.

use super::element::{FiniteElement, OrderedElement};
use super::matrix::OpMatrix;
use super::ordering::{finite_to_matrix, to_matrix};
use crate::error::{Error, Result};
use crate::qscalar::{rat_one, QContext, Scalar, TSeries};

/// Measure selector for [`integrate_matrix`].
#[derive(Debug, Clone)]
pub enum Measure<S> {
    /// The invariant measure `dnu`.
    Invariant,
    /// The weighted measure `dnu_alpha` at weight `t = q^{4 alpha}`.
    Weighted(S),
}

/// How far the diagonal sum must run. For operators with certified finite
/// support this is the support bound; for the weighted measure with a formal
/// `t` the sum self-truncates at the series order.
fn diagonal_limit<S: Scalar + 'static>(a: &OpMatrix<S>, measure: &Measure<S>) -> Result<usize> {
    let support = match (a.row_end(), a.col_end()) {
        (Some(r), Some(c)) => Some(r.min(c)),
        _ => None,
    };
    match (support, measure) {
        (Some(s), _) => Ok(s),
        (None, Measure::Weighted(t)) => match series_order(t) {
            // t^n vanishes beyond the truncation order
            Some(n) => Ok(n + 1),
            None => Err(Error::NotFinite),
        },
        (None, Measure::Invariant) => Err(Error::NotFinite),
    }
}

/// Truncation order of a formal scalar, if it is one. Used to decide whether
/// weighted integrals of unbounded-support operators self-truncate.
pub fn series_order<S: Scalar + 'static>(s: &S) -> Option<usize> {
    let any = s as &dyn std::any::Any;
    any.downcast_ref::<TSeries>().map(|t| t.order())
}

/// Integrate a represented operator. Requires either certified finite
/// support or (for the weighted measure) a formal weight, and enough exact
/// diagonal entries to cover the summation range.
pub fn integrate_matrix<S: Scalar + 'static>(
    a: &OpMatrix<S>,
    measure: &Measure<S>,
    ctx: &QContext,
) -> Result<S> {
    let limit = diagonal_limit(a, measure)?;
    if limit > a.valid_end() {
        return Err(Error::TruncationTooSmall {
            needed: limit,
            have: a.valid_end(),
        });
    }
    let mut acc = a.proto().zero();
    match measure {
        Measure::Invariant => {
            for n in 0..limit {
                let d = a.get(n, n);
                if d.is_zero() {
                    continue;
                }
                acc = acc.add(&d.mul_rat(&ctx.q2_pow(-(n as i64))));
            }
            Ok(acc.mul_rat(&(rat_one() - ctx.q2())))
        }
        Measure::Weighted(t) => {
            let mut tn = t.one();
            for n in 0..limit {
                let d = a.get(n, n);
                if !d.is_zero() {
                    acc = acc.add(&d.mul(&tn));
                }
                if n + 1 < limit {
                    tn = tn.mul(t);
                }
            }
            Ok(acc.mul(&t.one().sub(t)))
        }
    }
}

/// Integral of a finite function.
pub fn integrate_finite<S: Scalar + 'static>(
    f: &FiniteElement<S>,
    measure: &Measure<S>,
    ctx: &QContext,
    proto: &S,
) -> Result<S> {
    let (rows, cols) = f.support();
    let dim = rows.max(cols).max(1);
    let m = finite_to_matrix(f, dim, ctx, proto)?;
    integrate_matrix(&m, measure, ctx)
}

/// Weighted inner product `(f1, f2)_{q,alpha} = int f2* f1 dnu_alpha` of two
/// finite functions.
pub fn inner_product<S: Scalar + 'static>(
    f1: &FiniteElement<S>,
    f2: &FiniteElement<S>,
    t: &S,
    ctx: &QContext,
) -> Result<S> {
    let (r1, c1) = f1.support();
    let (r2, c2) = f2.support();
    let dim = r1.max(c1).max(r2).max(c2).max(1);
    let m1 = finite_to_matrix(f1, dim, ctx, t)?;
    let m2s = finite_to_matrix(&f2.involution(), dim, ctx, t)?;
    integrate_matrix(&m2s.mul(&m1), &Measure::Weighted(t.clone()), ctx)
}

/// Weighted inner product `(p1, p2)_{q,alpha}` of polynomial elements. The
/// diagonal sum is infinite, so this is exact only for a formal weight,
/// where it self-truncates at the series order; a numeric weight is refused.
pub fn inner_product_poly<S: Scalar + 'static>(
    p1: &OrderedElement<S>,
    p2: &OrderedElement<S>,
    t: &S,
    ctx: &QContext,
) -> Result<S> {
    let n_t = series_order(t).ok_or(Error::NotFinite)?;
    let deg = p1.max_degree().max(p2.max_degree()) as usize;
    // product band stays within 2*deg; diagonal needed up to n_t
    let dim = n_t + 2 * deg + 2;
    let m1 = to_matrix(p1, dim, ctx, t);
    let m2s = to_matrix(&p2.involution(), dim, ctx, t);
    let prod = m2s.mul(&m1);
    let limit = n_t + 1;
    if limit > prod.valid_end() {
        return Err(Error::TruncationTooSmall {
            needed: limit,
            have: prod.valid_end(),
        });
    }
    let mut acc = t.zero();
    let mut tn = t.one();
    for n in 0..limit {
        let d = prod.get(n, n);
        if !d.is_zero() {
            acc = acc.add(&d.mul(&tn));
        }
        if n + 1 < limit {
            tn = tn.mul(t);
        }
    }
    Ok(acc.mul(&t.one().sub(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::element::RadialElement;
    use crate::disc::ordering::radial_to_matrix;
    use crate::qscalar::{rat, Rat};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    #[test]
    fn invariant_integral_of_f_n() {
        // int f_n dnu = (1 - q^2) q^{-2n}
        let ctx = ctx();
        for n in 0..5u32 {
            let f = FiniteElement::<Rat>::f_n(n, &rat_one());
            let v = integrate_finite(&f, &Measure::Invariant, &ctx, &rat_one()).unwrap();
            assert_eq!(v, (rat_one() - ctx.q2()) * ctx.q2_pow(-(n as i64)));
        }
    }

    #[test]
    fn weighted_integral_of_f_0() {
        // int f_0 dnu_alpha = 1 - t
        let ctx = ctx();
        let t = rat(1, 3);
        let f = FiniteElement::<Rat>::f_n(0, &rat_one());
        let v = integrate_finite(&f, &Measure::Weighted(t.clone()), &ctx, &rat_one()).unwrap();
        assert_eq!(v, rat_one() - t);
    }

    #[test]
    fn f0_weighted_norm() {
        // (f_0, f_0)_{q,alpha} = 1 - t
        let ctx = ctx();
        let t = rat(1, 5);
        let f = FiniteElement::<Rat>::f_n(0, &rat_one());
        assert_eq!(inner_product(&f, &f, &t, &ctx).unwrap(), rat_one() - t);
    }

    #[test]
    fn unbounded_invariant_integral_is_refused() {
        let ctx = ctx();
        let d = radial_to_matrix(
            &RadialElement::new(vec![rat_one(); 4]),
            4,
            &rat_one(),
        )
        .unwrap()
        .with_support(None, None);
        assert_eq!(
            integrate_matrix(&d, &Measure::Invariant, &ctx),
            Err(Error::NotFinite)
        );
    }

    fn random_finite(rng: &mut StdRng, bound: u32) -> FiniteElement<Rat> {
        let mut f = FiniteElement::new();
        for _ in 0..rng.gen_range(1..=4) {
            f.add_term(
                rng.gen_range(0..=bound),
                rng.gen_range(0..=bound),
                rng.gen_range(0..=bound),
                rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9)),
            );
        }
        f
    }

    #[test]
    fn tracial_symmetry_under_one_minus_zzstar() {
        // int f1 f2 (1 - zz*) dnu = int f2 f1 (1 - zz*) dnu
        let ctx = ctx();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            let f1 = random_finite(&mut rng, 3);
            let f2 = random_finite(&mut rng, 3);
            let dim = 12;
            let a = finite_to_matrix(&f1, dim, &ctx, &rat_one()).unwrap();
            let b = finite_to_matrix(&f2, dim, &ctx, &rat_one()).unwrap();
            let w = crate::disc::ordering::rep_generator(
                &crate::disc::ordering::Generator::RadialPower(ctx.q2().clone()),
                dim,
                &ctx,
                &rat_one(),
            )
            .unwrap();
            let lhs = integrate_matrix(&a.mul(&b).mul(&w), &Measure::Invariant, &ctx).unwrap();
            let rhs = integrate_matrix(&b.mul(&a).mul(&w), &Measure::Invariant, &ctx).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn radial_commutes_under_invariant_integral() {
        // int f w dnu = int w f dnu for any radial power w
        let ctx = ctx();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..20 {
            let f = random_finite(&mut rng, 3);
            let dim = 12;
            let a = finite_to_matrix(&f, dim, &ctx, &rat_one()).unwrap();
            let w = crate::disc::ordering::rep_generator(
                &crate::disc::ordering::Generator::RadialPower(rat(3, 7)),
                dim,
                &ctx,
                &rat_one(),
            )
            .unwrap();
            let lhs = integrate_matrix(&a.mul(&w), &Measure::Invariant, &ctx).unwrap();
            let rhs = integrate_matrix(&w.mul(&a), &Measure::Invariant, &ctx).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn monomial_norms_match_gram_closed_form() {
        // (z^m, z^l) = delta_{ml} (q^2; q^2)_m / (t q^2; q^2)_m, formal t
        let ctx = ctx();
        let n_t = 6;
        let t = TSeries::variable(n_t);
        for m in 0..4u32 {
            for l in 0..4u32 {
                let zm = OrderedElement::<TSeries>::z_pow(m, &t);
                let zl = OrderedElement::<TSeries>::z_pow(l, &t);
                let v = inner_product_poly(&zm, &zl, &t, &ctx).unwrap();
                if m != l {
                    assert!(v.is_zero());
                } else {
                    let num = ctx.poch_q2(m);
                    let mut den = TSeries::constant(rat_one(), n_t);
                    for i in 0..m as i64 {
                        let f = TSeries::variable(n_t)
                            .scale(&ctx.q2_pow(i + 1))
                            .neg()
                            .add_rat(&rat_one());
                        den = den.mul(&f);
                    }
                    let expect = TSeries::constant(num, n_t).checked_div(&den).unwrap();
                    assert_eq!(v, expect, "m={m}");
                }
            }
        }
    }

    #[test]
    fn poly_inner_product_needs_formal_weight() {
        let ctx = ctx();
        let z = OrderedElement::<Rat>::z_pow(1, &rat_one());
        assert_eq!(
            inner_product_poly(&z, &z, &rat(1, 3), &ctx),
            Err(Error::NotFinite)
        );
    }
}
