//! The formal star product on the polynomial algebra over `C[[t]]`,
//! `t = q^{4 alpha}`, computed by two independent routes:
//!
//! - the **operator route**: transport operator composition through the
//!   injective map `Q` sending `z^j z*^k` to the weighted-shift composition
//!   acting as `z^m -> (q^{2m}; q^{-2})_k / (t q^{2m}; q^{-2})_k
//!   z^{m-k+j}`, with the rational weight identified with its q-binomial
//!   series in `t`. Multiplying Q-images and re-expanding through the
//!   triangular ordering solve defines `f1 * f2` uniquely.
//! - the **asymptotic route**: `f1 * f2 = (1 - t) sum_j t^j
//!   m(p_j(box~) f1 (x) f2)` with the two-argument Laplace-Beltrami form
//!   `box~` and the expansion polynomials `p_j`.
//!
//! The operator route uses only the shift actions and exact linear algebra
//! and serves as the ground-truth oracle; the q-derivative convention inside
//! `box~` is selected by [`calibrate_convention`] as the unique one agreeing
//! with the oracle on a probe set, then frozen.

use crate::bergman::{hat_apply, WeightedSpace};
use crate::berezin::p_poly;
use crate::disc::{
    box_tilde, reorder, Convention, OpMatrix, OrderTag, OrderedElement,
    TensorElement,
};
use crate::error::{Error, Result};
use crate::qscalar::{rat_one, rat_zero, QContext, Rat, Scalar, TSeries};
use num::Zero;
use std::collections::BTreeMap;

/// A polynomial over the truncated formal series ring: a normal-ordered
/// element with `t`-series coefficients.
pub type FormalElement = OrderedElement<TSeries>;

/// The image of a formal element under the quantization map `Q`, together
/// with the element it came from.
#[derive(Debug, Clone)]
pub struct QImage {
    pub matrix: OpMatrix<TSeries>,
    pub source: FormalElement,
}

/// Apply `Q` to a normal-ordered element: exact truncated-series matrix of
/// the composed weighted shifts.
pub fn q_image(
    f: &FormalElement,
    space: &WeightedSpace<TSeries>,
    dim: usize,
) -> Result<QImage> {
    if f.ord() != OrderTag::Normal {
        return Err(Error::OrderIncompatible);
    }
    let matrix = hat_apply(f, space, dim)?;
    Ok(QImage {
        matrix,
        source: f.clone(),
    })
}

fn lift_element(f: &OrderedElement<Rat>, proto: &TSeries) -> FormalElement {
    f.map_coeffs(|c| proto.lift(c))
}

/// The star product by the operator route: multiply the Q-images and
/// re-expand by the triangular ordering solve. The result is the unique
/// formal element whose Q-image equals the product on the reliable block;
/// this is re-verified entry by entry before returning.
pub fn star_operator_route(
    f1: &FormalElement,
    f2: &FormalElement,
    space: &WeightedSpace<TSeries>,
) -> Result<FormalElement> {
    if f1.ord() != OrderTag::Normal || f2.ord() != OrderTag::Normal {
        return Err(Error::OrderIncompatible);
    }
    if f1.is_zero() || f2.is_zero() {
        return Ok(OrderedElement::new(OrderTag::Normal));
    }
    let n_t = space.t().order();
    let (a1, b1) = f1.degrees();
    let (a2, b2) = f2.degrees();
    // the t^n layer of the product has z*-degree at most b1 + b2 + n + 1;
    // solve a little past that and demand a zero margin
    let k_cap = (b1 + b2) as usize + n_t + 2;
    let margin = 2usize;
    let dim = k_cap + margin + (a1 + a2) as usize + 2;
    let img1 = q_image(f1, space, dim)?;
    let img2 = q_image(f2, space, dim)?;
    let prod = img1.matrix.mul(&img2.matrix);
    let (lo, hi) = match prod.band() {
        None => return Ok(OrderedElement::new(OrderTag::Normal)),
        Some(b) => b,
    };
    let mut out: FormalElement = OrderedElement::new(OrderTag::Normal);
    for d in lo..=hi {
        let k_min = (-d).max(0) as u32;
        let k_hi = k_cap as u32 + margin as u32;
        let needed = (k_hi as isize + d.max(0)) as usize + 1;
        if needed > prod.valid_end() {
            return Err(Error::TruncationTooSmall {
                needed,
                have: prod.valid_end(),
            });
        }
        let mut solved: Vec<TSeries> = Vec::new();
        for c in k_min..=k_hi {
            let row = (c as isize + d) as usize;
            let mut rhs = prod.get_checked(row, c as usize)?.clone();
            for (idx, prev) in solved.iter().enumerate() {
                let kp = k_min + idx as u32;
                rhs = rhs.sub(&prev.mul(&space.hat_ratio(c as i64, kp)));
            }
            let coeff = rhs.checked_div(&space.hat_ratio(c as i64, c))?;
            solved.push(coeff.clone());
            if c > k_cap as u32 && !coeff.is_zero() {
                return Err(Error::SolveInconsistent(format!(
                    "support did not close: offset {d}, z*-degree {c} nonzero"
                )));
            }
            out.add_term((c as isize + d) as u32, c, coeff);
        }
    }
    // homomorphism post-condition: Q(out) reproduces the product
    let check = hat_apply(&out, space, dim)?;
    let block = prod.valid_end();
    if !check.agree_on(&prod, block) {
        return Err(Error::SolveInconsistent(
            "re-expansion does not reproduce the Q-image product".into(),
        ));
    }
    Ok(out)
}

/// Left/right one-sided multiplications commute with the star product:
/// convenience for `z^i f1 * f2 z*^j` style identities.
pub fn star_monomials(
    j1: u32,
    k1: u32,
    j2: u32,
    k2: u32,
    space: &WeightedSpace<TSeries>,
) -> Result<FormalElement> {
    let one = space.t().one();
    let f1 = OrderedElement::monomial(OrderTag::Normal, j1, k1, one.clone());
    let f2 = OrderedElement::monomial(OrderTag::Normal, j2, k2, one);
    star_operator_route(&f1, &f2, space)
}

/// The coefficient series `c_k` of the normal-ordered expansion of
/// `zhat* zhat = sum_k c_k zhat^k zhat*^k`, computed BOTH by the triangular
/// solve of the defining column equations and by extracting `u^k`
/// coefficients of the closed-form generating function
/// `c(u) = 1 - (1 - t) sum_{j>=1} t^{j-1} q^{2j} (u; q^2)_j /
/// (t q^2 u; q^2)_j`. The two must agree exactly; disagreement is an
/// internal error.
pub fn c_series(k_max: u32, n_t: usize, ctx: &QContext) -> Result<Vec<TSeries>> {
    let space = WeightedSpace::formal(ctx.clone(), n_t);
    // triangular solve of sum_{k<=m} c_k ratio(m, k) = w_{m+1}
    let mut solved: Vec<TSeries> = Vec::new();
    for m in 0..=k_max {
        let mut rhs = space.lowering_weight(m + 1);
        for (k, prev) in solved.iter().enumerate() {
            rhs = rhs.sub(&prev.mul(&space.hat_ratio(m as i64, k as u32)));
        }
        let coeff = rhs.checked_div(&space.hat_ratio(m as i64, m))?;
        solved.push(coeff);
    }
    // closed form via polynomial-in-u arithmetic over the series ring
    let closed = c_series_closed_form(k_max, n_t, ctx);
    if solved != closed {
        return Err(Error::CrossCheckFailed(
            "triangular c-series solve disagrees with the closed form".into(),
        ));
    }
    Ok(solved)
}

/// Closed-form route: expand the generating function in `u` to degree
/// `k_max`, coefficients exact in the truncated series ring.
pub fn c_series_closed_form(k_max: u32, n_t: usize, ctx: &QContext) -> Vec<TSeries> {
    let deg = k_max as usize;
    let one = TSeries::constant(rat_one(), n_t);
    let t = TSeries::variable(n_t);
    // u-polynomials as coefficient vectors over TSeries
    let mut acc: Vec<TSeries> = vec![TSeries::zeros(n_t); deg + 1];
    acc[0] = one.clone();
    let one_minus_t = one.sub(&t);
    for j in 1..=(n_t as i64 + 1) {
        // prefactor -(1 - t) t^{j-1} q^{2j}
        let mut pref = one_minus_t.neg().scale(&ctx.q2_pow(j));
        pref = pref.shift_up(j as usize - 1);
        if pref.is_zero() {
            break;
        }
        // (u; q^2)_j as a u-polynomial
        let mut num: Vec<TSeries> = vec![TSeries::zeros(n_t); deg + 1];
        num[0] = one.clone();
        for i in 0..j {
            num = upoly_mul_linear(&num, &one, &TSeries::constant(-ctx.q2_pow(i), n_t));
        }
        // 1 / (t q^2 u; q^2)_j: product of geometric series in u
        let mut den_inv: Vec<TSeries> = vec![TSeries::zeros(n_t); deg + 1];
        den_inv[0] = one.clone();
        for i in 0..j {
            // 1/(1 - t q^{2(i+1)} u) = sum_s (t q^{2(i+1)})^s u^s
            let base = t.scale(&ctx.q2_pow(i + 1));
            let mut geo: Vec<TSeries> = Vec::with_capacity(deg + 1);
            let mut pw = one.clone();
            for _ in 0..=deg {
                geo.push(pw.clone());
                pw = pw.mul(&base);
            }
            den_inv = upoly_mul(&den_inv, &geo);
        }
        let frac = upoly_mul(&num, &den_inv);
        for (k, c) in frac.iter().enumerate() {
            acc[k] = acc[k].add(&pref.mul(c));
        }
    }
    acc
}

fn upoly_mul(a: &[TSeries], b: &[TSeries]) -> Vec<TSeries> {
    let deg = a.len() - 1;
    let order = a[0].order();
    let mut out = vec![TSeries::zeros(order); deg + 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if i + j > deg {
                break;
            }
            if cb.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    out
}

fn upoly_mul_linear(a: &[TSeries], c0: &TSeries, c1: &TSeries) -> Vec<TSeries> {
    // a * (c0 + c1 u), truncated at the same degree
    let deg = a.len() - 1;
    let order = a[0].order();
    let mut out = vec![TSeries::zeros(order); deg + 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        out[i] = out[i].add(&ca.mul(c0));
        if i + 1 <= deg {
            out[i + 1] = out[i + 1].add(&ca.mul(c1));
        }
    }
    out
}

/// The star product by the asymptotic route:
/// `f1 * f2 = (1 - t) sum_{j <= N_t} t^j m(p_j(box~) f1 (x) f2)`, with
/// `box~` iterated under the given convention. The telescoped `t^n`
/// coefficient is `m((p_n - p_{n-1})(box~) ...)`.
pub fn star_asymptotic_route(
    f1: &OrderedElement<Rat>,
    f2: &OrderedElement<Rat>,
    n_t: usize,
    conv: Convention,
    ctx: &QContext,
) -> Result<FormalElement> {
    if f1.ord() != OrderTag::Normal || f2.ord() != OrderTag::Normal {
        return Err(Error::OrderIncompatible);
    }
    let proto = TSeries::variable(n_t);
    let base = TensorElement::from_pair(f1, f2)?;
    // iterated box~ powers applied to the base tensor, then multiplied out
    let mut multiplied: Vec<OrderedElement<Rat>> = Vec::with_capacity(n_t + 1);
    let mut power = base;
    multiplied.push(power.multiply(ctx));
    for _ in 0..n_t {
        power = box_tilde(&power, conv, ctx);
        multiplied.push(power.multiply(ctx));
    }
    // p_j coefficient table
    let polys: Vec<Vec<Rat>> = (0..=n_t as u32).map(|j| p_poly(j, ctx).coeffs).collect();
    // t^n coefficient of the result per monomial
    let mut per_order: Vec<OrderedElement<Rat>> = Vec::with_capacity(n_t + 1);
    for n in 0..=n_t {
        let mut layer = OrderedElement::new(OrderTag::Normal);
        for (k, m_k) in multiplied.iter().enumerate() {
            let cur = polys[n].get(k).cloned().unwrap_or_else(rat_zero);
            let prevc = if n == 0 {
                rat_zero()
            } else {
                polys[n - 1].get(k).cloned().unwrap_or_else(rat_zero)
            };
            let w = cur - prevc;
            if Zero::is_zero(&w) {
                continue;
            }
            layer = layer.try_add(&m_k.scale_rat(&w))?;
        }
        per_order.push(layer);
    }
    // assemble series coefficients per monomial
    let mut keys: BTreeMap<(u32, u32), TSeries> = BTreeMap::new();
    for (n, layer) in per_order.iter().enumerate() {
        for (&(j, k), c) in layer.terms() {
            let e = keys
                .entry((j, k))
                .or_insert_with(|| TSeries::zeros(n_t));
            let mut updated = e.clone();
            updated.set_coeff(n, c.clone());
            *e = updated;
        }
    }
    let mut out: FormalElement = OrderedElement::new(OrderTag::Normal);
    for ((j, k), series) in keys {
        out.add_term(j, k, series);
    }
    let _ = proto;
    Ok(out)
}

/// One mismatch between the two routes.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteMismatch {
    pub t_order: usize,
    pub z_pow: u32,
    pub zstar_pow: u32,
    pub operator: String,
    pub asymptotic: String,
}

/// Coefficient-by-coefficient comparison report between the operator route
/// and the asymptotic route at a fixed convention.
#[derive(Debug, Clone)]
pub struct RouteReport {
    pub pass: bool,
    pub mismatches: Vec<RouteMismatch>,
}

/// Compare the two routes on a pair of rational polynomials, exactly, to
/// the series order of the ambient space.
pub fn compare_routes(
    f1: &OrderedElement<Rat>,
    f2: &OrderedElement<Rat>,
    n_t: usize,
    conv: Convention,
    ctx: &QContext,
) -> Result<RouteReport> {
    let space = WeightedSpace::formal(ctx.clone(), n_t);
    let lhs = star_operator_route(
        &lift_element(f1, space.t()),
        &lift_element(f2, space.t()),
        &space,
    )?;
    let rhs = star_asymptotic_route(f1, f2, n_t, conv, ctx)?;
    let mut keys: std::collections::BTreeSet<(u32, u32)> = Default::default();
    for (&k, _) in lhs.terms() {
        keys.insert(k);
    }
    for (&k, _) in rhs.terms() {
        keys.insert(k);
    }
    let zero = TSeries::zeros(n_t);
    let mut mismatches = Vec::new();
    for (j, k) in keys {
        let a = lhs.coeff(j, k).unwrap_or(&zero);
        let b = rhs.coeff(j, k).unwrap_or(&zero);
        if a != b {
            for n in 0..=n_t {
                if a.coeff(n) != b.coeff(n) {
                    mismatches.push(RouteMismatch {
                        t_order: n,
                        z_pow: j,
                        zstar_pow: k,
                        operator: a.coeff(n).to_string(),
                        asymptotic: b.coeff(n).to_string(),
                    });
                }
            }
        }
    }
    Ok(RouteReport {
        pass: mismatches.is_empty(),
        mismatches,
    })
}

/// The calibration probe set: the four products whose low `t`-orders pin
/// down the derivative convention.
pub fn calibration_probes(ctx: &QContext) -> Vec<(OrderedElement<Rat>, OrderedElement<Rat>)> {
    let one = rat_one();
    let z = OrderedElement::z_pow(1, &one);
    let z2 = OrderedElement::z_pow(2, &one);
    let zs = OrderedElement::zstar_pow(1, &one);
    let zs2 = OrderedElement::zstar_pow(2, &one);
    let zzs = OrderedElement::monomial(OrderTag::Normal, 1, 1, one.clone());
    // z* z as a normal-ordered element
    let zsz = reorder(
        &OrderedElement::monomial(OrderTag::AntiNormal, 1, 1, one),
        OrderTag::Normal,
        ctx,
    );
    vec![(zs.clone(), z.clone()), (zs2, z), (zs, z2), (zzs, zsz)]
}

/// Enumerate the convention space and return the unique convention under
/// which the asymptotic route matches the operator route on the probe set
/// to order `min(n_t, 2)`. Zero or several matches are reported as errors
/// carrying the per-convention residual table.
pub fn calibrate_convention(n_t: usize, ctx: &QContext) -> Result<Convention> {
    let order = n_t.min(2);
    let probes = calibration_probes(ctx);
    let mut matches = Vec::new();
    let mut table = String::new();
    for conv in Convention::all() {
        let mut residuals = 0usize;
        for (f1, f2) in &probes {
            let report = compare_routes(f1, f2, order, conv, ctx)?;
            residuals += report.mismatches.len();
        }
        table.push_str(&format!("  {conv}: {residuals} residual coefficient(s)\n"));
        if residuals == 0 {
            matches.push(conv);
        }
    }
    match matches.len() {
        1 => Ok(matches[0]),
        0 => Err(Error::NoConventionMatches(table)),
        _ => Err(Error::AmbiguousConvention(
            matches
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        )),
    }
}

/// Star-product associativity through the operator route, for explicit
/// triples.
pub fn associativity_holds(
    f1: &FormalElement,
    f2: &FormalElement,
    f3: &FormalElement,
    space: &WeightedSpace<TSeries>,
) -> Result<bool> {
    let left = star_operator_route(&star_operator_route(f1, f2, space)?, f3, space)?;
    let right = star_operator_route(f1, &star_operator_route(f2, f3, space)?, space)?;
    Ok(left == right)
}

/// The unit monomials with `z`-degree `j` and `z*`-degree `k` over the
/// series ring, for enumerations.
pub fn formal_monomial(j: u32, k: u32, n_t: usize) -> FormalElement {
    OrderedElement::monomial(
        OrderTag::Normal,
        j,
        k,
        TSeries::constant(rat_one(), n_t),
    )
}

/// Product compatibility with one-sided multiplications:
/// `(z^i f1) * (f2 z*^j) = z^i (f1 * f2) z*^j`.
pub fn one_sided_compatibility(
    f1: &FormalElement,
    f2: &FormalElement,
    i: u32,
    j: u32,
    space: &WeightedSpace<TSeries>,
) -> Result<bool> {
    let lhs = star_operator_route(&f1.lmul_z(i)?, &f2.rmul_zstar(j)?, space)?;
    let rhs = star_operator_route(f1, f2, space)?
        .lmul_z(i)?
        .rmul_zstar(j)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    fn space(n_t: usize) -> WeightedSpace<TSeries> {
        WeightedSpace::formal(ctx(), n_t)
    }

    #[test]
    fn unit_is_neutral() {
        let sp = space(3);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let mut f: FormalElement = OrderedElement::new(OrderTag::Normal);
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=2),
                    rng.gen_range(0..=2),
                    TSeries::constant(
                        rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                        3,
                    ),
                );
            }
            let one = OrderedElement::one(OrderTag::Normal, sp.t());
            assert_eq!(star_operator_route(&one, &f, &sp).unwrap(), f);
            assert_eq!(star_operator_route(&f, &one, &sp).unwrap(), f);
        }
    }

    #[test]
    fn holomorphic_factors_multiply_freely() {
        let sp = space(3);
        let z = formal_monomial(1, 0, 3);
        let z2 = formal_monomial(2, 0, 3);
        let p = star_operator_route(&z, &z, &sp).unwrap();
        assert_eq!(p, z2);
    }

    #[test]
    fn zstar_star_z_classical_layer() {
        // t^0 layer of z* * z is (1 - q^2) + q^2 zz*
        let sp = space(2);
        let p = star_monomials(0, 1, 1, 0, &sp).unwrap();
        let c00 = p.coeff(0, 0).unwrap();
        let c11 = p.coeff(1, 1).unwrap();
        assert_eq!(c00.coeff(0), &(rat_one() - sp.ctx().q2()));
        assert_eq!(c11.coeff(0), sp.ctx().q2());
    }

    #[test]
    fn zstar_star_z_first_layer_matches_hand_value() {
        // t^1 layer: q^2 (1 - q^2) (1 - (1 + q^2) u + q^2 u^2) on u^k = z^k z*^k
        let sp = space(2);
        let q2 = sp.ctx().q2().clone();
        let p = star_monomials(0, 1, 1, 0, &sp).unwrap();
        let base = &q2 * (rat_one() - &q2);
        assert_eq!(p.coeff(0, 0).unwrap().coeff(1), &base);
        assert_eq!(
            p.coeff(1, 1).unwrap().coeff(1),
            &(-&base * (rat_one() + &q2))
        );
        assert_eq!(p.coeff(2, 2).unwrap().coeff(1), &(&base * &q2));
    }

    #[test]
    fn q_image_injectivity_probe() {
        let sp = space(3);
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..10 {
            let mut f: FormalElement = OrderedElement::new(OrderTag::Normal);
            for _ in 0..rng.gen_range(1..=3) {
                f.add_term(
                    rng.gen_range(0..=3),
                    rng.gen_range(0..=3),
                    TSeries::constant(
                        rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)),
                        3,
                    ),
                );
            }
            let img = q_image(&f, &sp, 12).unwrap();
            assert_eq!(f.is_zero(), img.matrix.is_zero_block());
        }
    }

    #[test]
    fn q_image_is_homomorphism_on_products() {
        let sp = space(2);
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..5 {
            let f1 = formal_monomial(rng.gen_range(0..=2), rng.gen_range(0..=2), 2);
            let f2 = formal_monomial(rng.gen_range(0..=2), rng.gen_range(0..=2), 2);
            let prod = star_operator_route(&f1, &f2, &sp).unwrap();
            let dim = 14;
            let qa = q_image(&f1, &sp, dim).unwrap().matrix;
            let qb = q_image(&f2, &sp, dim).unwrap().matrix;
            let qp = q_image(&prod, &sp, dim).unwrap().matrix;
            let ab = qa.mul(&qb);
            assert!(qp.agree_on(&ab, ab.valid_end()));
        }
    }

    #[test]
    fn c_series_cross_check_and_classical_layer() {
        let ctx = ctx();
        let c = c_series(8, 4, &ctx).unwrap();
        // t^0 layer: c_0 = 1 - q^2, c_1 = q^2, others 0
        assert_eq!(c[0].coeff(0), &(rat_one() - ctx.q2()));
        assert_eq!(c[1].coeff(0), ctx.q2());
        for k in 2..=8usize {
            assert!(Zero::is_zero(c[k].coeff(0)), "k={k}");
        }
        // t^1 layer is a degree-2 polynomial in the u-slot
        for (k, ck) in c.iter().enumerate() {
            if k > 2 {
                assert!(Zero::is_zero(ck.coeff(1)), "t^1 layer degree, k={k}");
            }
        }
        // c_k has t-order at least k - 1
        for (k, ck) in c.iter().enumerate().skip(2) {
            for n in 0..k - 1 {
                if n <= 4 {
                    assert!(Zero::is_zero(ck.coeff(n)), "k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn c_series_matches_hat_normal_order_of_lowering_raising() {
        let ctx = ctx();
        let n_t = 3;
        let sp = WeightedSpace::formal(ctx.clone(), n_t);
        let c = c_series(5, n_t, &ctx).unwrap();
        let zsz = reorder(
            &OrderedElement::monomial(OrderTag::AntiNormal, 1, 1, TSeries::constant(rat_one(), n_t)),
            OrderTag::Normal,
            &ctx,
        );
        let star = star_operator_route(
            &lift_element(&OrderedElement::zstar_pow(1, &rat_one()), sp.t()),
            &lift_element(&OrderedElement::z_pow(1, &rat_one()), sp.t()),
            &sp,
        )
        .unwrap();
        let _ = zsz;
        for (k, ck) in c.iter().enumerate() {
            let got = star
                .coeff(k as u32, k as u32)
                .cloned()
                .unwrap_or_else(|| TSeries::zeros(n_t));
            assert_eq!(&got, ck, "k={k}");
        }
    }

    #[test]
    fn calibration_selects_unique_convention() {
        let ctx = ctx();
        let conv = calibrate_convention(2, &ctx).unwrap();
        assert_eq!(conv, Convention::calibrated());
        // stable across q
        let ctx2 = QContext::new(rat(3, 5)).unwrap();
        assert_eq!(calibrate_convention(2, &ctx2).unwrap(), Convention::calibrated());
    }

    #[test]
    fn routes_agree_beyond_calibration_order() {
        let ctx = ctx();
        let conv = Convention::calibrated();
        let z = OrderedElement::z_pow(1, &rat_one());
        let zs = OrderedElement::zstar_pow(1, &rat_one());
        let report = compare_routes(&zs, &z, 4, conv, &ctx).unwrap();
        assert!(report.pass, "{:?}", report.mismatches);
    }

    #[test]
    fn unit_probe_matches_under_every_convention() {
        // derivative-free order-0 agreement
        let ctx = ctx();
        let z = OrderedElement::z_pow(1, &rat_one());
        let zs = OrderedElement::zstar_pow(1, &rat_one());
        for conv in Convention::all() {
            let report = compare_routes(&zs, &z, 0, conv, &ctx).unwrap();
            assert!(report.pass, "conv {conv}");
        }
    }

    #[test]
    fn associativity_small_sample() {
        let sp = space(2);
        let monos = [(0u32, 1u32), (1, 0), (1, 1), (2, 0)];
        for &(a, b) in &monos {
            for &(c, d) in &monos {
                for &(e, f) in &monos[..2] {
                    let f1 = formal_monomial(a, b, 2);
                    let f2 = formal_monomial(c, d, 2);
                    let f3 = formal_monomial(e, f, 2);
                    assert!(
                        associativity_holds(&f1, &f2, &f3, &sp).unwrap(),
                        "({a},{b}) ({c},{d}) ({e},{f})"
                    );
                }
            }
        }
    }

    #[test]
    fn one_sided_multiplications_commute_with_star() {
        let sp = space(2);
        let f1 = formal_monomial(0, 2, 2);
        let f2 = formal_monomial(1, 1, 2);
        for i in 0..=2 {
            for j in 0..=2 {
                assert!(one_sided_compatibility(&f1, &f2, i, j, &sp).unwrap());
            }
        }
    }

    #[test]
    fn berezin_factor_of_star() {
        // z*^m * z^k equals the Berezin transform of z*^m z^k
        let ctx = ctx();
        let n_t = 3;
        let sp = WeightedSpace::formal(ctx.clone(), n_t);
        for m in 0..=2u32 {
            for k in 0..=2u32 {
                let star = star_monomials(0, m, k, 0, &sp).unwrap();
                let anti = OrderedElement::monomial(
                    OrderTag::AntiNormal,
                    m,
                    k,
                    TSeries::constant(rat_one(), n_t),
                );
                let ber =
                    crate::berezin::berezin_anti_poly(&anti, &sp, m + k + n_t as u32 + 2)
                        .unwrap();
                assert_eq!(star, ber, "m={m} k={k}");
            }
        }
    }
}
