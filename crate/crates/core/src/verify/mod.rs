//! Verification suites and machine-readable reports.
//!
//! Each suite runs a family of exact identity checks and returns one record
//! per check; the report is deterministic for a fixed configuration (records
//! are sorted by id and no wall-clock data is included). Suite names form a
//! stable registry:
//!
//! | suite | contents |
//! |---|---|
//! | `identities-qscalar`   | Pochhammer / q-binomial / series-ring identities |
//! | `ordering-roundtrips`  | ordering solves invert the representation |
//! | `toeplitz-consistency` | Toeplitz routes, pairing duality, limit shadow |
//! | `berezin-f0`           | vacuum Berezin expansion and delta identity |
//! | `lemma33`              | expansion polynomials vs terminating series |
//! | `star-routes`          | calibration, route comparison, associativity |
//! | `c-series`             | lowering-raising series, solve vs closed form |
//! | `kernels-appendix`     | kernel projections and factorizations |
//! | `all`                  | everything above |

use crate::bergman::{
    f0_delta_identity, f0hat_normal_coeff, hat_adjoint, hat_apply, hat_normal_order, toeplitz,
    toeplitz_anti_poly, toeplitz_integral_form, WeightedSpace,
};
use crate::berezin::{
    berezin, duality_pairing, expansion_check_f0, p_poly, symbol_routes_agree,
};
use crate::disc::{
    anti_normal_order, finite_to_matrix, inner_product_poly, integrate_matrix, normal_order,
    reorder, to_matrix, Convention, FiniteElement,
    Measure, OpMatrix, OrderTag, OrderedElement,
};
use crate::error::Error;
use crate::kernels::{pfp_kernel, pfp_matrix_element_check, project_kernel, HalfIntWeight};
use crate::qscalar::{
    box_eigenvalue, phi32_terminating, qbinom_expand, qbinom_expand_reciprocal, qpoch, rat,
    rat_one, rat_zero, QContext, Rat, Scalar, TSeries,
};
use crate::star::{
    c_series, calibrate_convention, compare_routes, formal_monomial,
    one_sided_compatibility, q_image, star_operator_route, FormalElement,
};
use num::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SUITES: &[&str] = &[
    "identities-qscalar",
    "ordering-roundtrips",
    "toeplitz-consistency",
    "berezin-f0",
    "lemma33",
    "star-routes",
    "c-series",
    "kernels-appendix",
];

/// Resolved verification configuration.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub ctx: QContext,
    /// numeric weight, if one was configured (`None` = formal-only)
    pub t: Option<Rat>,
    pub n_t: usize,
    pub m: usize,
    pub n_f: u32,
    pub s: u32,
    /// a fixed convention, or `None` to calibrate
    pub convention: Option<Convention>,
}

impl VerifyConfig {
    pub fn default_with(ctx: QContext) -> Self {
        VerifyConfig {
            ctx,
            t: Some(rat(1, 3)),
            n_t: 4,
            m: 24,
            n_f: 12,
            s: 5,
            convention: None,
        }
    }

    fn numeric_t(&self) -> Rat {
        self.t.clone().unwrap_or_else(|| rat(1, 3))
    }

    fn numeric_space(&self) -> WeightedSpace<Rat> {
        WeightedSpace::numeric(self.ctx.clone(), self.numeric_t()).expect("validated weight")
    }

    fn formal_space(&self) -> WeightedSpace<TSeries> {
        WeightedSpace::formal(self.ctx.clone(), self.n_t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One verification record. `paper_ref` names the identity or construction
/// the check exercises.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub paper_ref: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

fn ck(id: &str, reference: &str, pass: bool, detail: String) -> CheckRecord {
    CheckRecord {
        id: id.to_string(),
        paper_ref: reference.to_string(),
        status: if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
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

fn random_ordered(rng: &mut StdRng, ord: OrderTag, deg: u32) -> OrderedElement<Rat> {
    let mut e = OrderedElement::new(ord);
    for _ in 0..rng.gen_range(1..=5) {
        e.add_term(
            rng.gen_range(0..=deg),
            rng.gen_range(0..=deg),
            rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9)),
        );
    }
    e
}

pub fn suite_identities_qscalar(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x1001);

    let mut ok = true;
    for _ in 0..40 {
        let a = rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
        let b = rat(rng.gen_range(1i64..=9), rng.gen_range(1i64..=9));
        let m = rng.gen_range(0u32..=20);
        let n = rng.gen_range(0u32..=20);
        let shifted = &a * num::traits::Pow::pow(b.clone(), m as i32);
        if qpoch(&a, &b, m + n) != qpoch(&a, &b, m) * qpoch(&shifted, &b, n) {
            ok = false;
        }
    }
    out.push(ck(
        "qscalar/pochhammer-splitting",
        "q-Pochhammer splitting (a;b)_{m+n} = (a;b)_m (a b^m;b)_n",
        ok,
        "40 random rational samples, m,n <= 20".into(),
    ));

    let mut ok = true;
    for _ in 0..10 {
        let c = rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
        let a = qbinom_expand(&c, ctx, cfg.n_t + 4);
        let b = qbinom_expand_reciprocal(&c, ctx, cfg.n_t + 4);
        if a.mul(&b) != TSeries::constant(rat_one(), cfg.n_t + 4) {
            ok = false;
        }
    }
    out.push(ck(
        "qscalar/qbinom-reciprocal",
        "q-binomial series times its reciprocal partner is 1",
        ok,
        format!("10 random parameters, order {}", cfg.n_t + 4),
    ));

    let mut ok = true;
    for _ in 0..20 {
        let j = rng.gen_range(0u32..=10);
        let a2 = rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=6));
        let a3 = rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=6));
        if phi32_terminating(j, &a2, &a3, ctx) != phi32_terminating(j, &a3, &a2, ctx) {
            ok = false;
        }
    }
    out.push(ck(
        "qscalar/phi32-symmetry",
        "terminating 3-phi-2 is symmetric in its middle parameters",
        ok,
        "20 random parameter pairs".into(),
    ));

    let eig_ok = box_eigenvalue(&rat_one(), ctx).unwrap() == rat_zero()
        && box_eigenvalue(&ctx.q2_pow(-1), ctx).unwrap() == rat_zero();
    out.push(ck(
        "qscalar/box-eigenvalue-zeros",
        "Laplace-Beltrami eigenvalue vanishes on the constant directions",
        eig_ok,
        "s = 1 and s = q^{-2}".into(),
    ));
    out
}

pub fn suite_ordering_roundtrips(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x2002);
    let one = rat_one();

    let mut ok = true;
    for trial in 0..100 {
        let ord = if trial % 2 == 0 {
            OrderTag::Normal
        } else {
            OrderTag::AntiNormal
        };
        let e = random_ordered(&mut rng, ord, 5);
        let m = to_matrix(&e, 16, ctx, &one);
        let back = match ord {
            OrderTag::Normal => normal_order(&m, 5, ctx),
            OrderTag::AntiNormal => anti_normal_order(&m, 5, ctx),
        };
        if back.as_ref().ok() != Some(&e) {
            ok = false;
        }
    }
    out.push(ck(
        "ordering/representation-roundtrip",
        "unique ordered decomposition inverts the representation",
        ok,
        "100 random sparse elements, degree <= 5, both orders".into(),
    ));

    let sp = cfg.numeric_space();
    let mut ok = true;
    for _ in 0..100 {
        let e = random_ordered(&mut rng, OrderTag::Normal, 5);
        let m = hat_apply(&e, &sp, 14).unwrap();
        if hat_normal_order(&m, 5, &sp).ok() != Some(e) {
            ok = false;
        }
    }
    out.push(ck(
        "ordering/hat-roundtrip",
        "weighted-shift normal ordering inverts its application",
        ok,
        "100 random sparse coefficient maps, degree <= 5".into(),
    ));

    // generator relation on the reliable block
    let m = cfg.m.min(16);
    let z = crate::disc::rep_generator(&crate::disc::Generator::<Rat>::Z, m, ctx, &one).unwrap();
    let zs =
        crate::disc::rep_generator(&crate::disc::Generator::<Rat>::ZStar, m, ctx, &one).unwrap();
    let lhs = zs.mul(&z).sub(&z.mul(&zs).scale(ctx.q2()));
    let rhs = OpMatrix::identity(m, &one).scale(&(rat_one() - ctx.q2()));
    out.push(ck(
        "ordering/generator-relation",
        "lowering-raising commutation relation of the disc algebra",
        lhs.agree_on(&rhs, m - 1),
        format!("block {}", m - 1),
    ));
    out
}

pub fn suite_toeplitz_consistency(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let sp = cfg.numeric_space();
    let mut out = Vec::new();

    // trace form vs projection-kernel integral form on the full monomial grid
    let bound = 4u32;
    let dim = 7usize;
    let mut ok = true;
    let mut count = 0usize;
    'outer: for a in 0..=bound {
        for n in 0..=bound {
            for b in 0..=bound {
                let f = FiniteElement::<Rat>::monomial(a, n, b, rat_one());
                let ta = toeplitz(&f, &sp, dim);
                let tb = toeplitz_integral_form(&f, &sp, dim).unwrap();
                count += 1;
                if !ta.matrix.agree_on(&tb.matrix, dim) {
                    ok = false;
                    break 'outer;
                }
            }
        }
    }
    out.push(ck(
        "toeplitz/trace-vs-integral",
        "trace summation vs projection-kernel integral for Toeplitz entries",
        ok,
        format!("{count} monomial symbols, indices < {dim}"),
    ));

    // polynomial-symbol coherence via the Gram pairing, formal weight
    let spf = cfg.formal_space();
    let mut ok = true;
    for j in 0..=2u32 {
        for k in 0..=2u32 {
            let p = OrderedElement::monomial(OrderTag::AntiNormal, j, k, spf.t().one());
            let op = toeplitz_anti_poly(&p, &spf, 12).unwrap();
            for jp in 0..=2u32 {
                for m in 0..=3u32 {
                    // (z*^j z^k z^{jp}, z^m) / gram(m)
                    let sym = reorder(
                        &OrderedElement::monomial(
                            OrderTag::AntiNormal,
                            j,
                            k + jp,
                            spf.t().one(),
                        ),
                        OrderTag::Normal,
                        ctx,
                    );
                    let zm = OrderedElement::z_pow(m, spf.t());
                    let pairing = inner_product_poly(&sym, &zm, spf.t(), ctx).unwrap();
                    let expect = pairing.checked_div(&spf.gram(m)).unwrap();
                    let r = jp as i64 + k as i64 - j as i64;
                    let got = if r < 0 || r as usize >= 12 {
                        spf.t().zero()
                    } else {
                        // column jp maps into row jp + k - j
                        op.matrix.get(r as usize, jp as usize).clone()
                    };
                    let got_at_m = if r == m as i64 { got } else { spf.t().zero() };
                    let expect_at_m = if r == m as i64 { expect } else { spf.t().zero() };
                    if got_at_m != expect_at_m {
                        ok = false;
                    }
                }
            }
        }
    }
    out.push(ck(
        "toeplitz/polynomial-symbol-coherence",
        "anti-normal polynomial symbols quantize to composed weighted shifts",
        ok,
        "degrees <= 2, formal weight".into(),
    ));

    // self-adjointness transport
    let mut rng = StdRng::seed_from_u64(0x3003);
    let mut ok = true;
    for _ in 0..10 {
        let f = random_finite(&mut rng, 3);
        let a = toeplitz(&f, &sp, 9);
        let b = toeplitz(&f.involution(), &sp, 9);
        if !hat_adjoint(&a.matrix, &sp).unwrap().agree_on(&b.matrix, 9) {
            ok = false;
        }
    }
    out.push(ck(
        "toeplitz/self-adjointness",
        "Gram adjoint of a Toeplitz operator is the Toeplitz of the star symbol",
        ok,
        "10 random finite symbols".into(),
    ));

    // duality pairing
    let mut ok = true;
    for _ in 0..10 {
        let f = random_finite(&mut rng, 3);
        let psi = random_finite(&mut rng, 3);
        let (lhs, rhs) = duality_pairing(&f, &psi, &sp).unwrap();
        if lhs != rhs {
            ok = false;
        }
    }
    out.push(ck(
        "toeplitz/trace-duality",
        "invariant pairing with the transform equals the quantized-trace pairing",
        ok,
        "10 random finite pairs at the numeric weight".into(),
    ));

    // limit shadow: constant t-term of (1-q^2)/(1-t) (psi, psi) equals
    // the vacuum-compressed invariant norm
    let mut ok = true;
    let spf = cfg.formal_space();
    for _ in 0..10 {
        let mut psi = OrderedElement::<TSeries>::new(OrderTag::Normal);
        for _ in 0..rng.gen_range(1..=4) {
            psi.add_term(
                rng.gen_range(0..=5),
                0,
                TSeries::constant(
                    rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9)),
                    cfg.n_t,
                ),
            );
        }
        let norm = inner_product_poly(&psi, &psi, spf.t(), ctx).unwrap();
        let scaled = norm
            .mul_rat(&(rat_one() - ctx.q2()))
            .checked_div(&spf.one_minus_t())
            .unwrap();
        // (psi f_0, psi f_0) under the invariant measure
        let psi_rat = psi.map_coeffs(|c| c.constant_term().clone());
        let mut psi_f0 = FiniteElement::<Rat>::new();
        for (&(i, _), c) in psi_rat.terms() {
            psi_f0.add_term(i, 0, 0, c.clone());
        }
        let m = finite_to_matrix(&psi_f0, 10, ctx, &rat_one()).unwrap();
        let m_star = finite_to_matrix(&psi_f0.involution(), 10, ctx, &rat_one()).unwrap();
        let rhs = integrate_matrix(&m_star.mul(&m), &Measure::Invariant, ctx).unwrap();
        if scaled.constant_term() != &rhs {
            ok = false;
        }
    }
    out.push(ck(
        "toeplitz/infinite-weight-limit",
        "constant weight-term of polynomial norms is the vacuum-sector norm",
        ok,
        "10 random polynomials, degree <= 5".into(),
    ));
    out
}

pub fn suite_berezin_f0(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();

    let ok = expansion_check_f0(ctx, cfg.n_t.max(6), cfg.n_f.min(10).max(6)).unwrap_or(false);
    out.push(ck(
        "berezin/vacuum-expansion",
        "transform of the vacuum equals its geometric radial expansion",
        ok,
        format!(
            "formal weight, orders ({}, {})",
            cfg.n_t.max(6),
            cfg.n_f.min(10).max(6)
        ),
    ));

    // delta identity at the pinned parameter pairs
    let pairs = [
        (rat(1, 2), rat(1, 3)),
        (rat(2, 3), rat(1, 5)),
        (rat(9, 10), rat(1, 2)),
    ];
    let mut ok = true;
    for (q, t) in pairs {
        let ctx_p = QContext::new(q).unwrap();
        let sp = WeightedSpace::numeric(ctx_p, t).unwrap();
        for j in 0..=20 {
            if !f0_delta_identity(j, &sp) {
                ok = false;
            }
        }
    }
    out.push(ck(
        "berezin/rank-one-delta",
        "rank-one normal-form delta identity",
        ok,
        "j = 0..20 at three pinned (q, t) pairs, exact".into(),
    ));

    // normal form of the vacuum Toeplitz operator matches the closed
    // polynomial coefficients, numeric and formal
    let sp = cfg.numeric_space();
    let f0 = FiniteElement::<Rat>::f_n(0, sp.t());
    let op = toeplitz(&f0, &sp, 10);
    let nf = hat_normal_order(&op.matrix, 8, &sp).unwrap();
    let mut ok = true;
    for k in 0..=8u32 {
        let got = nf.coeff(k, k).cloned().unwrap_or_else(rat_zero);
        if got != f0hat_normal_coeff(k, &sp) {
            ok = false;
        }
    }
    out.push(ck(
        "berezin/vacuum-normal-form",
        "closed polynomial coefficients of the vacuum operator normal form",
        ok,
        "k <= 8 at the numeric weight".into(),
    ));

    // Berezin of f_0 at numeric weight: radial geometric sequence
    let b = berezin(&f0, &sp, cfg.n_f).unwrap();
    let radial = b.reduce_radial(ctx);
    let mut ok = radial.is_some();
    if let Some(radial) = radial {
        let mut expect = rat_one() - sp.t();
        for c in radial.iter().take(cfg.n_f as usize + 1) {
            if c != &expect {
                ok = false;
            }
            expect *= sp.t() * ctx.q2();
        }
    }
    out.push(ck(
        "berezin/vacuum-radial-sequence",
        "vacuum transform is the scaled geometric radial power",
        ok,
        format!("radial orders <= {}", cfg.n_f),
    ));

    // two symbol routes on random finite operators
    let mut rng = StdRng::seed_from_u64(0x4004);
    let mut ok = true;
    for _ in 0..10 {
        let mut m = OpMatrix::zeros(6, sp.t());
        for _ in 0..rng.gen_range(1..=4) {
            m.set(
                rng.gen_range(0..4),
                rng.gen_range(0..4),
                rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9)),
            );
        }
        let op = crate::bergman::HatOperator::from_matrix(m.with_support(Some(4), Some(4)));
        if !symbol_routes_agree(&op, &sp, cfg.n_f.max(8)).unwrap_or(false) {
            ok = false;
        }
    }
    out.push(ck(
        "berezin/symbol-route-agreement",
        "trace-pairing symbols agree with coefficient-transfer symbols",
        ok,
        "10 random finite operators".into(),
    ));
    out
}

pub fn suite_lemma33(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();

    let mut ok = true;
    for q in [rat(1, 2), rat(3, 5)] {
        let ctx_q = QContext::new(q).unwrap();
        for j in 0..=12u32 {
            let pj = p_poly(j, &ctx_q);
            for l in 0..=12i64 {
                let x = box_eigenvalue(&ctx_q.q2_pow(l), &ctx_q).unwrap();
                if pj.eval(&x)
                    != phi32_terminating(j, &ctx_q.q2_pow(-l), &ctx_q.q2_pow(l + 1), &ctx_q)
                {
                    ok = false;
                }
            }
        }
    }
    out.push(ck(
        "lemma33/eigenvalue-identity",
        "expansion polynomial at the radial eigenvalue equals the terminating series",
        ok,
        "j, l <= 12 at two base values, exact".into(),
    ));

    let mut ok = true;
    for j in 0..=20u32 {
        if p_poly(j, ctx).eval(&rat_zero()) != rat_one() {
            ok = false;
        }
    }
    out.push(ck(
        "lemma33/unit-at-zero",
        "every expansion polynomial takes value 1 at the zero eigenvalue",
        ok,
        "j <= 20".into(),
    ));
    out
}

pub fn suite_star_routes(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();

    let calibrated = calibrate_convention(cfg.n_t.min(2), ctx);
    let conv = match (&cfg.convention, calibrated) {
        (_, Ok(c)) => {
            let consistent = cfg.convention.map(|fixed| fixed == c).unwrap_or(true);
            out.push(ck(
                "star/calibration",
                "unique derivative convention matching the operator route",
                consistent,
                format!("selected {c}"),
            ));
            c
        }
        (Some(fixed), Err(e)) => {
            out.push(ck(
                "star/calibration",
                "unique derivative convention matching the operator route",
                false,
                format!("calibration failed ({e}); falling back to configured {fixed}"),
            ));
            *fixed
        }
        (None, Err(e)) => {
            out.push(ck(
                "star/calibration",
                "unique derivative convention matching the operator route",
                false,
                e.to_string(),
            ));
            Convention::calibrated()
        }
    };

    // route comparison over the full monomial-pair grid
    let n_t = cfg.n_t.min(4);
    let mut ok = true;
    let mut pairs = Vec::new();
    for a in 0..=2u32 {
        for b in 0..=2u32 {
            pairs.push((
                OrderedElement::zstar_pow(a, &rat_one()),
                OrderedElement::z_pow(b, &rat_one()),
            ));
        }
    }
    for a in 0..=2u32 {
        for b in 0..=2u32 {
            for c in 0..=2u32 {
                for d in 0..=2u32 {
                    pairs.push((
                        OrderedElement::monomial(OrderTag::Normal, a, b, rat_one()),
                        OrderedElement::monomial(OrderTag::Normal, c, d, rat_one()),
                    ));
                }
            }
        }
    }
    let total = pairs.len();
    let mut first_fail = String::new();
    for (f1, f2) in pairs {
        let report = compare_routes(&f1, &f2, n_t, conv, ctx).unwrap();
        if !report.pass {
            ok = false;
            if first_fail.is_empty() {
                first_fail = format!("{:?}", report.mismatches.first());
            }
        }
    }
    out.push(ck(
        "star/route-comparison",
        "asymptotic bidifferential route equals the operator route",
        ok,
        if ok {
            format!("{total} monomial pairs, exact to order {n_t}")
        } else {
            format!("first mismatch: {first_fail}")
        },
    ));

    // associativity through the operator route
    let n_t3 = cfg.n_t.min(3);
    let space = WeightedSpace::formal(ctx.clone(), n_t3);
    let mut monos = Vec::new();
    for d in 0..=2u32 {
        for a in 0..=d {
            monos.push((a, d - a));
        }
    }
    let mut ok = true;
    let mut cache: BTreeMap<((u32, u32), (u32, u32)), FormalElement> = BTreeMap::new();
    let mut star_cached = |x: (u32, u32), y: (u32, u32), space: &WeightedSpace<TSeries>| {
        cache
            .entry((x, y))
            .or_insert_with(|| {
                star_operator_route(
                    &formal_monomial(x.0, x.1, n_t3),
                    &formal_monomial(y.0, y.1, n_t3),
                    space,
                )
                .unwrap()
            })
            .clone()
    };
    let mut checked = 0usize;
    for &m1 in &monos {
        for &m2 in &monos {
            for &m3 in &monos {
                let left = star_operator_route(
                    &star_cached(m1, m2, &space),
                    &formal_monomial(m3.0, m3.1, n_t3),
                    &space,
                )
                .unwrap();
                let right = star_operator_route(
                    &formal_monomial(m1.0, m1.1, n_t3),
                    &star_cached(m2, m3, &space),
                    &space,
                )
                .unwrap();
                checked += 1;
                if left != right {
                    ok = false;
                }
            }
        }
    }
    out.push(ck(
        "star/associativity",
        "star associativity transported through the injective quantization map",
        ok,
        format!("{checked} monomial triples, degree <= 2 each, order {n_t3}"),
    ));

    // one-sided compatibility
    let mut ok = true;
    for i in 0..=2u32 {
        for j in 0..=2u32 {
            let f1 = formal_monomial(0, 1, n_t3);
            let f2 = formal_monomial(1, 1, n_t3);
            if !one_sided_compatibility(&f1, &f2, i, j, &space).unwrap_or(false) {
                ok = false;
            }
        }
    }
    out.push(ck(
        "star/one-sided-compatibility",
        "left and right polynomial multiplications commute with the product",
        ok,
        "shifts <= 2".into(),
    ));

    // homomorphism postcondition
    let mut ok = true;
    for (j1, k1, j2, k2) in [(0u32, 1u32, 1u32, 0u32), (1, 1, 1, 1), (2, 0, 0, 2)] {
        let f1 = formal_monomial(j1, k1, n_t3);
        let f2 = formal_monomial(j2, k2, n_t3);
        let prod = star_operator_route(&f1, &f2, &space).unwrap();
        let dim = 14;
        let ab = q_image(&f1, &space, dim)
            .unwrap()
            .matrix
            .mul(&q_image(&f2, &space, dim).unwrap().matrix);
        let qp = q_image(&prod, &space, dim).unwrap().matrix;
        if !qp.agree_on(&ab, ab.valid_end()) {
            ok = false;
        }
    }
    out.push(ck(
        "star/quantization-homomorphism",
        "the quantization map turns the star product into operator composition",
        ok,
        "3 monomial pairs".into(),
    ));
    out
}

pub fn suite_c_series(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();
    let k_max = 12u32;
    let n_t = cfg.n_t.max(8).min(8);
    match c_series(k_max, n_t, ctx) {
        Ok(c) => {
            out.push(ck(
                "c-series/solve-vs-closed-form",
                "triangular solve equals the closed generating function",
                true,
                format!("k <= {k_max}, order {n_t}"),
            ));
            let classical = c[0].coeff(0) == &(rat_one() - ctx.q2())
                && c[1].coeff(0) == ctx.q2()
                && c.iter().skip(2).all(|s| Zero::is_zero(s.coeff(0)));
            out.push(ck(
                "c-series/classical-layer",
                "order-zero layer of the lowering-raising expansion",
                classical,
                "c_0 = 1 - q^2, c_1 = q^2, rest 0".into(),
            ));
            // defining column equations re-verified directly
            let space = WeightedSpace::formal(ctx.clone(), n_t);
            let mut ok = true;
            for m in 0..=k_max {
                let mut acc = space.t().zero();
                for (k, ck_coeff) in c.iter().enumerate().take(m as usize + 1) {
                    acc = acc.add(&ck_coeff.mul(&space.hat_ratio(m as i64, k as u32)));
                }
                if acc != space.lowering_weight(m + 1) {
                    ok = false;
                }
            }
            out.push(ck(
                "c-series/column-equations",
                "expansion coefficients satisfy the defining column system",
                ok,
                format!("columns <= {k_max}"),
            ));
        }
        Err(e) => {
            out.push(ck(
                "c-series/solve-vs-closed-form",
                "triangular solve equals the closed generating function",
                false,
                e.to_string(),
            ));
        }
    }
    out
}

pub fn suite_kernels_appendix(cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let ctx = &cfg.ctx;
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x5005);

    let mut ok = true;
    let mut count = 0usize;
    for ta in 1..=3u32 {
        let w = HalfIntWeight::new(ta).unwrap();
        for _ in 0..20 {
            let psi = random_finite(&mut rng, 3);
            count += 1;
            if project_kernel(&psi, w, ctx).is_err() {
                ok = false;
            }
        }
    }
    out.push(ck(
        "kernels/projection-agreement",
        "reproducing-kernel projection equals the Gram projection",
        ok,
        format!("{count} random finite elements, three half-integer weights"),
    ));

    let mut ok = true;
    for ta in 1..=3u32 {
        let w = HalfIntWeight::new(ta).unwrap();
        for _ in 0..5 {
            let f = random_finite(&mut rng, 4);
            if pfp_kernel(&f, w, ctx, cfg.s.max(4)).is_err() {
                ok = false;
            }
        }
    }
    out.push(ck(
        "kernels/compressed-kernel-factorization",
        "moment kernel equals the coherent-vector factorization",
        ok,
        "random finite symbols with support <= 4".into(),
    ));

    let mut ok = true;
    for ta in 1..=2u32 {
        let w = HalfIntWeight::new(ta).unwrap();
        for _ in 0..4 {
            let f = random_finite(&mut rng, 2);
            if !pfp_matrix_element_check(&f, w, ctx, 4).unwrap_or(false) {
                ok = false;
            }
        }
    }
    out.push(ck(
        "kernels/matrix-element-oracle",
        "kernel pairings reproduce compressed-operator matrix elements",
        ok,
        "monomial pairings, indices <= 4".into(),
    ));
    out
}

/// Run one named suite.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>, Error> {
    match name {
        "identities-qscalar" => Ok(suite_identities_qscalar(cfg)),
        "ordering-roundtrips" => Ok(suite_ordering_roundtrips(cfg)),
        "toeplitz-consistency" => Ok(suite_toeplitz_consistency(cfg)),
        "berezin-f0" => Ok(suite_berezin_f0(cfg)),
        "lemma33" => Ok(suite_lemma33(cfg)),
        "star-routes" => Ok(suite_star_routes(cfg)),
        "c-series" => Ok(suite_c_series(cfg)),
        "kernels-appendix" => Ok(suite_kernels_appendix(cfg)),
        other => Err(Error::ConfigInvalid(format!(
            "unknown suite {other:?}; known: {:?} plus \"all\"",
            SUITES
        ))),
    }
}

/// Run the selected suites and assemble the deterministic report.
pub fn run_verify(
    suites: &[String],
    cfg: &VerifyConfig,
    config_echo: serde_json::Value,
) -> Result<Report, Error> {
    let mut names: Vec<&str> = Vec::new();
    for s in suites {
        if s == "all" {
            names.extend_from_slice(SUITES);
        } else {
            names.push(s.as_str());
        }
    }
    names.sort_unstable();
    names.dedup();
    let mut checks = Vec::new();
    for name in names {
        checks.extend(run_suite(name, cfg)?);
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let summary = Summary {
        passed: checks
            .iter()
            .filter(|c| c.status == CheckStatus::Pass)
            .count(),
        failed: checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .count(),
        skipped: checks
            .iter()
            .filter(|c| c.status == CheckStatus::Skipped)
            .count(),
    };
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_echo,
        checks,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> VerifyConfig {
        VerifyConfig::default_with(QContext::new(rat(3, 5)).unwrap())
    }

    #[test]
    fn quick_suites_pass() {
        let cfg = cfg();
        for name in ["identities-qscalar", "lemma33", "c-series"] {
            let records = run_suite(name, &cfg).unwrap();
            assert!(!records.is_empty());
            for r in &records {
                assert_eq!(r.status, CheckStatus::Pass, "{}: {}", r.id, r.detail);
            }
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("no-such-suite", &cfg()).is_err());
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = cfg();
        let suites = vec!["lemma33".to_string()];
        let r1 = run_verify(&suites, &cfg, serde_json::json!({})).unwrap();
        let r2 = run_verify(&suites, &cfg, serde_json::json!({})).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }
}
