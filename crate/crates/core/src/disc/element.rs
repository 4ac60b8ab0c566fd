//! Elements of the quantum disc algebra and its distributions: ordered
//! polynomial expansions, finite functions, radial elements, and the exact
//! rewriting between the two monomial orders.
//!
//! The defining relation is `z* z = (1 - q^2) + q^2 z z*`. A normal-ordered
//! element is `sum a_{jk} z^j z*^k`; an anti-normal one is
//! `sum a_{jk} z*^j z^k`. Both expansions are unique, and the rewriting
//! between them is a finite exact computation.

use crate::error::{Error, Result};
use crate::qscalar::{rat_one, rat_zero, QContext, Rat, Scalar};
use num::Zero;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderTag {
    /// `z^j z*^k`
    Normal,
    /// `z*^j z^k`
    AntiNormal,
}

/// Finitely supported coefficient map over ordered monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedElement<S> {
    ord: OrderTag,
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Scalar> OrderedElement<S> {
    pub fn new(ord: OrderTag) -> Self {
        OrderedElement {
            ord,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(ord: OrderTag, j: u32, k: u32, coeff: S) -> Self {
        let mut e = Self::new(ord);
        e.add_term(j, k, coeff);
        e
    }

    /// The unit element (same in both orders).
    pub fn one(ord: OrderTag, proto: &S) -> Self {
        Self::monomial(ord, 0, 0, proto.one())
    }

    /// `z^j` as a normal element.
    pub fn z_pow(j: u32, proto: &S) -> Self {
        Self::monomial(OrderTag::Normal, j, 0, proto.one())
    }

    /// `z*^k` as a normal element.
    pub fn zstar_pow(k: u32, proto: &S) -> Self {
        Self::monomial(OrderTag::Normal, 0, k, proto.one())
    }

    pub fn ord(&self) -> OrderTag {
        self.ord
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, j: u32, k: u32) -> Option<&S> {
        self.terms.get(&(j, k))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn add_term(&mut self, j: u32, k: u32, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((j, k)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if self.ord != o.ord {
            return Err(Error::OrderIncompatible);
        }
        let mut out = self.clone();
        for (&(j, k), c) in &o.terms {
            out.add_term(j, k, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::new(self.ord);
        for (&(j, k), c) in &self.terms {
            out.add_term(j, k, c.mul(s));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        let mut out = Self::new(self.ord);
        for (&(j, k), c) in &self.terms {
            out.add_term(j, k, c.mul_rat(r));
        }
        out
    }

    /// Largest first index, largest second index, and their max.
    pub fn degrees(&self) -> (u32, u32) {
        let mut a = 0;
        let mut b = 0;
        for &(j, k) in self.terms.keys() {
            a = a.max(j);
            b = b.max(k);
        }
        (a, b)
    }

    pub fn max_degree(&self) -> u32 {
        let (a, b) = self.degrees();
        a.max(b)
    }

    /// Left-multiply a normal element by `z^i`.
    pub fn lmul_z(&self, i: u32) -> Result<Self> {
        if self.ord != OrderTag::Normal {
            return Err(Error::OrderIncompatible);
        }
        let mut out = Self::new(OrderTag::Normal);
        for (&(j, k), c) in &self.terms {
            out.add_term(j + i, k, c.clone());
        }
        Ok(out)
    }

    /// Right-multiply a normal element by `z*^i`.
    pub fn rmul_zstar(&self, i: u32) -> Result<Self> {
        if self.ord != OrderTag::Normal {
            return Err(Error::OrderIncompatible);
        }
        let mut out = Self::new(OrderTag::Normal);
        for (&(j, k), c) in &self.terms {
            out.add_term(j, k + i, c.clone());
        }
        Ok(out)
    }

    /// The `*`-involution. Coefficients are real, so only monomials flip:
    /// `(z^j z*^k)* = z^k z*^j` and `(z*^j z^k)* = z*^k z^j`.
    pub fn involution(&self) -> Self {
        let mut out = Self::new(self.ord);
        for (&(j, k), c) in &self.terms {
            out.add_term(k, j, c.clone());
        }
        out
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> OrderedElement<T> {
        let mut out = OrderedElement::new(self.ord);
        for (&(j, k), c) in &self.terms {
            out.add_term(j, k, f(c));
        }
        out
    }
}

/// Rewrite cache for monomial reorderings at a fixed `q`.
///
/// `anti_to_normal(b, c)` expands `z*^b z^c` in the `z^j z*^k` basis and
/// `normal_to_anti(a, b)` expands `z^a z*^b` in the `z*^j z^k` basis.
pub struct Reorderer<'a> {
    ctx: &'a QContext,
    a2n: HashMap<(u32, u32), BTreeMap<(u32, u32), Rat>>,
    n2a: HashMap<(u32, u32), BTreeMap<(u32, u32), Rat>>,
}

impl<'a> Reorderer<'a> {
    pub fn new(ctx: &'a QContext) -> Self {
        Reorderer {
            ctx,
            a2n: HashMap::new(),
            n2a: HashMap::new(),
        }
    }

    /// Normal form of `z*^b z` (helper recursion):
    /// `z*^b z = (1 - q^2) z*^{b-1} + q^2 (z*^{b-1} z) z*`.
    fn zstar_pow_z(&mut self, b: u32) -> BTreeMap<(u32, u32), Rat> {
        if b == 0 {
            return BTreeMap::from([((1, 0), rat_one())]);
        }
        let prev = self.anti_to_normal(b - 1, 1);
        let mut out: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
        let c1 = rat_one() - self.ctx.q2();
        add_to(&mut out, (0, b - 1), c1);
        for ((j, k), v) in prev {
            add_to(&mut out, (j, k + 1), v * self.ctx.q2());
        }
        out
    }

    pub fn anti_to_normal(&mut self, b: u32, c: u32) -> BTreeMap<(u32, u32), Rat> {
        if let Some(m) = self.a2n.get(&(b, c)) {
            return m.clone();
        }
        let result = if b == 0 {
            BTreeMap::from([((c, 0), rat_one())])
        } else if c == 0 {
            BTreeMap::from([((0, b), rat_one())])
        } else {
            // z*^b z^c = (z*^b z) z^{c-1}; right-multiplying a normal form
            // by z re-enters the recursion through the z*^k z corner.
            let head = self.zstar_pow_z(b);
            let mut acc = head;
            for _ in 0..c - 1 {
                let mut next: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
                for ((j, k), v) in acc {
                    for ((j2, k2), w) in self.anti_to_normal(k, 1) {
                        add_to(&mut next, (j + j2, k2), &v * &w);
                    }
                }
                acc = next;
            }
            acc
        };
        self.a2n.insert((b, c), result.clone());
        result
    }

    /// Anti-normal form of `z z*^b` (helper recursion):
    /// `z z*^b = q^{-2} z* (z z*^{b-1}) - q^{-2}(1 - q^2) z*^{b-1}`.
    fn z_zstar_pow(&mut self, b: u32) -> BTreeMap<(u32, u32), Rat> {
        if b == 0 {
            return BTreeMap::from([((0, 1), rat_one())]);
        }
        let prev = self.normal_to_anti(1, b - 1);
        let mut out: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
        let q2inv = self.ctx.q2_pow(-1);
        for ((j, k), v) in prev {
            add_to(&mut out, (j + 1, k), v * &q2inv);
        }
        let c1 = -&q2inv * (rat_one() - self.ctx.q2());
        add_to(&mut out, (b - 1, 0), c1);
        out
    }

    pub fn normal_to_anti(&mut self, a: u32, b: u32) -> BTreeMap<(u32, u32), Rat> {
        if let Some(m) = self.n2a.get(&(a, b)) {
            return m.clone();
        }
        let result = if a == 0 {
            BTreeMap::from([((b, 0), rat_one())])
        } else if b == 0 {
            BTreeMap::from([((0, a), rat_one())])
        } else {
            let head = self.z_zstar_pow(b);
            let mut acc = head;
            for _ in 0..a - 1 {
                let mut next: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
                for ((j, k), v) in acc {
                    for ((j2, k2), w) in self.normal_to_anti(1, j) {
                        add_to(&mut next, (j2, k + k2), &v * &w);
                    }
                }
                acc = next;
            }
            acc
        };
        self.n2a.insert((a, b), result.clone());
        result
    }
}

fn add_to(map: &mut BTreeMap<(u32, u32), Rat>, key: (u32, u32), v: Rat) {
    let e = map.entry(key).or_insert_with(rat_zero);
    *e += v;
    if Zero::is_zero(e) {
        map.remove(&key);
    }
}

/// Rewrite an element into the requested monomial order, exactly.
pub fn reorder<S: Scalar>(
    e: &OrderedElement<S>,
    target: OrderTag,
    ctx: &QContext,
) -> OrderedElement<S> {
    if e.ord() == target {
        return e.clone();
    }
    let mut rw = Reorderer::new(ctx);
    let mut out = OrderedElement::new(target);
    for (&(j, k), c) in e.terms() {
        let table = match target {
            OrderTag::Normal => rw.anti_to_normal(j, k),
            OrderTag::AntiNormal => rw.normal_to_anti(j, k),
        };
        for ((j2, k2), w) in table {
            out.add_term(j2, k2, c.mul_rat(&w));
        }
    }
    out
}

/// Product of two normal-ordered elements, returned normal-ordered:
/// `z^a z*^b . z^c z*^d = z^a (z*^b z^c) z*^d` with the middle factor
/// rewritten through the commutation relation.
pub fn normal_product<S: Scalar>(
    a: &OrderedElement<S>,
    b: &OrderedElement<S>,
    ctx: &QContext,
) -> Result<OrderedElement<S>> {
    if a.ord() != OrderTag::Normal || b.ord() != OrderTag::Normal {
        return Err(Error::OrderIncompatible);
    }
    let mut rw = Reorderer::new(ctx);
    let mut out = OrderedElement::new(OrderTag::Normal);
    for (&(ja, ka), ca) in a.terms() {
        for (&(jb, kb), cb) in b.terms() {
            let coeff = ca.mul(cb);
            for ((j, k), w) in rw.anti_to_normal(ka, jb) {
                out.add_term(ja + j, k + kb, coeff.mul_rat(&w));
            }
        }
    }
    Ok(out)
}

/// A finite function: a finite sum of `z^a f_n z*^b` with `f_n` the diagonal
/// unit finite functions. These are exactly the elements whose representing
/// matrices have finitely many nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteElement<S> {
    terms: BTreeMap<(u32, u32, u32), S>,
}

impl<S: Scalar> FiniteElement<S> {
    pub fn new() -> Self {
        FiniteElement {
            terms: BTreeMap::new(),
        }
    }

    /// The basis finite function `f_n`.
    pub fn f_n(n: u32, proto: &S) -> Self {
        let mut e = Self::new();
        e.add_term(0, n, 0, proto.one());
        e
    }

    /// A single `z^a f_n z*^b` monomial.
    pub fn monomial(a: u32, n: u32, b: u32, coeff: S) -> Self {
        let mut e = Self::new();
        e.add_term(a, n, b, coeff);
        e
    }

    pub fn add_term(&mut self, a: u32, n: u32, b: u32, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((a, n, b)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, n, b), c) in &o.terms {
            out.add_term(a, n, b, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::new();
        for (&(a, n, b), c) in &self.terms {
            out.add_term(a, n, b, c.mul(s));
        }
        out
    }

    pub fn involution(&self) -> Self {
        let mut out = Self::new();
        for (&(a, n, b), c) in &self.terms {
            out.add_term(b, n, a, c.clone());
        }
        out
    }

    /// `(max row, max col)` of the support of the representing matrix:
    /// a `z^a f_n z*^b` term occupies the single entry `(a + n, b + n)`.
    pub fn support(&self) -> (usize, usize) {
        let mut rows = 0usize;
        let mut cols = 0usize;
        for &(a, n, b) in self.terms.keys() {
            rows = rows.max((a + n) as usize + 1);
            cols = cols.max((b + n) as usize + 1);
        }
        (rows, cols)
    }

    /// If every term is radial (`a == b == 0` after reduction), return the
    /// diagonal coefficient sequence. Terms `z^a f_n z*^a` are themselves
    /// radial since `z^a f_n z*^a = (q^{2(a+n)}; q^{-2})_a f_{a+n}`; this
    /// reduction is applied first.
    pub fn reduce_radial(&self, ctx: &QContext) -> Option<Vec<S>> {
        let mut coeffs: BTreeMap<u32, S> = BTreeMap::new();
        for (&(a, n, b), c) in &self.terms {
            if a != b {
                if !c.is_zero() {
                    return None;
                }
                continue;
            }
            let w = ctx.poch_desc((a + n) as i64, a);
            let e = coeffs.entry(a + n).or_insert_with(|| c.zero());
            *e = e.add(&c.mul_rat(&w));
        }
        let top = coeffs.keys().max().copied().unwrap_or(0);
        let proto = self
            .terms
            .values()
            .next()
            .cloned()
            .unwrap_or_else(|| coeffs.values().next().cloned().expect("nonempty"));
        let mut out = vec![proto.zero(); top as usize + 1];
        for (n, c) in coeffs {
            out[n as usize] = c;
        }
        Some(out)
    }
}

impl<S: Scalar> Default for FiniteElement<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// A radial element: a coefficient sequence on the basis `{f_n}`, i.e. a
/// diagonal matrix under the representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialElement<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> RadialElement<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        RadialElement { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn to_finite(&self) -> FiniteElement<S> {
        let mut out = FiniteElement::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            out.add_term(0, n as u32, 0, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;

    fn ctx() -> QContext {
        QContext::new(rat(1, 2)).unwrap()
    }

    #[test]
    fn zstar_z_normal_form() {
        // z* z = (1 - q^2) + q^2 z z*
        let ctx = ctx();
        let mut rw = Reorderer::new(&ctx);
        let m = rw.anti_to_normal(1, 1);
        assert_eq!(m.len(), 2);
        assert_eq!(m[&(0, 0)], rat_one() - ctx.q2());
        assert_eq!(m[&(1, 1)], ctx.q2().clone());
    }

    #[test]
    fn z_zstar_anti_form() {
        // z z* = q^{-2} z* z - q^{-2}(1 - q^2)
        let ctx = ctx();
        let mut rw = Reorderer::new(&ctx);
        let m = rw.normal_to_anti(1, 1);
        let q2inv = ctx.q2_pow(-1);
        assert_eq!(m[&(1, 1)], q2inv);
        assert_eq!(m[&(0, 0)], -ctx.q2_pow(-1) * (rat_one() - ctx.q2()));
    }

    #[test]
    fn reorder_roundtrip() {
        let ctx = ctx();
        let mut e = OrderedElement::<Rat>::new(OrderTag::Normal);
        e.add_term(2, 1, rat(3, 4));
        e.add_term(0, 3, rat(-1, 5));
        e.add_term(1, 1, rat(7, 2));
        let back = reorder(&reorder(&e, OrderTag::AntiNormal, &ctx), OrderTag::Normal, &ctx);
        assert_eq!(e, back);
    }

    #[test]
    fn normal_product_matches_relation() {
        // (z*)(z) as normal elements multiplies to (1-q^2) + q^2 z z*.
        let ctx = ctx();
        let zs = OrderedElement::<Rat>::zstar_pow(1, &rat_one());
        let z = OrderedElement::<Rat>::z_pow(1, &rat_one());
        let p = normal_product(&zs, &z, &ctx).unwrap();
        assert_eq!(p.coeff(0, 0), Some(&(rat_one() - ctx.q2())));
        assert_eq!(p.coeff(1, 1), Some(ctx.q2()));
    }

    #[test]
    fn radial_reduction_of_conjugated_unit() {
        // z f_n z* = (q^{2(n+1)}; q^{-2})_1 f_{n+1} = (1 - q^{2(n+1)}) f_{n+1}
        let ctx = ctx();
        let e = FiniteElement::<Rat>::monomial(1, 2, 1, rat_one());
        let coeffs = e.reduce_radial(&ctx).unwrap();
        assert_eq!(coeffs.len(), 4);
        assert_eq!(coeffs[3], rat_one() - ctx.q2_pow(3));
    }
}
