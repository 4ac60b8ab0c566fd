//! Truncated operator matrices on the basis `{z^m}` with bookkeeping for
//! bandedness, certified finite support, and the sub-block on which
//! truncation has not corrupted products.

use crate::error::{Error, Result};
use crate::qscalar::{QContext, Scalar};

/// An `M x M` block of an operator on the span of `{z^m}_{m >= 0}`.
///
/// Three pieces of metadata travel with the raw entries:
///
/// - `band`: diagonal offsets `r - c` outside of which the *infinite*
///   operator is zero (`None` means the zero operator);
/// - `row_end` / `col_end`: certified bounds past which the infinite
///   operator's rows / columns vanish (`None` = no certificate);
/// - `valid_end`: entries `(r, c)` with `r, c < valid_end` are exactly the
///   infinite operator's entries; beyond that truncation may have corrupted
///   them. Reads used by solvers go through [`OpMatrix::get_checked`].
#[derive(Debug, Clone)]
pub struct OpMatrix<S> {
    dim: usize,
    entries: Vec<S>,
    band: Option<(isize, isize)>,
    row_end: Option<usize>,
    col_end: Option<usize>,
    valid_end: usize,
    proto: S,
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn max_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

/// `bound + delta` clamped below at 0, where `bound` may be infinite.
fn opt_shift(bound: Option<usize>, delta: isize) -> Option<usize> {
    bound.map(|b| {
        let v = b as isize + delta;
        if v < 0 {
            0
        } else {
            v as usize
        }
    })
}

impl<S: Scalar> OpMatrix<S> {
    pub fn zeros(dim: usize, proto: &S) -> Self {
        assert!(dim >= 1);
        OpMatrix {
            dim,
            entries: vec![proto.zero(); dim * dim],
            band: None,
            row_end: Some(0),
            col_end: Some(0),
            valid_end: dim,
            proto: proto.zero(),
        }
    }

    pub fn identity(dim: usize, proto: &S) -> Self {
        let mut m = Self::zeros(dim, proto);
        for i in 0..dim {
            m.entries[i * dim + i] = proto.one();
        }
        m.band = Some((0, 0));
        m.row_end = None;
        m.col_end = None;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn proto(&self) -> &S {
        &self.proto
    }

    pub fn band(&self) -> Option<(isize, isize)> {
        self.band
    }

    pub fn row_end(&self) -> Option<usize> {
        self.row_end
    }

    pub fn col_end(&self) -> Option<usize> {
        self.col_end
    }

    pub fn valid_end(&self) -> usize {
        self.valid_end
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.entries[r * self.dim + c]
    }

    /// Read an entry that a computation depends on; refuses entries that the
    /// truncation bookkeeping cannot certify.
    pub fn get_checked(&self, r: usize, c: usize) -> Result<&S> {
        let need = r.max(c) + 1;
        if need > self.valid_end {
            return Err(Error::TruncationTooSmall {
                needed: need,
                have: self.valid_end,
            });
        }
        Ok(self.get(r, c))
    }

    /// Set an entry and widen the metadata accordingly. Intended for direct
    /// constructions from closed-form entry formulas (which are exact, so
    /// `valid_end` stays at `dim`).
    pub fn set(&mut self, r: usize, c: usize, v: S) {
        let off = r as isize - c as isize;
        self.band = Some(match self.band {
            None => (off, off),
            Some((lo, hi)) => (lo.min(off), hi.max(off)),
        });
        self.row_end = max_opt(self.row_end, Some(r + 1));
        self.col_end = max_opt(self.col_end, Some(c + 1));
        self.entries[r * self.dim + c] = v;
    }

    /// Declare that the infinite operator this block was built from has no
    /// support beyond the given row/column bounds (`None` = unbounded).
    pub fn with_support(mut self, row_end: Option<usize>, col_end: Option<usize>) -> Self {
        self.row_end = row_end;
        self.col_end = col_end;
        self
    }

    pub fn with_valid_end(mut self, valid_end: usize) -> Self {
        self.valid_end = valid_end.min(self.dim);
        self
    }

    pub fn is_zero_block(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "matrix dimensions agree");
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        let band = match (self.band, o.band) {
            (None, b) | (b, None) => b,
            (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
        };
        OpMatrix {
            dim: self.dim,
            entries,
            band,
            row_end: max_opt(self.row_end, o.row_end),
            col_end: max_opt(self.col_end, o.col_end),
            valid_end: self.valid_end.min(o.valid_end),
            proto: self.proto.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&self.proto.lift(&crate::qscalar::rat_int(-1))))
    }

    pub fn scale(&self, s: &S) -> Self {
        let entries = self.entries.iter().map(|e| e.mul(s)).collect();
        OpMatrix {
            entries,
            ..self.clone()
        }
    }

    /// Matrix product with metadata composition.
    ///
    /// The truncated product agrees with the infinite one at `(r, c)`
    /// whenever the true summation range `k <= min(r - lo_a, c + hi_b)` fits
    /// inside the valid blocks, which gives
    /// `valid_end = min(va, vb, M) - max(0, min(-lo_a, hi_b))`.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim, "matrix dimensions agree");
        let dim = self.dim;
        let mut out = Self::zeros(dim, &self.proto);
        let (band_a, band_b) = match (self.band, o.band) {
            (Some(a), Some(b)) => (a, b),
            _ => return out, // zero factor
        };
        for r in 0..dim {
            // k constrained by A's band at row r
            let k_lo = (r as isize - band_a.1).max(0) as usize;
            let k_hi = (r as isize - band_a.0).min(dim as isize - 1);
            if k_hi < k_lo as isize {
                continue;
            }
            for k in k_lo..=(k_hi as usize) {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                let c_lo = (k as isize - band_b.1).max(0) as usize;
                let c_hi = (k as isize - band_b.0).min(dim as isize - 1);
                if c_hi < c_lo as isize {
                    continue;
                }
                for c in c_lo..=(c_hi as usize) {
                    let b = o.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).add(&a.mul(b));
                    out.entries[r * dim + c] = cur;
                }
            }
        }
        out.band = Some((band_a.0 + band_b.0, band_a.1 + band_b.1));
        // Inner summation index is cut by both A's columns and B's rows.
        let inner = min_opt(self.col_end, o.row_end);
        out.row_end = min_opt(self.row_end, opt_shift(inner, band_a.1));
        out.col_end = min_opt(o.col_end, opt_shift(inner, -band_b.0));
        let base = self.valid_end.min(o.valid_end).min(dim);
        let loss = (-band_a.0).min(band_b.1).max(0) as usize;
        out.valid_end = base.saturating_sub(loss);
        if out.is_zero_block() {
            out.band = None;
            out.row_end = Some(0);
            out.col_end = Some(0);
            out.valid_end = dim;
        }
        out
    }

    /// The involution `f -> f*` transported to matrices: the adjoint with
    /// respect to the representation's weighted pairing, with weights
    /// `g_m = (q^2; q^2)_m`, i.e. `(A*)_{rc} = A_{cr} g_c / g_r`.
    pub fn involution(&self, ctx: &QContext) -> Self {
        let dim = self.dim;
        let mut weights = Vec::with_capacity(dim);
        for m in 0..dim as u32 {
            weights.push(ctx.poch_q2(m));
        }
        let mut out = Self::zeros(dim, &self.proto);
        for r in 0..dim {
            for c in 0..dim {
                let a = self.get(c, r);
                if a.is_zero() {
                    continue;
                }
                let w = &weights[c] / &weights[r];
                out.entries[r * dim + c] = a.mul_rat(&w);
            }
        }
        out.band = self.band.map(|(lo, hi)| (-hi, -lo));
        out.row_end = self.col_end;
        out.col_end = self.row_end;
        out.valid_end = self.valid_end;
        out
    }

    /// Exact equality of the two blocks `(r, c)` with `r, c < block`.
    pub fn agree_on(&self, o: &Self, block: usize) -> bool {
        assert!(block <= self.dim && block <= o.dim);
        for r in 0..block {
            for c in 0..block {
                if self.get(r, c) != o.get(r, c) {
                    return false;
                }
            }
        }
        true
    }

    /// Trace of the top-left `block x block` corner.
    pub fn trace_block(&self, block: usize) -> S {
        let mut acc = self.proto.zero();
        for i in 0..block.min(self.dim) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rat_one, Rat};

    fn shift(dim: usize) -> OpMatrix<Rat> {
        // T(z): ones on the first subdiagonal
        let mut m = OpMatrix::zeros(dim, &rat_one());
        for c in 0..dim - 1 {
            m.set(c + 1, c, rat_one());
        }
        m.row_end = None;
        m.col_end = None;
        m.band = Some((1, 1));
        m
    }

    #[test]
    fn product_metadata_shift_times_shift() {
        let a = shift(6);
        let b = a.mul(&a);
        assert_eq!(b.band(), Some((2, 2)));
        // no valid loss composing up-shifts
        assert_eq!(b.valid_end(), 6);
        assert_eq!(b.get(2, 0), &rat_one());
    }

    #[test]
    fn finite_times_unbounded_keeps_finite_support() {
        // E_{00} * T(z) = 0 because the shift has no row 0.
        let dim = 5;
        let mut e00 = OpMatrix::zeros(dim, &rat_one());
        e00.set(0, 0, rat_one());
        let prod = e00.mul(&shift(dim));
        assert!(prod.is_zero_block());
    }

    #[test]
    fn involution_is_an_involution() {
        let ctx = QContext::new(rat(1, 2)).unwrap();
        let mut a = OpMatrix::zeros(5, &rat_one());
        a.set(2, 1, rat(3, 7));
        a.set(0, 3, rat(-2, 5));
        a.set(4, 4, rat(1, 3));
        let twice = a.involution(&ctx).involution(&ctx);
        assert!(a.agree_on(&twice, 5));
    }
}
