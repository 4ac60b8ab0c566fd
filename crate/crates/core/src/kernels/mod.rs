//! Reproducing kernels and coherent-vector factorizations at half-integer
//! weights `alpha` (so `2 alpha` a positive integer): the geometric-series
//! projection kernel, projection through the kernel vs through the Gram
//! form, and the two-variable kernel of `P f P` with its coherent-vector
//! factorization.
//!
//! Restricting to half-integer weights keeps `q^{n (2 alpha + 1)}` an exact
//! power of `q`, so the square-root-free diagonal `(1 - zz*)^{alpha + 1/2}`
//! exists in the rational world.

use crate::bergman::{toeplitz, WeightedSpace};
use crate::disc::{
    finite_to_matrix, integrate_matrix, rep_generator, z_pow_matrix, zstar_pow_matrix,
    FiniteElement, Generator, Measure,
};
use crate::error::{Error, Result};
use crate::qscalar::{qpoch, rat_one, QContext, Rat};

/// A half-integer weight: `2 alpha` is a positive integer, and the weight
/// parameter is the exact power `t = q^{2 (2 alpha)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfIntWeight {
    two_alpha: u32,
}

impl HalfIntWeight {
    pub fn new(two_alpha: u32) -> Result<Self> {
        if two_alpha == 0 {
            return Err(Error::ConfigInvalid(
                "half-integer weight needs 2 alpha >= 1".into(),
            ));
        }
        Ok(HalfIntWeight { two_alpha })
    }

    pub fn two_alpha(&self) -> u32 {
        self.two_alpha
    }

    /// `t = q^{4 alpha} = q^{2 (2 alpha)}`.
    pub fn t(&self, ctx: &QContext) -> Rat {
        ctx.q2_pow(self.two_alpha as i64)
    }

    pub fn space(&self, ctx: &QContext) -> WeightedSpace<Rat> {
        WeightedSpace::numeric(ctx.clone(), self.t(ctx)).expect("0 < q^{4 alpha} < 1")
    }
}

/// Coefficients of the reproducing kernel's geometric expansion:
/// `C_s = (q^{2(2 alpha + 1)}; q^2)_s / (q^2; q^2)_s`, the `(z zeta*)^s`
/// coefficient of the inverse Pochhammer kernel.
pub fn repro_kernel_coeffs(w: HalfIntWeight, ctx: &QContext, s_max: u32) -> Vec<Rat> {
    let a = ctx.q2_pow(w.two_alpha() as i64 + 1);
    (0..=s_max)
        .map(|s| qpoch(&a, ctx.q2(), s) / ctx.poch_q2(s))
        .collect()
}

/// Project a finite function onto the holomorphic sector through the
/// reproducing kernel: coefficient of `z^s` is
/// `C_s int zeta*^s psi dnu_alpha`. The result must coincide with the Gram
/// projection coefficientwise; a mismatch aborts with a diagnostic.
pub fn project_kernel(
    psi: &FiniteElement<Rat>,
    w: HalfIntWeight,
    ctx: &QContext,
) -> Result<Vec<Rat>> {
    let space = w.space(ctx);
    let t = space.t().clone();
    let (rows, cols) = psi.support();
    let inner = rows.max(cols) + rows + 2;
    let psi_mat = finite_to_matrix(psi, inner, ctx, &t)?;
    let c = repro_kernel_coeffs(w, ctx, rows as u32);
    let mut out = Vec::new();
    for s in 0..rows as u32 {
        let moment = integrate_matrix(
            &zstar_pow_matrix(s, inner, ctx, &t).mul(&psi_mat),
            &Measure::Weighted(t.clone()),
            ctx,
        )?;
        out.push(&c[s as usize] * moment);
    }
    if out.is_empty() {
        out.push(crate::qscalar::rat_zero());
    }
    let gram_route = crate::bergman::project_gram(psi, &space)?;
    if out != gram_route {
        return Err(Error::MismatchWithGram(format!(
            "kernel route {:?} vs gram route {:?}",
            out, gram_route
        )));
    }
    Ok(out)
}

/// Project an already-holomorphic polynomial (given by coefficients)
/// through the kernel: the pairing reduces to the Gram orthogonality,
/// coefficient of `z^s` becomes `C_s gram(s) coeff_s`. Idempotence of the
/// projection is the exact identity `C_s gram(s) = 1`.
pub fn project_poly_kernel(
    coeffs: &[Rat],
    w: HalfIntWeight,
    ctx: &QContext,
) -> Vec<Rat> {
    let space = w.space(ctx);
    let c = repro_kernel_coeffs(w, ctx, coeffs.len() as u32);
    coeffs
        .iter()
        .enumerate()
        .map(|(s, v)| &c[s] * space.gram(s as u32) * v)
        .collect()
}

/// The two-variable kernel of `P f P` in reduced form: the coefficient of
/// `z^s (z')*^r` (the interior integration is performed eagerly, so only
/// the `(s, r)` moment array is stored).
#[derive(Debug, Clone, PartialEq)]
pub struct PfpKernel {
    /// `coeffs[s][r]`
    pub coeffs: Vec<Vec<Rat>>,
}

/// Compute the kernel of `P f P` twice and require exact agreement:
///
/// - moment route: `K[s][r] = C_s C_r int zeta*^s f zeta^r dnu_alpha`;
/// - coherent-vector route: `K[s][r] = (1-t)/(1-q^2) C_s C_r q^{2r}
///   int zeta^r (1 - zeta zeta*)^{2 alpha + 1} zeta*^s f dnu`, the `(s, r)`
///   coefficient of `int k_zeta(q^2 z')* k_zeta(z) f(zeta) dnu(zeta)` with
///   `k_zeta(z) = (1 - zeta zeta*)^{alpha + 1/2} (zeta* z; q^2)^{-1}`
///   expanded geometrically (the adjoint is taken of the whole vector, so
///   the `z'` power conjugates and the zeta factors reverse).
pub fn pfp_kernel(
    f: &FiniteElement<Rat>,
    w: HalfIntWeight,
    ctx: &QContext,
    s_bound: u32,
) -> Result<PfpKernel> {
    let t = w.t(ctx);
    let (rows, cols) = f.support();
    let inner = rows.max(cols) + s_bound as usize + 3;
    let f_mat = finite_to_matrix(f, inner, ctx, &t)?;
    let c = repro_kernel_coeffs(w, ctx, s_bound);
    // route A: weighted moments
    let mut route_a = Vec::new();
    for s in 0..=s_bound {
        let mut row = Vec::new();
        let left = zstar_pow_matrix(s, inner, ctx, &t).mul(&f_mat);
        for r in 0..=s_bound {
            let mom = integrate_matrix(
                &left.mul(&z_pow_matrix(r, inner, &t)),
                &Measure::Weighted(t.clone()),
                ctx,
            )?;
            row.push(&c[s as usize] * &c[r as usize] * mom);
        }
        route_a.push(row);
    }
    // route B: coherent vectors against the invariant measure
    let radial = rep_generator(
        &Generator::RadialPower(ctx.q2_pow(w.two_alpha() as i64 + 1)),
        inner,
        ctx,
        &t,
    )?;
    let one_minus_t = rat_one() - &t;
    let scale = &one_minus_t / (rat_one() - ctx.q2());
    let mut route_b = Vec::new();
    for s in 0..=s_bound {
        let mut row = Vec::new();
        for r in 0..=s_bound {
            let integrand = z_pow_matrix(r, inner, &t)
                .mul(&radial)
                .mul(&zstar_pow_matrix(s, inner, ctx, &t))
                .mul(&f_mat);
            let integral = integrate_matrix(&integrand, &Measure::Invariant, ctx)?;
            row.push(
                &scale * &c[s as usize] * &c[r as usize] * ctx.q2_pow(r as i64) * integral,
            );
        }
        route_b.push(row);
    }
    if route_a != route_b {
        return Err(Error::FactorizationMismatch(format!(
            "moment route {:?} vs coherent route {:?}",
            route_a, route_b
        )));
    }
    Ok(PfpKernel { coeffs: route_a })
}

/// Matrix-element oracle: pairing the kernel against a monomial must give
/// the Toeplitz matrix element, `K[m][j] gram(j) = fhat_{mj}`.
pub fn pfp_matrix_element_check(
    f: &FiniteElement<Rat>,
    w: HalfIntWeight,
    ctx: &QContext,
    bound: u32,
) -> Result<bool> {
    let space = w.space(ctx);
    let kernel = pfp_kernel(f, w, ctx, bound)?;
    let op = toeplitz(f, &space, bound as usize + 1);
    for m in 0..=bound {
        for j in 0..=bound {
            let lhs = &kernel.coeffs[m as usize][j as usize] * space.gram(j);
            if &lhs != op.matrix.get(m as usize, j as usize) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
