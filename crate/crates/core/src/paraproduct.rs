//! The dyadic twisted paraproduct `T_d(F,G) = Σ_k (E_k^{(1)}F)(Δ_k^{(2)}G)`,
//! its trilinear form Λ_d, and the shifted and coefficient variants.
//!
//! All scale sums run over `k ∈ {0, …, N-1}`; identities on the finite domain
//! keep the coarse `E₀ ⊗ E₀` boundary term explicit instead of pretending the
//! whole-line telescoping converges.

use crate::error::{Error, Result};
use crate::martingale::martingale_average;
use crate::scalar::Real;
use crate::step::{Axis, StepFunction2D};

fn check_pair<T: Real>(f: &StepFunction2D<T>, g: &StepFunction2D<T>) -> Result<usize> {
    if f.resolution() != g.resolution() {
        return Err(Error::ResolutionMismatch { left: f.resolution(), right: g.resolution() });
    }
    Ok(f.resolution())
}

/// `T_d(F,G) = Σ_{k=0}^{N-1} (E_k^{(1)}F)(Δ_k^{(2)}G)` pointwise.
pub fn t_d<T: Real>(f: &StepFunction2D<T>, g: &StepFunction2D<T>) -> Result<StepFunction2D<T>> {
    let n = check_pair(f, g)?;
    let mut out = StepFunction2D::zero(n);
    let mut eg_prev = martingale_average(g, Axis::Y, 0)?;
    for k in 0..n {
        let ef = martingale_average(f, Axis::X, k)?;
        let eg_next = martingale_average(g, Axis::Y, k + 1)?;
        for ((o, &a), (&b_next, &b_prev)) in out
            .values_mut()
            .iter_mut()
            .zip(ef.values())
            .zip(eg_next.values().iter().zip(eg_prev.values()))
        {
            *o += a * (b_next - b_prev);
        }
        eg_prev = eg_next;
    }
    Ok(out)
}

/// `Λ_d(F,G,H) = ∫ T_d(F,G) · H`.
pub fn lambda_d<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    h: &StepFunction2D<T>,
) -> Result<T> {
    check_pair(f, h)?;
    let t = t_d(f, g)?;
    Ok(t.zip_with(h, |a, b| a * b)?.integral())
}

/// Shifted operator `Σ_k (E_{k+k₀}^{(1)}F)(Δ_k^{(2)}G)`; terms whose average
/// index `k+k₀` falls outside `[0, N]` are dropped.
pub fn t_d_shifted<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    k0: i64,
) -> Result<StepFunction2D<T>> {
    let n = check_pair(f, g)?;
    let mut out = StepFunction2D::zero(n);
    for k in 0..n {
        let shifted = k as i64 + k0;
        if shifted < 0 || shifted > n as i64 {
            continue;
        }
        let ef = martingale_average(f, Axis::X, shifted as usize)?;
        let eg_next = martingale_average(g, Axis::Y, k + 1)?;
        let eg_prev = martingale_average(g, Axis::Y, k)?;
        for ((o, &a), (&b_next, &b_prev)) in out
            .values_mut()
            .iter_mut()
            .zip(ef.values())
            .zip(eg_next.values().iter().zip(eg_prev.values()))
        {
            *o += a * (b_next - b_prev);
        }
    }
    Ok(out)
}

/// Coefficient variant `Σ_k c_k (E_k^{(1)}F)(Δ_k^{(2)}G)` for `|c_k| ≤ 1`.
pub fn t_d_coeff<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    coeffs: &[T],
) -> Result<StepFunction2D<T>> {
    let n = check_pair(f, g)?;
    if coeffs.len() != n {
        return Err(Error::ResolutionMismatch { left: coeffs.len(), right: n });
    }
    for (index, c) in coeffs.iter().enumerate() {
        if c.abs() > T::one() {
            return Err(Error::CoefficientBound {
                index,
                value: c.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut out = StepFunction2D::zero(n);
    let mut eg_prev = martingale_average(g, Axis::Y, 0)?;
    for (k, &c) in coeffs.iter().enumerate() {
        let ef = martingale_average(f, Axis::X, k)?;
        let eg_next = martingale_average(g, Axis::Y, k + 1)?;
        for ((o, &a), (&b_next, &b_prev)) in out
            .values_mut()
            .iter_mut()
            .zip(ef.values())
            .zip(eg_next.values().iter().zip(eg_prev.values()))
        {
            *o += c * a * (b_next - b_prev);
        }
        eg_prev = eg_next;
    }
    Ok(out)
}

/// Max-abs residual of the product identity on the finite grid:
/// `T_d(F,G) + Σ_k (Δ_k^{(1)}F)(E_{k+1}^{(2)}G) + (E₀^{(1)}F)(E₀^{(2)}G) = FG`.
pub fn product_identity_residual<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
) -> Result<T> {
    let n = check_pair(f, g)?;
    let mut acc = t_d(f, g)?;
    let mut ef_prev = martingale_average(f, Axis::X, 0)?;
    for k in 0..n {
        let ef_next = martingale_average(f, Axis::X, k + 1)?;
        let eg = martingale_average(g, Axis::Y, k + 1)?;
        for ((o, &b), (&a_next, &a_prev)) in acc
            .values_mut()
            .iter_mut()
            .zip(eg.values())
            .zip(ef_next.values().iter().zip(ef_prev.values()))
        {
            *o += (a_next - a_prev) * b;
        }
        ef_prev = ef_next;
    }
    let e0f = martingale_average(f, Axis::X, 0)?;
    let e0g = martingale_average(g, Axis::Y, 0)?;
    let mut worst = T::zero();
    for i in 0..acc.values().len() {
        let lhs = acc.values()[i] + e0f.values()[i] * e0g.values()[i];
        let rhs = f.values()[i] * g.values()[i];
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Squeeze in the first variable: `(D_{(2^{k0},1)}F)(x,y) = F(2^{-k0}x, y)`,
/// exactly representable on the same grid.
pub fn dilate_x_compress<T: Real>(f: &StepFunction2D<T>, k0: usize) -> StepFunction2D<T> {
    StepFunction2D::from_fn(f.resolution(), |ix, iy| f.get(ix >> k0, iy))
}

/// Scale used in relative-residual contracts: a crude product-norm bound of
/// the inputs, `max(1, ‖F‖_∞·‖G‖_∞)`.
pub fn residual_scale<T: Real>(f: &StepFunction2D<T>, g: &StepFunction2D<T>) -> T {
    (f.sup_abs() * g.sup_abs()).max(T::one())
}
