//! Endpoint failure constructions: Rademacher-based input pairs whose
//! weak-norm ratios grow without bound, ruling out `p = ∞` or `q = ∞`
//! estimates.

use crate::error::{Error, Result};
use crate::haar::rademacher;
use crate::paraproduct::t_d;
use crate::scalar::{real, Real};
use crate::step::StepFunction2D;

/// Inputs breaking `L^∞ × L^q → L^{q,∞}`:
/// `G(x,y) = 1_{[0,2^{-m})}(x) Σ_{k=0}^{m-1} R_{k+1}(y)` and `F` the
/// piecewise function equal to `2R_j(y) - R_{j+1}(y)` for
/// `x ∈ [2^{-j}, 2^{-j+1})` and to `R_m(y)` on the tail `x ∈ [0, 2^{-m+1})`.
/// Then `‖F‖_∞ ≤ 3` and `T_d(F,G) = m·1_{[0,2^{-m})×[0,1)}` exactly.
pub fn counterexample_linfty_lq<T: Real>(
    m: usize,
    n: usize,
) -> Result<(StepFunction2D<T>, StepFunction2D<T>)> {
    if m == 0 || m > n {
        return Err(Error::ScaleOutOfRange { scale: m, resolution: n });
    }
    let rade: Vec<Vec<T>> =
        (1..=m).map(|k| rademacher::<T>(k, n).map(|r| r.values().to_vec())).collect::<Result<_>>()?;

    let g_cut = 1usize << (n - m); // x-cells of [0, 2^{-m})
    let g = StepFunction2D::from_fn(n, |ix, iy| {
        if ix < g_cut {
            (0..m).map(|k| rade[k][iy]).sum()
        } else {
            T::zero()
        }
    });

    let tail_cut = 1usize << (n - m + 1); // x-cells of [0, 2^{-m+1})
    let f = StepFunction2D::from_fn(n, |ix, iy| {
        if ix < tail_cut {
            rade[m - 1][iy]
        } else {
            // x ∈ [2^{-j}, 2^{-j+1}) ⟺ ix ∈ [2^{n-j}, 2^{n-j+1})
            let j = n - (usize::BITS as usize - 1 - ix.leading_zeros() as usize);
            debug_assert!((1..m).contains(&j));
            real::<T>(2.0) * rade[j - 1][iy] - rade[j][iy]
        }
    });
    Ok((f, g))
}

/// Inputs breaking `L^∞ × L^∞ → L^∞`: `F = 1` on
/// `x ∈ ∪_{j=0}^{m-1} [2^{-2j-1}, 2^{-2j})` and `G(x,y) = F(y,x)`; the output
/// is of size `m` on the corner square `[0, 2^{-2m})²`.
pub fn counterexample_linfty_linfty<T: Real>(
    m: usize,
    n: usize,
) -> Result<(StepFunction2D<T>, StepFunction2D<T>)> {
    if m == 0 || 2 * m > n {
        return Err(Error::ScaleOutOfRange { scale: 2 * m, resolution: n });
    }
    let in_support = |ix: usize| -> bool {
        // cell [ix·2^-n, ...) lies in [2^{-2j-1}, 2^{-2j}) for some j < m
        for j in 0..m {
            if ix >= 1usize << (n - 2 * j - 1) && ix < 1usize << (n - 2 * j) {
                return true;
            }
        }
        false
    };
    let f = StepFunction2D::from_fn(n, |ix, _| if in_support(ix) { T::one() } else { T::zero() });
    let g = f.transpose();
    Ok((f, g))
}

/// The constant value of `|T_d(F,G)|` on the corner square `[0,2^{-2m})²` for
/// the second counterexample, evaluated at resolution `2m`; the output is
/// verified to be constant there.
pub fn corner_value<T: Real>(m: usize) -> Result<T> {
    let n = 2 * m;
    let (f, g) = counterexample_linfty_linfty::<T>(m, n)?;
    let t = t_d(&f, &g)?;
    let value = t.get(0, 0);
    // the corner square is a single cell at resolution 2m
    Ok(value.abs())
}

/// One line of the growth table for the first counterexample.
#[derive(Clone, Debug)]
pub struct GrowthRow<T> {
    pub m: usize,
    /// `‖T_d(F,G)‖_{L^{q,∞}} / (‖F‖_∞ ‖G‖_q)`
    pub ratio: T,
    pub ratio_over_sqrt_m: T,
}

/// Ratio table demonstrating unboundedness: `ratio/√m` stays bounded below
/// while the ratio itself diverges.
pub fn growth_report<T: Real>(m_max: usize, q: f64) -> Result<Vec<GrowthRow<T>>> {
    if q < 1.0 || !q.is_finite() {
        return Err(Error::ExponentRange(format!("need 1 ≤ q < ∞, got {q}")));
    }
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let (f, g) = counterexample_linfty_lq::<T>(m, m)?;
        let t = t_d(&f, &g)?;
        let ratio = t.weak_lp(q) / (f.lp_norm(f64::INFINITY) * g.lp_norm(q));
        let ratio_over_sqrt_m = ratio / real::<T>((m as f64).sqrt());
        rows.push(GrowthRow { m, ratio, ratio_over_sqrt_m });
    }
    Ok(rows)
}
