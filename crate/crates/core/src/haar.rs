//! Haar scaling functions, Haar wavelets, and Rademacher functions.

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::step::StepFunction1D;

/// Haar scaling function `φ_I = |I|^{-1/2} 1_I` sampled at resolution `n`.
pub fn haar_scaling<T: Real>(i: &DyadicInterval, n: usize) -> Result<StepFunction1D<T>> {
    let cells = i.cells(n)?;
    let height = real::<T>(f64::exp2(0.5 * i.scale() as f64));
    let mut f = StepFunction1D::zero(n);
    for c in cells {
        f.values_mut()[c] = height;
    }
    Ok(f)
}

/// Haar wavelet `ψ_I = |I|^{-1/2} (1_{I_left} - 1_{I_right})` sampled at
/// resolution `n`; needs `I.scale < n` so the halves are visible.
pub fn haar_wavelet<T: Real>(i: &DyadicInterval, n: usize) -> Result<StepFunction1D<T>> {
    if i.scale() >= n {
        return Err(Error::ScaleOutOfRange { scale: i.scale(), resolution: n });
    }
    let height = real::<T>(f64::exp2(0.5 * i.scale() as f64));
    let mut f = StepFunction1D::zero(n);
    for c in i.left_half().cells(n)? {
        f.values_mut()[c] = height;
    }
    for c in i.right_half().cells(n)? {
        f.values_mut()[c] = -height;
    }
    Ok(f)
}

/// The k-th Rademacher function: sum of `1_{J_left} - 1_{J_right}` over all
/// dyadic `J ⊆ [0,1)` with `|J| = 2^{-k+1}`, i.e. the ±1 wave constant on
/// cells of length `2^-k`.
pub fn rademacher<T: Real>(k: usize, n: usize) -> Result<StepFunction1D<T>> {
    if k == 0 || k > n {
        return Err(Error::ScaleOutOfRange { scale: k, resolution: n });
    }
    let shift = n - k;
    Ok(StepFunction1D::from_fn(n, |i| {
        if (i >> shift) & 1 == 0 {
            T::one()
        } else {
            -T::one()
        }
    }))
}

/// `∫ f g` for two step functions at the same resolution.
pub fn inner_product_1d<T: Real>(f: &StepFunction1D<T>, g: &StepFunction1D<T>) -> Result<T> {
    Ok(f.zip_with(g, |a, b| a * b)?.integral())
}
