//! Per-variable dyadic martingale averages `E_k`, differences `Δ_k`, and the
//! dyadic maximal function `M₂`.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::step::{Axis, StepFunction1D, StepFunction2D};

/// `E_k f`: block means over dyadic intervals of length `2^-k`.
pub fn martingale_average_1d<T: Real>(f: &StepFunction1D<T>, k: usize) -> Result<StepFunction1D<T>> {
    let n = f.resolution();
    if k > n {
        return Err(Error::ScaleOutOfRange { scale: k, resolution: n });
    }
    let block = 1usize << (n - k);
    let inv = T::one() / real::<T>(block as f64);
    let mut out = StepFunction1D::zero(n);
    for b in 0..1usize << k {
        let start = b * block;
        let mean = f.values()[start..start + block].iter().copied().sum::<T>() * inv;
        for v in &mut out.values_mut()[start..start + block] {
            *v = mean;
        }
    }
    Ok(out)
}

/// `Δ_k f = E_{k+1} f - E_k f`.
pub fn martingale_difference_1d<T: Real>(
    f: &StepFunction1D<T>,
    k: usize,
) -> Result<StepFunction1D<T>> {
    let n = f.resolution();
    if k + 1 > n {
        return Err(Error::ScaleOutOfRange { scale: k, resolution: n });
    }
    martingale_average_1d(f, k + 1)?.zip_with(&martingale_average_1d(f, k)?, |a, b| a - b)
}

/// `E_k^{(axis)} F`: the one-variable martingale average applied in the chosen
/// coordinate of a two-dimensional function.
pub fn martingale_average<T: Real>(
    f: &StepFunction2D<T>,
    axis: Axis,
    k: usize,
) -> Result<StepFunction2D<T>> {
    let n = f.resolution();
    if k > n {
        return Err(Error::ScaleOutOfRange { scale: k, resolution: n });
    }
    let size = f.side();
    let block = 1usize << (n - k);
    let inv = T::one() / real::<T>(block as f64);
    let mut out = StepFunction2D::zero(n);
    match axis {
        Axis::X => {
            let mut acc = vec![T::zero(); size];
            for b in 0..1usize << k {
                acc.iter_mut().for_each(|v| *v = T::zero());
                for ix in b * block..(b + 1) * block {
                    for (a, &v) in acc.iter_mut().zip(f.row(ix)) {
                        *a += v;
                    }
                }
                for ix in b * block..(b + 1) * block {
                    for (o, &a) in out.row_mut(ix).iter_mut().zip(&acc) {
                        *o = a * inv;
                    }
                }
            }
        }
        Axis::Y => {
            for ix in 0..size {
                let row = f.row(ix);
                let out_row = out.row_mut(ix);
                for b in 0..1usize << k {
                    let start = b * block;
                    let mean = row[start..start + block].iter().copied().sum::<T>() * inv;
                    for o in &mut out_row[start..start + block] {
                        *o = mean;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Δ_k^{(axis)} F = E_{k+1}^{(axis)} F - E_k^{(axis)} F`.
pub fn martingale_difference<T: Real>(
    f: &StepFunction2D<T>,
    axis: Axis,
    k: usize,
) -> Result<StepFunction2D<T>> {
    let n = f.resolution();
    if k + 1 > n {
        return Err(Error::ScaleOutOfRange { scale: k, resolution: n });
    }
    martingale_average(f, axis, k + 1)?.zip_with(&martingale_average(f, axis, k)?, |a, b| a - b)
}

/// Dyadic maximal function `M₂F = sup_Q (|Q|^{-1} ∫_Q |F|²)^{1/2} 1_Q`, the
/// supremum running over all dyadic squares of scales `0..=n`.
pub fn dyadic_maximal_m2<T: Real>(f: &StepFunction2D<T>) -> StepFunction2D<T> {
    let n = f.resolution();
    let size = f.side();
    // Mean of F² over scale-n cells, then coarsen one scale at a time.
    let mut level: Vec<T> = f.values().iter().map(|&v| v * v).collect();
    let mut best = level.clone();
    let quarter = real::<T>(0.25);
    for k in (0..n).rev() {
        let side = 1usize << k;
        let prev_side = side * 2;
        let mut next = vec![T::zero(); side * side];
        for i in 0..side {
            for j in 0..side {
                let a = level[(2 * i) * prev_side + 2 * j];
                let b = level[(2 * i) * prev_side + 2 * j + 1];
                let c = level[(2 * i + 1) * prev_side + 2 * j];
                let d = level[(2 * i + 1) * prev_side + 2 * j + 1];
                next[i * side + j] = (a + b + c + d) * quarter;
            }
        }
        let shift = n - k;
        for ix in 0..size {
            for iy in 0..size {
                let idx = (ix >> shift) * side + (iy >> shift);
                let cur = &mut best[ix * size + iy];
                *cur = (*cur).max(next[idx]);
            }
        }
        level = next;
    }
    let mut out = StepFunction2D::zero(n);
    for (o, b) in out.values_mut().iter_mut().zip(best) {
        *o = b.sqrt();
    }
    out
}
