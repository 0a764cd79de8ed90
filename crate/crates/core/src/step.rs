//! Piecewise-constant functions on `[0,1)` and `[0,1)²` at dyadic resolution
//! `2^-N`, together with integrals and (quasi-)norms.
//!
//! A 2D function stores its cell values row-major with the first variable as
//! the row: `value(ix, iy)` is the value on
//! `[ix·2^-N, (ix+1)·2^-N) × [iy·2^-N, (iy+1)·2^-N)`, so a fiber `F(x, ·)` is
//! contiguous in memory.

use crate::dyadic::DyadicSquare;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Coordinate of a two-dimensional function an operator acts on.
/// `X` is the first variable, `Y` the second.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    X,
    Y,
}

/// A step function on `[0,1)` with `2^n` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction1D<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> StepFunction1D<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::ResolutionMismatch { left: values.len(), right: 1usize << n });
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { n, values: vec![c; 1usize << n] }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Self {
        Self { n, values: (0..1usize << n).map(f).collect() }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, i: usize) -> T {
        self.values[i]
    }

    /// `∫ f = Σ values · 2^-n`.
    pub fn integral(&self) -> T {
        let cell = real::<T>(f64::exp2(-(self.n as f64)));
        self.values.iter().copied().sum::<T>() * cell
    }

    /// `L^p` (quasi-)norm for `p ∈ (0, ∞]`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> T {
        lp_from_cells(&self.values, f64::exp2(-(self.n as f64)), p)
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ResolutionMismatch { left: self.n, right: other.n });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { n: self.n, values })
    }
}

/// A step function on `[0,1)²` with `2^n × 2^n` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction2D<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> StepFunction2D<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != 1usize << (2 * n) {
            return Err(Error::ResolutionMismatch {
                left: values.len(),
                right: 1usize << (2 * n),
            });
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { n, values: vec![c; 1usize << (2 * n)] }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let size = 1usize << n;
        let mut values = Vec::with_capacity(size * size);
        for ix in 0..size {
            for iy in 0..size {
                values.push(f(ix, iy));
            }
        }
        Self { n, values }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Cells per side, `2^n`.
    pub fn side(&self) -> usize {
        1usize << self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> T {
        self.values[(ix << self.n) + iy]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: T) {
        self.values[(ix << self.n) + iy] = v;
    }

    /// The contiguous fiber `F(x, ·)` over the cell row `ix`.
    pub fn row(&self, ix: usize) -> &[T] {
        let size = self.side();
        &self.values[ix * size..(ix + 1) * size]
    }

    pub fn row_mut(&mut self, ix: usize) -> &mut [T] {
        let size = self.side();
        &mut self.values[ix * size..(ix + 1) * size]
    }

    /// `∫ F = Σ values · 4^-n`.
    pub fn integral(&self) -> T {
        let cell = real::<T>(f64::exp2(-2.0 * self.n as f64));
        self.values.iter().copied().sum::<T>() * cell
    }

    /// `L^p` (quasi-)norm for `p ∈ (0, ∞]`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> T {
        lp_from_cells(&self.values, f64::exp2(-2.0 * self.n as f64), p)
    }

    /// Weak `L^p` quasinorm `sup_α α·|{|F| > α}|^{1/p}`.
    ///
    /// On a finite grid the supremum is attained just below one of the
    /// attained |values|, so it is an exact maximum over levels.
    pub fn weak_lp(&self, p: f64) -> T {
        if p.is_infinite() {
            return self.sup_abs();
        }
        let mut mags: Vec<T> = self.values.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let cell = f64::exp2(-2.0 * self.n as f64);
        let mut best = T::zero();
        for (i, &v) in mags.iter().enumerate() {
            let measure = real::<T>(((i + 1) as f64 * cell).powf(1.0 / p));
            best = best.max(v * measure);
        }
        best
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Measure of the superlevel set `{|F| > alpha}`.
    pub fn superlevel_measure(&self, alpha: T) -> T {
        let count = self.values.iter().filter(|v| v.abs() > alpha).count();
        real::<T>(count as f64 * f64::exp2(-2.0 * self.n as f64))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ResolutionMismatch { left: self.n, right: other.n });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { n: self.n, values })
    }

    pub fn scaled(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// `G(x,y) = F(y,x)`.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |ix, iy| self.values[(iy << self.n) + ix])
    }

    /// The same function represented on a finer grid.
    pub fn refine_to(&self, n2: usize) -> Result<Self> {
        if n2 < self.n {
            return Err(Error::ScaleOutOfRange { scale: self.n, resolution: n2 });
        }
        let shift = n2 - self.n;
        Ok(Self::from_fn(n2, |ix, iy| self.get(ix >> shift, iy >> shift)))
    }

    /// Restriction `F·1_Q`, zero outside the square.
    pub fn masked_to(&self, q: &DyadicSquare) -> Result<Self> {
        let xr = q.x().cells(self.n)?;
        let yr = q.y().cells(self.n)?;
        let mut out = Self::zero(self.n);
        for ix in xr {
            for iy in yr.clone() {
                out.set(ix, iy, self.get(ix, iy));
            }
        }
        Ok(out)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= T::zero())
    }
}

fn lp_from_cells<T: Real>(values: &[T], cell: f64, p: f64) -> T {
    assert!(p > 0.0, "L^p norm needs p > 0");
    if p.is_infinite() {
        return values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    }
    let pe = real::<T>(p);
    let total: T = values.iter().map(|v| v.abs().powf(pe)).sum();
    (total * real::<T>(cell)).powf(T::one() / pe)
}
