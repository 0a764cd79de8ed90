//! Dyadic intervals and squares: `(scale, index)` addresses into `[0,1)`.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// The dyadic interval `[l·2^-k, (l+1)·2^-k) ⊆ [0,1)`, addressed by scale `k`
/// and position `l` with `0 ≤ l < 2^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DyadicInterval {
    scale: usize,
    index: usize,
}

impl DyadicInterval {
    pub fn new(scale: usize, index: usize) -> Result<Self> {
        if scale >= usize::BITS as usize - 2 || index >= (1usize << scale) {
            return Err(Error::IndexOutOfRange { index, scale });
        }
        Ok(Self { scale, index })
    }

    /// The whole line `[0,1)`.
    pub fn unit() -> Self {
        Self { scale: 0, index: 0 }
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `|I| = 2^-scale`.
    pub fn measure(&self) -> f64 {
        f64::exp2(-(self.scale as f64))
    }

    pub fn left_half(&self) -> Self {
        Self { scale: self.scale + 1, index: 2 * self.index }
    }

    pub fn right_half(&self) -> Self {
        Self { scale: self.scale + 1, index: 2 * self.index + 1 }
    }

    pub fn parent(&self) -> Option<Self> {
        (self.scale > 0).then(|| Self { scale: self.scale - 1, index: self.index / 2 })
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.scale >= self.scale && (other.index >> (other.scale - self.scale)) == self.index
    }

    /// Grid cells covered by the interval at resolution `n`.
    pub fn cells(&self, n: usize) -> Result<Range<usize>> {
        if self.scale > n {
            return Err(Error::ScaleOutOfRange { scale: self.scale, resolution: n });
        }
        let shift = n - self.scale;
        Ok((self.index << shift)..((self.index + 1) << shift))
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{d}, {}/{d})", self.index, self.index + 1, d = 1usize << self.scale)
    }
}

/// A dyadic square `I × J ⊆ [0,1)²` with `|I| = |J|`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DyadicSquare {
    scale: usize,
    ix: usize,
    iy: usize,
}

impl DyadicSquare {
    pub fn new(scale: usize, ix: usize, iy: usize) -> Result<Self> {
        if scale >= usize::BITS as usize - 2 {
            return Err(Error::IndexOutOfRange { index: ix, scale });
        }
        let side = 1usize << scale;
        if ix >= side {
            return Err(Error::IndexOutOfRange { index: ix, scale });
        }
        if iy >= side {
            return Err(Error::IndexOutOfRange { index: iy, scale });
        }
        Ok(Self { scale, ix, iy })
    }

    /// The unit square `[0,1)²`.
    pub fn unit() -> Self {
        Self { scale: 0, ix: 0, iy: 0 }
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn x(&self) -> DyadicInterval {
        DyadicInterval { scale: self.scale, index: self.ix }
    }

    pub fn y(&self) -> DyadicInterval {
        DyadicInterval { scale: self.scale, index: self.iy }
    }

    /// `|Q| = 4^-scale`.
    pub fn measure(&self) -> f64 {
        f64::exp2(-2.0 * self.scale as f64)
    }

    /// The four congruent children partitioning the square.
    pub fn children(&self) -> [Self; 4] {
        let (s, x, y) = (self.scale + 1, 2 * self.ix, 2 * self.iy);
        [
            Self { scale: s, ix: x, iy: y },
            Self { scale: s, ix: x + 1, iy: y },
            Self { scale: s, ix: x, iy: y + 1 },
            Self { scale: s, ix: x + 1, iy: y + 1 },
        ]
    }

    pub fn parent(&self) -> Option<Self> {
        (self.scale > 0).then(|| Self { scale: self.scale - 1, ix: self.ix / 2, iy: self.iy / 2 })
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.x().contains(&other.x()) && self.y().contains(&other.y())
    }

    /// All dyadic squares of the given scale, in row-major order.
    pub fn all_at_scale(scale: usize) -> impl Iterator<Item = Self> {
        let side = 1usize << scale;
        (0..side).flat_map(move |ix| (0..side).map(move |iy| Self { scale, ix, iy }))
    }

    /// All dyadic squares with scale in `0..=max_scale`.
    pub fn all_up_to(max_scale: usize) -> impl Iterator<Item = Self> {
        (0..=max_scale).flat_map(Self::all_at_scale)
    }
}

impl fmt::Display for DyadicSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}", self.x(), self.y())
    }
}
