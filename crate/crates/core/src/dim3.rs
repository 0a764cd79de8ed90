//! Three-dimensional generalization: step functions on the unit cube, dyadic
//! cubes, convex trees, the eight-function box inner-product, the three local
//! forms Θ⁽¹⁾, Θ⁽²⁾, Θ⁽³⁾, the forms Λ_S, and the three-term telescoping
//! identity.
//!
//! Kernel convention: Θ⁽ⁱ⁾ carries the wavelet pair on axis `i`, half-interval
//! scaling pairs on the axes after `i`, and full-interval scaling pairs on the
//! axes before it. With that placement the per-cube kernels telescope:
//! `Σ_i Θ⁽ⁱ⁾ = Ξ_{L(T)} - Ξ_{{root}}` on every convex tree.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// A step function on `[0,1)³` with `2^n` cells per side.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction3D<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> StepFunction3D<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != 1usize << (3 * n) {
            return Err(Error::ResolutionMismatch {
                left: values.len(),
                right: 1usize << (3 * n),
            });
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { n, values: vec![c; 1usize << (3 * n)] }
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let side = 1usize << n;
        let mut values = Vec::with_capacity(side * side * side);
        for ix in 0..side {
            for iy in 0..side {
                for iz in 0..side {
                    values.push(f(ix, iy, iz));
                }
            }
        }
        Self { n, values }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> T {
        self.values[(((ix << self.n) + iy) << self.n) + iz]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// A dyadic cube `I₁ × I₂ × I₃ ⊆ [0,1)³` with equal side scales.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DyadicCube {
    scale: usize,
    ix: usize,
    iy: usize,
    iz: usize,
}

impl DyadicCube {
    pub fn new(scale: usize, ix: usize, iy: usize, iz: usize) -> Result<Self> {
        let side = 1usize << scale;
        for (index, v) in [ix, iy, iz].iter().enumerate() {
            if *v >= side {
                return Err(Error::IndexOutOfRange { index: index * side + v, scale });
            }
        }
        Ok(Self { scale, ix, iy, iz })
    }

    pub fn unit() -> Self {
        Self { scale: 0, ix: 0, iy: 0, iz: 0 }
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    /// `|Q| = 8^-scale`.
    pub fn measure(&self) -> f64 {
        f64::exp2(-3.0 * self.scale as f64)
    }

    pub fn children(&self) -> [Self; 8] {
        let (s, x, y, z) = (self.scale + 1, 2 * self.ix, 2 * self.iy, 2 * self.iz);
        let mut out = [*self; 8];
        for (bit, slot) in out.iter_mut().enumerate() {
            *slot = Self {
                scale: s,
                ix: x + (bit & 1),
                iy: y + ((bit >> 1) & 1),
                iz: z + ((bit >> 2) & 1),
            };
        }
        out
    }

    pub fn parent(&self) -> Option<Self> {
        (self.scale > 0).then(|| Self {
            scale: self.scale - 1,
            ix: self.ix / 2,
            iy: self.iy / 2,
            iz: self.iz / 2,
        })
    }

    pub fn contains(&self, other: &Self) -> bool {
        if other.scale < self.scale {
            return false;
        }
        let shift = other.scale - self.scale;
        (other.ix >> shift) == self.ix
            && (other.iy >> shift) == self.iy
            && (other.iz >> shift) == self.iz
    }

    /// Cell ranges along the three axes at resolution `n`.
    fn cells(&self, n: usize) -> Result<[std::ops::Range<usize>; 3]> {
        if self.scale > n {
            return Err(Error::ScaleOutOfRange { scale: self.scale, resolution: n });
        }
        let shift = n - self.scale;
        Ok([
            (self.ix << shift)..((self.ix + 1) << shift),
            (self.iy << shift)..((self.iy + 1) << shift),
            (self.iz << shift)..((self.iz + 1) << shift),
        ])
    }

    pub fn all_at_scale(scale: usize) -> impl Iterator<Item = Self> {
        let side = 1usize << scale;
        (0..side).flat_map(move |ix| {
            (0..side).flat_map(move |iy| (0..side).map(move |iz| Self { scale, ix, iy, iz }))
        })
    }

    pub fn all_up_to(max_scale: usize) -> impl Iterator<Item = Self> {
        (0..=max_scale).flat_map(Self::all_at_scale)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, {},{},{})", self.scale, self.ix, self.iy, self.iz)
    }
}

/// A finite convex tree of dyadic cubes.
#[derive(Clone, Debug)]
pub struct ConvexTree3 {
    root: DyadicCube,
    cubes: Vec<DyadicCube>,
    members: HashSet<DyadicCube>,
}

impl ConvexTree3 {
    pub fn new(cubes: impl IntoIterator<Item = DyadicCube>) -> Result<Self> {
        let mut sorted: Vec<DyadicCube> = cubes.into_iter().collect();
        sorted.sort();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let min_scale = sorted.iter().map(|q| q.scale()).min().unwrap();
        let mut tops = sorted.iter().filter(|q| q.scale() == min_scale);
        let root = *tops.next().unwrap();
        if tops.next().is_some() {
            return Err(Error::NoUniqueRoot);
        }
        let members: HashSet<DyadicCube> = sorted.iter().copied().collect();
        for q in &sorted {
            if *q == root {
                continue;
            }
            if !root.contains(q) {
                return Err(Error::NoUniqueRoot);
            }
            let mut cur = *q;
            while let Some(p) = cur.parent() {
                if p.scale() < root.scale() {
                    break;
                }
                if !members.contains(&p) {
                    return Err(Error::NotConvex);
                }
                cur = p;
            }
        }
        Ok(Self { root, cubes: sorted, members })
    }

    pub fn singleton(q: DyadicCube) -> Self {
        Self { root: q, cubes: vec![q], members: HashSet::from([q]) }
    }

    pub fn full_grid(max_scale: usize) -> Self {
        let cubes: Vec<DyadicCube> = DyadicCube::all_up_to(max_scale).collect();
        let members = cubes.iter().copied().collect();
        Self { root: DyadicCube::unit(), cubes, members }
    }

    pub fn root(&self) -> DyadicCube {
        self.root
    }

    pub fn cubes(&self) -> &[DyadicCube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn max_scale(&self) -> usize {
        self.cubes.iter().map(|q| q.scale()).max().unwrap()
    }

    pub fn leaves(&self) -> Vec<DyadicCube> {
        let mut leaves = Vec::new();
        for q in &self.cubes {
            for child in q.children() {
                if !self.members.contains(&child) {
                    leaves.push(child);
                }
            }
        }
        leaves.sort();
        let deepest = leaves.iter().map(|q| q.scale()).max().unwrap();
        let total: u128 = leaves.iter().map(|q| 1u128 << (3 * (deepest - q.scale()))).sum();
        assert_eq!(
            total,
            1u128 << (3 * (deepest - self.root.scale())),
            "leaves of a convex tree must partition the root cube"
        );
        leaves
    }
}

fn check_octuple<T: Real>(fs: &[&StepFunction3D<T>; 8]) -> Result<usize> {
    let n = fs[0].resolution();
    for f in &fs[1..] {
        if f.resolution() != n {
            return Err(Error::ResolutionMismatch { left: n, right: f.resolution() });
        }
    }
    Ok(n)
}

/// Per-axis weight in the six-fold kernel contraction.
enum AxisWeight {
    Flat,
    WaveletSigns,
    Half(usize),
}

impl AxisWeight {
    fn vector<T: Real>(&self, m: usize) -> Vec<T> {
        match self {
            AxisWeight::Flat => vec![T::one(); m],
            AxisWeight::WaveletSigns => (0..m)
                .map(|i| if i < m / 2 { T::one() } else { -T::one() })
                .collect(),
            AxisWeight::Half(which) => (0..m)
                .map(|i| {
                    let in_half = if *which == 0 { i < m / 2 } else { i >= m / 2 };
                    if in_half {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect(),
        }
    }
}

/// Raw six-index contraction over a cube: pairs the two kernel slots of
/// `pair_axis` last, so the value is a weighted sum of products `P₀·P₁` of
/// two contractions that coincide bitwise on diagonal inputs.
fn paired_contraction<T: Real>(
    fs: &[&StepFunction3D<T>; 8],
    q: &DyadicCube,
    n: usize,
    pair_axis: usize,
    w_pair: &[T],
    w_a: &[T],
    w_b: &[T],
) -> T {
    let [xr, yr, zr] = q.cells(n).expect("scale checked");
    let m = xr.len();
    // Function slots j = j1 + 2·j2 + 4·j3 grouped by the pair-axis bit σ.
    // P_σ is indexed by the two remaining axes' slot pairs.
    let slot = |j1: usize, j2: usize, j3: usize| j1 + 2 * j2 + 4 * j3;
    let mut p0 = vec![T::zero(); m * m * m * m];
    let mut p1 = vec![T::zero(); m * m * m * m];
    for sigma in 0..2usize {
        let p = if sigma == 0 { &mut p0 } else { &mut p1 };
        let mut idx = 0usize;
        match pair_axis {
            1 => {
                // remaining axes (2,3): index (b0,b1,c0,c1)
                let f_00 = fs[slot(sigma, 0, 0)];
                let f_10 = fs[slot(sigma, 1, 0)];
                let f_01 = fs[slot(sigma, 0, 1)];
                let f_11 = fs[slot(sigma, 1, 1)];
                for b0 in yr.clone() {
                    for b1 in yr.clone() {
                        for c0 in zr.clone() {
                            for c1 in zr.clone() {
                                let mut s = T::zero();
                                for (ia, a) in xr.clone().enumerate() {
                                    s += w_pair[ia]
                                        * f_00.get(a, b0, c0)
                                        * f_10.get(a, b1, c0)
                                        * f_01.get(a, b0, c1)
                                        * f_11.get(a, b1, c1);
                                }
                                p[idx] = s;
                                idx += 1;
                            }
                        }
                    }
                }
            }
            2 => {
                // remaining axes (1,3): index (a0,a1,c0,c1)
                let f_00 = fs[slot(0, sigma, 0)];
                let f_10 = fs[slot(1, sigma, 0)];
                let f_01 = fs[slot(0, sigma, 1)];
                let f_11 = fs[slot(1, sigma, 1)];
                for a0 in xr.clone() {
                    for a1 in xr.clone() {
                        for c0 in zr.clone() {
                            for c1 in zr.clone() {
                                let mut s = T::zero();
                                for (ib, b) in yr.clone().enumerate() {
                                    s += w_pair[ib]
                                        * f_00.get(a0, b, c0)
                                        * f_10.get(a1, b, c0)
                                        * f_01.get(a0, b, c1)
                                        * f_11.get(a1, b, c1);
                                }
                                p[idx] = s;
                                idx += 1;
                            }
                        }
                    }
                }
            }
            3 => {
                // remaining axes (1,2): index (a0,a1,b0,b1)
                let f_00 = fs[slot(0, 0, sigma)];
                let f_10 = fs[slot(1, 0, sigma)];
                let f_01 = fs[slot(0, 1, sigma)];
                let f_11 = fs[slot(1, 1, sigma)];
                for a0 in xr.clone() {
                    for a1 in xr.clone() {
                        for b0 in yr.clone() {
                            for b1 in yr.clone() {
                                let mut s = T::zero();
                                for (ic, c) in zr.clone().enumerate() {
                                    s += w_pair[ic]
                                        * f_00.get(a0, b0, c)
                                        * f_10.get(a1, b0, c)
                                        * f_01.get(a0, b1, c)
                                        * f_11.get(a1, b1, c);
                                }
                                p[idx] = s;
                                idx += 1;
                            }
                        }
                    }
                }
            }
            _ => unreachable!("axis must be 1, 2, or 3"),
        }
    }
    let mut total = T::zero();
    let mut idx = 0usize;
    for i0 in 0..m {
        for i1 in 0..m {
            let wa = w_a[i0] * w_a[i1];
            if wa == T::zero() {
                idx += m * m;
                continue;
            }
            for k0 in 0..m {
                for k1 in 0..m {
                    let wb = w_b[k0] * w_b[k1];
                    if wb != T::zero() {
                        total += wa * wb * p0[idx] * p1[idx];
                    }
                    idx += 1;
                }
            }
        }
    }
    total
}

/// Three-dimensional Gowers box inner-product: the mean of
/// `Π_j F_j(x₁^{j₁}, x₂^{j₂}, x₃^{j₃})` over the six coordinates drawn from
/// the cube's sides, `j = j₁ + 2j₂ + 4j₃`.
pub fn box3_inner_product<T: Real>(
    fs: [&StepFunction3D<T>; 8],
    q: &DyadicCube,
) -> Result<T> {
    let n = check_octuple(&fs)?;
    q.cells(n)?;
    let m = 1usize << (n - q.scale());
    let flat = vec![T::one(); m];
    let s = paired_contraction(&fs, q, n, 3, &flat, &flat, &flat);
    let m_t = real::<T>(m as f64);
    Ok(s / m_t.powi(6))
}

/// `‖F‖_□³(Q) = [F,…,F]^{1/8}`; the diagonal form is a sum of squares.
pub fn box3_norm<T: Real>(f: &StepFunction3D<T>, q: &DyadicCube) -> Result<T> {
    let v = box3_inner_product([f; 8], q)?;
    if v < T::zero() {
        let scale = f.sup_abs().powi(8).max(T::one());
        if v < -real::<T>(1e-12) * scale {
            return Err(Error::NegativeBoxForm { value: v.to_f64().unwrap_or(f64::NAN) });
        }
        return Ok(T::zero());
    }
    Ok(v.powf(real::<T>(0.125)))
}

fn theta3_cube<T: Real>(
    fs: &[&StepFunction3D<T>; 8],
    q: &DyadicCube,
    n: usize,
    which: usize,
) -> T {
    let m = 1usize << (n - q.scale());
    let signs = AxisWeight::WaveletSigns.vector::<T>(m);
    let flat = AxisWeight::Flat.vector::<T>(m);
    let halves = [AxisWeight::Half(0).vector::<T>(m), AxisWeight::Half(1).vector::<T>(m)];
    // Axes after `which` carry the half-interval pairs; enumerate the choices.
    let trailing = 3 - which;
    let mut total = T::zero();
    for combo in 0..1usize << trailing {
        let mut axis_weights: [&[T]; 3] = [&flat, &flat, &flat];
        axis_weights[which - 1] = &signs;
        for (slot, d) in (which + 1..=3).enumerate() {
            axis_weights[d - 1] = &halves[(combo >> slot) & 1];
        }
        let (w_a, w_b) = match which {
            1 => (axis_weights[1], axis_weights[2]),
            2 => (axis_weights[0], axis_weights[2]),
            _ => (axis_weights[0], axis_weights[1]),
        };
        total += paired_contraction(fs, q, n, which, &signs, w_a, w_b);
    }
    // h⁶ times the squared kernel heights: 2^k per full/wavelet axis pair and
    // 2^{k+1} per half pair.
    let k = q.scale() as f64;
    total * real::<T>(f64::exp2(3.0 * k + trailing as f64 - 6.0 * n as f64))
}

/// `Θ⁽ⁱ⁾_T(F₀,…,F₇)` for `i ∈ {1,2,3}`.
pub fn theta3d<T: Real>(
    tree: &ConvexTree3,
    which: usize,
    fs: [&StepFunction3D<T>; 8],
) -> Result<T> {
    if !(1..=3).contains(&which) {
        return Err(Error::ParamOutOfRange(format!("theta index {which} not in 1..=3")));
    }
    let n = check_octuple(&fs)?;
    if tree.max_scale() >= n {
        return Err(Error::ScaleOutOfRange { scale: tree.max_scale(), resolution: n });
    }
    let mut total = T::zero();
    for q in tree.cubes() {
        total += theta3_cube(&fs, q, n, which);
    }
    Ok(total)
}

/// `Ξ_F = Σ_Q |Q| [F₀,…,F₇]_□³(Q)` over a collection of cubes.
pub fn xi3_form<T: Real>(cubes: &[DyadicCube], fs: [&StepFunction3D<T>; 8]) -> Result<T> {
    let mut total = T::zero();
    for q in cubes {
        total += real::<T>(q.measure()) * box3_inner_product(fs, q)?;
    }
    Ok(total)
}

/// Absolute residual of the three-term telescoping identity
/// `Θ⁽¹⁾ + Θ⁽²⁾ + Θ⁽³⁾ - Ξ_{L(T)} + Ξ_{{root}}`.
pub fn telescoping3d_residual<T: Real>(
    tree: &ConvexTree3,
    fs: [&StepFunction3D<T>; 8],
) -> Result<T> {
    let mut lhs = T::zero();
    for which in 1..=3 {
        lhs += theta3d(tree, which, fs)?;
    }
    let xi_leaves = xi3_form(&tree.leaves(), fs)?;
    let xi_root = xi3_form(&[tree.root()], fs)?;
    Ok((lhs - xi_leaves + xi_root).abs())
}

/// `Λ_S`: sum over all cubes of scales `0..n-1` of the axis-3 wavelet kernel
/// applied to the given functions, with absent indices replaced by 1.
pub fn lambda_s<T: Real>(present: &[(usize, &StepFunction3D<T>)]) -> Result<T> {
    if present.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = present[0].1.resolution();
    let mut seen = [false; 8];
    for (j, f) in present {
        if *j >= 8 {
            return Err(Error::ParamOutOfRange(format!("function index {j} not in 0..=7")));
        }
        if seen[*j] {
            return Err(Error::ParamOutOfRange(format!("duplicate function index {j}")));
        }
        seen[*j] = true;
        if f.resolution() != n {
            return Err(Error::ResolutionMismatch { left: n, right: f.resolution() });
        }
    }
    if n == 0 {
        return Err(Error::ScaleOutOfRange { scale: 0, resolution: 0 });
    }
    let one = StepFunction3D::ones(n);
    let mut slots: [&StepFunction3D<T>; 8] = [&one; 8];
    for (j, f) in present {
        slots[*j] = f;
    }
    theta3d(&ConvexTree3::full_grid(n - 1), 3, slots)
}

/// Both sides of `‖F‖_□³(Q) ≤ (|Q|^{-1} ∫_Q F⁴)^{1/4}`.
pub fn box3_l4_check<T: Real>(f: &StepFunction3D<T>, q: &DyadicCube) -> Result<(T, T)> {
    let n = f.resolution();
    let [xr, yr, zr] = q.cells(n)?;
    let lhs = box3_norm(f, q)?;
    let mut fourth = T::zero();
    for x in xr.clone() {
        for y in yr.clone() {
            for z in zr.clone() {
                fourth += f.get(x, y, z).powi(4);
            }
        }
    }
    let cells = real::<T>((xr.len() * yr.len() * zr.len()) as f64);
    let rhs = (fourth / cells).powf(real::<T>(0.25));
    Ok((lhs, rhs))
}

/// Both sides of the reduction inequality for Θ⁽ⁱ⁾: the octuple is split
/// across the wavelet axis by duplicating the σ=0 slots and the σ=1 slots.
pub fn reduction3_gap<T: Real>(
    tree: &ConvexTree3,
    which: usize,
    fs: [&StepFunction3D<T>; 8],
) -> Result<(T, T)> {
    if !(1..=3).contains(&which) {
        return Err(Error::ParamOutOfRange(format!("theta index {which} not in 1..=3")));
    }
    let bit = 1usize << (which - 1);
    let lhs = theta3d(tree, which, fs)?.abs();
    let mut low = fs;
    let mut high = fs;
    for j in 0..8 {
        low[j] = fs[j & !bit];
        high[j] = fs[j | bit];
    }
    let a = theta3d(tree, which, low)?.max(T::zero());
    let b = theta3d(tree, which, high)?.max(T::zero());
    Ok((lhs, a.sqrt() * b.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{nonneg_3d, signed_3d};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Literal six-fold loop, the oracle for the contracted evaluation.
    fn box3_bruteforce(fs: [&StepFunction3D<f64>; 8], q: &DyadicCube) -> f64 {
        let n = fs[0].resolution();
        let [xr, yr, zr] = q.cells(n).unwrap();
        let m = xr.len() as f64;
        let mut total = 0.0;
        for a0 in xr.clone() {
            for a1 in xr.clone() {
                for b0 in yr.clone() {
                    for b1 in yr.clone() {
                        for c0 in zr.clone() {
                            for c1 in zr.clone() {
                                let xs = [a0, a1];
                                let ys = [b0, b1];
                                let zs = [c0, c1];
                                let mut prod = 1.0;
                                for j in 0..8 {
                                    prod *= fs[j].get(xs[j & 1], ys[(j >> 1) & 1], zs[(j >> 2) & 1]);
                                }
                                total += prod;
                            }
                        }
                    }
                }
            }
        }
        total / m.powi(6)
    }

    #[test]
    fn box3_normalization() {
        let one = StepFunction3D::<f64>::ones(1);
        let v = box3_inner_product([&one; 8], &DyadicCube::unit()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn box3_product_functions_closed_form() {
        // F_j(x) = a_{j1}(x₁) b_{j2}(x₂) c_{j3}(x₃) gives the product of six
        // fiber means.
        let n = 2;
        let mut r = rng(61);
        let side = 1usize << n;
        let a: [Vec<f64>; 2] = [
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
        ];
        let b: [Vec<f64>; 2] = [
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
        ];
        let c: [Vec<f64>; 2] = [
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
            (0..side).map(|_| r.gen_range(0.1..1.2)).collect(),
        ];
        let fs_owned: Vec<StepFunction3D<f64>> = (0..8)
            .map(|j| {
                StepFunction3D::from_fn(n, |x, y, z| {
                    a[j & 1][x] * b[(j >> 1) & 1][y] * c[(j >> 2) & 1][z]
                })
            })
            .collect();
        let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
        let q = DyadicCube::unit();
        // each slot function appears four times, so the mean factors into six
        // fiber means of fourth powers
        let mean4 = |v: &[f64]| v.iter().map(|x| x.powi(4)).sum::<f64>() / v.len() as f64;
        let expected =
            mean4(&a[0]) * mean4(&a[1]) * mean4(&b[0]) * mean4(&b[1]) * mean4(&c[0]) * mean4(&c[1]);
        let got = box3_inner_product(fs, &q).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        let brute = box3_bruteforce(fs, &q);
        assert!((got - brute).abs() < 1e-12);
    }

    #[test]
    fn box3_matches_bruteforce_on_random_octuples() {
        let n = 2;
        let mut r = rng(62);
        for _ in 0..5 {
            let fs_owned: Vec<StepFunction3D<f64>> =
                (0..8).map(|_| signed_3d(n, &mut r)).collect();
            let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
            for q in DyadicCube::all_up_to(n) {
                let fast = box3_inner_product(fs, &q).unwrap();
                let brute = box3_bruteforce(fs, &q);
                assert!((fast - brute).abs() < 1e-12, "cube {q}");
            }
        }
    }

    #[test]
    fn theta_vanishes_on_constants() {
        let one = StepFunction3D::<f64>::constant(2, 1.3);
        let tree = ConvexTree3::full_grid(1);
        for which in 1..=3 {
            let v = theta3d(&tree, which, [&one; 8]).unwrap();
            assert!(v.abs() < 1e-13, "theta {which}: {v}");
        }
    }

    /// Kernel oracle for Θ⁽ⁱ⁾ on a single cube at tiny sizes.
    fn theta3_bruteforce(
        fs: [&StepFunction3D<f64>; 8],
        q: &DyadicCube,
        which: usize,
    ) -> f64 {
        let n = fs[0].resolution();
        let [xr, yr, zr] = q.cells(n).unwrap();
        let m = xr.len();
        let h = f64::exp2(-(n as f64));
        let k = q.scale() as f64;
        // weight(value index within cube, role)
        let full = |_: usize| 1.0;
        let wave = |i: usize| if i < m / 2 { 1.0 } else { -1.0 };
        let mut total = 0.0;
        let trailing = 3 - which;
        for combo in 0..1usize << trailing {
            let half = |axis_slot: usize| {
                let pick = (combo >> axis_slot) & 1;
                move |i: usize| {
                    let in_half = if pick == 0 { i < m / 2 } else { i >= m / 2 };
                    if in_half {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            let w = |axis: usize, i: usize| -> f64 {
                if axis == which {
                    wave(i)
                } else if axis < which {
                    full(i)
                } else {
                    half(axis - which - 1)(i)
                }
            };
            for (ia0, a0) in xr.clone().enumerate() {
                for (ia1, a1) in xr.clone().enumerate() {
                    for (ib0, b0) in yr.clone().enumerate() {
                        for (ib1, b1) in yr.clone().enumerate() {
                            for (ic0, c0) in zr.clone().enumerate() {
                                for (ic1, c1) in zr.clone().enumerate() {
                                    let xs = [a0, a1];
                                    let ys = [b0, b1];
                                    let zs = [c0, c1];
                                    let mut prod = 1.0;
                                    for j in 0..8 {
                                        prod *= fs[j].get(
                                            xs[j & 1],
                                            ys[(j >> 1) & 1],
                                            zs[(j >> 2) & 1],
                                        );
                                    }
                                    total += prod
                                        * w(1, ia0)
                                        * w(1, ia1)
                                        * w(2, ib0)
                                        * w(2, ib1)
                                        * w(3, ic0)
                                        * w(3, ic1);
                                }
                            }
                        }
                    }
                }
            }
        }
        total * f64::exp2(3.0 * k + trailing as f64) * h.powi(6)
    }

    #[test]
    fn theta_matches_kernel_oracle_on_single_cubes() {
        let n = 1;
        let mut r = rng(63);
        let fs_owned: Vec<StepFunction3D<f64>> = (0..8).map(|_| signed_3d(n, &mut r)).collect();
        let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
        let tree = ConvexTree3::singleton(DyadicCube::unit());
        for which in 1..=3 {
            let fast = theta3d(&tree, which, fs).unwrap();
            let brute = theta3_bruteforce(fs, &DyadicCube::unit(), which);
            assert!((fast - brute).abs() < 1e-12, "theta {which}: {fast} vs {brute}");
        }
    }

    #[test]
    fn diagonal_nonnegative() {
        let mut r = rng(64);
        for _ in 0..100 {
            let f = signed_3d::<f64>(2, &mut r);
            let tree = crate::random::convex_tree3(2, &mut r, 0.4);
            for which in 1..=3 {
                let v = theta3d(&tree, which, [&f; 8]).unwrap();
                assert!(v >= 0.0, "theta {which}: {v}");
            }
        }
    }

    #[test]
    fn telescoping_identity_3d() {
        let mut r = rng(65);
        // single cube
        let fs_owned: Vec<StepFunction3D<f64>> = (0..8).map(|_| signed_3d(2, &mut r)).collect();
        let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
        let single = ConvexTree3::singleton(DyadicCube::unit());
        assert!(telescoping3d_residual(&single, fs).unwrap() < 1e-12);
        // constants balance to zero
        let one = StepFunction3D::<f64>::ones(2);
        assert!(telescoping3d_residual(&single, [&one; 8]).unwrap() < 1e-13);
        // two-level tree
        let two = ConvexTree3::full_grid(1);
        assert!(telescoping3d_residual(&two, fs).unwrap() < 1e-12);
        // random convex trees
        for _ in 0..20 {
            let tree = crate::random::convex_tree3(2, &mut r, 0.5);
            assert!(telescoping3d_residual(&tree, fs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn lambda_s_of_constants_vanishes_and_full_set_matches_theta() {
        let n = 2;
        let mut r = rng(66);
        let one = StepFunction3D::<f64>::ones(n);
        assert!(lambda_s(&[(0, &one), (5, &one)]).unwrap().abs() < 1e-13);

        let fs_owned: Vec<StepFunction3D<f64>> = (0..8).map(|_| signed_3d(n, &mut r)).collect();
        let present: Vec<(usize, &StepFunction3D<f64>)> =
            fs_owned.iter().enumerate().collect();
        let via_lambda = lambda_s(&present).unwrap();
        let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
        let via_theta = theta3d(&ConvexTree3::full_grid(n - 1), 3, fs).unwrap();
        assert!((via_lambda - via_theta).abs() < 1e-12);
    }

    #[test]
    fn lambda_s_single_function_finite() {
        let mut r = rng(67);
        let f = nonneg_3d::<f64>(2, &mut r);
        let v = lambda_s(&[(7, &f)]).unwrap();
        assert!(v.is_finite());
        // matches the direct single-function kernel sum via theta with ones
        let one = StepFunction3D::<f64>::ones(2);
        let mut slots: [&StepFunction3D<f64>; 8] = [&one; 8];
        slots[7] = &f;
        let direct = theta3d(&ConvexTree3::full_grid(1), 3, slots).unwrap();
        assert!((v - direct).abs() < 1e-13);
    }

    #[test]
    fn lambda_s_rejects_bad_index_sets() {
        let one = StepFunction3D::<f64>::ones(1);
        assert!(lambda_s::<f64>(&[]).is_err());
        assert!(lambda_s(&[(8, &one)]).is_err());
        assert!(lambda_s(&[(3, &one), (3, &one)]).is_err());
    }

    #[test]
    fn box3_l4_domination() {
        let mut r = rng(68);
        // indicator: equality at 1
        let one = StepFunction3D::<f64>::ones(2);
        let (lhs, rhs) = box3_l4_check(&one, &DyadicCube::unit()).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);
        // random functions: inequality
        for _ in 0..100 {
            let f = signed_3d::<f64>(2, &mut r);
            for q in DyadicCube::all_up_to(1) {
                let (lhs, rhs) = box3_l4_check(&f, &q).unwrap();
                assert!(lhs <= rhs + 1e-12);
            }
        }
        // rank-one products attain equality
        let side = 4usize;
        let a: Vec<f64> = (0..side).map(|_| r.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..side).map(|_| r.gen_range(0.0..1.0)).collect();
        let c: Vec<f64> = (0..side).map(|_| r.gen_range(0.0..1.0)).collect();
        let f = StepFunction3D::from_fn(2, |x, y, z| a[x] * b[y] * c[z]);
        let (lhs, rhs) = box3_l4_check(&f, &DyadicCube::unit()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn reduction_chain_arrows_hold() {
        let mut r = rng(69);
        for _ in 0..50 {
            let fs_owned: Vec<StepFunction3D<f64>> =
                (0..8).map(|_| nonneg_3d(2, &mut r)).collect();
            let fs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs_owned[j]);
            let tree = crate::random::convex_tree3(2, &mut r, 0.5);
            for which in 1..=3 {
                let (lhs, rhs) = reduction3_gap(&tree, which, fs).unwrap();
                assert!(lhs <= rhs + 1e-10, "theta {which}: {lhs} vs {rhs}");
            }
        }
    }
}
