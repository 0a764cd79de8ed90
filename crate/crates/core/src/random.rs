//! Seeded generators for step functions and convex trees, shared by the
//! experiments, the CLI sweeps, and the test suites.

use rand::Rng;

use crate::dim3::{ConvexTree3, DyadicCube, StepFunction3D};
use crate::dyadic::DyadicSquare;
use crate::scalar::{real, Real};
use crate::step::{StepFunction1D, StepFunction2D};
use crate::trees::ConvexTree;

pub fn signed_1d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction1D<T> {
    StepFunction1D::from_fn(n, |_| real::<T>(rng.gen_range(-1.0..1.0)))
}

pub fn nonneg_1d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction1D<T> {
    StepFunction1D::from_fn(n, |_| real::<T>(rng.gen_range(0.0..1.0)))
}

pub fn signed_2d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction2D<T> {
    StepFunction2D::from_fn(n, |_, _| real::<T>(rng.gen_range(-1.0..1.0)))
}

pub fn nonneg_2d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction2D<T> {
    StepFunction2D::from_fn(n, |_, _| real::<T>(rng.gen_range(0.0..1.0)))
}

/// Nonnegative field with occasional large spikes (unit-rate exponential),
/// useful for stopping-time and weak-type experiments.
pub fn spiky_nonneg_2d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction2D<T> {
    StepFunction2D::from_fn(n, |_, _| {
        let u: f64 = rng.gen_range(0.0..1.0);
        real::<T>(-(1.0 - u).ln())
    })
}

/// Rank-one nonnegative field `a(x)·b(y)`.
pub fn rank_one_2d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction2D<T> {
    let a: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(0.0..1.5)).collect();
    let b: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(0.0..1.5)).collect();
    StepFunction2D::from_fn(n, |ix, iy| real::<T>(a[ix] * b[iy]))
}

pub fn signed_3d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction3D<T> {
    StepFunction3D::from_fn(n, |_, _, _| real::<T>(rng.gen_range(-1.0..1.0)))
}

pub fn nonneg_3d<T: Real>(n: usize, rng: &mut impl Rng) -> StepFunction3D<T> {
    StepFunction3D::from_fn(n, |_, _, _| real::<T>(rng.gen_range(0.0..1.0)))
}

/// Random convex tree whose squares stay at scales `< n`, grown by including
/// children of already included squares with probability `grow`.
pub fn convex_tree(n: usize, rng: &mut impl Rng, grow: f64) -> ConvexTree {
    assert!(n >= 1, "need at least one scale below the resolution");
    let root_scale = rng.gen_range(0..n.min(2));
    let side = 1usize << root_scale;
    let root = DyadicSquare::new(root_scale, rng.gen_range(0..side), rng.gen_range(0..side))
        .expect("in-range square");
    let mut squares = vec![root];
    let mut frontier = vec![root];
    while let Some(q) = frontier.pop() {
        if q.scale() + 1 >= n {
            continue;
        }
        for child in q.children() {
            if rng.gen_bool(grow) {
                squares.push(child);
                frontier.push(child);
            }
        }
    }
    ConvexTree::new(squares).expect("grown set is convex by construction")
}

/// Random convex tree of dyadic cubes at scales `< n`.
pub fn convex_tree3(n: usize, rng: &mut impl Rng, grow: f64) -> ConvexTree3 {
    assert!(n >= 1);
    let root_scale = rng.gen_range(0..n.min(2));
    let side = 1usize << root_scale;
    let root = DyadicCube::new(
        root_scale,
        rng.gen_range(0..side),
        rng.gen_range(0..side),
        rng.gen_range(0..side),
    )
    .expect("in-range cube");
    let mut cubes = vec![root];
    let mut frontier = vec![root];
    while let Some(q) = frontier.pop() {
        if q.scale() + 1 >= n {
            continue;
        }
        for child in q.children() {
            if rng.gen_bool(grow) {
                cubes.push(child);
                frontier.push(child);
            }
        }
    }
    ConvexTree3::new(cubes).expect("grown set is convex by construction")
}
