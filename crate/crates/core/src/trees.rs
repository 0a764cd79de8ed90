//! Finite convex trees of dyadic squares and the local quadrilinear forms
//! Θ⁽¹⁾, Θ⁽²⁾, Λ_T living on them, with the telescoping identity
//! `Θ⁽¹⁾ + Θ⁽²⁾ = Ξ_{L(T)} - Ξ_{{root}}` and the single-tree estimate.

use std::collections::HashSet;

use crate::box_forms::{box_inner_product, box_norm, xi_form, BoxFormResult};
use crate::dyadic::DyadicSquare;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::step::StepFunction2D;

/// A finite convex tree: a set of dyadic squares with a root containing all
/// of them, closed under taking intermediate squares. Its leaves (squares
/// outside the tree whose parent is inside) partition the root.
#[derive(Clone, Debug)]
pub struct ConvexTree {
    root: DyadicSquare,
    squares: Vec<DyadicSquare>,
    members: HashSet<DyadicSquare>,
}

impl ConvexTree {
    /// Validates and builds a tree: a unique maximal square must contain all
    /// others, and every ancestor chain must stay inside the collection.
    pub fn new(squares: impl IntoIterator<Item = DyadicSquare>) -> Result<Self> {
        let mut sorted: Vec<DyadicSquare> = squares.into_iter().collect();
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
        let members: HashSet<DyadicSquare> = sorted.iter().copied().collect();
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
        Ok(Self { root, squares: sorted, members })
    }

    /// The single-square tree `{Q}`.
    pub fn singleton(q: DyadicSquare) -> Self {
        Self { root: q, squares: vec![q], members: HashSet::from([q]) }
    }

    /// The full collection of dyadic squares of scales `0..=max_scale`,
    /// rooted at the unit square; its leaves are the cells one scale deeper.
    pub fn full_grid(max_scale: usize) -> Self {
        let squares: Vec<DyadicSquare> = DyadicSquare::all_up_to(max_scale).collect();
        let members = squares.iter().copied().collect();
        Self { root: DyadicSquare::unit(), squares, members }
    }

    pub fn root(&self) -> DyadicSquare {
        self.root
    }

    /// Member squares in a fixed deterministic order.
    pub fn squares(&self) -> &[DyadicSquare] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn contains(&self, q: &DyadicSquare) -> bool {
        self.members.contains(q)
    }

    pub fn max_scale(&self) -> usize {
        self.squares.iter().map(|q| q.scale()).max().unwrap()
    }

    /// Leaves: squares not in the tree whose parent is. Verifies that they
    /// tile the root exactly.
    pub fn leaves(&self) -> Vec<DyadicSquare> {
        let mut leaves = Vec::new();
        for q in &self.squares {
            for child in q.children() {
                if !self.members.contains(&child) {
                    leaves.push(child);
                }
            }
        }
        leaves.sort();
        let deepest = leaves.iter().map(|q| q.scale()).max().unwrap();
        let total: u128 =
            leaves.iter().map(|q| 1u128 << (2 * (deepest - q.scale()))).sum();
        assert_eq!(
            total,
            1u128 << (2 * (deepest - self.root.scale())),
            "leaves of a convex tree must partition the root"
        );
        leaves
    }
}

/// Which of the two local forms: Θ⁽¹⁾ carries the wavelet pair in the first
/// variable (with half-interval scaling pairs in the second), Θ⁽²⁾ carries it
/// in the second variable (with a full scaling pair in the first).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ThetaForm {
    First,
    Second,
}

fn check_tree_resolution<T: Real>(
    tree: &ConvexTree,
    fs: &[&StepFunction2D<T>; 4],
) -> Result<usize> {
    let n = fs[0].resolution();
    for f in &fs[1..] {
        if f.resolution() != n {
            return Err(Error::ResolutionMismatch { left: n, right: f.resolution() });
        }
    }
    if tree.max_scale() >= n {
        return Err(Error::ScaleOutOfRange { scale: tree.max_scale(), resolution: n });
    }
    Ok(n)
}

/// Θ⁽²⁾ contribution of a single square: contract `v` and `y` against ψ_J,
/// then pair over `(u,x) ∈ I×I` under the flat φ_I weights.
fn theta2_square<T: Real>(
    fs: &[&StepFunction2D<T>; 4],
    q: &DyadicSquare,
    n: usize,
) -> T {
    let xr = q.x().cells(n).expect("scale checked");
    let yr = q.y().cells(n).expect("scale checked");
    let m = xr.len();
    let half = m / 2;
    let [f1, f2, f3, f4] = *fs;

    let mut c1 = vec![T::zero(); m * m];
    let mut c2 = vec![T::zero(); m * m];
    for (iu, u) in xr.clone().enumerate() {
        let r1 = &f1.row(u)[yr.clone()];
        let r3 = &f3.row(u)[yr.clone()];
        for (ix, x) in xr.clone().enumerate() {
            let r2 = &f2.row(x)[yr.clone()];
            let r4 = &f4.row(x)[yr.clone()];
            let mut s1 = T::zero();
            let mut s2 = T::zero();
            for v in 0..half {
                s1 += r1[v] * r2[v];
                s2 += r3[v] * r4[v];
            }
            for v in half..m {
                s1 -= r1[v] * r2[v];
                s2 -= r3[v] * r4[v];
            }
            c1[iu * m + ix] = s1;
            c2[iu * m + ix] = s2;
        }
    }
    let mut total = T::zero();
    for (a, b) in c1.iter().zip(&c2) {
        total += *a * *b;
    }
    // (ψ_J height)²(φ_I height)²·h⁴ = 4^k·16^{-n}
    total * real::<T>(f64::exp2(2.0 * q.scale() as f64 - 4.0 * n as f64))
}

/// Θ⁽¹⁾ contribution of a single square: for each half `J_j` of `J`, contract
/// `v,y ∈ J_j` flatly, then pair `(u,x) ∈ I×I` against the ψ_I signs.
fn theta1_square<T: Real>(
    fs: &[&StepFunction2D<T>; 4],
    q: &DyadicSquare,
    n: usize,
) -> T {
    let xr = q.x().cells(n).expect("scale checked");
    let m = xr.len();
    let half = m / 2;
    let [f1, f2, f3, f4] = *fs;
    let mut total = T::zero();
    for j in 0..2 {
        let jr = if j == 0 { q.y().left_half() } else { q.y().right_half() };
        let yr = jr.cells(n).expect("scale checked");
        let mut sum = T::zero();
        for (iu, u) in xr.clone().enumerate() {
            let su = if iu < half { T::one() } else { -T::one() };
            let r1 = &f1.row(u)[yr.clone()];
            let r3 = &f3.row(u)[yr.clone()];
            for (ix, x) in xr.clone().enumerate() {
                let sx = if ix < half { T::one() } else { -T::one() };
                let r2 = &f2.row(x)[yr.clone()];
                let r4 = &f4.row(x)[yr.clone()];
                let mut d1 = T::zero();
                let mut d2 = T::zero();
                for v in 0..yr.len() {
                    d1 += r1[v] * r2[v];
                    d2 += r3[v] * r4[v];
                }
                sum += su * sx * d1 * d2;
            }
        }
        // (ψ_I height)²(φ_{J_j} height)²·h⁴ = 2^{2k+1}·16^{-n}
        total += sum * real::<T>(f64::exp2(2.0 * q.scale() as f64 + 1.0 - 4.0 * n as f64));
    }
    total
}

fn theta_impl<T: Real>(
    tree: &ConvexTree,
    form: ThetaForm,
    fs: [&StepFunction2D<T>; 4],
) -> Result<BoxFormResult<T>> {
    let n = check_tree_resolution(tree, &fs)?;
    let mut value = T::zero();
    let mut per_square = Vec::with_capacity(tree.len());
    for q in tree.squares() {
        let contrib = match form {
            ThetaForm::First => theta1_square(&fs, q, n),
            ThetaForm::Second => theta2_square(&fs, q, n),
        };
        value += contrib;
        per_square.push((*q, contrib));
    }
    Ok(BoxFormResult { value, square_count: tree.len(), per_square: Some(per_square) })
}

/// `Θ⁽¹⁾_T(F₁,F₂,F₃,F₄)`.
pub fn theta1<T: Real>(
    tree: &ConvexTree,
    fs: [&StepFunction2D<T>; 4],
) -> Result<BoxFormResult<T>> {
    theta_impl(tree, ThetaForm::First, fs)
}

/// `Θ⁽²⁾_T(F₁,F₂,F₃,F₄)`.
pub fn theta2<T: Real>(
    tree: &ConvexTree,
    fs: [&StepFunction2D<T>; 4],
) -> Result<BoxFormResult<T>> {
    theta_impl(tree, ThetaForm::Second, fs)
}

pub fn theta<T: Real>(
    tree: &ConvexTree,
    form: ThetaForm,
    fs: [&StepFunction2D<T>; 4],
) -> Result<BoxFormResult<T>> {
    theta_impl(tree, form, fs)
}

/// The local trilinear form `Λ_T(F,G,H) = Θ⁽²⁾_T(1,G,F,H)` for nonnegative
/// inputs.
pub fn lambda_tree<T: Real>(
    tree: &ConvexTree,
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    h: &StepFunction2D<T>,
) -> Result<T> {
    if !(f.is_nonnegative() && g.is_nonnegative() && h.is_nonnegative()) {
        return Err(Error::NegativeInput);
    }
    let one = StepFunction2D::ones(f.resolution());
    Ok(theta2(tree, [&one, g, f, h])?.value)
}

/// Absolute residual of the telescoping identity
/// `Θ⁽¹⁾ + Θ⁽²⁾ - Ξ_{L(T)} + Ξ_{{root}}` on a convex tree; zero in exact
/// arithmetic.
pub fn telescoping_residual<T: Real>(
    tree: &ConvexTree,
    fs: [&StepFunction2D<T>; 4],
) -> Result<T> {
    let t1 = theta1(tree, fs)?.value;
    let t2 = theta2(tree, fs)?.value;
    let leaves = tree.leaves();
    let xi_leaves = xi_form(&leaves, fs)?.value;
    let xi_root = xi_form(&[tree.root()], fs)?.value;
    Ok((t1 + t2 - xi_leaves + xi_root).abs())
}

/// Residual of the global identity over the whole collection of scales
/// `0..n-1`: `Θ⁽¹⁾_C + Θ⁽²⁾_C + Ξ_{{[0,1)²}} = ∫ F₁F₂F₃F₄`, where the root
/// term is the coarse boundary correction kept explicit on the finite domain.
pub fn global_telescoping_residual<T: Real>(fs: [&StepFunction2D<T>; 4]) -> Result<T> {
    let n = fs[0].resolution();
    if n == 0 {
        return Err(Error::ScaleOutOfRange { scale: 0, resolution: 0 });
    }
    let tree = ConvexTree::full_grid(n - 1);
    let t1 = theta1(&tree, fs)?.value;
    let t2 = theta2(&tree, fs)?.value;
    let xi_root = box_inner_product(fs, &DyadicSquare::unit())?;
    let mut product_integral = T::zero();
    for i in 0..fs[0].values().len() {
        product_integral +=
            fs[0].values()[i] * fs[1].values()[i] * fs[2].values()[i] * fs[3].values()[i];
    }
    product_integral *= real::<T>(f64::exp2(-2.0 * n as f64));
    Ok((t1 + t2 + xi_root - product_integral).abs())
}

/// `|Θ⁽²⁾_T| / (|Q_T| · Π_j max_{leaf} ‖F_j‖_□)`: bounded by 2 with the
/// paper-exact constant.
pub fn single_tree_ratio<T: Real>(
    tree: &ConvexTree,
    fs: [&StepFunction2D<T>; 4],
) -> Result<T> {
    for f in fs {
        if !f.is_nonnegative() {
            return Err(Error::NegativeInput);
        }
    }
    let numerator = theta2(tree, fs)?.value.abs();
    let leaves = tree.leaves();
    let mut denom = real::<T>(tree.root().measure());
    for f in fs {
        let mut best = T::zero();
        for leaf in &leaves {
            best = best.max(box_norm(f, leaf)?);
        }
        denom *= best;
    }
    if denom == T::zero() {
        let scale = fs.iter().map(|f| f.sup_abs()).fold(T::one(), |a, b| a.max(b));
        if numerator <= real::<T>(1e-12) * scale.powi(4) {
            return Ok(T::zero());
        }
        return Err(Error::DegenerateInput);
    }
    Ok(numerator / denom)
}

/// Both sides of the reduction inequality for the chosen form:
/// `|Θ(F₁,F₂,F₃,F₄)| ≤ Θ(·)^{1/2} Θ(·)^{1/2}` with arguments duplicated
/// across the wavelet-bearing slots.
pub fn reduction_gap<T: Real>(
    tree: &ConvexTree,
    form: ThetaForm,
    fs: [&StepFunction2D<T>; 4],
) -> Result<(T, T)> {
    let [f1, f2, f3, f4] = fs;
    let lhs = theta_impl(tree, form, fs)?.value.abs();
    let (left, right) = match form {
        // ψ sits on u,x: duplicate the u-slot pair (F₁,F₃) and the x-slot pair.
        ThetaForm::First => ([f1, f1, f3, f3], [f2, f2, f4, f4]),
        // ψ sits on v,y: duplicate the v-slot pair (F₁,F₂) and the y-slot pair.
        ThetaForm::Second => ([f1, f2, f1, f2], [f3, f4, f3, f4]),
    };
    let a = theta_impl(tree, form, left)?.value.max(T::zero());
    let b = theta_impl(tree, form, right)?.value.max(T::zero());
    Ok((lhs, a.sqrt() * b.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_scaling, haar_wavelet};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_signed(n: usize, rng: &mut ChaCha8Rng) -> StepFunction2D<f64> {
        StepFunction2D::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_nonneg(n: usize, rng: &mut ChaCha8Rng) -> StepFunction2D<f64> {
        StepFunction2D::from_fn(n, |_, _| rng.gen_range(0.0..1.0))
    }

    #[test]
    fn unit_tree_has_four_leaves() {
        let tree = ConvexTree::new([DyadicSquare::unit()]).unwrap();
        assert_eq!(tree.root(), DyadicSquare::unit());
        let leaves = tree.leaves();
        let mut expected = DyadicSquare::unit().children().to_vec();
        expected.sort();
        assert_eq!(leaves, expected);
    }

    #[test]
    fn tree_with_one_child_has_seven_leaves() {
        let child = DyadicSquare::unit().children()[0];
        let tree = ConvexTree::new([DyadicSquare::unit(), child]).unwrap();
        let leaves = tree.leaves();
        // three siblings plus four grandchildren
        assert_eq!(leaves.len(), 7);
        let total: f64 = leaves.iter().map(|q| q.measure()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_middle_square_is_rejected() {
        let child = DyadicSquare::unit().children()[1];
        let grandchild = child.children()[2];
        let err = ConvexTree::new([DyadicSquare::unit(), grandchild]).unwrap_err();
        assert!(matches!(err, Error::NotConvex));
    }

    #[test]
    fn two_disjoint_tops_rejected() {
        let kids = DyadicSquare::unit().children();
        let err = ConvexTree::new([kids[0], kids[1]]).unwrap_err();
        assert!(matches!(err, Error::NoUniqueRoot));
    }

    #[test]
    fn theta_forms_vanish_on_constants() {
        let one = StepFunction2D::<f64>::constant(3, 1.7);
        let tree = ConvexTree::full_grid(2);
        let t1 = theta1(&tree, [&one, &one, &one, &one]).unwrap().value;
        let t2 = theta2(&tree, [&one, &one, &one, &one]).unwrap().value;
        assert!(t1.abs() < 1e-12 && t2.abs() < 1e-12);
    }

    /// Literal kernel-sum oracle for Θ⁽²⁾ on one square.
    fn theta2_bruteforce(fs: [&StepFunction2D<f64>; 4], q: &DyadicSquare) -> f64 {
        let n = fs[0].resolution();
        let h = f64::exp2(-(n as f64));
        let phi = haar_scaling::<f64>(&q.x(), n).unwrap();
        let psi = haar_wavelet::<f64>(&q.y(), n).unwrap();
        let size = fs[0].side();
        let mut total = 0.0;
        for u in 0..size {
            for x in 0..size {
                for v in 0..size {
                    for y in 0..size {
                        total += fs[0].get(u, v)
                            * fs[1].get(x, v)
                            * fs[2].get(u, y)
                            * fs[3].get(x, y)
                            * phi.get(u)
                            * phi.get(x)
                            * psi.get(v)
                            * psi.get(y);
                    }
                }
            }
        }
        total * h.powi(4)
    }

    /// Literal kernel-sum oracle for Θ⁽¹⁾ on one square.
    fn theta1_bruteforce(fs: [&StepFunction2D<f64>; 4], q: &DyadicSquare) -> f64 {
        let n = fs[0].resolution();
        let h = f64::exp2(-(n as f64));
        let psi = haar_wavelet::<f64>(&q.x(), n).unwrap();
        let size = fs[0].side();
        let mut total = 0.0;
        for jj in [q.y().left_half(), q.y().right_half()] {
            let phi = haar_scaling::<f64>(&jj, n).unwrap();
            for u in 0..size {
                for x in 0..size {
                    for v in 0..size {
                        for y in 0..size {
                            total += fs[0].get(u, v)
                                * fs[1].get(x, v)
                                * fs[2].get(u, y)
                                * fs[3].get(x, y)
                                * psi.get(u)
                                * psi.get(x)
                                * phi.get(v)
                                * phi.get(y);
                        }
                    }
                }
            }
        }
        total * h.powi(4)
    }

    #[test]
    fn theta_forms_match_kernel_oracle_on_single_squares() {
        let mut r = rng(21);
        for n in [1usize, 2] {
            for _ in 0..5 {
                let fs: Vec<StepFunction2D<f64>> =
                    (0..4).map(|_| random_signed(n, &mut r)).collect();
                let refs = [&fs[0], &fs[1], &fs[2], &fs[3]];
                for q in DyadicSquare::all_up_to(n - 1) {
                    let tree = ConvexTree::singleton(q);
                    let fast2 = theta2(&tree, refs).unwrap().value;
                    let fast1 = theta1(&tree, refs).unwrap().value;
                    assert!((fast2 - theta2_bruteforce(refs, &q)).abs() < 1e-12);
                    assert!((fast1 - theta1_bruteforce(refs, &q)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn diagonal_theta_forms_are_nonnegative() {
        let mut r = rng(22);
        for _ in 0..200 {
            let g = random_signed(3, &mut r);
            let tree = crate::random::convex_tree(3, &mut r, 0.5);
            assert!(theta2(&tree, [&g, &g, &g, &g]).unwrap().value >= 0.0);
            assert!(theta1(&tree, [&g, &g, &g, &g]).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn lambda_tree_vanishes_for_constant_g() {
        let mut r = rng(23);
        let f = random_nonneg(3, &mut r);
        let h = random_nonneg(3, &mut r);
        let g = StepFunction2D::constant(3, 0.8);
        let tree = ConvexTree::full_grid(2);
        assert!(lambda_tree(&tree, &f, &g, &h).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lambda_tree_rejects_signed_inputs() {
        let mut r = rng(24);
        let f = random_signed(2, &mut r);
        let g = random_nonneg(2, &mut r);
        let tree = ConvexTree::singleton(DyadicSquare::unit());
        assert!(matches!(lambda_tree(&tree, &f, &g, &g), Err(Error::NegativeInput)));
    }

    #[test]
    fn telescoping_identity_single_square() {
        let mut r = rng(25);
        for _ in 0..20 {
            let fs: Vec<StepFunction2D<f64>> =
                (0..4).map(|_| random_signed(3, &mut r)).collect();
            for q in DyadicSquare::all_up_to(2) {
                let tree = ConvexTree::singleton(q);
                let res =
                    telescoping_residual(&tree, [&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
                assert!(res < 1e-12, "square {q}: {res}");
            }
        }
    }

    #[test]
    fn telescoping_identity_full_depth_tree() {
        let mut r = rng(26);
        let fs: Vec<StepFunction2D<f64>> = (0..4).map(|_| random_signed(4, &mut r)).collect();
        let tree = ConvexTree::full_grid(3);
        let res = telescoping_residual(&tree, [&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
        assert!(res < 1e-11);
    }

    #[test]
    fn telescoping_identity_constants() {
        let one = StepFunction2D::<f64>::ones(3);
        let tree = ConvexTree::full_grid(1);
        let res = telescoping_residual(&tree, [&one, &one, &one, &one]).unwrap();
        assert!(res < 1e-13);
    }

    #[test]
    fn global_identity_on_random_quadruple() {
        let mut r = rng(27);
        let fs: Vec<StepFunction2D<f64>> = (0..4).map(|_| random_signed(4, &mut r)).collect();
        let res = global_telescoping_residual([&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
        assert!(res < 1e-11, "{res}");
        let one = StepFunction2D::<f64>::ones(4);
        let res = global_telescoping_residual([&one, &one, &one, &one]).unwrap();
        assert!(res < 1e-12);
    }

    #[test]
    fn global_theta2_of_one_g_one_g_is_l2_defect() {
        // Θ_C⁽²⁾(1,G,1,G) = ‖G‖₂² - ‖E₀⁽²⁾G‖₂² on the finite grid.
        let mut r = rng(28);
        let g = random_signed(4, &mut r);
        let one = StepFunction2D::<f64>::ones(4);
        let tree = ConvexTree::full_grid(3);
        let lhs = theta2(&tree, [&one, &g, &one, &g]).unwrap().value;
        let coarse = crate::martingale::martingale_average(&g, crate::step::Axis::Y, 0).unwrap();
        let rhs = g.lp_norm(2.0).powi(2) - coarse.lp_norm(2.0).powi(2);
        assert!((lhs - rhs).abs() < 1e-11);
        // And the Θ⁽¹⁾ companion vanishes identically for this argument slot.
        let t1 = theta1(&tree, [&one, &g, &one, &g]).unwrap().value;
        assert!(t1.abs() < 1e-12);
    }

    #[test]
    fn reduction_inequalities_random_audit() {
        let mut r = rng(29);
        for _ in 0..200 {
            let fs: Vec<StepFunction2D<f64>> =
                (0..4).map(|_| random_signed(3, &mut r)).collect();
            let refs = [&fs[0], &fs[1], &fs[2], &fs[3]];
            let tree = crate::random::convex_tree(3, &mut r, 0.5);
            for form in [ThetaForm::First, ThetaForm::Second] {
                let (lhs, rhs) = reduction_gap(&tree, form, refs).unwrap();
                assert!(lhs <= rhs + 1e-10, "{form:?}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn single_tree_ratio_bounded_by_two() {
        let mut r = rng(30);
        for _ in 0..100 {
            let fs: Vec<StepFunction2D<f64>> =
                (0..4).map(|_| random_nonneg(4, &mut r)).collect();
            let tree = crate::random::convex_tree(4, &mut r, 0.5);
            let ratio = single_tree_ratio(&tree, [&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
            assert!(ratio <= 2.0 + 1e-9, "ratio {ratio}");
        }
    }

    #[test]
    fn single_tree_ratio_zero_for_indicator_inputs() {
        let one = StepFunction2D::<f64>::ones(3);
        let tree = ConvexTree::singleton(DyadicSquare::unit());
        let ratio = single_tree_ratio(&tree, [&one, &one, &one, &one]).unwrap();
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn single_tree_ratio_zero_function_is_zero() {
        let zero = StepFunction2D::<f64>::zero(3);
        let tree = ConvexTree::singleton(DyadicSquare::unit());
        assert_eq!(single_tree_ratio(&tree, [&zero, &zero, &zero, &zero]).unwrap(), 0.0);
    }

    #[test]
    fn theta_rejects_trees_deeper_than_the_wavelet_scale() {
        // a tree square at scale n-? needs one finer level for ψ_J
        let deep = DyadicSquare::new(2, 1, 1).unwrap();
        let tree = ConvexTree::singleton(deep);
        let f = StepFunction2D::<f64>::ones(2);
        let err = theta2(&tree, [&f, &f, &f, &f]).unwrap_err();
        assert!(matches!(err, Error::ScaleOutOfRange { .. }));
        assert!(theta1(&tree, [&f, &f, &f, &f]).is_err());
    }

    #[test]
    fn xi_of_root_nonnegative_for_nonneg_inputs() {
        let mut r = rng(31);
        for _ in 0..50 {
            let fs: Vec<StepFunction2D<f64>> =
                (0..4).map(|_| random_nonneg(3, &mut r)).collect();
            let v = xi_form(&[DyadicSquare::unit()], [&fs[0], &fs[1], &fs[2], &fs[3]])
                .unwrap()
                .value;
            assert!(v >= 0.0);
        }
    }
}
