//! Gowers box inner-product and box norm over dyadic squares, and the
//! square-collection form Ξ.

use crate::dyadic::DyadicSquare;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::step::StepFunction2D;

/// Value of a square-indexed form together with its provenance.
#[derive(Clone, Debug)]
pub struct BoxFormResult<T> {
    pub value: T,
    pub square_count: usize,
    /// Per-square contributions; summing them reproduces `value`.
    pub per_square: Option<Vec<(DyadicSquare, T)>>,
}

fn check_common_resolution<T: Real>(fs: &[&StepFunction2D<T>]) -> Result<usize> {
    let n = fs[0].resolution();
    for f in &fs[1..] {
        if f.resolution() != n {
            return Err(Error::ResolutionMismatch { left: n, right: f.resolution() });
        }
    }
    Ok(n)
}

/// Gowers box inner-product
/// `[F₁,F₂,F₃,F₄]_□(Q) = |Q|^{-2} ∫_I∫_I∫_J∫_J F₁(u,v)F₂(x,v)F₃(u,y)F₄(x,y)`.
///
/// Evaluated by contracting the second variable first: with raw cell sums
/// `A(u,x) = Σ_v F₁(u,v)F₂(x,v)` and `B(u,x) = Σ_y F₃(u,y)F₄(x,y)` over the
/// `m × m` block of `Q`, the value is `Σ_{u,x} A·B / m⁴`, which is `O(m³)`
/// instead of the literal `O(m⁴)` quadruple sum.
pub fn box_inner_product<T: Real>(
    fs: [&StepFunction2D<T>; 4],
    q: &DyadicSquare,
) -> Result<T> {
    let n = check_common_resolution(&fs)?;
    let xr = q.x().cells(n)?;
    let yr = q.y().cells(n)?;
    let m = xr.len();
    let [f1, f2, f3, f4] = fs;

    let mut a = vec![T::zero(); m * m];
    let mut b = vec![T::zero(); m * m];
    for (iu, u) in xr.clone().enumerate() {
        let r1 = &f1.row(u)[yr.clone()];
        let r3 = &f3.row(u)[yr.clone()];
        for (ix, x) in xr.clone().enumerate() {
            let r2 = &f2.row(x)[yr.clone()];
            let r4 = &f4.row(x)[yr.clone()];
            let mut sa = T::zero();
            let mut sb = T::zero();
            for v in 0..m {
                sa += r1[v] * r2[v];
                sb += r3[v] * r4[v];
            }
            a[iu * m + ix] = sa;
            b[iu * m + ix] = sb;
        }
    }
    let mut total = T::zero();
    for (x, y) in a.iter().zip(&b) {
        total += *x * *y;
    }
    let m_t = real::<T>(m as f64);
    Ok(total / (m_t * m_t * m_t * m_t))
}

/// Gowers box norm `‖F‖_□(Q) = [F,F,F,F]_□(Q)^{1/4}`.
///
/// The diagonal inner product is a sum of squares after the v-contraction, so
/// it is nonnegative; values below `-tol` indicate an internal inconsistency.
pub fn box_norm<T: Real>(f: &StepFunction2D<T>, q: &DyadicSquare) -> Result<T> {
    let v = box_inner_product([f, f, f, f], q)?;
    if v < T::zero() {
        let scale = f.sup_abs().powi(4).max(T::one());
        if v < -real::<T>(1e-12) * scale {
            return Err(Error::NegativeBoxForm { value: v.to_f64().unwrap_or(f64::NAN) });
        }
        return Ok(T::zero());
    }
    Ok(v.powf(real::<T>(0.25)))
}

/// `Ξ_F(F₁,F₂,F₃,F₄) = Σ_{Q∈F} |Q| [F₁,F₂,F₃,F₄]_□(Q)`.
pub fn xi_form<T: Real>(
    collection: &[DyadicSquare],
    fs: [&StepFunction2D<T>; 4],
) -> Result<BoxFormResult<T>> {
    let mut value = T::zero();
    let mut per_square = Vec::with_capacity(collection.len());
    for q in collection {
        let contrib = real::<T>(q.measure()) * box_inner_product(fs, q)?;
        value += contrib;
        per_square.push((*q, contrib));
    }
    Ok(BoxFormResult { value, square_count: collection.len(), per_square: Some(per_square) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::StepFunction2D;
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

    /// Literal quadruple-loop mean, the independent oracle for the fast path.
    fn box_inner_product_bruteforce(
        fs: [&StepFunction2D<f64>; 4],
        q: &DyadicSquare,
    ) -> f64 {
        let n = fs[0].resolution();
        let xr = q.x().cells(n).unwrap();
        let yr = q.y().cells(n).unwrap();
        let m = xr.len() as f64;
        let mut total = 0.0;
        for u in xr.clone() {
            for x in xr.clone() {
                for v in yr.clone() {
                    for y in yr.clone() {
                        total += fs[0].get(u, v) * fs[1].get(x, v) * fs[2].get(u, y)
                            * fs[3].get(x, y);
                    }
                }
            }
        }
        total / (m * m * m * m)
    }

    #[test]
    fn normalization_on_indicator() {
        let one = StepFunction2D::<f64>::ones(2);
        let v = box_inner_product([&one, &one, &one, &one], &DyadicSquare::unit()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_closed_form() {
        // F(x,y) = a(x)b(y): [F,F,F,F]_□(Q) = ((avg_I a²)(avg_J b²))².
        let n = 3;
        let mut r = rng(11);
        let a: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..2.0)).collect();
        let b: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..2.0)).collect();
        let f = StepFunction2D::from_fn(n, |ix, iy| a[ix] * b[iy]);
        for q in [DyadicSquare::unit(), DyadicSquare::new(1, 1, 0).unwrap()] {
            let xr = q.x().cells(n).unwrap();
            let yr = q.y().cells(n).unwrap();
            let ma = xr.clone().map(|i| a[i] * a[i]).sum::<f64>() / xr.len() as f64;
            let mb = yr.clone().map(|i| b[i] * b[i]).sum::<f64>() / yr.len() as f64;
            let expect = (ma * mb).powi(2);
            let got = box_inner_product([&f, &f, &f, &f], &q).unwrap();
            assert!((got - expect).abs() < 1e-12 * expect.max(1.0));
            let brute = box_inner_product_bruteforce([&f, &f, &f, &f], &q);
            assert!((got - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_matches_bruteforce_on_random_quadruples() {
        let n = 3;
        let mut r = rng(12);
        for trial in 0..20 {
            let f1 = random_signed(n, &mut r);
            let f2 = random_signed(n, &mut r);
            let f3 = random_signed(n, &mut r);
            let f4 = random_signed(n, &mut r);
            for q in DyadicSquare::all_up_to(n) {
                let fast = box_inner_product([&f1, &f2, &f3, &f4], &q).unwrap();
                let brute = box_inner_product_bruteforce([&f1, &f2, &f3, &f4], &q);
                assert!((fast - brute).abs() < 1e-12, "trial {trial} square {q}");
            }
        }
    }

    #[test]
    fn box_norm_normalization_and_homogeneity() {
        let q = DyadicSquare::new(1, 0, 1).unwrap();
        let one = StepFunction2D::<f64>::ones(3);
        let ind = one.masked_to(&q).unwrap();
        assert!((box_norm(&ind, &q).unwrap() - 1.0).abs() < 1e-12);
        let scaled = ind.scaled(-2.5);
        assert!((box_norm(&scaled, &q).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_inner_product_nonnegative() {
        let mut r = rng(13);
        for _ in 0..50 {
            let f = random_signed(3, &mut r);
            for q in DyadicSquare::all_up_to(3) {
                assert!(box_inner_product([&f, &f, &f, &f], &q).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn box_cauchy_schwarz_random_audit() {
        // |[F₁,F₂,F₃,F₄]_□(Q)| ≤ Π ‖F_j‖_□(Q) on signed quadruples.
        let n = 4;
        let mut r = rng(14);
        for _ in 0..50 {
            let fs: Vec<StepFunction2D<f64>> =
                (0..4).map(|_| random_signed(n, &mut r)).collect();
            for q in DyadicSquare::all_up_to(n) {
                let ip = box_inner_product([&fs[0], &fs[1], &fs[2], &fs[3]], &q).unwrap();
                let bound: f64 = fs.iter().map(|f| box_norm(f, &q).unwrap()).product();
                assert!(ip.abs() <= bound + 1e-10, "square {q}: {ip} vs {bound}");
            }
        }
    }

    #[test]
    fn l2_domination_with_rank_one_equality() {
        let n = 3;
        let mut r = rng(15);
        for _ in 0..30 {
            let f = random_nonneg(n, &mut r);
            for q in DyadicSquare::all_up_to(n) {
                let bn = box_norm(&f, &q).unwrap();
                let l2 = local_l2(&f, &q);
                assert!(bn <= l2 + 1e-10);
            }
        }
        // Equality for rank-one nonnegative inputs.
        let a: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..1.5)).collect();
        let b: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..1.5)).collect();
        let f = StepFunction2D::from_fn(n, |ix, iy| a[ix] * b[iy]);
        for q in DyadicSquare::all_up_to(n) {
            let bn = box_norm(&f, &q).unwrap();
            let l2 = local_l2(&f, &q);
            assert!((bn - l2).abs() < 1e-10, "square {q}");
        }
    }

    fn local_l2(f: &StepFunction2D<f64>, q: &DyadicSquare) -> f64 {
        // (|Q|^{-1} ∫_Q F²)^{1/2} as a cell mean over the block.
        let n = f.resolution();
        let xr = q.x().cells(n).unwrap();
        let yr = q.y().cells(n).unwrap();
        let mut total = 0.0;
        for x in xr.clone() {
            for y in yr.clone() {
                total += f.get(x, y).powi(2);
            }
        }
        (total / (xr.len() * yr.len()) as f64).sqrt()
    }

    #[test]
    fn triangle_inequality_on_supported_functions() {
        let n = 3;
        let q = DyadicSquare::new(1, 0, 0).unwrap();
        let mut r = rng(16);
        for _ in 0..100 {
            let f = random_signed(n, &mut r).masked_to(&q).unwrap();
            let g = random_signed(n, &mut r).masked_to(&q).unwrap();
            let sum = f.zip_with(&g, |a, b| a + b).unwrap();
            let lhs = box_norm(&sum, &q).unwrap();
            let rhs = box_norm(&f, &q).unwrap() + box_norm(&g, &q).unwrap();
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn xi_on_unit_collection() {
        let one = StepFunction2D::<f64>::ones(2);
        let res = xi_form(&[DyadicSquare::unit()], [&one, &one, &one, &one]).unwrap();
        assert!((res.value - 1.0).abs() < 1e-15);
        assert_eq!(res.square_count, 1);
    }

    #[test]
    fn xi_children_weights_sum_to_parent_for_constants() {
        let one = StepFunction2D::<f64>::ones(2);
        let children = DyadicSquare::unit().children();
        let res = xi_form(&children, [&one, &one, &one, &one]).unwrap();
        assert!((res.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xi_over_cells_is_plain_integral_of_product() {
        let n = 3;
        let mut r = rng(17);
        let fs: Vec<StepFunction2D<f64>> = (0..4).map(|_| random_signed(n, &mut r)).collect();
        let cells: Vec<DyadicSquare> = DyadicSquare::all_at_scale(n).collect();
        let xi = xi_form(&cells, [&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
        let mut direct = 0.0;
        for ix in 0..fs[0].side() {
            for iy in 0..fs[0].side() {
                direct += fs.iter().map(|f| f.get(ix, iy)).product::<f64>();
            }
        }
        direct *= f64::exp2(-2.0 * n as f64);
        assert!((xi.value - direct).abs() < 1e-12);
        let from_parts: f64 = xi.per_square.unwrap().iter().map(|(_, c)| c).sum();
        assert!((xi.value - from_parts).abs() < 1e-12);
    }

    #[test]
    fn resolution_mismatch_rejected() {
        let f = StepFunction2D::<f64>::ones(2);
        let g = StepFunction2D::<f64>::ones(3);
        assert!(box_inner_product([&f, &f, &f, &g], &DyadicSquare::unit()).is_err());
    }

    #[test]
    fn schatten4_identification_via_svd() {
        // box_norm⁴·|Q|² equals Σ σ_i⁴ of the cell block scaled by the cell
        // width, computed independently through an SVD.
        let n = 3;
        let h = f64::exp2(-(n as f64));
        let mut r = rng(18);
        for _ in 0..10 {
            let f = random_signed(n, &mut r);
            for q in DyadicSquare::all_up_to(n) {
                let xr = q.x().cells(n).unwrap();
                let yr = q.y().cells(n).unwrap();
                let m = xr.len();
                let mat = nalgebra::DMatrix::from_fn(m, m, |ru, cv| {
                    h * f.get(xr.start + ru, yr.start + cv)
                });
                let s4: f64 = mat.svd(false, false).singular_values.iter().map(|s| s.powi(4)).sum();
                let lhs = box_norm(&f, &q).unwrap().powi(4) * q.measure().powi(2);
                assert!(
                    (lhs - s4).abs() <= 1e-8 * s4.max(1e-30),
                    "square {q}: {lhs} vs {s4}"
                );
            }
        }
    }
}
