//! Fiber-wise Calderón–Zygmund decomposition of the second argument and the
//! exact vanishing of `T_d(F, G - G̃)` off the exceptional set.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::paraproduct::t_d;
use crate::random::spiky_nonneg_2d;
use crate::scalar::{real, Real};
use crate::step::StepFunction2D;

/// Result of the per-fiber decomposition at threshold `λ`: for every `x`-cell
/// the maximal dyadic intervals `J` with fiber average above `λ`, the
/// exceptional set `E = ∪ {x}×J` as a cell mask, and the good part `G̃`
/// (fiber average on each bad interval, `G` elsewhere).
#[derive(Clone, Debug)]
pub struct FiberCz<T> {
    lambda: T,
    /// Maximal bad intervals per `x`-cell row.
    pub bad_intervals: Vec<Vec<DyadicInterval>>,
    /// Cell mask of `E`, row-major like the function values.
    pub exceptional_mask: Vec<bool>,
    pub exceptional_measure: T,
    pub good: StepFunction2D<T>,
}

impl<T: Real> FiberCz<T> {
    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn in_exceptional_set(&self, ix: usize, iy: usize) -> bool {
        self.exceptional_mask[(ix << self.good.resolution()) + iy]
    }
}

/// Runs the decomposition. Bad intervals are capped at the whole fiber: when
/// the full-fiber average already exceeds `λ` the entire fiber enters `E`
/// (there is no coarser dyadic interval inside `[0,1)` to stop at), and the
/// usual `‖G̃‖_∞ ≤ 2λ` bound holds whenever that cap is not hit.
pub fn fiber_cz<T: Real>(g: &StepFunction2D<T>, lambda: T) -> Result<FiberCz<T>> {
    if lambda <= T::zero() {
        return Err(Error::NonPositiveThreshold);
    }
    if !g.is_nonnegative() {
        return Err(Error::NegativeInput);
    }
    let n = g.resolution();
    let size = g.side();
    let mut bad_intervals = vec![Vec::new(); size];
    let mut mask = vec![false; size * size];
    let mut good = g.clone();
    let mut bad_measure_cells = 0usize;

    for ix in 0..size {
        // Block sums of the fiber at every scale, finest first.
        let mut sums: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        sums.push(g.row(ix).to_vec());
        for level in 0..n {
            let prev = &sums[level];
            let next: Vec<T> =
                prev.chunks_exact(2).map(|pair| pair[0] + pair[1]).collect();
            sums.push(next);
        }
        // sums[n - scale][index] is the cell sum over the interval (scale, index).
        let average = |scale: usize, index: usize| -> T {
            sums[n - scale][index] / real::<T>(f64::exp2((n - scale) as f64))
        };

        let mut stack = vec![DyadicInterval::unit()];
        while let Some(interval) = stack.pop() {
            let scale = interval.scale();
            if average(scale, interval.index()) > lambda {
                // maximal bad interval: all ancestors had average ≤ λ
                let cells = interval.cells(n)?;
                bad_measure_cells += cells.len();
                let mean = average(scale, interval.index());
                for iy in cells.clone() {
                    mask[(ix << n) + iy] = true;
                }
                let row = good.row_mut(ix);
                for iy in cells {
                    row[iy] = mean;
                }
                bad_intervals[ix].push(interval);
            } else if scale < n {
                stack.push(interval.left_half());
                stack.push(interval.right_half());
            }
        }
        bad_intervals[ix].sort();
    }

    let exceptional_measure =
        real::<T>(bad_measure_cells as f64 * f64::exp2(-2.0 * n as f64));
    Ok(FiberCz {
        lambda,
        bad_intervals,
        exceptional_mask: mask,
        exceptional_measure,
        good,
    })
}

/// `max_{(x,y) ∉ E} |T_d(F, G - G̃)(x,y)|`: exactly zero up to rounding, for
/// every `F`.
pub fn vanishing_residual<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    lambda: T,
) -> Result<T> {
    let cz = fiber_cz(g, lambda)?;
    vanishing_residual_with(f, g, &cz)
}

/// Same as [`vanishing_residual`] with a precomputed decomposition.
pub fn vanishing_residual_with<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    cz: &FiberCz<T>,
) -> Result<T> {
    let bad = g.zip_with(&cz.good, |a, b| a - b)?;
    let t = t_d(f, &bad)?;
    let mut worst = T::zero();
    for (i, v) in t.values().iter().enumerate() {
        if !cz.exceptional_mask[i] {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// Outcome of the weak-type endpoint experiment at one resolution: maximal
/// superlevel measure `|{|T_d(F,G)| > 1}|` over seeded random pairs with
/// `‖F‖_p = ‖G‖₁ = 1`.
#[derive(Clone, Debug)]
pub struct WeakEndpointReport<T> {
    pub p: f64,
    pub n: usize,
    pub trials: usize,
    pub max_superlevel_measure: T,
    pub mean_superlevel_measure: T,
}

pub fn weak_endpoint_experiment<T: Real>(
    p: f64,
    trials: usize,
    n: usize,
    seed: u64,
) -> Result<WeakEndpointReport<T>> {
    if p <= 2.0 || !p.is_finite() {
        return Err(Error::ExponentRange(format!("need 2 < p < ∞, got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_measure = T::zero();
    let mut total = T::zero();
    for _ in 0..trials {
        let mut f = spiky_nonneg_2d::<T>(n, &mut rng);
        let mut g = spiky_nonneg_2d::<T>(n, &mut rng);
        let nf = f.lp_norm(p);
        let ng = g.lp_norm(1.0);
        if nf == T::zero() || ng == T::zero() {
            continue;
        }
        f = f.scaled(T::one() / nf);
        g = g.scaled(T::one() / ng);
        let measure = t_d(&f, &g)?.superlevel_measure(T::one());
        max_measure = max_measure.max(measure);
        total += measure;
    }
    Ok(WeakEndpointReport {
        p,
        n,
        trials,
        max_superlevel_measure: max_measure,
        mean_superlevel_measure: total / real::<T>(trials as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{nonneg_2d, signed_2d};
    use rand::Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn no_bad_intervals_below_threshold() {
        let mut r = rng(81);
        let g = nonneg_2d::<f64>(4, &mut r); // values < 1
        let cz = fiber_cz(&g, 2.0).unwrap();
        assert_eq!(cz.exceptional_measure, 0.0);
        assert!(cz.bad_intervals.iter().all(Vec::is_empty));
        assert_eq!(cz.good, g);
    }

    #[test]
    fn hand_scanned_block_example() {
        // G = 4λ on y ∈ [0,1/4), constant in x, λ = 1: the scan stops at
        // [0,1/2) whose average is 2λ; the good part is that average there.
        let n = 3;
        let g = StepFunction2D::<f64>::from_fn(n, |_, iy| if iy < 2 { 4.0 } else { 0.0 });
        let cz = fiber_cz(&g, 1.0).unwrap();
        let expected = DyadicInterval::new(1, 0).unwrap();
        for row in &cz.bad_intervals {
            assert_eq!(row.as_slice(), &[expected]);
        }
        assert_eq!(cz.exceptional_measure, 0.5);
        for ix in 0..g.side() {
            for iy in 0..g.side() {
                let want = if iy < 4 { 2.0 } else { 0.0 };
                assert_eq!(cz.good.get(ix, iy), want);
            }
        }
    }

    #[test]
    fn exceptional_measure_and_sup_bounds() {
        let mut r = rng(82);
        for trial in 0..50 {
            let g = spiky_nonneg_2d::<f64>(4, &mut r);
            let lambda = 1.0;
            let cz = fiber_cz(&g, lambda).unwrap();
            // |E| ≤ ‖G‖₁/λ
            assert!(
                cz.exceptional_measure <= g.lp_norm(1.0) / lambda + 1e-15,
                "trial {trial}"
            );
            // mass conservation per bad interval
            for (ix, row) in cz.bad_intervals.iter().enumerate() {
                for j in row {
                    let cells = j.cells(4).unwrap();
                    let orig: f64 = cells.clone().map(|iy| g.get(ix, iy)).sum();
                    let good: f64 = cells.clone().map(|iy| cz.good.get(ix, iy)).sum();
                    assert!((orig - good).abs() < 1e-12);
                }
            }
            // ‖G̃‖_∞ ≤ 2λ whenever no full fiber is bad
            let full_fiber_bad = cz
                .bad_intervals
                .iter()
                .any(|row| row.iter().any(|j| j.scale() == 0));
            if !full_fiber_bad {
                assert!(cz.good.sup_abs() <= 2.0 * lambda + 1e-12);
            }
            // ‖G̃‖₁ ≤ ‖G‖₁
            assert!(cz.good.lp_norm(1.0) <= g.lp_norm(1.0) + 1e-12);
        }
    }

    #[test]
    fn good_part_interpolation_bound() {
        // ‖G̃‖_q ≤ (2λ)^{(q-1)/q} ‖G‖₁^{1/q} away from the fiber cap.
        let mut r = rng(83);
        for _ in 0..20 {
            let g = spiky_nonneg_2d::<f64>(4, &mut r);
            // λ just above every full-fiber average, so the cap cannot
            // trigger but spikes still produce bad intervals
            let lambda = (0..g.side())
                .map(|ix| g.row(ix).iter().sum::<f64>() / g.side() as f64)
                .fold(0.0f64, f64::max)
                * 1.01;
            let cz = fiber_cz(&g, lambda).unwrap();
            for q in [2.0, 3.0] {
                let bound = (2.0 * lambda).powf((q - 1.0) / q) * g.lp_norm(1.0).powf(1.0 / q);
                assert!(cz.good.lp_norm(q) <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn capped_fiber_takes_whole_row() {
        let n = 2;
        let g = StepFunction2D::<f64>::constant(n, 10.0);
        let cz = fiber_cz(&g, 1.0).unwrap();
        assert_eq!(cz.exceptional_measure, 1.0);
        for row in &cz.bad_intervals {
            assert_eq!(row.as_slice(), &[DyadicInterval::unit()]);
        }
        // the good part is the fiber average, above 2λ by design of the cap
        assert_eq!(cz.good.sup_abs(), 10.0);
    }

    #[test]
    fn vanishing_when_nothing_bad() {
        let mut r = rng(84);
        let g = nonneg_2d::<f64>(4, &mut r);
        let f = signed_2d::<f64>(4, &mut r);
        let res = vanishing_residual(&f, &g, 5.0).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn vanishing_with_constructed_bad_interval() {
        let n = 4;
        let mut r = rng(85);
        let f = signed_2d::<f64>(n, &mut r);
        // one heavy block in each of a few fibers
        let g = StepFunction2D::<f64>::from_fn(n, |ix, iy| {
            if ix < 3 && (4..6).contains(&iy) {
                8.0
            } else {
                0.1
            }
        });
        let res = vanishing_residual(&f, &g, 1.0).unwrap();
        assert!(res <= 1e-10, "{res}");
    }

    #[test]
    fn vanishing_with_heavy_exceptional_set() {
        let mut r = rng(86);
        for _ in 0..10 {
            let f = signed_2d::<f64>(5, &mut r);
            let g = spiky_nonneg_2d::<f64>(5, &mut r);
            let res = vanishing_residual(&f, &g, 0.25).unwrap();
            assert!(res <= 1e-10, "{res}");
        }
    }

    #[test]
    fn superlevel_set_splits_into_e_and_good_level_set() {
        // {|T_d(F,G)| > 1} ⊆ E ∪ {|T_d(F,G̃)| > 1-ε} cell by cell.
        let mut r = rng(87);
        let n = 4;
        let f = nonneg_2d::<f64>(n, &mut r).scaled(2.0);
        let g = spiky_nonneg_2d::<f64>(n, &mut r);
        let cz = fiber_cz(&g, 1.0).unwrap();
        let t_full = t_d(&f, &g).unwrap();
        let t_good = t_d(&f, &cz.good).unwrap();
        for ix in 0..f.side() {
            for iy in 0..f.side() {
                if t_full.get(ix, iy).abs() > 1.0 && !cz.in_exceptional_set(ix, iy) {
                    assert!(t_good.get(ix, iy).abs() > 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn weak_endpoint_zero_for_zero_inputs() {
        let g = StepFunction2D::<f64>::zero(3);
        let f = StepFunction2D::<f64>::ones(3);
        let measure = t_d(&f, &g).unwrap().superlevel_measure(1.0);
        assert_eq!(measure, 0.0);
    }

    #[test]
    fn weak_endpoint_measures_bounded() {
        let report = weak_endpoint_experiment::<f64>(4.0, 20, 4, 99).unwrap();
        assert!(report.max_superlevel_measure.is_finite());
        assert!(report.max_superlevel_measure <= 1.0);
        assert!(report.mean_superlevel_measure <= report.max_superlevel_measure);
    }

    #[test]
    fn weak_endpoint_measures_stable_in_resolution() {
        let mut maxima = Vec::new();
        for n in [4usize, 5, 6] {
            let report = weak_endpoint_experiment::<f64>(4.0, 40, n, 99).unwrap();
            maxima.push(report.max_superlevel_measure);
        }
        let slope = (maxima.last().unwrap().ln() - maxima.first().unwrap().ln())
            / (maxima.len() as f64 - 1.0);
        assert!(slope < 0.1, "log-scale slope {slope} of {maxima:?}");
    }

    #[test]
    fn threshold_must_be_positive() {
        let g = StepFunction2D::<f64>::ones(2);
        assert!(matches!(fiber_cz(&g, 0.0), Err(Error::NonPositiveThreshold)));
        assert!(matches!(fiber_cz(&g, -1.0), Err(Error::NonPositiveThreshold)));
    }

    #[test]
    fn negative_g_rejected() {
        let mut r = rng(88);
        let g = StepFunction2D::<f64>::from_fn(2, |_, _| r.gen_range(-1.0..0.0));
        assert!(matches!(fiber_cz(&g, 1.0), Err(Error::NegativeInput)));
    }
}
