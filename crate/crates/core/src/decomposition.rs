//! Stopping-time machinery: level sets of the running-sup box norm, maximal
//! square families, the triple-intersection tree decomposition, exact
//! re-summation of Λ_d over the trees, and the summation-bound reports.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::box_forms::box_norm;
use crate::dyadic::DyadicSquare;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::step::StepFunction2D;
use crate::trees::{lambda_tree, ConvexTree};

/// Per-square values over all scales `0..=max_scale`, stored flat.
#[derive(Clone, Debug)]
pub struct SquareMap<T> {
    max_scale: usize,
    values: Vec<T>,
}

impl<T: Copy> SquareMap<T> {
    fn with(max_scale: usize, fill: T) -> Self {
        let count = Self::offset(max_scale + 1);
        Self { max_scale, values: vec![fill; count] }
    }

    fn offset(scale: usize) -> usize {
        // Σ_{k<scale} 4^k = (4^scale - 1)/3
        ((1usize << (2 * scale)) - 1) / 3
    }

    fn index(q: &DyadicSquare) -> usize {
        Self::offset(q.scale()) + (q.x().index() << q.scale()) + q.y().index()
    }

    pub fn max_scale(&self) -> usize {
        self.max_scale
    }

    pub fn get(&self, q: &DyadicSquare) -> T {
        self.values[Self::index(q)]
    }

    fn set(&mut self, q: &DyadicSquare, v: T) {
        self.values[Self::index(q)] = v;
    }
}

/// Box norms of one function over every square of scales `0..=max_scale`.
pub fn box_norm_map<T: Real>(
    f: &StepFunction2D<T>,
    max_scale: usize,
) -> Result<SquareMap<T>> {
    let mut map = SquareMap::with(max_scale, T::zero());
    for q in DyadicSquare::all_up_to(max_scale) {
        let v = box_norm(f, &q)?;
        map.set(&q, v);
    }
    Ok(map)
}

/// Running supremum of the box norm over the ancestor chain (the square
/// itself included): `sup_{Q' ⊇ Q} ‖F‖_□(Q')`, monotone nondecreasing down
/// every chain. Squares run over scales `0..n-1`.
pub fn sup_box_norm_map<T: Real>(f: &StepFunction2D<T>) -> Result<SquareMap<T>> {
    if !f.is_nonnegative() {
        return Err(Error::NegativeInput);
    }
    let n = f.resolution();
    if n == 0 {
        return Err(Error::ScaleOutOfRange { scale: 0, resolution: 0 });
    }
    let max_scale = n - 1;
    let mut map = box_norm_map(f, max_scale)?;
    for scale in 1..=max_scale {
        for q in DyadicSquare::all_at_scale(scale) {
            let parent = q.parent().expect("scale ≥ 1 has a parent");
            let v = map.get(&q).max(map.get(&parent));
            map.set(&q, v);
        }
    }
    Ok(map)
}

/// One dyadic level: the squares whose running-sup box norm lies in
/// `[2^k, 2^{k+1})`, and the maximal ones among them.
#[derive(Clone, Debug)]
pub struct LevelFamily {
    pub squares: Vec<DyadicSquare>,
    pub maximal: Vec<DyadicSquare>,
}

/// All nonempty levels of one function, keyed by the dyadic exponent `k`.
#[derive(Clone, Debug)]
pub struct LevelFamilies {
    pub levels: BTreeMap<i32, LevelFamily>,
}

fn dyadic_level(s: f64) -> i32 {
    debug_assert!(s > 0.0);
    let mut k = s.log2().floor() as i32;
    // fp guard at the boundaries of the dyadic bins
    while f64::exp2((k + 1) as f64) <= s {
        k += 1;
    }
    while f64::exp2(k as f64) > s {
        k -= 1;
    }
    k
}

fn maximal_of(set: &[DyadicSquare]) -> Vec<DyadicSquare> {
    let members: HashSet<DyadicSquare> = set.iter().copied().collect();
    let mut maximal: Vec<DyadicSquare> = set
        .iter()
        .copied()
        .filter(|q| {
            let mut cur = *q;
            while let Some(p) = cur.parent() {
                if members.contains(&p) {
                    return false;
                }
                cur = p;
            }
            true
        })
        .collect();
    maximal.sort();
    maximal
}

/// Partition of the squares of scales `0..n-1` into level families
/// `P_k = {Q : 2^k ≤ sup_{Q'⊇Q} ‖F‖_□(Q') < 2^{k+1}}` with their maximal
/// squares `M_k`. Squares with running sup 0 belong to no level.
pub fn level_families<T: Real>(f: &StepFunction2D<T>) -> Result<LevelFamilies> {
    let sup = sup_box_norm_map(f)?;
    if f.values().iter().all(|v| *v == T::zero()) {
        return Err(Error::ZeroFunction);
    }
    let mut buckets: BTreeMap<i32, Vec<DyadicSquare>> = BTreeMap::new();
    for q in DyadicSquare::all_up_to(sup.max_scale()) {
        let s = sup.get(&q).to_f64().expect("finite norm");
        if s > 0.0 {
            buckets.entry(dyadic_level(s)).or_default().push(q);
        }
    }
    let levels = buckets
        .into_iter()
        .map(|(k, squares)| {
            let maximal = maximal_of(&squares);
            (k, LevelFamily { squares, maximal })
        })
        .collect();
    Ok(LevelFamilies { levels })
}

/// One tree of the triple decomposition: the root is a maximal square of
/// `P_{k₁,k₂,k₃} = P_{k₁}^F ∩ P_{k₂}^G ∩ P_{k₃}^H` and the tree collects the
/// members of that intersection inside it.
#[derive(Clone, Debug)]
pub struct TreeEntry {
    pub levels: (i32, i32, i32),
    pub root: DyadicSquare,
    pub tree: ConvexTree,
}

/// Full decomposition of the square collection driven by a function triple.
#[derive(Clone, Debug)]
pub struct TripleDecomposition {
    pub entries: Vec<TreeEntry>,
    /// Squares on which one of the three functions vanishes identically;
    /// they carry no Λ_d contribution and belong to no level triple.
    pub unclassified: Vec<DyadicSquare>,
}

pub fn triple_decomposition<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    h: &StepFunction2D<T>,
) -> Result<TripleDecomposition> {
    let sup_f = sup_box_norm_map(f)?;
    let sup_g = sup_box_norm_map(g)?;
    let sup_h = sup_box_norm_map(h)?;
    let max_scale = sup_f.max_scale();

    let mut groups: BTreeMap<(i32, i32, i32), Vec<DyadicSquare>> = BTreeMap::new();
    let mut unclassified = Vec::new();
    for q in DyadicSquare::all_up_to(max_scale) {
        let sf = sup_f.get(&q).to_f64().expect("finite");
        let sg = sup_g.get(&q).to_f64().expect("finite");
        let sh = sup_h.get(&q).to_f64().expect("finite");
        if sf > 0.0 && sg > 0.0 && sh > 0.0 {
            let key = (dyadic_level(sf), dyadic_level(sg), dyadic_level(sh));
            groups.entry(key).or_default().push(q);
        } else {
            unclassified.push(q);
        }
    }

    let mut entries = Vec::new();
    for (levels, squares) in groups {
        let members: HashSet<DyadicSquare> = squares.iter().copied().collect();
        let mut by_root: HashMap<DyadicSquare, Vec<DyadicSquare>> = HashMap::new();
        for q in &squares {
            // walk up to the highest ancestor inside the same group
            let mut top = *q;
            let mut cur = *q;
            while let Some(p) = cur.parent() {
                if members.contains(&p) {
                    top = p;
                }
                cur = p;
            }
            by_root.entry(top).or_default().push(*q);
        }
        let mut roots: Vec<DyadicSquare> = by_root.keys().copied().collect();
        roots.sort();
        for root in roots {
            let tree = ConvexTree::new(by_root.remove(&root).unwrap())?;
            debug_assert_eq!(tree.root(), root);
            entries.push(TreeEntry { levels, root, tree });
        }
    }
    Ok(TripleDecomposition { entries, unclassified })
}

/// `|Λ_d(F,G,H) - Σ_Q Λ_{T_Q}(F,G,H)|`: the re-summation over the
/// decomposition trees is exact.
pub fn resummation_residual<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    h: &StepFunction2D<T>,
) -> Result<T> {
    let decomposition = triple_decomposition(f, g, h)?;
    let mut total = T::zero();
    for entry in &decomposition.entries {
        total += lambda_tree(&entry.tree, f, g, h)?;
    }
    let direct = crate::paraproduct::lambda_d(f, g, h)?;
    Ok((direct - total).abs())
}

/// Per-level table of Eq.-style single-function sums.
#[derive(Clone, Debug)]
pub struct LevelRow<T> {
    pub level: i32,
    /// `Σ_{Q ∈ M_k} |Q|`
    pub measure_sum: T,
    /// `2^{e·k} Σ_{Q ∈ M_k} |Q|`
    pub weighted: T,
}

/// `Σ_k 2^{e k} Σ_{Q∈M_k} |Q|` with its ratio against `‖F‖_e^e`.
#[derive(Clone, Debug)]
pub struct FunctionLevelTable<T> {
    pub exponent: f64,
    pub norm: T,
    pub rows: Vec<LevelRow<T>>,
    pub weighted_total: T,
    pub ratio: T,
}

/// Measured constants of the summation bounds: the triple sum over realized
/// level triples, the min-of-three relaxation, the three single-function
/// sums, and the partial sums of the three-way largest-term split.
#[derive(Clone, Debug)]
pub struct SummationReport<T> {
    pub exponents: (f64, f64, f64),
    pub norms: (T, T, T),
    /// `Σ 2^{k₁+k₂+k₃} Σ_{Q∈M_{k₁,k₂,k₃}} |Q|` and its norm-product ratio.
    pub triple_sum: T,
    pub triple_ratio: T,
    /// `Σ 2^{k₁+k₂+k₃} min(Σ|Q|_{M_{k₁}}, Σ|Q|_{M_{k₂}}, Σ|Q|_{M_{k₃}})`.
    pub min_form_sum: T,
    pub min_form_ratio: T,
    pub per_function: [FunctionLevelTable<T>; 3],
    /// `min_form_sum` split by which normalized level weight is largest.
    pub region_partial_sums: [T; 3],
}

fn level_measure_table<T: Real>(
    families: &LevelFamilies,
    exponent: f64,
    norm: T,
) -> FunctionLevelTable<T> {
    let mut rows = Vec::new();
    let mut weighted_total = T::zero();
    for (&k, family) in &families.levels {
        let measure_sum =
            family.maximal.iter().map(|q| real::<T>(q.measure())).sum::<T>();
        let weighted = real::<T>(f64::exp2(exponent * k as f64)) * measure_sum;
        weighted_total += weighted;
        rows.push(LevelRow { level: k, measure_sum, weighted });
    }
    let ratio = weighted_total / norm.powf(real::<T>(exponent));
    FunctionLevelTable { exponent, norm, rows, weighted_total, ratio }
}

/// Computes the summation-bound report for exponents with
/// `1/p + 1/q + 1/r = 1` and `2 < p,q,r < ∞`.
pub fn summation_bound_report<T: Real>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    h: &StepFunction2D<T>,
    p: f64,
    q: f64,
    r: f64,
) -> Result<SummationReport<T>> {
    for e in [p, q, r] {
        if !(e > 2.0 && e.is_finite()) {
            return Err(Error::ExponentRange(format!(
                "need 2 < p,q,r < ∞, got ({p}, {q}, {r})"
            )));
        }
    }
    if (1.0 / p + 1.0 / q + 1.0 / r - 1.0).abs() > 1e-9 {
        return Err(Error::ExponentRange(format!(
            "1/{p} + 1/{q} + 1/{r} must equal 1"
        )));
    }

    let norms = (f.lp_norm(p), g.lp_norm(q), h.lp_norm(r));
    let fam_f = level_families(f)?;
    let fam_g = level_families(g)?;
    let fam_h = level_families(h)?;

    // Triple sum over the realized intersection families.
    let decomposition = triple_decomposition(f, g, h)?;
    let mut triple_sum = T::zero();
    for entry in &decomposition.entries {
        let (k1, k2, k3) = entry.levels;
        triple_sum += real::<T>(f64::exp2((k1 + k2 + k3) as f64) * entry.root.measure());
    }
    let norm_product = norms.0 * norms.1 * norms.2;
    let triple_ratio = triple_sum / norm_product;

    // Min-of-three relaxation and its three-region split.
    let measure_of = |family: &LevelFamily| -> f64 {
        family.maximal.iter().map(|q| q.measure()).sum()
    };
    let nf = norms.0.to_f64().expect("finite");
    let ng = norms.1.to_f64().expect("finite");
    let nh = norms.2.to_f64().expect("finite");
    let mut min_form_sum = 0.0f64;
    let mut regions = [0.0f64; 3];
    for (&k1, ff) in &fam_f.levels {
        let mf = measure_of(ff);
        for (&k2, fg) in &fam_g.levels {
            let mg = measure_of(fg);
            for (&k3, fh) in &fam_h.levels {
                let mh = measure_of(fh);
                let term = f64::exp2((k1 + k2 + k3) as f64) * mf.min(mg).min(mh);
                min_form_sum += term;
                let weights = [
                    f64::exp2(p * k1 as f64) / nf.powf(p),
                    f64::exp2(q * k2 as f64) / ng.powf(q),
                    f64::exp2(r * k3 as f64) / nh.powf(r),
                ];
                let argmax = weights
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite weights"))
                    .map(|(i, _)| i)
                    .unwrap();
                regions[argmax] += term;
            }
        }
    }

    Ok(SummationReport {
        exponents: (p, q, r),
        norms,
        triple_sum,
        triple_ratio,
        min_form_sum: real::<T>(min_form_sum),
        min_form_ratio: real::<T>(min_form_sum) / norm_product,
        per_function: [
            level_measure_table(&fam_f, p, norms.0),
            level_measure_table(&fam_g, q, norms.1),
            level_measure_table(&fam_h, r, norms.2),
        ],
        region_partial_sums: [
            real::<T>(regions[0]),
            real::<T>(regions[1]),
            real::<T>(regions[2]),
        ],
    })
}
