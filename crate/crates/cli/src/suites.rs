//! Exact-identity residual suites behind the `identities` subcommand: every
//! structural identity of the library evaluated on seeded random inputs, each
//! line carrying its residual and the tolerance it must meet.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twisted_paraproduct::continuous::{
    build_mollifiers, comb_projection, decomposition_identity_residual, random_band_limited_2d,
    sparse_paraproduct, t_phi_theta_b,
};
use twisted_paraproduct::counterexamples::counterexample_linfty_lq;
use twisted_paraproduct::cz::vanishing_residual;
use twisted_paraproduct::decomposition::resummation_residual;
use twisted_paraproduct::dim3::telescoping3d_residual;
use twisted_paraproduct::dim3::StepFunction3D;
use twisted_paraproduct::paraproduct::{lambda_d, product_identity_residual, t_d};
use twisted_paraproduct::random::{
    convex_tree, convex_tree3, nonneg_2d, signed_2d, signed_3d, spiky_nonneg_2d,
};
use twisted_paraproduct::trees::{
    global_telescoping_residual, lambda_tree, telescoping_residual, ConvexTree,
};
use twisted_paraproduct::StepFn2;

#[derive(Clone, Debug)]
pub struct SuiteLine {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl SuiteLine {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Runs every residual suite at resolution `n` with `trials` random draws per
/// identity.
pub fn run_identity_suite(n: usize, seed: u64, trials: usize) -> Vec<SuiteLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();

    // Telescoping identity on random convex trees.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let fs: Vec<StepFn2> = (0..4).map(|_| signed_2d(n, &mut rng)).collect();
        let tree = convex_tree(n, &mut rng, 0.5);
        let r = telescoping_residual(&tree, [&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
        worst = worst.max(r);
    }
    lines.push(SuiteLine { name: "telescoping-trees", residual: worst, tolerance: 1e-9 });

    // Global telescoping with the coarse boundary term.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let fs: Vec<StepFn2> = (0..4).map(|_| signed_2d(n, &mut rng)).collect();
        let r = global_telescoping_residual([&fs[0], &fs[1], &fs[2], &fs[3]]).unwrap();
        worst = worst.max(r);
    }
    lines.push(SuiteLine { name: "telescoping-global", residual: worst, tolerance: 1e-9 });

    // Product identity for T_d.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = signed_2d::<f64>(n, &mut rng);
        let g = signed_2d::<f64>(n, &mut rng);
        worst = worst.max(product_identity_residual(&f, &g).unwrap());
    }
    lines.push(SuiteLine { name: "product-identity", residual: worst, tolerance: 1e-9 });

    // Λ_d equals the local form over the full-depth tree.
    let mut worst = 0.0f64;
    for _ in 0..trials.min(20) {
        let f = nonneg_2d::<f64>(n, &mut rng);
        let g = nonneg_2d::<f64>(n, &mut rng);
        let h = nonneg_2d::<f64>(n, &mut rng);
        let direct = lambda_d(&f, &g, &h).unwrap();
        let local = lambda_tree(&ConvexTree::full_grid(n - 1), &f, &g, &h).unwrap();
        worst = worst.max((direct - local).abs());
    }
    lines.push(SuiteLine { name: "lambda-full-tree", residual: worst, tolerance: 1e-9 });

    // Exact re-summation over the stopping-time trees.
    let mut worst = 0.0f64;
    for _ in 0..trials.min(10) {
        let f = nonneg_2d::<f64>(n, &mut rng);
        let g = nonneg_2d::<f64>(n, &mut rng);
        let h = nonneg_2d::<f64>(n, &mut rng);
        worst = worst.max(resummation_residual(&f, &g, &h).unwrap());
    }
    lines.push(SuiteLine { name: "resummation", residual: worst, tolerance: 1e-9 });

    // Vanishing of T_d(F, G - G̃) off the exceptional set.
    let mut worst = 0.0f64;
    for _ in 0..trials.min(20) {
        let f = signed_2d::<f64>(n, &mut rng);
        let g = spiky_nonneg_2d::<f64>(n, &mut rng);
        worst = worst.max(vanishing_residual(&f, &g, 1.0).unwrap());
    }
    lines.push(SuiteLine { name: "cz-vanishing", residual: worst, tolerance: 1e-10 });

    // Endpoint construction reproduces its closed form bit-exactly.
    let mut worst = 0.0f64;
    for m in 1..=n.min(6) {
        let (f, g) = counterexample_linfty_lq::<f64>(m, n).unwrap();
        let t = t_d(&f, &g).unwrap();
        let cut = 1usize << (n - m);
        for ix in 0..t.side() {
            for iy in 0..t.side() {
                let expect = if ix < cut { m as f64 } else { 0.0 };
                worst = worst.max((t.get(ix, iy) - expect).abs());
            }
        }
    }
    lines.push(SuiteLine { name: "counterexample-output", residual: worst, tolerance: 0.0 });

    // Three-dimensional telescoping identity.
    let n3 = n.clamp(2, 3);
    let mut worst = 0.0f64;
    for _ in 0..trials.min(20) {
        let fs: Vec<StepFunction3D<f64>> = (0..8).map(|_| signed_3d(n3, &mut rng)).collect();
        let refs: [&StepFunction3D<f64>; 8] = std::array::from_fn(|j| &fs[j]);
        let tree = convex_tree3(n3, &mut rng, 0.4);
        worst = worst.max(telescoping3d_residual(&tree, refs).unwrap());
    }
    lines.push(SuiteLine { name: "telescoping-dim3", residual: worst, tolerance: 1e-9 });

    // Mollifier support identities are exact on the lattice.
    let lattice = 8usize;
    let family = build_mollifiers::<f64>(lattice, 0, lattice as i32 - 3).unwrap();
    let support = family.verify_support_identities();
    let dev = support
        .theta_on_rho
        .max(support.partition_on_psi)
        .max(support.vanishing_far_away);
    lines.push(SuiteLine { name: "mollifier-supports", residual: dev, tolerance: 0.0 });

    // Comb decomposition of T_c.
    let mut worst = 0.0f64;
    for _ in 0..trials.min(3) {
        let f = random_band_limited_2d(&family, 4, &mut rng).unwrap();
        let g = random_band_limited_2d(&family, 4, &mut rng).unwrap();
        worst = worst.max(decomposition_identity_residual(&f, &g, &family).unwrap());
    }
    lines.push(SuiteLine { name: "comb-decomposition", residual: worst, tolerance: 1e-8 });

    // Sparse paraproduct equals the shifted paraproduct of the comb
    // projection.
    let mut worst = 0.0f64;
    {
        let f = random_band_limited_2d(&family, 4, &mut rng).unwrap();
        let g = random_band_limited_2d(&family, 4, &mut rng).unwrap();
        for (b10, l) in [(0i32, 1usize), (10, 4)] {
            let direct = sparse_paraproduct(&f, &g, b10, l, &family).unwrap();
            let projected = comb_projection(&g, b10, l, &family).unwrap();
            let via = t_phi_theta_b(&f, &projected, b10, &family).unwrap();
            for (a, b) in direct.values().iter().zip(via.values()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    lines.push(SuiteLine { name: "sparse-reduction", residual: worst, tolerance: 1e-10 });

    lines
}
