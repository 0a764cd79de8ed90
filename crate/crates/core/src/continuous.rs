//! Discrete periodic Fourier model: mollifier symbols on the frequency
//! lattice of the circle, one-variable multiplier operators, the continuous
//! twisted paraproduct with its sparse variants, and the square function
//! comparing convolution averages to martingale averages.
//!
//! Symbols are sampled once per scale index and reused, and the plateau
//! transition is quantized to multiples of 2⁻²⁶, so every telescoping sum of
//! sampled symbols is exact in double precision: the support identities hold
//! bit-for-bit at every lattice frequency.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::martingale::{martingale_average, martingale_average_1d};
use crate::scalar::{real, Real};
use crate::step::{Axis, StepFunction1D, StepFunction2D};

/// `2^L` equispaced samples of `[0,1)` with the centered frequency lattice
/// `ξ ∈ {-2^{L-1}, …, 2^{L-1}-1}`.
pub struct PeriodicGrid1D<T: Real + FftNum> {
    log2_size: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real + FftNum> PeriodicGrid1D<T> {
    pub fn new(log2_size: usize) -> Self {
        let mut planner = FftPlanner::new();
        let size = 1usize << log2_size;
        Self {
            log2_size,
            fwd: planner.plan_fft_forward(size),
            inv: planner.plan_fft_inverse(size),
        }
    }

    pub fn log2_size(&self) -> usize {
        self.log2_size
    }

    pub fn size(&self) -> usize {
        1usize << self.log2_size
    }

    /// Signed frequency of an FFT bin.
    pub fn frequency(&self, bin: usize) -> i64 {
        let size = self.size() as i64;
        let b = bin as i64;
        if b < size / 2 {
            b
        } else {
            b - size
        }
    }

    /// Applies a real multiplier symbol (indexed by FFT bin) along one axis.
    pub fn apply_symbol_2d(
        &self,
        f: &StepFunction2D<T>,
        symbol: &[T],
        axis: Axis,
    ) -> Result<StepFunction2D<T>> {
        let size = self.size();
        if f.resolution() != self.log2_size {
            return Err(Error::ResolutionMismatch { left: f.resolution(), right: self.log2_size });
        }
        if symbol.len() != size {
            return Err(Error::ResolutionMismatch { left: symbol.len(), right: size });
        }
        let norm = T::one() / real::<T>(size as f64);
        let mut out = StepFunction2D::zero(self.log2_size);
        match axis {
            Axis::Y => {
                let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
                let mut scratch = vec![
                    Complex::new(T::zero(), T::zero());
                    self.fwd
                        .get_inplace_scratch_len()
                        .max(self.inv.get_inplace_scratch_len())
                ];
                for ix in 0..size {
                    for (b, &v) in buf.iter_mut().zip(f.row(ix)) {
                        *b = Complex::new(v, T::zero());
                    }
                    self.fwd.process_with_scratch(&mut buf, &mut scratch);
                    for (b, &s) in buf.iter_mut().zip(symbol) {
                        *b = *b * s;
                    }
                    self.inv.process_with_scratch(&mut buf, &mut scratch);
                    for (o, b) in out.row_mut(ix).iter_mut().zip(&buf) {
                        *o = b.re * norm;
                    }
                }
            }
            Axis::X => {
                let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
                let mut scratch = vec![
                    Complex::new(T::zero(), T::zero());
                    self.fwd
                        .get_inplace_scratch_len()
                        .max(self.inv.get_inplace_scratch_len())
                ];
                for iy in 0..size {
                    for (ix, b) in buf.iter_mut().enumerate() {
                        *b = Complex::new(f.get(ix, iy), T::zero());
                    }
                    self.fwd.process_with_scratch(&mut buf, &mut scratch);
                    for (b, &s) in buf.iter_mut().zip(symbol) {
                        *b = *b * s;
                    }
                    self.inv.process_with_scratch(&mut buf, &mut scratch);
                    for (ix, b) in buf.iter().enumerate() {
                        out.set(ix, iy, b.re * norm);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies a real multiplier symbol to a 1D sample vector.
    pub fn apply_symbol_1d(
        &self,
        f: &StepFunction1D<T>,
        symbol: &[T],
    ) -> Result<StepFunction1D<T>> {
        let size = self.size();
        if f.len() != size || symbol.len() != size {
            return Err(Error::ResolutionMismatch { left: f.len(), right: size });
        }
        let mut buf: Vec<Complex<T>> =
            f.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut scratch = vec![
            Complex::new(T::zero(), T::zero());
            self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())
        ];
        self.fwd.process_with_scratch(&mut buf, &mut scratch);
        for (b, &s) in buf.iter_mut().zip(symbol) {
            *b = *b * s;
        }
        self.inv.process_with_scratch(&mut buf, &mut scratch);
        let norm = T::one() / real::<T>(size as f64);
        StepFunction1D::new(self.log2_size, buf.iter().map(|b| b.re * norm).collect())
    }
}

const PLATEAU_INNER: f64 = 0.6; // φ̂ = 1 for |ξ| ≤ 2^{-0.6}
const PLATEAU_OUTER: f64 = 0.4; // φ̂ = 0 for |ξ| ≥ 2^{-0.4}
const QUANT: f64 = 67108864.0; // 2^26

/// Plateau profile of the base mollifier: 1 inside radius `2^-0.6`, 0 outside
/// radius `2^-0.4`, a smoothstep in log-frequency between. Transition values
/// are quantized to multiples of 2⁻²⁶ so that differences and short sums of
/// sampled symbols are exact in `f64`.
pub fn default_plateau_profile(u: f64) -> f64 {
    let a = u.abs();
    if a <= f64::exp2(-PLATEAU_INNER) {
        1.0
    } else if a >= f64::exp2(-PLATEAU_OUTER) {
        0.0
    } else {
        let s = (a.log2() + PLATEAU_INNER) / (PLATEAU_INNER - PLATEAU_OUTER);
        let v = 1.0 - s * s * (3.0 - 2.0 * s);
        (v * QUANT).round() / QUANT
    }
}

/// Band profile of ψ̂: supported in `1/2 ≤ |ξ| ≤ 2`, a C² bump in
/// log-frequency.
pub fn default_band_profile(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 || a >= 2.0 {
        0.0
    } else {
        let r = a.log2();
        (1.0 - r * r).powi(3)
    }
}

fn default_band_log_derivative(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 || a >= 2.0 {
        0.0
    } else {
        let r = a.log2();
        -6.0 * r * (1.0 - r * r).powi(2)
    }
}

/// Sampled mollifier symbols on the frequency lattice: the plateau family
/// `φ̂_a` over tenth-integer scale shifts, the bands `ψ̂_k`, and the combed
/// bands `Ψ̂_l = Σ_m ψ̂_{10m+l}`. Scale shifts are keyed by integer tenths so
/// the same shift always reuses the same sampled vector.
pub struct MollifierFamily<T: Real + FftNum> {
    grid: PeriodicGrid1D<T>,
    k_lo: i32,
    k_hi: i32,
    phi: BTreeMap<i32, Vec<T>>,
    psi: BTreeMap<i32, Vec<T>>,
    big_psi: Vec<Vec<T>>,
    default_profiles: bool,
}

/// Builds the family over scales `k ∈ [k_lo, k_hi]` on a `2^L` lattice,
/// enforcing the Nyquist bound `2^{k+1} < 2^{L-1}`.
pub fn build_mollifiers<T: Real + FftNum>(
    log2_size: usize,
    k_lo: i32,
    k_hi: i32,
) -> Result<MollifierFamily<T>> {
    build_mollifiers_with(log2_size, k_lo, k_hi, default_plateau_profile, default_band_profile)
        .map(|mut fam| {
            fam.default_profiles = true;
            fam
        })
}

/// Same as [`build_mollifiers`] with custom base profiles.
pub fn build_mollifiers_with<T: Real + FftNum>(
    log2_size: usize,
    k_lo: i32,
    k_hi: i32,
    plateau: impl Fn(f64) -> f64,
    band: impl Fn(f64) -> f64,
) -> Result<MollifierFamily<T>> {
    if log2_size < 3 {
        return Err(Error::ScaleOutOfRange { scale: log2_size, resolution: 3 });
    }
    if k_lo > k_hi || k_lo < 0 {
        return Err(Error::ParamOutOfRange(format!("scale range {k_lo}..={k_hi}")));
    }
    if k_hi + 3 > log2_size as i32 {
        return Err(Error::NyquistViolation { k: k_hi, log2_size });
    }
    let at_zero = plateau(0.0);
    if at_zero != 1.0 {
        return Err(Error::NotNormalized { at_zero });
    }
    let grid = PeriodicGrid1D::new(log2_size);
    let size = grid.size();
    let sample = |scale_tenths: i32, profile: &dyn Fn(f64) -> f64| -> Vec<T> {
        let scale = f64::exp2(-(scale_tenths as f64) / 10.0);
        (0..size)
            .map(|bin| real::<T>(profile(scale * grid.frequency(bin) as f64)))
            .collect()
    };
    let mut phi = BTreeMap::new();
    for t in (10 * k_lo - 20)..=(10 * k_hi + 30) {
        phi.insert(t, sample(t, &plateau));
    }
    let mut psi = BTreeMap::new();
    for k in k_lo..=k_hi {
        psi.insert(k, sample(10 * k, &band));
    }
    // Ψ̂_l: all comb translates 10m+l that can touch the lattice.
    let mut big_psi = Vec::with_capacity(10);
    for l in 0..10usize {
        let mut acc = vec![T::zero(); size];
        let mut m = 0i32;
        while 10 * m + (l as i32) <= log2_size as i32 + 1 {
            let v = sample(10 * (10 * m + l as i32), &band);
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
            m += 1;
        }
        big_psi.push(acc);
    }
    Ok(MollifierFamily { grid, k_lo, k_hi, phi, psi, big_psi, default_profiles: false })
}

/// Maximal deviations of the three support identities over the whole lattice;
/// all three are exactly zero for the default profiles.
#[derive(Clone, Copy, Debug)]
pub struct SupportIdentityReport {
    /// `max |ϑ̂_a ρ̂_a - ρ̂_a|` over all sampled shifts `a`.
    pub theta_on_rho: f64,
    /// `max |Σ_i ρ̂_{k+0.1i} - 1|` over the support of ψ̂_k.
    pub partition_on_psi: f64,
    /// `max |Σ_i ρ̂_{k+0.1i}|` outside the band `(2^{k-2.1}, 2^{k+2.2})`;
    /// every ψ̂_{k'} with `|k'-k| ≥ 10` is supported outside it.
    pub vanishing_far_away: f64,
}

impl<T: Real + FftNum> MollifierFamily<T> {
    pub fn grid(&self) -> &PeriodicGrid1D<T> {
        &self.grid
    }

    pub fn log2_size(&self) -> usize {
        self.grid.log2_size()
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn scale_range(&self) -> RangeInclusive<i32> {
        self.k_lo..=self.k_hi
    }

    /// `φ̂` at an integer-tenths scale shift.
    pub fn phi_hat_tenths(&self, tenths: i32) -> &[T] {
        self.phi.get(&tenths).expect("tenth shift inside the sampled range")
    }

    pub fn phi_hat(&self, k: i32) -> &[T] {
        self.phi_hat_tenths(10 * k)
    }

    /// `ϑ̂_a = φ̂_{a+1} - φ̂_a` at tenths resolution of `a`.
    pub fn theta_hat_tenths(&self, tenths: i32) -> Vec<T> {
        let hi = self.phi_hat_tenths(tenths + 10);
        let lo = self.phi_hat_tenths(tenths);
        hi.iter().zip(lo).map(|(&a, &b)| a - b).collect()
    }

    /// `ρ̂_a = φ̂_{a+0.6} - φ̂_{a+0.5}` at tenths resolution of `a`.
    pub fn rho_hat_tenths(&self, tenths: i32) -> Vec<T> {
        let hi = self.phi_hat_tenths(tenths + 6);
        let lo = self.phi_hat_tenths(tenths + 5);
        hi.iter().zip(lo).map(|(&a, &b)| a - b).collect()
    }

    pub fn psi_hat(&self, k: i32) -> &[T] {
        self.psi.get(&k).expect("scale inside the family range")
    }

    /// `Ψ̂_l = Σ_m ψ̂_{10m+l}` sampled on the lattice.
    pub fn big_psi_hat(&self, l: usize) -> &[T] {
        &self.big_psi[l]
    }

    /// `Σ_{i=-20}^{20} ρ̂_{k+0.1i}` accumulated in index order.
    pub fn rho_partition_sum(&self, k: i32) -> Vec<T> {
        let mut acc = vec![T::zero(); self.size()];
        for i in -20..=20 {
            let rho = self.rho_hat_tenths(10 * k + i);
            for (a, b) in acc.iter_mut().zip(rho) {
                *a += b;
            }
        }
        acc
    }

    pub fn verify_support_identities(&self) -> SupportIdentityReport {
        let mut theta_on_rho = 0.0f64;
        for tenths in (10 * self.k_lo - 20)..=(10 * self.k_hi + 20) {
            let theta = self.theta_hat_tenths(tenths);
            let rho = self.rho_hat_tenths(tenths);
            for (t, r) in theta.iter().zip(&rho) {
                let dev = (*t * *r - *r).to_f64().unwrap().abs();
                theta_on_rho = theta_on_rho.max(dev);
            }
        }
        let mut partition_on_psi = 0.0f64;
        let mut vanishing_far_away = 0.0f64;
        for k in self.k_lo..=self.k_hi {
            let sum = self.rho_partition_sum(k);
            let psi = self.psi_hat(k);
            for bin in 0..self.size() {
                let s = sum[bin].to_f64().unwrap();
                if psi[bin] != T::zero() {
                    partition_on_psi = partition_on_psi.max((s - 1.0).abs());
                }
                let xi = self.grid.frequency(bin).unsigned_abs() as f64;
                let inside_band = xi > f64::exp2(k as f64 - 2.1) && xi < f64::exp2(k as f64 + 2.2);
                if !inside_band {
                    vanishing_far_away = vanishing_far_away.max(s.abs());
                }
            }
        }
        SupportIdentityReport { theta_on_rho, partition_on_psi, vanishing_far_away }
    }

    /// Recorded symbol bounds for `Ψ̂_l`: `(max |Ψ̂_l|, max |η·dΨ̂_l/dη|)` on
    /// the lattice, the derivative taken analytically for the default band
    /// profile.
    pub fn big_psi_symbol_bounds(&self, l: usize) -> Result<(f64, f64)> {
        if !self.default_profiles {
            return Err(Error::ParamOutOfRange(
                "symbol bounds use the default band profile".into(),
            ));
        }
        let mut sup = 0.0f64;
        let mut sup_derivative = 0.0f64;
        for bin in 0..self.size() {
            let v = self.big_psi[l][bin].to_f64().unwrap().abs();
            sup = sup.max(v);
            let xi = self.grid.frequency(bin) as f64;
            if xi != 0.0 {
                let mut d = 0.0;
                let mut m = 0i32;
                while 10 * m + (l as i32) <= self.log2_size() as i32 + 1 {
                    let k = (10 * m + l as i32) as f64;
                    d += default_band_log_derivative(xi.abs() * f64::exp2(-k));
                    m += 1;
                }
                sup_derivative = sup_derivative.max((d / std::f64::consts::LN_2).abs());
            }
        }
        Ok((sup, sup_derivative))
    }
}

fn check_field<T: Real + FftNum>(
    family: &MollifierFamily<T>,
    f: &StepFunction2D<T>,
) -> Result<()> {
    if f.resolution() != family.log2_size() {
        return Err(Error::ResolutionMismatch {
            left: f.resolution(),
            right: family.log2_size(),
        });
    }
    Ok(())
}

/// `T_c(F,G) = Σ_k (P_{φ_k}^{(1)}F)(P_{ψ_k}^{(2)}G)` over the family's scale
/// range.
pub fn t_c<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_field(family, f)?;
    check_field(family, g)?;
    let mut out = StepFunction2D::zero(family.log2_size());
    for k in family.scale_range() {
        let pf = family.grid.apply_symbol_2d(f, family.phi_hat(k), Axis::X)?;
        let pg = family.grid.apply_symbol_2d(g, family.psi_hat(k), Axis::Y)?;
        for ((o, &a), &b) in out.values_mut().iter_mut().zip(pf.values()).zip(pg.values()) {
            *o += a * b;
        }
    }
    Ok(out)
}

fn check_b10(b10: i32) -> Result<()> {
    if !(-20..=20).contains(&b10) {
        return Err(Error::ParamOutOfRange(format!("shift b = {}/10 not in [-2, 2]", b10)));
    }
    Ok(())
}

/// `T_{φ,ϑ,b}(F,G) = Σ_k (P_{φ_k}^{(1)}F)(P_{ϑ_{k+b}}^{(2)}G)`, the shift `b`
/// given in integer tenths.
pub fn t_phi_theta_b<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    b10: i32,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_b10(b10)?;
    check_field(family, f)?;
    check_field(family, g)?;
    let mut out = StepFunction2D::zero(family.log2_size());
    for k in family.scale_range() {
        let pf = family.grid.apply_symbol_2d(f, family.phi_hat(k), Axis::X)?;
        let theta = family.theta_hat_tenths(10 * k + b10);
        let pg = family.grid.apply_symbol_2d(g, &theta, Axis::Y)?;
        for ((o, &a), &b) in out.values_mut().iter_mut().zip(pf.values()).zip(pg.values()) {
            *o += a * b;
        }
    }
    Ok(out)
}

/// Mixed operator `T_{aux,b}(F,G) = Σ_k (E_k^{(1)}F)(P_{ϑ_{k+b}}^{(2)}G)`
/// pairing martingale averages with band projections.
pub fn t_aux_b<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    b10: i32,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_b10(b10)?;
    check_field(family, f)?;
    check_field(family, g)?;
    let mut out = StepFunction2D::zero(family.log2_size());
    for k in family.scale_range() {
        let ef = martingale_average(f, Axis::X, k as usize)?;
        let theta = family.theta_hat_tenths(10 * k + b10);
        let pg = family.grid.apply_symbol_2d(g, &theta, Axis::Y)?;
        for ((o, &a), &b) in out.values_mut().iter_mut().zip(ef.values()).zip(pg.values()) {
            *o += a * b;
        }
    }
    Ok(out)
}

/// Sparse paraproduct
/// `T^{10ℤ}_{φ,ρ,b,l}(F,G) = Σ_j (P_{φ_{10j+l}}^{(1)}F)(P_{ρ_{10j+l+b}}^{(2)}G)`
/// summed over the `j` with `10j+l` inside the family's scale range.
pub fn sparse_paraproduct<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    b10: i32,
    l: usize,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_b10(b10)?;
    if l > 9 {
        return Err(Error::ParamOutOfRange(format!("comb residue l = {l} not in 0..=9")));
    }
    check_field(family, f)?;
    check_field(family, g)?;
    let mut out = StepFunction2D::zero(family.log2_size());
    let mut j = (family.k_lo - l as i32).div_euclid(10);
    loop {
        let k = 10 * j + l as i32;
        if k > family.k_hi {
            break;
        }
        if k >= family.k_lo {
            let pf = family.grid.apply_symbol_2d(f, family.phi_hat(k), Axis::X)?;
            let rho = family.rho_hat_tenths(10 * k + b10);
            let pg = family.grid.apply_symbol_2d(g, &rho, Axis::Y)?;
            for ((o, &a), &b) in out.values_mut().iter_mut().zip(pf.values()).zip(pg.values())
            {
                *o += a * b;
            }
        }
        j += 1;
    }
    Ok(out)
}

/// `G̃_{b,l} = Σ_j P^{(2)}_{ρ_{10j+l+b}} G`, the comb projection that turns
/// the sparse paraproduct into `T_{φ,ϑ,b}(F, G̃_{b,l})`.
pub fn comb_projection<T: Real + FftNum>(
    g: &StepFunction2D<T>,
    b10: i32,
    l: usize,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_b10(b10)?;
    if l > 9 {
        return Err(Error::ParamOutOfRange(format!("comb residue l = {l} not in 0..=9")));
    }
    check_field(family, g)?;
    let mut symbol = vec![T::zero(); family.size()];
    let mut j = (family.k_lo - l as i32).div_euclid(10);
    loop {
        let k = 10 * j + l as i32;
        if k > family.k_hi {
            break;
        }
        if k >= family.k_lo {
            for (s, r) in symbol.iter_mut().zip(family.rho_hat_tenths(10 * k + b10)) {
                *s += r;
            }
        }
        j += 1;
    }
    family.grid.apply_symbol_2d(g, &symbol, Axis::Y)
}

/// Square function `S_{JSW,φ} f = (Σ_k |P_{φ_k}f - E_k f|²)^{1/2}` over the
/// family's scale range; requires the normalized plateau `φ̂(0) = 1`.
pub fn jsw_square_function<T: Real + FftNum>(
    f: &StepFunction1D<T>,
    family: &MollifierFamily<T>,
) -> Result<StepFunction1D<T>> {
    let at_zero = {
        let zero_bin = 0usize;
        family.phi_hat(family.k_lo)[zero_bin].to_f64().unwrap()
    };
    if at_zero != 1.0 {
        return Err(Error::NotNormalized { at_zero });
    }
    if f.len() != family.size() {
        return Err(Error::ResolutionMismatch { left: f.len(), right: family.size() });
    }
    let mut acc = StepFunction1D::zero(family.log2_size());
    for k in family.scale_range() {
        let pf = family.grid.apply_symbol_1d(f, family.phi_hat(k))?;
        let ef = martingale_average_1d(f, k as usize)?;
        for ((a, &p), &e) in acc.values_mut().iter_mut().zip(pf.values()).zip(ef.values()) {
            let d = p - e;
            *a += d * d;
        }
    }
    Ok(acc.map(|v: T| v.sqrt()))
}

/// Two-dimensional version of the JSW square function in one axis.
pub fn jsw_square_function_2d<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    axis: Axis,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_field(family, f)?;
    let mut acc = StepFunction2D::zero(family.log2_size());
    for k in family.scale_range() {
        let pf = family.grid.apply_symbol_2d(f, family.phi_hat(k), axis)?;
        let ef = martingale_average(f, axis, k as usize)?;
        for ((a, &p), &e) in acc.values_mut().iter_mut().zip(pf.values()).zip(ef.values()) {
            let d = p - e;
            *a += d * d;
        }
    }
    Ok(acc.map(|v: T| v.sqrt()))
}

/// `(Σ_k |P^{(axis)}_{σ_k} G|²)^{1/2}` for the shifted band symbols
/// `σ_k = ϑ̂_{k+b}` (or `ψ̂_k` when `use_psi`).
pub fn band_square_function_2d<T: Real + FftNum>(
    g: &StepFunction2D<T>,
    axis: Axis,
    b10: i32,
    use_psi: bool,
    family: &MollifierFamily<T>,
) -> Result<StepFunction2D<T>> {
    check_b10(b10)?;
    check_field(family, g)?;
    let mut acc = StepFunction2D::zero(family.log2_size());
    for k in family.scale_range() {
        let pg = if use_psi {
            family.grid.apply_symbol_2d(g, family.psi_hat(k), axis)?
        } else {
            let theta = family.theta_hat_tenths(10 * k + b10);
            family.grid.apply_symbol_2d(g, &theta, axis)?
        };
        for (a, &p) in acc.values_mut().iter_mut().zip(pg.values()) {
            *a += p * p;
        }
    }
    Ok(acc.map(|v: T| v.sqrt()))
}

/// Max-abs residual of the comb decomposition of `T_c`:
/// `T_c(F,G) = Σ_{l=0}^{9} Σ_{i=-20}^{20} T^{10ℤ}_{φ,ρ,0.1i,l}(F, P^{(2)}_{Ψ_l}G)`.
///
/// The inner `i`-sum is accumulated at the symbol level (the first factor of
/// each product does not depend on `i`), which is the same sum with fewer
/// transforms.
pub fn decomposition_identity_residual<T: Real + FftNum>(
    f: &StepFunction2D<T>,
    g: &StepFunction2D<T>,
    family: &MollifierFamily<T>,
) -> Result<T> {
    check_field(family, f)?;
    check_field(family, g)?;
    let tc = t_c(f, g, family)?;
    let mut rhs = StepFunction2D::zero(family.log2_size());
    for l in 0..10usize {
        let gl = family.grid.apply_symbol_2d(g, family.big_psi_hat(l), Axis::Y)?;
        let mut j = (family.k_lo - l as i32).div_euclid(10);
        loop {
            let k = 10 * j + l as i32;
            if k > family.k_hi {
                break;
            }
            if k >= family.k_lo {
                let pf = family.grid.apply_symbol_2d(f, family.phi_hat(k), Axis::X)?;
                let summed_rho = family.rho_partition_sum(k);
                let pg = family.grid.apply_symbol_2d(&gl, &summed_rho, Axis::Y)?;
                for ((o, &a), &b) in
                    rhs.values_mut().iter_mut().zip(pf.values()).zip(pg.values())
                {
                    *o += a * b;
                }
            }
            j += 1;
        }
    }
    let mut worst = T::zero();
    for (a, b) in tc.values().iter().zip(rhs.values()) {
        worst = worst.max((*a - *b).abs());
    }
    Ok(worst)
}

/// Band-limited random field: white noise low-passed along both axes with the
/// plateau at the given scale, rescaled to unit sup norm.
pub fn random_band_limited_2d<T: Real + FftNum>(
    family: &MollifierFamily<T>,
    cutoff_k: i32,
    rng: &mut impl rand::Rng,
) -> Result<StepFunction2D<T>> {
    let noise = StepFunction2D::from_fn(family.log2_size(), |_, _| {
        real::<T>(rng.gen_range(-1.0..1.0))
    });
    let symbol = family.phi_hat(cutoff_k);
    let once = family.grid.apply_symbol_2d(&noise, symbol, Axis::X)?;
    let field = family.grid.apply_symbol_2d(&once, symbol, Axis::Y)?;
    let sup = field.sup_abs();
    if sup == T::zero() {
        return Ok(field);
    }
    Ok(field.scaled(T::one() / sup))
}
