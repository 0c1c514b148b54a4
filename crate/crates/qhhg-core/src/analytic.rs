//! Closed-form multimode evolution: the nonlinear pump phase `f(t; Q_L)`, the
//! quadrature-dependent harmonic displacements `α_j(t; Q_L)`, and the
//! classical-limit emission amplitude.
//!
//! Everything here is a Jacobi-Anger expansion of the band nonlinearity
//! combined with the windowed time integrals from [`crate::special`]:
//!
//! ```text
//! f(t;Q_L) = μ [J₀(γ_L Q_L) − 1](t−t₀)
//!          + 2μ Σ_n (−1)ⁿ J_{2n}(γ_L Q_L) ∫ cos(2nτ) dτ
//!          + 2μ² Σ_j Σ_{n,m} (−1)^{n+m} γ_j² J_{2n−1} J_{2m−1} I_j(n,m)
//!
//! α_j(t;Q_L) = i√2 μ γ_j Σ_n (−1)ⁿ J_{2n−1}(γ_L Q_L) ∫ cos((2n−1)τ) e^{ijτ} dτ
//! ```
//!
//! with `μ = n_e E_g/ω_L` and `I_j(n,m)` the double time integral. The sums
//! are truncated once the Bessel tail drops below 1e-16 relative.
//!
//! In the classical limit `γ_L Q_L → ω_B/ω_L` the emitted amplitude at
//! frequency `Ω` (drive units) over a window `t` is
//!
//! ```text
//! E_Ω = μ Ω Σ_{m odd ≥ 3} J_m(ω_B/ω_L) ∫₀ᵗ cos(Ωτ) cos(mτ) dτ ,
//! ```
//!
//! which develops the odd-harmonic comb; at `Ω = m` the window integral
//! degenerates into secular growth `[sin(2mt)/2 + mt]/(2m)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{self, LaserInput, MaterialInput, SystemParams, EV, HBAR};
use crate::special::{
    bessel_j_row, cos_exp_integral, cos_window_integral, double_time_integral, truncation_order,
    MAX_BESSEL_ORDER,
};
use crate::{lit, Real};

/// Phase and displacements evaluated at one quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAndDisplacements<T: Real> {
    /// Position quadrature Q_L where the solution was evaluated.
    pub q_l: T,
    /// Pump phase f(t; Q_L), real.
    pub f_value: T,
    /// Harmonic displacements α_j for j = 2..=M.
    pub alpha: Vec<Complex<T>>,
    /// Evaluation time, units 1/ω_L.
    pub t: T,
}

/// Sampled emission spectrum over Ω/ω_L.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries<T: Real> {
    pub omega_over_wl: Vec<T>,
    pub amplitude: Vec<T>,
    /// `intensity[i] = amplitude[i]²`, arbitrary units.
    pub intensity: Vec<T>,
    /// Interaction window of the underlying evaluation.
    pub t_interaction: T,
}

/// Node-independent pieces of the solution at fixed `(params, t)`.
///
/// The time integrals do not depend on Q_L, so they are computed once; each
/// quadrature node then only contributes its row of Bessel values.
pub(crate) struct EvolutionTables<T: Real> {
    /// Number of odd-order terms (n = 1..=n_odd covers J_1 .. J_{2 n_odd − 1}).
    n_odd: usize,
    /// Number of even-order terms (n = 1..=n_even covers J_2 .. J_{2 n_even}).
    n_even: usize,
    /// Highest Bessel order any evaluation touches.
    pub max_order: u32,
    /// μ (t − t₀), multiplying (J₀(u) − 1).
    secular: T,
    /// 2 μ (−1)ⁿ ∫cos(2nτ)dτ for n = 1..=n_even.
    even_coeff: Vec<T>,
    /// 2 μ² (−1)^{n+m} Σ_j γ_j² I_j(n,m), flattened n-major, n_odd × n_odd.
    pair_coeff: Vec<T>,
    /// i√2 μ γ_j (−1)ⁿ K(2n−1, j) per mode (outer index j−2).
    alpha_coeff: Vec<Vec<Complex<T>>>,
}

impl<T: Real> EvolutionTables<T> {
    /// Tables valid for |γ_L Q_L| up to `u_max`.
    pub(crate) fn new(p: &SystemParams<T>, t: T, u_max: T) -> Self {
        let top = truncation_order(u_max).min(MAX_BESSEL_ORDER);
        let n_odd = top.div_ceil(2) as usize;
        let n_even = (top / 2) as usize;
        let mu = p.coupling_strength;
        let (t0, two) = (p.t_start, lit::<T>(2.0));

        let even_coeff = (1..=n_even)
            .map(|n| {
                let sign = if n % 2 == 1 { -T::one() } else { T::one() };
                two * mu * sign * cos_window_integral(lit(2.0 * n as f64), t0, t)
            })
            .collect();

        let mut pair_coeff = vec![T::zero(); n_odd * n_odd];
        for n in 1..=n_odd {
            for m in 1..=n_odd {
                let mut sum_j = T::zero();
                for j in p.modes() {
                    let gj = p.gamma(j);
                    sum_j += gj * gj * double_time_integral(n as u32, m as u32, j, t0, t);
                }
                let sign = if (n + m) % 2 == 1 {
                    -T::one()
                } else {
                    T::one()
                };
                pair_coeff[(n - 1) * n_odd + (m - 1)] = two * mu * mu * sign * sum_j;
            }
        }

        let alpha_coeff = p
            .modes()
            .map(|j| {
                let pref = Complex::new(T::zero(), lit::<T>(2.0).sqrt() * mu * p.gamma(j));
                (1..=n_odd)
                    .map(|n| {
                        let sign = if n % 2 == 1 { -T::one() } else { T::one() };
                        let k = cos_exp_integral((2 * n - 1) as u32, j, t0, t).value;
                        pref * k * sign
                    })
                    .collect()
            })
            .collect();

        EvolutionTables {
            n_odd,
            n_even,
            max_order: top,
            secular: mu * (t - t0),
            even_coeff,
            pair_coeff,
            alpha_coeff,
        }
    }

    /// Phase f from a Bessel row at `u = γ_L Q_L` (row length ≥ max_order + 1).
    pub(crate) fn phase(&self, row: &[T]) -> T {
        let mut f = self.secular * (row[0] - T::one());
        for n in 1..=self.n_even {
            f += self.even_coeff[n - 1] * row[2 * n];
        }
        for n in 1..=self.n_odd {
            let jn = row[2 * n - 1];
            let base = (n - 1) * self.n_odd;
            for m in 1..=self.n_odd {
                f += self.pair_coeff[base + (m - 1)] * jn * row[2 * m - 1];
            }
        }
        f
    }

    /// Displacements α_j (j = 2..=M) from a Bessel row at `u = γ_L Q_L`.
    pub(crate) fn alpha(&self, row: &[T]) -> Vec<Complex<T>> {
        self.alpha_coeff
            .iter()
            .map(|coeff| {
                let mut a = Complex::new(T::zero(), T::zero());
                for (n, c) in coeff.iter().enumerate() {
                    a += *c * row[2 * n + 1];
                }
                a
            })
            .collect()
    }

    /// ∂α_j/∂Q_L from a Bessel row (needs orders up to max_order + 1).
    pub(crate) fn alpha_derivative(&self, row: &[T], gamma_l: T) -> Vec<Complex<T>> {
        let half = lit::<T>(0.5);
        self.alpha_coeff
            .iter()
            .map(|coeff| {
                let mut a = Complex::new(T::zero(), T::zero());
                for (n, c) in coeff.iter().enumerate() {
                    let k = 2 * n + 1;
                    let jprime = half * (row[k - 1] - row[k + 1]);
                    a += *c * jprime;
                }
                a * gamma_l
            })
            .collect()
    }
}

fn row_for_argument<T: Real>(max_order: u32, u: T) -> Vec<T> {
    bessel_j_row(max_order, u).expect("γ_L·Q_L within Bessel domain for valid parameters")
}

/// Pump phase f(t; Q_L).
pub fn phase_f<T: Real>(p: &SystemParams<T>, q_l: T, t: T) -> T {
    let u = p.gamma_l * q_l;
    let tables = EvolutionTables::new(p, t, u.abs());
    tables.phase(&row_for_argument(tables.max_order, u))
}

/// Harmonic displacements α_j(t; Q_L) for j = 2..=M.
pub fn displacement_alpha<T: Real>(p: &SystemParams<T>, q_l: T, t: T) -> Vec<Complex<T>> {
    let u = p.gamma_l * q_l;
    let tables = EvolutionTables::new(p, t, u.abs());
    tables.alpha(&row_for_argument(tables.max_order, u))
}

/// Phase and displacements at one quadrature point.
pub fn phase_and_displacements<T: Real>(
    p: &SystemParams<T>,
    q_l: T,
    t: T,
) -> PhaseAndDisplacements<T> {
    let u = p.gamma_l * q_l;
    let tables = EvolutionTables::new(p, t, u.abs());
    let row = row_for_argument(tables.max_order, u);
    PhaseAndDisplacements {
        q_l,
        f_value: tables.phase(&row),
        alpha: tables.alpha(&row),
        t,
    }
}

/// Eq.-style emission amplitude with precomputed Bessel row at `x = ω_B/ω_L`.
fn amplitude_from_row<T: Real>(mu: T, row: &[T], omega: T, t0: T, t: T) -> T {
    let half = lit::<T>(0.5);
    let mut sum = T::zero();
    let mut m = 3usize;
    while m < row.len() {
        let fm = lit::<T>(m as f64);
        let window = half
            * (cos_window_integral(omega + fm, t0, t) + cos_window_integral(omega - fm, t0, t));
        sum += row[m] * window;
        m += 2;
    }
    mu * omega * sum
}

/// Classical-limit harmonic amplitude E_Ω at `Ω/ω_L = omega_over_wl` for a
/// hard interaction window ending at `t`.
///
/// The sum runs over odd drive harmonics m ≥ 3 (m = 1 is the pump); the
/// removable singularity at Ω = m is evaluated through its exact limit, so
/// the amplitude is continuous in Ω.
pub fn harmonic_amplitude<T: Real>(p: &SystemParams<T>, omega_over_wl: T, t: T) -> T {
    let x = p.bloch_ratio;
    let top = truncation_order(x).min(MAX_BESSEL_ORDER);
    let row = row_for_argument(top, x);
    amplitude_from_row(p.coupling_strength, &row, omega_over_wl, p.t_start, t)
}

/// Uniform sampling of `|E_Ω|²` over `[omega_min, omega_max]`.
pub fn spectrum<T: Real>(
    p: &SystemParams<T>,
    omega_min: T,
    omega_max: T,
    samples: usize,
    t: T,
) -> Result<SpectrumSeries<T>> {
    if !(omega_min < omega_max) {
        return Err(Error::InvalidInput(format!(
            "spectrum range: omega_min {omega_min} must be below omega_max {omega_max}"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidInput(format!(
            "spectrum samples: need at least 2, got {samples}"
        )));
    }
    let x = p.bloch_ratio;
    let top = truncation_order(x).min(MAX_BESSEL_ORDER);
    let row = row_for_argument(top, x);
    let step = (omega_max - omega_min) / lit((samples - 1) as f64);
    let omega_over_wl: Vec<T> = (0..samples)
        .map(|i| omega_min + step * lit(i as f64))
        .collect();
    let amplitude: Vec<T> = omega_over_wl
        .par_iter()
        .map(|&w| amplitude_from_row(p.coupling_strength, &row, w, p.t_start, t))
        .collect();
    let intensity = amplitude.iter().map(|&a| a * a).collect();
    Ok(SpectrumSeries {
        omega_over_wl,
        amplitude,
        intensity,
        t_interaction: t,
    })
}

/// Harmonic intensity versus drive intensity: for each I₀ the Bloch parameter
/// is rebuilt and `|E_Ω|²` evaluated at `Ω = harmonic`, over a hard window of
/// the template's FWHM cycles.
pub fn intensity_scan<T: Real>(
    laser_template: &LaserInput<T>,
    material: &MaterialInput<T>,
    harmonic: u32,
    i0_grid: &[T],
) -> Result<Vec<(T, T)>> {
    if harmonic < 3 || harmonic.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "scan harmonic: must be an odd integer >= 3, got {harmonic}"
        )));
    }
    laser_template.validate()?;
    material.validate()?;
    if i0_grid.is_empty() {
        return Err(Error::InvalidInput("scan grid: empty".into()));
    }
    for pair in i0_grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidInput(
                "scan grid: intensities must be positive ascending".into(),
            ));
        }
    }
    if !(i0_grid[0] > T::zero()) {
        return Err(Error::InvalidInput(
            "scan grid: intensities must be positive ascending".into(),
        ));
    }

    let mu = material.carrier_number * material.band_halfwidth_ev * lit(EV)
        / (lit::<T>(HBAR) * laser_template.omega_l_si());
    let t = lit::<T>(2.0 * std::f64::consts::PI) * laser_template.pulse_fwhm_cycles;
    let omega = lit::<T>(harmonic as f64);

    i0_grid
        .par_iter()
        .map(|&i0| {
            let laser = LaserInput {
                peak_intensity_w_cm2: i0,
                ..*laser_template
            };
            let x = params::bloch_ratio(&laser, material)?;
            let top = truncation_order(x).min(MAX_BESSEL_ORDER);
            let row = row_for_argument(top, x);
            let e = amplitude_from_row(mu, &row, omega, T::zero(), t);
            Ok((i0, e * e))
        })
        .collect()
}

/// Linearized pump-harmonic couplings δ_j = ∂[√2 Re α_j]/∂Q_L at
/// Q_L = √(2N₀), one entry per mode j = 2..=M.
///
/// Computed by analytic differentiation of the Bessel series
/// (J'_k = (J_{k−1} − J_{k+1})/2). The real part of the secular (resonant)
/// displacement vanishes at cycle-aligned times, so δ_j is only nonzero for
/// windows that are not whole numbers of optical cycles.
pub fn linearized_coupling<T: Real>(p: &SystemParams<T>, t: T) -> Vec<T> {
    let u0 = p.bloch_ratio;
    let tables = EvolutionTables::new(p, t, u0.abs());
    let row = row_for_argument(tables.max_order + 1, u0);
    let sqrt2 = lit::<T>(2.0).sqrt();
    tables
        .alpha_derivative(&row, p.gamma_l)
        .into_iter()
        .map(|d| sqrt2 * d.re)
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::params::{build_params, intensity_for_bloch_ratio, SimulationConfig};
    use crate::special::tests::{adaptive_simpson, gauss_legendre_16};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// Params with a pinned Bloch parameter on the calibration material.
    pub(crate) fn params_with(x: f64, n0: f64, carriers: f64, m_cut: u32) -> SystemParams<f64> {
        let mut laser = LaserInput::new(1.44, 1.0);
        laser.peak_intensity_w_cm2 = intensity_for_bloch_ratio(x, 1.44, 4.4);
        laser.mean_photon_number = n0;
        let material = MaterialInput::new(4.4, 2.0, carriers);
        let sim = SimulationConfig {
            harmonic_cutoff: m_cut,
            ..Default::default()
        };
        build_params(&laser, &material, &sim).unwrap()
    }

    /// Rescale carrier number so that μ hits an exact target.
    pub(crate) fn params_with_mu(x: f64, n0: f64, mu: f64, m_cut: u32) -> SystemParams<f64> {
        let mut p = params_with(x, n0, 1.0, m_cut);
        let scale = mu / p.coupling_strength;
        p.coupling_strength *= scale;
        p
    }

    #[test]
    fn phase_vanishes_without_coupling_or_offset() {
        let p = params_with_mu(1.0, 1e4, 0.0, 5);
        assert_eq!(phase_f(&p, 140.0, 6.0), 0.0);
        let p = params_with_mu(1.0, 1e4, 0.7, 5);
        assert_abs_diff_eq!(phase_f(&p, 0.0, 9.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn phase_matches_collapsed_integrand_quadrature() {
        // The Jacobi-Anger sums recombine into closed trigonometric
        // integrands, which an independent quadrature can integrate directly:
        //   f = −μ ∫ (1 − cos(u cos τ)) dτ
        //     + (μ²/2) Σ_j γ_j² ∫∫ sin(u cosτ) sin(u cosτ') sin(j(τ'−τ)).
        let p = params_with_mu(1.0, 1e4, 0.1, 4);
        let t = 2.0 * PI;
        for q in [p.q_center(), 0.3 * p.q_center(), -40.0] {
            let u = p.gamma_l * q;
            let one_d = -p.coupling_strength
                * adaptive_simpson(&|tau: f64| 1.0 - (u * tau.cos()).cos(), 0.0, t, 1e-12);
            let (nodes, weights) = gauss_legendre_16();
            let mut two_d = 0.0;
            for j in p.modes() {
                let gj = p.gamma(j);
                let panels = 40usize;
                let h = t / panels as f64;
                let mut acc = 0.0;
                for pa in 0..panels {
                    for pb in 0..panels {
                        let (ca, cb) = (h * (pa as f64 + 0.5), h * (pb as f64 + 0.5));
                        let mut s = 0.0;
                        for (xi, wi) in nodes.iter().zip(&weights) {
                            let tau = ca + 0.5 * h * xi;
                            let fa = (u * tau.cos()).sin();
                            for (xj, wj) in nodes.iter().zip(&weights) {
                                let taup = cb + 0.5 * h * xj;
                                s += wi
                                    * wj
                                    * fa
                                    * (u * taup.cos()).sin()
                                    * (j as f64 * (taup - tau)).sin();
                            }
                        }
                        acc += s * 0.25 * h * h;
                    }
                }
                two_d += 0.5 * p.coupling_strength.powi(2) * gj * gj * acc;
            }
            let want = one_d + two_d;
            let got = phase_f(&p, q, t);
            assert!(
                (got - want).abs() <= 1e-8 * (1.0 + want.abs()),
                "q = {q}: got {got}, quadrature {want}"
            );
        }
    }

    #[test]
    fn alpha_trivial_zeros() {
        let p = params_with_mu(2.0, 1e4, 1.0, 5);
        for a in displacement_alpha(&p, 100.0, p.t_start) {
            assert_eq!(a.norm(), 0.0);
        }
        for a in displacement_alpha(&p, 0.0, 17.0) {
            assert!(a.norm() < 1e-16);
        }
    }

    #[test]
    fn alpha_matches_collapsed_integrand_quadrature() {
        // α_j = −(i/√2) μ γ_j ∫ sin(u cosτ) e^{ijτ} dτ. The window is chosen
        // off cycle alignment so every mode carries a nonzero displacement.
        let p = params_with_mu(2.0, 1e4, 1.0, 5);
        let t = 5.3 * 2.0 * PI;
        let q = 1.02 * p.q_center();
        let u = p.gamma_l * q;
        let alphas = displacement_alpha(&p, q, t);
        for j in p.modes() {
            let re = adaptive_simpson(
                &|tau: f64| (u * tau.cos()).sin() * (j as f64 * tau).cos(),
                0.0,
                t,
                1e-13,
            );
            let im = adaptive_simpson(
                &|tau: f64| (u * tau.cos()).sin() * (j as f64 * tau).sin(),
                0.0,
                t,
                1e-13,
            );
            let want = -num_complex::Complex64::i() / 2f64.sqrt()
                * p.coupling_strength
                * p.gamma(j)
                * num_complex::Complex64::new(re, im);
            let got = alphas[(j - 2) as usize];
            let scale = p.coupling_strength * p.gamma(j);
            assert!(
                (got - want).norm() <= 1e-9 * want.norm().max(scale),
                "mode {j}: got {got}, quadrature {want}"
            );
        }
    }

    #[test]
    fn combined_evaluation_matches_individual_ops() {
        let p = params_with_mu(2.4, 1e4, 1.1, 5);
        let (q, t) = (0.97 * p.q_center(), 8.3);
        let both = phase_and_displacements(&p, q, t);
        assert_eq!(both.q_l, q);
        assert_eq!(both.t, t);
        assert_abs_diff_eq!(both.f_value, phase_f(&p, q, t), epsilon = 1e-14);
        for (a, b) in both.alpha.iter().zip(displacement_alpha(&p, q, t)) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn parity_in_quadrature() {
        let p = params_with_mu(3.0, 1e4, 0.8, 6);
        let t = 11.3;
        for q in [13.0, 55.5, 140.0] {
            assert_abs_diff_eq!(phase_f(&p, q, t), phase_f(&p, -q, t), epsilon = 1e-12);
            let plus = displacement_alpha(&p, q, t);
            let minus = displacement_alpha(&p, -q, t);
            for (a, b) in plus.iter().zip(&minus) {
                assert!((a + b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn perturbative_single_term_limit() {
        // For γ_L q < 0.01 the n = 1 term of the displacement series carries
        // all but O(u²) of the value.
        let p = params_with_mu(2.0, 1e4, 1.0, 3);
        let t = 5.0;
        let q = 0.005 / p.gamma_l;
        let u = p.gamma_l * q;
        let full = displacement_alpha(&p, q, t);
        for j in p.modes() {
            let single = num_complex::Complex64::new(0.0, 2f64.sqrt())
                * p.coupling_strength
                * p.gamma(j)
                * (-1.0)
                * (u / 2.0)
                * cos_exp_integral::<f64>(1, j, 0.0, t).value;
            let got = full[(j - 2) as usize];
            assert!(
                (got - single).norm() <= 0.01 * single.norm(),
                "mode {j}: {got} vs single-term {single}"
            );
        }
    }

    #[test]
    fn amplitude_trivial_zeros() {
        let p = params_with_mu(0.0, 1e4, 1.0, 5);
        for w in [0.5, 3.0, 5.2] {
            assert_eq!(harmonic_amplitude(&p, w, 19.0), 0.0);
        }
        let p = params_with_mu(5.7, 1e4, 1.0, 5);
        for w in [0.5, 3.0, 5.2] {
            assert_abs_diff_eq!(harmonic_amplitude(&p, w, 0.0), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn amplitude_continuous_across_resonance() {
        // Detunings 10^-k around Ω = 5: adjacent values for k >= 6 must agree
        // to 1e-6 relative.
        let p = params_with_mu(5.7, 1e4, 1.0, 9);
        let t = 3.0 * 2.0 * PI;
        let mut prev: Option<f64> = None;
        for k in 1..=10 {
            let w = 5.0 + 10f64.powi(-k);
            let v = harmonic_amplitude(&p, w, t);
            if let (Some(pv), true) = (prev, k >= 7) {
                assert!(
                    (v - pv).abs() <= 1e-6 * pv.abs(),
                    "k = {k}: {v} vs previous {pv}"
                );
            }
            prev = Some(v);
        }
    }

    #[test]
    fn odd_harmonic_dominates_even_neighbors() {
        // At Ω = 5 the resonant line towers over the even positions 4 and 6
        // by at least 20 dB, for cycle-aligned and generic windows alike.
        let p = params_with_mu(5.7, 1e4, 1.0, 9);
        for cycles in [3.0, 3.3] {
            let t = cycles * 2.0 * PI;
            let i5 = harmonic_amplitude(&p, 5.0, t).powi(2);
            for even in [4.0, 6.0] {
                let ie = harmonic_amplitude(&p, even, t).powi(2);
                assert!(
                    ie < i5 * 1e-2,
                    "window {cycles} cycles: I({even}) = {ie:e} vs I(5) = {i5:e}"
                );
            }
        }
    }

    #[test]
    fn amplitude_resonant_limit_formula() {
        let p = params_with_mu(5.7, 1e4, 1.0, 9);
        let t = 7.31;
        let x = p.bloch_ratio;
        for m in [3u32, 5, 7] {
            let got = harmonic_amplitude(&p, m as f64, t);
            // Resonant m-term limit plus the regular off-resonant rest.
            let mf = m as f64;
            let mut want = crate::special::bessel_j(m, x).unwrap()
                * ((2.0 * mf * t).sin() / 2.0 + mf * t)
                / (2.0 * mf);
            let top = truncation_order(x);
            let mut k = 3u32;
            while k <= top {
                if k != m {
                    let kf = k as f64;
                    want += crate::special::bessel_j(k, x).unwrap()
                        * (mf * (mf * t).sin() * (kf * t).cos()
                            - kf * (mf * t).cos() * (kf * t).sin())
                        / (mf * mf - kf * kf);
                }
                k += 2;
            }
            want *= p.coupling_strength * mf;
            assert!(
                (got - want).abs() <= 1e-11 * want.abs().max(1.0),
                "m = {m}: got {got}, limit form {want}"
            );
        }
    }

    #[test]
    fn amplitude_vanishes_at_even_harmonics_for_cycle_windows() {
        let p = params_with_mu(5.7, 1e4, 1.0, 9);
        for cycles in [3.0, 6.0] {
            let t = cycles * 2.0 * PI;
            for w in [2.0, 4.0, 6.0, 8.0, 10.0] {
                let v = harmonic_amplitude(&p, w, t);
                assert!(v.abs() < 1e-10, "E({w}) = {v:e} at a {cycles}-cycle window");
            }
        }
    }

    #[test]
    fn spectrum_peaks_at_odd_harmonics() {
        let p = params_with_mu(5.7, 1e4, 1.0, 9);
        let t = 3.0 * 2.0 * PI;
        let s = spectrum(&p, 0.5, 11.5, 2201, t).unwrap();
        let step = s.omega_over_wl[1] - s.omega_over_wl[0];
        for m in [3.0f64, 5.0, 7.0, 9.0] {
            // The best sample within ±0.4 of m sits at the harmonic up to the
            // small shift that finite-window interference with the tails of
            // neighboring lines produces.
            let (mut best_w, mut best_i) = (0.0, -1.0);
            for (w, i) in s.omega_over_wl.iter().zip(&s.intensity) {
                if (w - m).abs() <= 0.4 && *i > best_i {
                    best_i = *i;
                    best_w = *w;
                }
            }
            // The 3-cycle line width is ~1/3, so shifts up to a tenth of ω_L
            // still resolve as a peak sitting at the odd harmonic.
            assert!((best_w - m).abs() <= 0.1, "peak near {m} found at {best_w}");
        }
        // doubling the sample count leaves peak positions within one coarse step
        let fine = spectrum(&p, 0.5, 11.5, 4401, t).unwrap();
        for m in [3.0f64, 5.0, 7.0] {
            let peak = |series: &SpectrumSeries<f64>| {
                series
                    .omega_over_wl
                    .iter()
                    .zip(&series.intensity)
                    .filter(|(w, _)| (**w - m).abs() <= 0.4)
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(w, _)| *w)
                    .unwrap()
            };
            assert!((peak(&s) - peak(&fine)).abs() <= step + 1e-12);
        }
    }

    #[test]
    fn spectrum_validates_inputs() {
        let p = params_with_mu(1.0, 1e4, 1.0, 5);
        assert!(spectrum(&p, 2.0, 1.0, 10, 5.0).is_err());
        assert!(spectrum(&p, 1.0, 2.0, 1, 5.0).is_err());
        let two = spectrum(&p, 1.0, 2.0, 2, 5.0).unwrap();
        assert_eq!(two.omega_over_wl.len(), 2);
        for (a, i) in two.amplitude.iter().zip(&two.intensity) {
            assert_eq!(*i, a * a);
        }
    }

    #[test]
    fn scan_rejects_bad_inputs_and_scales() {
        let laser = LaserInput::new(1.44, 5e11);
        let material = MaterialInput::new(4.4, 2.0, 1.0);
        assert!(intensity_scan(&laser, &material, 4, &[1e10, 1e11]).is_err());
        assert!(intensity_scan(&laser, &material, 5, &[1e11, 1e10]).is_err());
        assert!(intensity_scan(&laser, &material, 5, &[]).is_err());

        let grid = [1e9, 1e10, 1e11];
        let scan = intensity_scan(&laser, &material, 5, &grid).unwrap();
        assert_eq!(scan.len(), 3);
        // doubling the carrier number quadruples every harmonic intensity
        let material2 = MaterialInput::new(4.4, 2.0, 2.0);
        let scan2 = intensity_scan(&laser, &material2, 5, &grid).unwrap();
        for ((_, a), (_, b)) in scan.iter().zip(&scan2) {
            assert_abs_diff_eq!(b / a, 4.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn linearized_coupling_zero_cases() {
        let p = params_with_mu(2.0, 1e4, 0.0, 5);
        for d in linearized_coupling(&p, 9.7) {
            assert_eq!(d, 0.0);
        }
        // cycle-aligned window: real parts of all displacements vanish
        let p = params_with_mu(2.0, 1e4, 1.0, 6);
        for (idx, d) in linearized_coupling(&p, 4.0 * 2.0 * PI).iter().enumerate() {
            assert!(d.abs() < 1e-12, "mode {} has delta {d}", idx + 2);
        }
        // off-aligned window: even modes stay at zero at half-integer cycles,
        // odd modes do not
        let deltas = linearized_coupling(&p, 3.25 * 2.0 * PI);
        assert!(deltas[(3 - 2) as usize].abs() > 1e-8);
    }

    #[test]
    fn scalar_generic_f32_instantiation() {
        // the core math is scalar-generic; spot-check an f32 build against f64
        let p64 = params_with_mu(2.0, 1e4, 1.0, 3);
        let p32 = SystemParams::<f32> {
            bloch_ratio: p64.bloch_ratio as f32,
            n0: p64.n0 as f32,
            coupling_strength: p64.coupling_strength as f32,
            gamma_l: p64.gamma_l as f32,
            gamma: p64.gamma.iter().map(|&g| g as f32).collect(),
            harmonic_cutoff: p64.harmonic_cutoff,
            t_start: 0.0,
            t_end: p64.t_end as f32,
            envelope: p64.envelope,
            fwhm_cycles: p64.fwhm_cycles as f32,
        };
        let q = 0.9 * p64.q_center();
        let f32_val = phase_f(&p32, q as f32, 7.5f32);
        let f64_val = phase_f(&p64, q, 7.5);
        assert!(
            (f32_val as f64 - f64_val).abs() < 1e-4 * (1.0 + f64_val.abs()),
            "f32 {f32_val} vs f64 {f64_val}"
        );
        let a32 = displacement_alpha(&p32, q as f32, 7.5f32);
        let a64 = displacement_alpha(&p64, q, 7.5);
        for (a, b) in a32.iter().zip(&a64) {
            assert!((a.re as f64 - b.re).abs() < 1e-5 && (a.im as f64 - b.im).abs() < 1e-5);
        }
    }

    #[test]
    fn linearized_coupling_matches_finite_differences() {
        let p = params_with_mu(2.7, 1e4, 1.4, 6);
        for t in [3.25 * 2.0 * PI, 7.9, 21.4] {
            let deltas = linearized_coupling(&p, t);
            let q0 = p.q_center();
            let h = 1e-3;
            let plus = displacement_alpha(&p, q0 + h, t);
            let minus = displacement_alpha(&p, q0 - h, t);
            for (idx, d) in deltas.iter().enumerate() {
                let fd = 2f64.sqrt() * (plus[idx].re - minus[idx].re) / (2.0 * h);
                assert!(
                    (d - fd).abs() < 1e-7,
                    "t = {t}, mode {}: analytic {d}, fd {fd}",
                    idx + 2
                );
            }
        }
    }
}
