//! Physical inputs and their reduction to dimensionless groups.
//!
//! Internally the crate works in units with ħ = 1 and energies/frequencies
//! measured in units of the drive frequency ω_L (times in 1/ω_L). The
//! quantization volume never appears: every observable depends only on
//!
//! - the Bloch parameter `ω_B/ω_L`,
//! - the pump mean photon number `N₀`,
//! - the coupling strength `μ = n_e E_g / ω_L`,
//! - the per-mode couplings `γ_L = (ω_B/ω_L)/√(2N₀)`, `γ_j = γ_L/√j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{lit, Real};

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054571817e-34;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;
/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299792458.0;
/// Joules per electronvolt.
pub const EV: f64 = 1.602176634e-19;

/// Mean photon numbers below this are rejected: the solution assumes a
/// macroscopically populated pump mode.
pub const MIN_MEAN_PHOTON_NUMBER: f64 = 100.0;

/// Field-amplitude envelope applied by the semiclassical baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// Constant drive over the whole window.
    Flat,
    /// cos² flank pulse; `fwhm_cycles` refers to the intensity envelope.
    #[default]
    Cos2,
    /// Gaussian pulse; `fwhm_cycles` refers to the intensity envelope.
    Gaussian,
}

/// Driving laser description in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserInput<T: Real> {
    /// Wavelength λ in micrometers.
    pub wavelength_um: T,
    /// Peak intensity I₀ in W/cm².
    pub peak_intensity_w_cm2: T,
    /// Initial mean photon number N₀ of the pump mode.
    pub mean_photon_number: T,
    /// Interaction window expressed in optical cycles.
    pub pulse_fwhm_cycles: T,
    /// Initial optical phase θ₀; the phase-space frame is chosen so that
    /// θ₀ = 0 and no other value is supported.
    pub phase_theta0: T,
}

impl<T: Real> LaserInput<T> {
    pub fn new(wavelength_um: T, peak_intensity_w_cm2: T) -> Self {
        Self {
            wavelength_um,
            peak_intensity_w_cm2,
            mean_photon_number: lit(1e4),
            pulse_fwhm_cycles: lit(3.0),
            phase_theta0: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_um > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "laser.wavelength_um: must be > 0, got {}",
                self.wavelength_um
            )));
        }
        if !(self.peak_intensity_w_cm2 >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "laser.intensity_W_cm2: must be >= 0, got {}",
                self.peak_intensity_w_cm2
            )));
        }
        if !(self.mean_photon_number >= T::one()) {
            return Err(Error::InvalidInput(format!(
                "laser.mean_photon_number: must be >= 1, got {}",
                self.mean_photon_number
            )));
        }
        if !(self.pulse_fwhm_cycles > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "laser.pulse_fwhm_cycles: must be > 0, got {}",
                self.pulse_fwhm_cycles
            )));
        }
        if self.phase_theta0 != T::zero() {
            return Err(Error::InvalidInput(
                "laser.phase_theta0: only the theta0 = 0 frame is supported".into(),
            ));
        }
        Ok(())
    }

    /// Drive angular frequency ω_L in s⁻¹.
    pub fn omega_l_si(&self) -> T {
        lit::<T>(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT) / (self.wavelength_um * lit(1e-6))
    }

    /// Peak electric field E₀ in V/m from I₀ = ε₀ c E₀² / 2.
    pub fn peak_field_si(&self) -> T {
        let i_si = self.peak_intensity_w_cm2 * lit(1e4);
        (lit::<T>(2.0) * i_si / lit(VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)).sqrt()
    }
}

/// Single-band material description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialInput<T: Real> {
    /// Lattice constant 1/K_c in ångström.
    pub lattice_constant_angstrom: T,
    /// Conduction-band half-width E_g in eV.
    pub band_halfwidth_ev: T,
    /// Number of conduction-band electrons n_e (constant over a run).
    pub carrier_number: T,
}

impl<T: Real> MaterialInput<T> {
    pub fn new(lattice_constant_angstrom: T, band_halfwidth_ev: T, carrier_number: T) -> Self {
        Self {
            lattice_constant_angstrom,
            band_halfwidth_ev,
            carrier_number,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_constant_angstrom > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "material.lattice_constant_angstrom: must be > 0, got {}",
                self.lattice_constant_angstrom
            )));
        }
        if !(self.band_halfwidth_ev > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "material.band_halfwidth_eV: must be > 0, got {}",
                self.band_halfwidth_ev
            )));
        }
        if !(self.carrier_number >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "material.carrier_number: must be >= 0, got {}",
                self.carrier_number
            )));
        }
        Ok(())
    }
}

/// Run-level simulation choices that feed [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig<T: Real> {
    /// Highest harmonic mode index M; modes j = 2..=M are kept.
    pub harmonic_cutoff: u32,
    /// Interaction window in optical cycles (t_end = 2π · cycles, t_start = 0).
    pub interaction_cycles: T,
    /// Envelope used by the semiclassical baseline.
    pub envelope: Envelope,
    /// Intensity-FWHM of the envelope in optical cycles.
    pub fwhm_cycles: T,
    /// Replaces the laser's mean photon number when set (desk-scale N₀ keeps
    /// grids conditioned; the state depends on N₀ only through γ_L√(2N₀)).
    pub n0_override: Option<T>,
}

impl<T: Real> Default for SimulationConfig<T> {
    fn default() -> Self {
        Self {
            harmonic_cutoff: 9,
            interaction_cycles: lit(3.0),
            envelope: Envelope::default(),
            fwhm_cycles: lit(3.0),
            n0_override: None,
        }
    }
}

/// Dimensionless physical configuration every compute module consumes.
///
/// Immutable after construction; safe to share across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams<T: Real> {
    /// Bloch parameter ω_B/ω_L.
    pub bloch_ratio: T,
    /// Pump mean photon number N₀.
    pub n0: T,
    /// Coupling strength μ = n_e E_g / ω_L.
    pub coupling_strength: T,
    /// Pump-mode coupling γ_L = (ω_B/ω_L)/√(2N₀).
    pub gamma_l: T,
    /// Harmonic-mode couplings γ_j = γ_L/√j for j = 2..=M.
    pub gamma: Vec<T>,
    /// Mode cutoff M.
    pub harmonic_cutoff: u32,
    /// Interaction start, units 1/ω_L.
    pub t_start: T,
    /// Interaction end, units 1/ω_L.
    pub t_end: T,
    /// Envelope selection for the semiclassical baseline.
    pub envelope: Envelope,
    /// Envelope intensity-FWHM in optical cycles.
    pub fwhm_cycles: T,
}

impl<T: Real> SystemParams<T> {
    /// Coupling γ_j of harmonic mode j (2 ≤ j ≤ M).
    pub fn gamma(&self, j: u32) -> T {
        assert!(
            (2..=self.harmonic_cutoff).contains(&j),
            "mode index {j} outside 2..={}",
            self.harmonic_cutoff
        );
        self.gamma[(j - 2) as usize]
    }

    /// Harmonic mode indices j = 2..=M.
    pub fn modes(&self) -> impl Iterator<Item = u32> {
        2..=self.harmonic_cutoff
    }

    /// ⟨Q_L⟩ = √(2N₀) of the initial coherent state.
    pub fn q_center(&self) -> T {
        (lit::<T>(2.0) * self.n0).sqrt()
    }
}

/// Bloch parameter ω_B/ω_L = e E₀ a / (ħ ω_L) with E₀ the peak field of I₀.
///
/// Scales as λ √I₀ · a; evaluates to ≈ 0.99 at I₀ = 5·10¹¹ W/cm²,
/// λ = 1.44 µm, a = 4.4 Å.
pub fn bloch_ratio<T: Real>(laser: &LaserInput<T>, material: &MaterialInput<T>) -> Result<T> {
    laser.validate()?;
    material.validate()?;
    let a_si = material.lattice_constant_angstrom * lit(1e-10);
    Ok(lit::<T>(ELEMENTARY_CHARGE) * laser.peak_field_si() * a_si
        / (lit::<T>(HBAR) * laser.omega_l_si()))
}

/// Inverse of [`bloch_ratio`]: peak intensity (W/cm²) that produces the given
/// Bloch parameter at this wavelength and lattice constant.
pub fn intensity_for_bloch_ratio<T: Real>(
    ratio: T,
    wavelength_um: T,
    lattice_constant_angstrom: T,
) -> T {
    let omega_l =
        lit::<T>(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT) / (wavelength_um * lit(1e-6));
    let a_si = lattice_constant_angstrom * lit(1e-10);
    let e0 = ratio * lit::<T>(HBAR) * omega_l / (lit::<T>(ELEMENTARY_CHARGE) * a_si);
    e0 * e0 * lit::<T>(0.5 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT) * lit(1e-4)
}

/// Builds the dimensionless parameter set.
///
/// Rejects mean photon numbers below [`MIN_MEAN_PHOTON_NUMBER`]: the analytic
/// solution treats the pump as macroscopic.
pub fn build_params<T: Real>(
    laser: &LaserInput<T>,
    material: &MaterialInput<T>,
    sim: &SimulationConfig<T>,
) -> Result<SystemParams<T>> {
    let ratio = bloch_ratio(laser, material)?;
    let n0 = sim.n0_override.unwrap_or(laser.mean_photon_number);
    if n0 < lit(MIN_MEAN_PHOTON_NUMBER) {
        return Err(Error::InvalidInput(format!(
            "mean_photon_number: N0 = {n0} is below {MIN_MEAN_PHOTON_NUMBER}; the pump must be macroscopic"
        )));
    }
    if sim.harmonic_cutoff < 2 {
        return Err(Error::InvalidInput(format!(
            "simulation.harmonic_cutoff: must be >= 2, got {}",
            sim.harmonic_cutoff
        )));
    }
    if !(sim.interaction_cycles > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "simulation.interaction_cycles: must be > 0, got {}",
            sim.interaction_cycles
        )));
    }
    if !(sim.fwhm_cycles > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "simulation.fwhm_cycles: must be > 0, got {}",
            sim.fwhm_cycles
        )));
    }

    let omega_l = laser.omega_l_si();
    let band_halfwidth = material.band_halfwidth_ev * lit(EV) / (lit::<T>(HBAR) * omega_l);
    let gamma_l = ratio / (lit::<T>(2.0) * n0).sqrt();
    let gamma = (2..=sim.harmonic_cutoff)
        .map(|j| gamma_l / lit::<T>(j as f64).sqrt())
        .collect();

    Ok(SystemParams {
        bloch_ratio: ratio,
        n0,
        coupling_strength: material.carrier_number * band_halfwidth,
        gamma_l,
        gamma,
        harmonic_cutoff: sim.harmonic_cutoff,
        t_start: T::zero(),
        t_end: lit::<T>(2.0 * std::f64::consts::PI) * sim.interaction_cycles,
        envelope: sim.envelope,
        fwhm_cycles: sim.fwhm_cycles,
    })
}
