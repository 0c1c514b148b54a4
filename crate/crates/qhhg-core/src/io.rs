//! JSON run configuration and deterministic CSV/JSON/SVG artifact writers.
//!
//! The configuration schema is strict: unknown keys are rejected, every
//! omitted field takes a documented default, and physical invariants are
//! checked with messages naming the offending field. All writers format
//! floats with 17 significant digits and fixed ordering, so identical
//! configurations reproduce byte-identical files; every CSV is accompanied
//! by a `<name>.config.json` sidecar and every JSON document embeds the
//! fully resolved configuration under `"config"`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::SpectrumSeries;
use crate::error::{Error, Result};
use crate::params::{Envelope, LaserInput, MaterialInput, SimulationConfig};
use crate::smbe::PeakComparison;

/// Output formats the writers understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSection {
    pub wavelength_um: f64,
    #[serde(rename = "intensity_W_cm2")]
    pub intensity_w_cm2: f64,
    #[serde(default = "default_mean_photon_number")]
    pub mean_photon_number: f64,
    #[serde(default = "default_fwhm_cycles")]
    pub pulse_fwhm_cycles: f64,
    #[serde(default)]
    pub phase_theta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub lattice_constant_angstrom: f64,
    #[serde(rename = "band_halfwidth_eV")]
    pub band_halfwidth_ev: f64,
    #[serde(default = "default_carrier_number")]
    pub carrier_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub harmonic_cutoff: u32,
    pub grid_points: usize,
    pub grid_halfwidth_sigmas: f64,
    pub omega_samples: usize,
    pub omega_max_over_wl: f64,
    pub interaction_cycles: f64,
    pub envelope: Envelope,
    pub fwhm_cycles: f64,
    pub n0_override: Option<f64>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            harmonic_cutoff: 9,
            grid_points: 2048,
            grid_halfwidth_sigmas: 8.0,
            omega_samples: 2000,
            omega_max_over_wl: 11.5,
            interaction_cycles: 3.0,
            envelope: Envelope::Cos2,
            fwhm_cycles: 3.0,
            n0_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub laser: LaserSection,
    pub material: MaterialSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_mean_photon_number() -> f64 {
    1e4
}
fn default_fwhm_cycles() -> f64 {
    3.0
}
fn default_carrier_number() -> f64 {
    1.0
}

impl RunConfig {
    pub fn laser_input(&self) -> LaserInput<f64> {
        LaserInput {
            wavelength_um: self.laser.wavelength_um,
            peak_intensity_w_cm2: self.laser.intensity_w_cm2,
            mean_photon_number: self.laser.mean_photon_number,
            pulse_fwhm_cycles: self.laser.pulse_fwhm_cycles,
            phase_theta0: self.laser.phase_theta0,
        }
    }

    pub fn material_input(&self) -> MaterialInput<f64> {
        MaterialInput {
            lattice_constant_angstrom: self.material.lattice_constant_angstrom,
            band_halfwidth_ev: self.material.band_halfwidth_ev,
            carrier_number: self.material.carrier_number,
        }
    }

    pub fn simulation_config(&self) -> SimulationConfig<f64> {
        SimulationConfig {
            harmonic_cutoff: self.simulation.harmonic_cutoff,
            interaction_cycles: self.simulation.interaction_cycles,
            envelope: self.simulation.envelope,
            fwhm_cycles: self.simulation.fwhm_cycles,
            n0_override: self.simulation.n0_override,
        }
    }

    /// Physical and structural invariants beyond the JSON schema.
    pub fn validate(&self) -> Result<()> {
        self.laser_input()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.material_input()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let sim = &self.simulation;
        if sim.harmonic_cutoff < 2 {
            return Err(Error::Config(format!(
                "simulation.harmonic_cutoff: must be >= 2, got {}",
                sim.harmonic_cutoff
            )));
        }
        if sim.grid_points < 2 {
            return Err(Error::Config(format!(
                "simulation.grid_points: must be >= 2, got {}",
                sim.grid_points
            )));
        }
        if sim.grid_halfwidth_sigmas < crate::quantum::MIN_HALFWIDTH_SIGMAS {
            return Err(Error::Config(format!(
                "simulation.grid_halfwidth_sigmas: must be >= {}, got {}",
                crate::quantum::MIN_HALFWIDTH_SIGMAS,
                sim.grid_halfwidth_sigmas
            )));
        }
        if sim.omega_samples < 2 {
            return Err(Error::Config(format!(
                "simulation.omega_samples: must be >= 2, got {}",
                sim.omega_samples
            )));
        }
        if !(sim.omega_max_over_wl > 0.0) {
            return Err(Error::Config(format!(
                "simulation.omega_max_over_wl: must be > 0, got {}",
                sim.omega_max_over_wl
            )));
        }
        if !(sim.interaction_cycles > 0.0) {
            return Err(Error::Config(format!(
                "simulation.interaction_cycles: must be > 0, got {}",
                sim.interaction_cycles
            )));
        }
        if !(sim.fwhm_cycles > 0.0) {
            return Err(Error::Config(format!(
                "simulation.fwhm_cycles: must be > 0, got {}",
                sim.fwhm_cycles
            )));
        }
        if let Some(n0) = sim.n0_override {
            if n0 < crate::params::MIN_MEAN_PHOTON_NUMBER {
                return Err(Error::Config(format!(
                    "simulation.n0_override: must be >= {}, got {n0}",
                    crate::params::MIN_MEAN_PHOTON_NUMBER
                )));
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON configuration document.
///
/// Schema violations are reported with the JSON path of the offending field;
/// unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            Error::Config(e.inner().to_string())
        } else {
            Error::Config(format!("{path}: {}", e.inner()))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// 17-significant-digit float formatting shared by all writers.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// `<stem>.config.json` sidecar with the fully resolved configuration.
pub fn write_config_sidecar(dir: &Path, stem: &str, config: &RunConfig) -> Result<PathBuf> {
    let body = serde_json::to_string_pretty(config).expect("config serializes");
    write_file(dir, &format!("{stem}.config.json"), &(body + "\n"))
}

pub fn write_spectrum_csv(dir: &Path, stem: &str, series: &SpectrumSeries<f64>) -> Result<PathBuf> {
    let mut out = String::from("omega_over_wl,intensity\n");
    for (w, i) in series.omega_over_wl.iter().zip(&series.intensity) {
        let _ = writeln!(out, "{},{}", fmt17(*w), fmt17(*i));
    }
    write_file(dir, &format!("{stem}.csv"), &out)
}

pub fn write_spectrum_json(
    dir: &Path,
    stem: &str,
    series: &SpectrumSeries<f64>,
    config: &RunConfig,
) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a RunConfig,
        t_interaction: f64,
        omega_over_wl: &'a [f64],
        amplitude: &'a [f64],
        intensity: &'a [f64],
    }
    let body = serde_json::to_string_pretty(&Doc {
        config,
        t_interaction: series.t_interaction,
        omega_over_wl: &series.omega_over_wl,
        amplitude: &series.amplitude,
        intensity: &series.intensity,
    })
    .expect("series serializes");
    write_file(dir, &format!("{stem}.json"), &(body + "\n"))
}

pub fn write_scan_csv(dir: &Path, stem: &str, rows: &[(f64, f64)]) -> Result<PathBuf> {
    let mut out = String::from("i0_W_cm2,intensity\n");
    for (i0, val) in rows {
        let _ = writeln!(out, "{},{}", fmt17(*i0), fmt17(*val));
    }
    write_file(dir, &format!("{stem}.csv"), &out)
}

pub fn write_scan_json(
    dir: &Path,
    stem: &str,
    harmonic: u32,
    rows: &[(f64, f64)],
    config: &RunConfig,
) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a RunConfig,
        harmonic: u32,
        i0_w_cm2: Vec<f64>,
        intensity: Vec<f64>,
    }
    let body = serde_json::to_string_pretty(&Doc {
        config,
        harmonic,
        i0_w_cm2: rows.iter().map(|r| r.0).collect(),
        intensity: rows.iter().map(|r| r.1).collect(),
    })
    .expect("scan serializes");
    write_file(dir, &format!("{stem}.json"), &(body + "\n"))
}

fn opt17(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt17)
}

pub fn write_compare_csv(dir: &Path, stem: &str, rows: &[PeakComparison<f64>]) -> Result<PathBuf> {
    let mut out = String::from("harmonic,peak_db_analytic,peak_db_smbe,delta_db\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.harmonic,
            opt17(r.peak_db_analytic),
            opt17(r.peak_db_smbe),
            opt17(r.delta_db)
        );
    }
    write_file(dir, &format!("{stem}.csv"), &out)
}

pub fn write_compare_json(
    dir: &Path,
    stem: &str,
    rows: &[PeakComparison<f64>],
    config: &RunConfig,
) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Row {
        harmonic: u32,
        peak_db_analytic: Option<f64>,
        peak_db_smbe: Option<f64>,
        delta_db: Option<f64>,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a RunConfig,
        peaks: Vec<Row>,
    }
    let body = serde_json::to_string_pretty(&Doc {
        config,
        peaks: rows
            .iter()
            .map(|r| Row {
                harmonic: r.harmonic,
                peak_db_analytic: r.peak_db_analytic,
                peak_db_smbe: r.peak_db_smbe,
                delta_db: r.delta_db,
            })
            .collect(),
    })
    .expect("comparison serializes");
    write_file(dir, &format!("{stem}.json"), &(body + "\n"))
}

pub fn write_observables_csv(dir: &Path, stem: &str, rows: &[(String, f64)]) -> Result<PathBuf> {
    let mut out = String::from("observable,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", fmt17(*v));
    }
    write_file(dir, &format!("{stem}.csv"), &out)
}

pub fn write_observables_json(
    dir: &Path,
    stem: &str,
    rows: &[(String, f64)],
    config: &RunConfig,
) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Doc<'a> {
        config: &'a RunConfig,
        observables: Vec<(String, f64)>,
    }
    let body = serde_json::to_string_pretty(&Doc {
        config,
        observables: rows.to_vec(),
    })
    .expect("observables serialize");
    write_file(dir, &format!("{stem}.json"), &(body + "\n"))
}

/// Long-format Wigner grid: one `q,p,w` row per sample.
pub fn write_wigner_csv(
    dir: &Path,
    stem: &str,
    q_grid: &[f64],
    p_grid: &[f64],
    w: &[Vec<f64>],
) -> Result<PathBuf> {
    let mut out = String::from("q,p,w\n");
    for (qi, row) in w.iter().enumerate() {
        for (pi, v) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt17(q_grid[qi]),
                fmt17(p_grid[pi]),
                fmt17(*v)
            );
        }
    }
    write_file(dir, &format!("{stem}.csv"), &out)
}

/// One labeled line of an SVG plot.
pub struct SvgSeries<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const SVG_COLORS: [&str; 4] = ["#c0392b", "#2471a3", "#1e8449", "#884ea0"];

/// Minimal polyline plot with a log₁₀ intensity axis, floored 12 decades
/// below the maximum. Output is byte-stable for identical inputs.
pub fn write_log_svg(
    dir: &Path,
    name: &str,
    title: &str,
    x_label: &str,
    series: &[SvgSeries<'_>],
) -> Result<PathBuf> {
    const W: f64 = 860.0;
    const H: f64 = 520.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 55.0;

    let mut y_max = f64::MIN;
    for s in series {
        for &v in s.y {
            if v.is_finite() && v > y_max {
                y_max = v;
            }
        }
    }
    if !y_max.is_finite() || y_max <= 0.0 {
        y_max = 1.0;
    }
    let log_top = y_max.log10().ceil();
    let log_bot = log_top - 12.0;
    let (mut x_min, mut x_max) = (f64::MAX, f64::MIN);
    for s in series {
        for &v in s.x {
            x_min = x_min.min(v);
            x_max = x_max.max(v);
        }
    }
    if x_min >= x_max {
        x_max = x_min + 1.0;
    }
    let px = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
    let py = |y: f64| {
        let ly = y.max(10f64.powf(log_bot)).log10();
        MT + (log_top - ly) / (log_top - log_bot) * (H - MT - MB)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        W / 2.0
    );
    // axes
    let _ = writeln!(
        svg,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333\"/>",
        W - ML - MR,
        H - MT - MB
    );
    // y ticks every 2 decades
    let mut d = log_bot as i64;
    while d <= log_top as i64 {
        let y = py(10f64.powi(d as i32));
        let _ = writeln!(
            svg,
            "<line x1=\"{ML}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>",
            W - MR
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{d}</text>",
            ML - 6.0,
            y + 4.0
        );
        d += 2;
    }
    // x ticks: 8 divisions
    for k in 0..=8 {
        let x = x_min + (x_max - x_min) * k as f64 / 8.0;
        let xp = px(x);
        let _ = writeln!(
            svg,
            "<line x1=\"{xp:.1}\" y1=\"{:.1}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>",
            MT,
            H - MB
        );
        let _ = writeln!(
            svg,
            "<text x=\"{xp:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{x:.2}</text>",
            H - MB + 16.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>",
        W / 2.0,
        H - 14.0
    );
    for (idx, s) in series.iter().enumerate() {
        let color = SVG_COLORS[idx % SVG_COLORS.len()];
        let mut points = String::new();
        for (x, y) in s.x.iter().zip(s.y) {
            let _ = write!(points, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>",
            points.trim_end()
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            W - MR - 170.0,
            MT + 18.0 + 16.0 * idx as f64,
            s.label
        );
    }
    let _ = writeln!(svg, "</svg>");
    write_file(dir, name, &svg)
}
