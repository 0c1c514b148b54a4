//! `qhhg` — spectra, intensity scans, quantum observables, and backend
//! comparisons for laser-driven intraband harmonic generation.
//!
//! Subcommands: `spectrum`, `scan`, `quantum`, `compare`, `bloch-ratio`.
//! Exit codes: 0 success, 2 configuration/input error, 3 numerical-regime
//! rejection. Errors are printed to stderr as `ERROR <code>: message`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qhhg_core::analytic;
use qhhg_core::io::{self, OutputFormat, RunConfig, SvgSeries};
use qhhg_core::params::{self, Envelope, LaserInput, MaterialInput};
use qhhg_core::quantum;
use qhhg_core::smbe;
use qhhg_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qhhg",
    about = "Harmonic generation from laser-driven semiconductor intraband currents",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format, repeatable (overrides the config).
    #[arg(long, value_enum)]
    format: Vec<CliFormat>,
    /// Suppress informational output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CliFormat {
    Csv,
    Json,
    Svg,
}

impl From<CliFormat> for OutputFormat {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Csv => OutputFormat::Csv,
            CliFormat::Json => OutputFormat::Json,
            CliFormat::Svg => OutputFormat::Svg,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emission spectrum from the closed-form solution.
    Spectrum(CommonOpts),
    /// Harmonic intensity versus drive intensity.
    Scan {
        #[command(flatten)]
        common: CommonOpts,
        /// Odd harmonic order to scan.
        #[arg(long)]
        harmonic: u32,
        /// Lowest drive intensity in W/cm².
        #[arg(long, default_value_t = 1e10)]
        i0_min: f64,
        /// Highest drive intensity in W/cm².
        #[arg(long, default_value_t = 3e12)]
        i0_max: f64,
        /// Number of logarithmically spaced intensities.
        #[arg(long, default_value_t = 200)]
        i0_points: usize,
    },
    /// Quantum observables of the multimode state (optionally a Wigner grid
    /// for one harmonic via --harmonic).
    Quantum {
        #[command(flatten)]
        common: CommonOpts,
        /// Also write the Wigner function of this harmonic mode.
        #[arg(long)]
        harmonic: Option<u32>,
    },
    /// Closed-form versus semiclassical odd-harmonic peaks.
    Compare(CommonOpts),
    /// Print the Bloch parameter for direct laboratory inputs.
    BlochRatio {
        /// Drive wavelength in micrometers.
        #[arg(long)]
        wavelength_um: f64,
        /// Peak intensity in W/cm².
        #[arg(long)]
        intensity: f64,
        /// Lattice constant in ångström.
        #[arg(long)]
        lattice_angstrom: f64,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QHHG_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's help/version on stdout with success status
            if e.use_stderr() {
                eprintln!("ERROR 2: {e}");
                return ExitCode::from(2);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ERROR {code}: {e}");
            ExitCode::from(code as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Spectrum(common) => cmd_spectrum(&common),
        Command::Scan {
            common,
            harmonic,
            i0_min,
            i0_max,
            i0_points,
        } => cmd_scan(&common, harmonic, i0_min, i0_max, i0_points),
        Command::Quantum { common, harmonic } => cmd_quantum(&common, harmonic),
        Command::Compare(common) => cmd_compare(&common),
        Command::BlochRatio {
            wavelength_um,
            intensity,
            lattice_angstrom,
        } => cmd_bloch_ratio(wavelength_um, intensity, lattice_angstrom),
    }
}

struct Run {
    config: RunConfig,
    dir: PathBuf,
    formats: Vec<OutputFormat>,
    quiet: bool,
}

impl Run {
    fn load(common: &CommonOpts) -> Result<Self> {
        let config = io::load_config(&common.config)?;
        let dir = common
            .out
            .clone()
            .unwrap_or_else(|| config.output.directory.clone());
        let formats = if common.format.is_empty() {
            config.output.formats.clone()
        } else {
            common.format.iter().map(|&f| f.into()).collect()
        };
        Ok(Self {
            config,
            dir,
            formats,
            quiet: common.quiet,
        })
    }

    fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }

    fn note(&self, path: &std::path::Path) {
        if !self.quiet {
            println!("wrote {}", path.display());
        }
    }
}

fn build_system(config: &RunConfig) -> Result<params::SystemParams<f64>> {
    params::build_params(
        &config.laser_input(),
        &config.material_input(),
        &config.simulation_config(),
    )
}

fn cmd_spectrum(common: &CommonOpts) -> Result<()> {
    let run = Run::load(common)?;
    let p = build_system(&run.config)?;
    let sim = &run.config.simulation;
    let series = analytic::spectrum(&p, 0.5, sim.omega_max_over_wl, sim.omega_samples, p.t_end)?;

    io::write_config_sidecar(&run.dir, "spectrum", &run.config)?;
    if run.wants(OutputFormat::Csv) {
        run.note(&io::write_spectrum_csv(&run.dir, "spectrum", &series)?);
    }
    if run.wants(OutputFormat::Json) {
        run.note(&io::write_spectrum_json(
            &run.dir,
            "spectrum",
            &series,
            &run.config,
        )?);
    }
    if run.wants(OutputFormat::Svg) {
        let path = io::write_log_svg(
            &run.dir,
            "spectrum.svg",
            "emission intensity",
            "Omega / omega_L",
            &[SvgSeries {
                label: "closed form",
                x: &series.omega_over_wl,
                y: &series.intensity,
            }],
        )?;
        run.note(&path);
    }
    Ok(())
}

fn cmd_scan(
    common: &CommonOpts,
    harmonic: u32,
    i0_min: f64,
    i0_max: f64,
    i0_points: usize,
) -> Result<()> {
    let run = Run::load(common)?;
    // written so NaN bounds also fail the check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(i0_min > 0.0) || !(i0_max > i0_min) || i0_points < 2 {
        return Err(Error::InvalidInput(
            "scan range: need 0 < i0-min < i0-max and at least 2 points".into(),
        ));
    }
    let grid: Vec<f64> = (0..i0_points)
        .map(|k| {
            let f = k as f64 / (i0_points - 1) as f64;
            i0_min * (i0_max / i0_min).powf(f)
        })
        .collect();
    let rows = analytic::intensity_scan(
        &run.config.laser_input(),
        &run.config.material_input(),
        harmonic,
        &grid,
    )?;

    let stem = format!("scan_h{harmonic}");
    io::write_config_sidecar(&run.dir, &stem, &run.config)?;
    if run.wants(OutputFormat::Csv) {
        run.note(&io::write_scan_csv(&run.dir, &stem, &rows)?);
    }
    if run.wants(OutputFormat::Json) {
        run.note(&io::write_scan_json(
            &run.dir,
            &stem,
            harmonic,
            &rows,
            &run.config,
        )?);
    }
    if run.wants(OutputFormat::Svg) {
        let x: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let path = io::write_log_svg(
            &run.dir,
            &format!("{stem}.svg"),
            &format!("harmonic {harmonic} intensity vs I0"),
            "I0 (W/cm^2)",
            &[SvgSeries {
                label: &format!("m = {harmonic}"),
                x: &x,
                y: &y,
            }],
        )?;
        run.note(&path);
    }
    Ok(())
}

fn cmd_quantum(common: &CommonOpts, wigner_mode: Option<u32>) -> Result<()> {
    let run = Run::load(common)?;
    let p = build_system(&run.config)?;
    let sim = &run.config.simulation;
    let grid = quantum::QuadratureGrid::new(p.n0, sim.grid_halfwidth_sigmas, sim.grid_points)?;
    let state = quantum::build_state(&p, grid, p.t_end)?;

    let drift = quantum::momentum_drift(&p, p.t_end)?;
    let rho = quantum::reduced_density_laser(&state);
    let entropy = quantum::entanglement_entropy(&rho)?;
    let overlap = quantum::conditioned_state_overlap(&state);
    let conditioned = quantum::conditioned_norm_and_entropy(&state)?;

    let mut rows: Vec<(String, f64)> = vec![
        ("bloch_ratio".into(), p.bloch_ratio),
        ("coupling_strength".into(), p.coupling_strength),
        ("t_interaction".into(), p.t_end),
        ("q_mean".into(), quantum::expectation_qfunc(&state, |q| q)),
        ("q_variance".into(), {
            let c = p.q_center();
            quantum::expectation_qfunc(&state, |q| (q - c) * (q - c))
        }),
        ("p_drift_closed_form".into(), drift.closed_form),
        ("p_drift_grid".into(), drift.grid_value),
        ("drift_regime_parameter".into(), drift.regime_parameter),
    ];
    for j in p.modes() {
        rows.push((
            format!("mean_photons_{j}"),
            quantum::harmonic_mean_photons(&state, j)?,
        ));
    }
    rows.push(("purity".into(), rho.purity()));
    rows.push(("entanglement_entropy".into(), entropy));
    rows.push(("overlap_abs".into(), overlap.norm()));
    rows.push(("conditioned_norm_sq".into(), conditioned.norm_sq));
    rows.push(("conditioned_entropy".into(), conditioned.entropy));
    rows.push((
        "conditioned_orthogonality_residual".into(),
        conditioned.orthogonality_residual,
    ));

    io::write_config_sidecar(&run.dir, "observables", &run.config)?;
    if run.wants(OutputFormat::Csv) {
        run.note(&io::write_observables_csv(&run.dir, "observables", &rows)?);
    }
    if run.wants(OutputFormat::Json) {
        run.note(&io::write_observables_json(
            &run.dir,
            "observables",
            &rows,
            &run.config,
        )?);
    }

    if let Some(j) = wigner_mode {
        // span the displaced Gaussians with a 4-quadrature margin
        let reach = state
            .alpha
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |acc, a| acc.max(a.norm()));
        let half = 2f64.sqrt() * reach + 4.0;
        let n = 101usize;
        let axis: Vec<f64> = (0..n)
            .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
            .collect();
        let w = quantum::harmonic_mode_wigner(&state, j, &axis, &axis)?;
        let stem = format!("wigner_h{j}");
        let path = io::write_wigner_csv(&run.dir, &stem, &axis, &axis, &w)?;
        io::write_config_sidecar(&run.dir, &stem, &run.config)?;
        run.note(&path);
    }
    Ok(())
}

fn cmd_compare(common: &CommonOpts) -> Result<()> {
    let run = Run::load(common)?;
    let p = build_system(&run.config)?;
    let sim = &run.config.simulation;

    let total_cycles = match sim.envelope {
        Envelope::Flat => sim.interaction_cycles,
        // pulsed envelopes need room for their flanks
        _ => sim.interaction_cycles.max((8.0 / 3.0) * sim.fwhm_cycles),
    };
    let pulse = smbe::PulseShape::new(sim.envelope, sim.fwhm_cycles, total_cycles, 256)?;
    let max_harmonic = {
        let m = sim.omega_max_over_wl.floor() as u32;
        if m.is_multiple_of(2) {
            m - 1
        } else {
            m
        }
    };
    let rows = smbe::compare_backends(&p, &pulse, max_harmonic)?;

    let t_window = pulse.fwhm_cycles * 2.0 * std::f64::consts::PI;
    let analytic_series =
        analytic::spectrum(&p, 0.5, sim.omega_max_over_wl, sim.omega_samples, t_window)?;
    let trace = smbe::classical_current(&p, &pulse);
    let smbe_series =
        smbe::emission_spectrum(&trace, sim.omega_max_over_wl.min(trace.omega_nyquist()))?;

    io::write_config_sidecar(&run.dir, "compare_peaks", &run.config)?;
    if run.wants(OutputFormat::Csv) {
        run.note(&io::write_spectrum_csv(
            &run.dir,
            "spectrum_analytic",
            &analytic_series,
        )?);
        run.note(&io::write_spectrum_csv(
            &run.dir,
            "spectrum_smbe",
            &smbe_series,
        )?);
        run.note(&io::write_compare_csv(&run.dir, "compare_peaks", &rows)?);
    }
    if run.wants(OutputFormat::Json) {
        run.note(&io::write_compare_json(
            &run.dir,
            "compare_peaks",
            &rows,
            &run.config,
        )?);
        run.note(&io::write_spectrum_json(
            &run.dir,
            "spectrum_analytic",
            &analytic_series,
            &run.config,
        )?);
        run.note(&io::write_spectrum_json(
            &run.dir,
            "spectrum_smbe",
            &smbe_series,
            &run.config,
        )?);
    }
    if run.wants(OutputFormat::Svg) {
        // normalize the closed-form curve to its strongest odd peak so the
        // two backends overlay on one axis
        let mut norm = 0.0f64;
        let mut m = 1u32;
        while (m as f64) < sim.omega_max_over_wl {
            if let Some((_, peak)) = smbe::find_peak(&analytic_series, m as f64) {
                norm = norm.max(peak);
            }
            m += 2;
        }
        let normed: Vec<f64> = analytic_series
            .intensity
            .iter()
            .map(|&v| if norm > 0.0 { v / norm } else { v })
            .collect();
        let path = io::write_log_svg(
            &run.dir,
            "fig1.svg",
            "odd-harmonic emission: closed form vs semiclassical",
            "Omega / omega_L",
            &[
                SvgSeries {
                    label: "closed form",
                    x: &analytic_series.omega_over_wl,
                    y: &normed,
                },
                SvgSeries {
                    label: "semiclassical current",
                    x: &smbe_series.omega_over_wl,
                    y: &smbe_series.intensity,
                },
            ],
        )?;
        run.note(&path);
    }
    Ok(())
}

fn cmd_bloch_ratio(wavelength_um: f64, intensity: f64, lattice_angstrom: f64) -> Result<()> {
    let laser = LaserInput::new(wavelength_um, intensity);
    let material = MaterialInput::new(lattice_angstrom, 1.0, 1.0);
    let ratio = params::bloch_ratio(&laser, &material)?;
    println!("{ratio}");
    Ok(())
}
