use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockade::config::{SweepConfig, NMAX_ENV};
use blockade::model::{analytic_spectrum, ModelParams, ResonanceLabel};
use blockade::sweep::{
    annotate_resonances, format_number, run_fidelity_sweep, run_sweep, write_fidelity_csv,
    write_resonances_csv, write_sweep_csv, Spacing, SweepKind, SweepSpec,
};
use blockade::Error;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

/// Photon blockade in the driven dispersive Jaynes-Cummings model.
#[derive(Parser)]
#[command(name = "blockade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state statistics against the drive detuning Δ_c/κ.
    SweepDetuning(SweepArgs),
    /// Steady-state statistics against Ω_R/χ on a resonance branch.
    SweepOmega(SweepArgs),
    /// Steady-state statistics against χ/κ on a resonance branch.
    SweepChi(SweepArgs),
    /// Fidelity of the dispersive approximation against χt.
    Fidelity(SweepArgs),
    /// Any sweep, with the kind taken from --kind or the config file.
    Sweep(SweepArgs),
    /// The eight one- and two-photon resonance detunings.
    Resonances(ModelArgs),
    /// Closed-form dressed-state energies and mixing angles.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// INI file with sweep settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// linear or log.
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<f64>,
    #[arg(long)]
    omega_ratio: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta0: Option<f64>,
    /// Resonance branch d1..d4 pinning Δ_c.
    #[arg(long)]
    branch: Option<String>,
    /// Fock cutoff; defaults to $BLOCKADE_NMAX or 12.
    #[arg(long)]
    nmax: Option<usize>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated g/Δ values for fidelity runs.
    #[arg(long, value_delimiter = ',')]
    g_over_delta: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Compute points one after another.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    chi: f64,
    #[arg(long, default_value_t = 2.0)]
    omega_ratio: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta0: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        ModelParams {
            chi: self.chi,
            omega_r: self.omega_ratio * self.chi,
            delta_0: self.delta0,
            ..ModelParams::default()
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Δ'_c, the photon energy in the dressed ladder.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta_c_prime: f64,
    /// Highest photon number listed.
    #[arg(long, default_value_t = 6)]
    mmax: usize,
}

#[derive(Debug)]
enum Failure {
    Config(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(io::Error::other(msg)),
            e => Failure::Config(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl SweepArgs {
    fn overrides(&self) -> Result<SweepConfig, Error> {
        let mut c = SweepConfig {
            start: self.start,
            stop: self.stop,
            points: self.points,
            chi: self.chi,
            omega_ratio: self.omega_ratio,
            eta: self.eta,
            gamma: self.gamma,
            delta0: self.delta0,
            nmax: self.nmax,
            out: self.out.clone(),
            g_over_delta: self.g_over_delta.clone(),
            alpha: self.alpha,
            parallel: self.serial.then_some(false),
            ..SweepConfig::default()
        };
        if let Some(k) = &self.kind {
            c.kind = Some(k.parse::<SweepKind>()?);
        }
        if let Some(s) = &self.spacing {
            c.spacing = Some(s.parse::<Spacing>()?);
        }
        if let Some(b) = &self.branch {
            c.branch = Some(b.parse::<ResonanceLabel>()?);
        }
        Ok(c)
    }

    fn resolve(&self, kind: Option<SweepKind>) -> Result<(SweepSpec, Option<PathBuf>), Error> {
        let file = match &self.config {
            Some(path) => SweepConfig::from_file(path)?,
            None => SweepConfig::default(),
        };
        let merged = file.overlay(self.overrides()?);
        let env = std::env::var(NMAX_ENV).ok();
        let spec = merged.resolve(kind, env.as_deref())?;
        Ok((spec, merged.out))
    }
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}.resonances.csv"))
}

fn run_sweep_command(args: &SweepArgs, kind: Option<SweepKind>) -> Result<u8, Failure> {
    let (spec, out) = args.resolve(kind)?;
    if spec.kind == SweepKind::Fidelity {
        let (rows, drift) = run_fidelity_sweep(&spec)?;
        write_fidelity_csv(&rows, open_out(out.as_deref())?)?;
        eprintln!("max norm drift {drift:e}");
        return Ok(0);
    }
    let rows = run_sweep(&spec)?;
    write_sweep_csv(&rows, open_out(out.as_deref())?)?;
    if spec.kind == SweepKind::Detuning {
        if let Some(path) = &out {
            if let Ok(res) = annotate_resonances(&spec.fixed) {
                write_resonances_csv(&res, open_out(Some(&sidecar_path(path)))?)?;
            }
        }
    }
    let failed = rows.iter().filter(|r| r.flag.is_failure()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
        return Ok(EXIT_SOLVER);
    }
    Ok(0)
}

fn run_spectrum(args: &SpectrumArgs) -> Result<u8, Failure> {
    let p = ModelParams {
        delta_c_prime: args.delta_c_prime,
        ..args.model.params()
    };
    p.validate()?;
    let mut w = csv::Writer::from_writer(open_out(args.model.out.as_deref())?);
    let io_err = |e: csv::Error| Failure::Io(e.into());
    w.write_record(["m", "branch", "energy", "theta_m"])
        .map_err(io_err)?;
    for e in analytic_spectrum(&p, args.mmax) {
        w.write_record([
            e.m.to_string(),
            e.branch.symbol().to_string(),
            format_number(e.energy),
            format_number(e.theta_m),
        ])
        .map_err(io_err)?;
    }
    w.flush()?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::SweepDetuning(a) => run_sweep_command(&a, Some(SweepKind::Detuning)),
        Command::SweepOmega(a) => run_sweep_command(&a, Some(SweepKind::OmegaRatio)),
        Command::SweepChi(a) => run_sweep_command(&a, Some(SweepKind::ChiRatio)),
        Command::Fidelity(a) => run_sweep_command(&a, Some(SweepKind::Fidelity)),
        Command::Sweep(a) => run_sweep_command(&a, None),
        Command::Resonances(a) => {
            let res = annotate_resonances(&a.params())?;
            write_resonances_csv(&res, open_out(a.out.as_deref())?)?;
            Ok(0)
        }
        Command::Spectrum(a) => run_spectrum(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
