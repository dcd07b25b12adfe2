//! Command-line interface: `sweep`, `photon-number`, `g2`, and `report`.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::gaussian::bose_einstein_nbar;
use crate::network::build_network;
use crate::secrecy::{secrecy_verdict, SecrecyReport};
use crate::sweep::{self, evaluate_sampled, resolve, Cell, Overrides, ResolvedRun};

pub const SEED_ENV_VAR: &str = "THERMAL_SIM_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "thermal-sim",
    version,
    about = "Gaussian simulator for thermal-state central-broadcast key distribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a parameter sweep and write CSV + gnuplot artifacts
    Sweep(RunArgs),
    /// Mean thermal occupancy at an angular frequency and temperature
    PhotonNumber {
        /// Angular frequency in rad/s
        #[arg(long)]
        omega: f64,
        /// Temperature in kelvin
        #[arg(long)]
        temp: f64,
    },
    /// Sampled intensity-correlation statistics at one parameter point
    G2(RunArgs),
    /// Single-point secrecy report (human-readable plus a CSV row)
    Report(RunArgs),
}

/// Flags shared by the parameterized subcommands. Every flag overrides the
/// matching config-file key.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Flat key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named preset (fig-condmutinf, fig-discord, fig-thermal, fig-coherent)
    #[arg(long)]
    pub preset: Option<String>,
    /// Eavesdropper tap transmittance, in [0, 1]
    #[arg(long)]
    pub eta1: Option<f64>,
    /// Trusted splitter transmittance, in [0, 1]
    #[arg(long)]
    pub eta2: Option<f64>,
    /// Alice-channel transmittance, in [0, 1]
    #[arg(long)]
    pub eta3: Option<f64>,
    /// Bob-channel transmittance, in [0, 1]
    #[arg(long)]
    pub eta4: Option<f64>,
    /// Eve input variance in SNU (>= 1)
    #[arg(long)]
    pub ve: Option<f64>,
    /// Source mean photon number (thermal variance, or coherent carrier power)
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Alice-channel excess noise (>= 0)
    #[arg(long)]
    pub eps3: Option<f64>,
    /// Bob-channel excess noise (>= 0)
    #[arg(long)]
    pub eps4: Option<f64>,
    /// Source kind: thermal | coherent
    #[arg(long)]
    pub source: Option<String>,
    /// Evaluation mode: analytic | sampled | both
    #[arg(long)]
    pub mode: Option<String>,
    /// Monte Carlo sample count per grid point
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master RNG seed (fallback: THERMAL_SIM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parallel evaluation width
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory for CSV and plot scripts
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Occupancy-to-variance convention: 2n+1 | 2n+2
    #[arg(long = "thermal-variance-convention")]
    pub thermal_variance_convention: Option<String>,
}

impl RunArgs {
    fn to_overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        if let Some(v) = &self.preset {
            o.set("preset", v)?;
        }
        for (key, v) in [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("eta3", self.eta3),
            ("eta4", self.eta4),
            ("ve", self.ve),
            ("nbar", self.nbar),
            ("eps3", self.eps3),
            ("eps4", self.eps4),
        ] {
            if let Some(v) = v {
                o.set(key, &v.to_string())?;
            }
        }
        if let Some(v) = &self.source {
            o.set("source", v)?;
        }
        if let Some(v) = &self.mode {
            o.set("mode", v)?;
        }
        if let Some(v) = self.samples {
            o.set("samples", &v.to_string())?;
        }
        if let Some(v) = self.seed {
            o.set("seed", &v.to_string())?;
        }
        if let Some(v) = self.jobs {
            o.set("jobs", &v.to_string())?;
        }
        if let Some(v) = &self.out {
            o.out = Some(v.clone());
        }
        if let Some(v) = &self.thermal_variance_convention {
            o.set("thermal-variance-convention", v)?;
        }
        Ok(o)
    }

    fn resolve(&self) -> Result<ResolvedRun> {
        let file = match &self.config {
            Some(path) => Some(Overrides::from_file(path)?),
            None => None,
        };
        let env_seed = match std::env::var(SEED_ENV_VAR) {
            Ok(s) => Some(s.parse::<u64>().map_err(|_| {
                Error::Config(format!("{SEED_ENV_VAR}={s:?} is not a valid u64 seed"))
            })?),
            Err(_) => None,
        };
        resolve(file, self.to_overrides()?, env_seed)
    }
}

fn run_command(command: Command) -> Result<()> {
    match command {
        Command::Sweep(args) => {
            let resolved = args.resolve()?;
            let artifacts = sweep::run(&resolved)?;
            for a in artifacts {
                println!(
                    "wrote {} ({} rows) and {}",
                    a.csv_path.display(),
                    a.n_rows,
                    a.plot_path.display()
                );
            }
            Ok(())
        }
        Command::PhotonNumber { omega, temp } => {
            let nbar = bose_einstein_nbar(omega, temp)?;
            println!("{nbar:.1}");
            Ok(())
        }
        Command::G2(args) => {
            let resolved = args.resolve()?;
            let stats = evaluate_sampled(&resolved.base, resolved.samples, resolved.seed)?;
            println!("g2 statistics at the resolved point ({} samples):", resolved.samples);
            println!(
                "  g2_auto(a)    = {:.6} +- {:.6}",
                stats.g2_a.value, stats.g2_a.std_error
            );
            println!(
                "  g2_auto(b)    = {:.6} +- {:.6}",
                stats.g2_b.value, stats.g2_b.std_error
            );
            println!(
                "  g2_cross(a,b) = {:.6} +- {:.6}",
                stats.g2_ab.value, stats.g2_ab.std_error
            );
            let thermal_margin = (stats.g2_a.value - 1.0) / stats.g2_a.std_error.max(1e-300);
            println!(
                "  thermal signature (g2_auto(a) > 1): {}",
                if thermal_margin >= 5.0 { "yes" } else { "no" }
            );
            Ok(())
        }
        Command::Report(args) => {
            let resolved = args.resolve()?;
            let net = build_network(&resolved.base)?;
            let report = SecrecyReport::evaluate(&net)?;
            let verdict = secrecy_verdict(&report);
            println!("secrecy report");
            println!("  source          = {}", resolved.base.source.as_str());
            println!("  v_s             = {} SNU", resolved.base.v_s);
            println!("  v_e             = {} SNU", resolved.base.v_e);
            println!(
                "  eta             = ({}, {}, {}, {})",
                resolved.base.eta1, resolved.base.eta2, resolved.base.eta3, resolved.base.eta4
            );
            println!("  I(A:B)          = {:.9} bits", report.i_ab);
            println!("  I(A:B|E)        = {:.9} bits", report.i_ab_given_e);
            println!(
                "  D(B|A)          = {:.9} bits (min over {} quadrature)",
                report.discord_b_given_a,
                report.discord_quadrature.as_str()
            );
            println!("  physical        = {}", report.physical);
            println!("  verdict         = {}", verdict.as_str());
            if resolved.mode.sampled() {
                let stats = evaluate_sampled(&resolved.base, resolved.samples, resolved.seed)?;
                println!(
                    "  empirical CMI   = {:.9} +- {:.9} bits ({} samples)",
                    stats.cmi, stats.cmi_se, resolved.samples
                );
            }
            // machine-readable row
            let header = [
                "eta1",
                "i_ab",
                "i_ab_given_e",
                "discord_b_given_a",
                "discord_quadrature",
                "physical",
                "verdict",
            ];
            let row = [
                Cell::Num(resolved.base.eta1),
                Cell::Num(report.i_ab),
                Cell::Num(report.i_ab_given_e),
                Cell::Num(report.discord_b_given_a),
                Cell::Text(report.discord_quadrature.as_str().into()),
                Cell::Text(report.physical.to_string()),
                Cell::Text(verdict.as_str().into()),
            ];
            println!("{}", header.join(","));
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => sweep::format_f64(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            println!("{}", cells.join(","));
            Ok(())
        }
    }
}

/// Entry point used by the binary.
pub fn run(cli: Cli) -> ExitCode {
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
