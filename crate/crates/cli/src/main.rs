use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use subord::commands::analytic::{self, DensityRow, SubordinationRow, TimeParam};
use subord::commands::{rmt, verify};
use subord::config::ExperimentConfig;
use subord::literal::{parse_complex_grid, Range1};
use subord::measure_file::load_measure;
use subord_core::exact::parse_rational;

#[derive(Parser)]
#[command(name = "subord", version, about = "Free compression, subordination and random-matrix checks")]
struct Cli {
    /// Print a JSON report instead of the human-readable one.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TimeFlags {
    /// Compression time t ≥ 1, as a rational such as "3/2".
    #[arg(long = "t")]
    t: Option<String>,
    /// Projection trace α = 1/t.
    #[arg(long, conflicts_with = "t")]
    alpha: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coalgebra, Ψ, conjugate-variable and Markovianity suites.
    VerifyCoalgebra {
        /// Largest word degree checked.
        #[arg(long, default_value_t = 6)]
        degree: usize,
        /// Projection traces; repeat or separate with commas.
        #[arg(long = "alpha", value_delimiter = ',', default_values_t = ["1/2".to_string(), "1/3".to_string(), "2/3".to_string()])]
        alphas: Vec<String>,
        /// Use ∂X = 2·1⊗1 in the ambient algebra; the suites must then fail.
        #[arg(long)]
        corrupt: bool,
    },
    /// Moments and density of the compressed law μ_t.
    Compress {
        measure: PathBuf,
        #[command(flatten)]
        time: TimeFlags,
        /// Highest moment reported.
        #[arg(long, default_value_t = 6)]
        degree: usize,
        /// Density grid lo:hi:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// CSV file for the density samples (x, density).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The subordination function F on a grid in the upper half-plane.
    Subordinate {
        measure: PathBuf,
        #[command(flatten)]
        time: TimeFlags,
        /// re_lo:re_hi:n,im_lo:im_hi:m, or points such as "2i;0.5+1i".
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// CSV output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density of μ (or μ_t) by Stieltjes inversion.
    Density {
        measure: PathBuf,
        #[command(flatten)]
        time: TimeFlags,
        /// lo:hi:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// CSV output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiments from a config file.
    Rmt {
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the record output path in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| p.display().to_string())?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn write_density_csv(rows: &[DensityRow], out: Option<&Path>, with_atoms: bool) -> Result<()> {
    let mut w = csv_writer(out)?;
    if with_atoms {
        w.write_record(["x", "density", "atom_mass"])?;
    } else {
        w.write_record(["x", "density"])?;
    }
    for r in rows {
        let mut fields = vec![r.x.to_string(), r.density.to_string()];
        if with_atoms {
            fields.push(r.atom_mass.map(|m| m.to_string()).unwrap_or_default());
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

fn write_subordination_csv(rows: &[SubordinationRow], out: Option<&Path>) -> Result<()> {
    let mut w = csv_writer(out)?;
    w.write_record(["z_re", "z_im", "f_re", "f_im", "residual", "status"])?;
    for r in rows {
        w.write_record([
            r.z_re.to_string(),
            r.z_im.to_string(),
            r.f_re.to_string(),
            r.f_im.to_string(),
            r.residual.to_string(),
            r.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_grid(grid: Option<&str>) -> Result<Option<Range1>> {
    grid.map(Range1::parse).transpose()
}

/// Runs the command; `Ok(false)` means a check failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::VerifyCoalgebra { degree, alphas, corrupt } => {
            let alphas = alphas
                .iter()
                .map(|a| parse_rational(a).with_context(|| format!("--alpha {a:?} is not a rational")))
                .collect::<Result<Vec<_>>>()?;
            let report = verify::verify_coalgebra(degree, &alphas, corrupt)?;
            if cli.json {
                print_json(&report)?;
            } else {
                print!("{}", report.render());
            }
            Ok(report.pass)
        }
        Command::Compress { measure, time, degree, grid, out } => {
            let mu = load_measure(&measure)?;
            let t = TimeParam::from_flags(time.t.as_deref(), time.alpha.as_deref())?;
            let report = analytic::compress(&mu, &t, degree, parse_grid(grid.as_deref())?)?;
            if let Some(path) = &out {
                write_density_csv(&report.density, Some(path), false)?;
            }
            if cli.json {
                print_json(&report)?;
            } else {
                println!("moments of μ_t for {} at t = {}", report.measure, report.t);
                for m in &report.moments {
                    println!("m_{:<3} {}{}", m.k, m.value, if m.exact { "" } else { "  (float)" });
                }
                match &out {
                    Some(path) => println!("density: {} points written to {}", report.density.len(), path.display()),
                    None => write_density_csv(&report.density, None, false)?,
                }
            }
            Ok(true)
        }
        Command::Subordinate { measure, time, grid, out } => {
            let mu = load_measure(&measure)?;
            let t = TimeParam::from_flags(time.t.as_deref(), time.alpha.as_deref())?;
            let report = analytic::subordinate(&mu, &t, &parse_complex_grid(&grid)?)?;
            if cli.json {
                if let Some(path) = &out {
                    write_subordination_csv(&report.rows, Some(path))?;
                }
                print_json(&report)?;
            } else {
                write_subordination_csv(&report.rows, out.as_deref())?;
                eprintln!(
                    "{} points, max residual {:.3e}, min Im F − Im z {:.3e}: {}",
                    report.rows.len(),
                    report.max_residual,
                    report.min_im_gain,
                    if report.pass { "pass" } else { "FAIL" }
                );
            }
            Ok(report.pass)
        }
        Command::Density { measure, time, grid, out } => {
            let mu = load_measure(&measure)?;
            let t = TimeParam::from_flags(time.t.as_deref(), time.alpha.as_deref())?;
            let report = analytic::density(&mu, &t, parse_grid(grid.as_deref())?)?;
            if cli.json {
                if let Some(path) = &out {
                    write_density_csv(&report.rows, Some(path), true)?;
                }
                print_json(&report)?;
            } else {
                write_density_csv(&report.rows, out.as_deref(), true)?;
            }
            Ok(true)
        }
        Command::Rmt { config, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let base = config.parent().unwrap_or(Path::new("."));
            let run = rmt::run_config(&cfg, base, out.as_deref())?;
            if cli.json {
                print_json(&run.records)?;
            } else {
                print!("{}", run.render());
            }
            Ok(run.pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
