use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use pqn::flows;
use pqn::report::{Report, Settings};
use pqn::suites;
use pqn_core::dynamics::Scheme;
use pqn_core::toda::{Family, TodaModel};
use pqn_core::Point;

/// Poisson quasi-Nijenhuis checks on closed Toda lattices.
#[derive(Parser)]
#[command(name = "pqn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Sampling {
    /// Number of random sample points.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Highest trace Hamiltonian index [default: 2n].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    kmax: Option<u32>,
    /// Coordinates are drawn from [−box, box].
    #[arg(long = "box", default_value_t = 1.0, value_parser = non_negative)]
    half_width: f64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the quasi-Nijenhuis structure and trace-Hamiltonian chain of a model.
    Verify {
        /// a1, c1 or a2t.
        #[arg(value_parser = family)]
        model: Family,
        /// Number of particles.
        #[arg(long, value_parser = particles)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check the reduction of A_n^(1) through the Flaschka map.
    Flaschka {
        #[arg(long, value_parser = particles)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Integrate a closed Toda flow and export the trajectory as CSV.
    Simulate {
        #[arg(value_parser = family)]
        model: Family,
        #[arg(long, value_parser = particles)]
        n: usize,
        /// Initial positions, comma separated [default: 0].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q0: Option<Vec<f64>>,
        /// Initial momenta, comma separated [default: 0.1,-0.2,0.1,0,…].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p0: Option<Vec<f64>>,
        /// Final time.
        #[arg(long = "T", visible_alias = "time", default_value_t = 10.0, value_parser = non_negative)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3, value_parser = positive)]
        dt: f64,
        /// leapfrog or rk4 [default: leapfrog, rk4 with --flaschka].
        #[arg(long, value_parser = scheme)]
        scheme: Option<Scheme>,
        /// Integrate the reduced flow P_1♯dH̃_1 in Flaschka variables (a1 only).
        #[arg(long)]
        flaschka: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: pqn_core::Error| e.to_string())
}

fn scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: pqn_core::Error| e.to_string())
}

fn particles(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        Ok(n) => Err(format!("at least 2 particles are required, got {n}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("expected a finite non-negative number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match non_negative(s)? {
        v if v > 0.0 => Ok(v),
        v => Err(format!("expected a positive number, got {v}")),
    }
}

fn usage(kind: ErrorKind, msg: String) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn settings(s: &Sampling, n: usize) -> Settings {
    Settings { samples: s.samples, seed: s.seed, kmax: s.kmax.map_or(2 * n, |k| k as usize), half_width: s.half_width }
}

fn finish(report: Report, json: Option<&PathBuf>) -> Result<ExitCode> {
    print!("{}", report.table());
    if let Some(path) = json {
        std::fs::write(path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if report.passed {
        return Ok(ExitCode::SUCCESS);
    }
    for c in report.failed() {
        eprintln!("failed: {} ({})", c.name, c.anchor);
    }
    Ok(ExitCode::from(1))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { model, n, sampling } => {
            let m = TodaModel::build(model, n)?;
            let s = settings(&sampling, n);
            let checks = suites::verify(&m, &s)?;
            finish(Report::new("verify", m.id(), &s, checks), sampling.json.as_ref())
        }
        Command::Flaschka { n, sampling } => {
            let s = settings(&sampling, n);
            let checks = suites::flaschka(n, &s)?;
            finish(Report::new("flaschka", format!("flaschka-n{n}"), &s, checks), sampling.json.as_ref())
        }
        Command::Simulate { model, n, q0, p0, t_end, dt, scheme, flaschka, csv } => {
            let q0 = q0.unwrap_or_else(|| vec![0.0; n]);
            let p0 = p0.unwrap_or_else(|| flows::default_momenta(n));
            for (name, v) in [("--q0", &q0), ("--p0", &p0)] {
                if v.len() != n {
                    usage(ErrorKind::WrongNumberOfValues, format!("{name} needs {n} values, got {}", v.len()));
                }
            }
            let scheme = scheme.unwrap_or(if flaschka { Scheme::Rk4 } else { Scheme::Leapfrog });
            if flaschka && model != Family::A1 {
                usage(ErrorKind::ArgumentConflict, "--flaschka applies to the a1 model only".into());
            }
            if flaschka && scheme == Scheme::Leapfrog {
                usage(
                    ErrorKind::ArgumentConflict,
                    "leapfrog needs the canonical structure; the reduced flow uses P_1, so use --scheme rk4".into(),
                );
            }
            let x0 = Point::physical(&q0, &p0)?;
            let m = TodaModel::build(model, n)?;
            let result = if flaschka {
                flows::reduced(n, &x0, t_end, dt, scheme)
            } else {
                flows::physical(&m, &x0, t_end, dt, scheme)
            };
            let sim = match result {
                Ok(sim) => sim,
                Err(pqn_core::Error::BlowUp { last_time }) => {
                    eprintln!("error: trajectory left the finite domain; last valid time {last_time}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            };
            match &csv {
                Some(path) => {
                    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                    sim.write_csv(BufWriter::new(f))?;
                    print!("{}", sim.summary());
                }
                None => {
                    sim.write_csv(std::io::stdout().lock())?;
                    eprint!("{}", sim.summary());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
