use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qhe_core::optimize::{maximize_work_global, DEFAULT_REL_TOL};
use qhe_core::sweep::{
    compute_sweep, format_significant, point_report, render_csv, render_json, run_sweep, CSV_DIGITS,
};
use qhe_core::thermo::classical_baseline;
use qhe_core::{BathPair, Error, OutputFormat, SweepConfig};

#[derive(Parser)]
#[command(name = "qhe", version, about = "Two-level-system swap heat engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the swap and every temperature for one setup.
    Point {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        a1: f64,
        #[arg(long)]
        a2: f64,
        #[arg(long)]
        json: bool,
    },
    /// Maximum-work sweep over efficiency.
    Sweep {
        #[arg(long, default_value_t = SweepConfig::DEFAULT_T1)]
        t1: f64,
        #[arg(long, default_value_t = SweepConfig::DEFAULT_T2)]
        t2: f64,
        /// Defaults to 0.01.
        #[arg(long)]
        eta_lo: Option<f64>,
        /// Defaults to 1 - T2/T1 - 0.01.
        #[arg(long)]
        eta_hi: Option<f64>,
        #[arg(long, default_value_t = SweepConfig::DEFAULT_STEPS)]
        steps: usize,
        /// Output file; the table goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Evaluate gridpoints on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Global maximum of the extracted work over both gaps.
    Optimize {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        json: bool,
    },
    /// Classical finite-body reference engine.
    Classical {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        /// Heat capacity ratio C1/C2.
        #[arg(long)]
        xi: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    if err.is_invalid_input() {
        2
    } else if err.is_io() {
        4
    } else {
        3
    }
}

fn print_table(rows: &[(&str, f64)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$} = {}\n", format_significant(*v, CSV_DIGITS)))
        .collect()
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Point {
            t1,
            t2,
            a1,
            a2,
            json,
        } => {
            let r = point_report(t1, t2, a1, a2)?;
            if json {
                return Ok(serde_json::to_string_pretty(&r)? + "\n");
            }
            let t = &r.temperatures;
            Ok(print_table(&[
                ("t1", r.t1),
                ("t2", r.t2),
                ("a1", r.a1),
                ("a2", r.a2),
                ("theta", r.theta),
                ("nu", r.nu),
                ("eta", r.eta),
                ("r2", r.r2),
                ("s2", r.s2),
                ("c1", r.c1),
                ("c2", r.c2),
                ("u_initial", r.swap.u_initial),
                ("u_final", r.swap.u_final),
                ("work", r.swap.work),
                ("work_extracted", r.work_extracted),
                ("du1", r.swap.du1),
                ("du2", r.swap.du2),
                ("t1_prime", t.t1_prime),
                ("t2_prime", t.t2_prime),
                ("t_effective", t.t_effective),
                ("t_spectral", t.t_spectral),
                ("t_contact", t.t_contact),
                ("x_aux", t.x_aux),
            ]))
        }
        Command::Sweep {
            t1,
            t2,
            eta_lo,
            eta_hi,
            steps,
            out,
            format,
            parallel,
        } => {
            let defaults = SweepConfig::with_defaults(t1, t2, out.clone().unwrap_or_default());
            let config = SweepConfig {
                eta_lo: eta_lo.unwrap_or(defaults.eta_lo),
                eta_hi: eta_hi.unwrap_or(defaults.eta_hi),
                steps,
                format: format.into(),
                ..defaults
            };
            match out {
                Some(path) => {
                    let rows = run_sweep(&config, parallel)?;
                    Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
                }
                None => {
                    let rows = compute_sweep(&config, parallel)?;
                    match config.format {
                        OutputFormat::Csv => Ok(render_csv(&rows)),
                        OutputFormat::Json => render_json(&config, &rows),
                    }
                }
            }
        }
        Command::Optimize { t1, t2, json } => {
            let baths = BathPair::new(t1, t2)?;
            let g = maximize_work_global(&baths, DEFAULT_REL_TOL)?;
            if json {
                return Ok(serde_json::to_string_pretty(&g)? + "\n");
            }
            Ok(print_table(&[
                ("a1_star", g.a1_star),
                ("a2_star", g.a2_star),
                ("nu_star", g.nu_star),
                ("xi_star", g.xi_star),
                ("work_star", g.work_star),
                ("t1_prime", g.t1_prime),
                ("t2_prime", g.t2_prime),
                ("t_star", g.t_star),
                ("t_star_harmonic", g.t_star_harmonic),
                ("stationarity_residual", g.stationarity_residual),
            ]))
        }
        Command::Classical { t1, t2, xi } => {
            let baths = BathPair::new(t1, t2)?;
            let c = classical_baseline(xi, &baths)?;
            Ok(print_table(&[
                ("xi", c.xi),
                ("t_final", c.t_final),
                ("work_per_c2", c.work),
                ("efficiency", c.efficiency),
            ]))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                eprintln!("error: {e}");
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
