use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use worldline_lab_cli::figures::{emit_all, Plane};
use worldline_lab_cli::verify::{run_suite, Rule};
use worldline_lab_cli::{commands, CliError};

#[derive(Parser)]
#[command(name = "worldline-lab", version, about = "Worldline simulation, figures and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a scenario and write trajectory.csv and report.json.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Emit the helical worldline figures with their ω = 0 references.
    #[command(group(ArgGroup::new("which").required(true).args(["n", "all"])))]
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: Option<u8>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Plane to plot; repeat for several. Defaults to xy, xt and yt.
        #[arg(long, value_parser = ["xy", "xt", "yt"])]
        projection: Vec<String>,
    },
    /// Run randomized consistency checks and print a PASS/FAIL table.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["shape", "lagrangian", "equivalence", "all"])]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Compare an EQ26_SPIN integration against the closed-form helix.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Simulate { scenario, out } => {
            let r = commands::simulate(&scenario, &out)?;
            println!("{} samples, constraint drift {:?}", r.samples, r.constraint_drift);
            for (k, v) in &r.drift_report {
                println!("drift {k:<16} {v:.3e}");
            }
            Ok(())
        }
        Cmd::Figures { n, all, out, projection } => {
            let ns: Vec<u8> = if all { vec![1, 2, 3, 4] } else { n.into_iter().collect() };
            let planes = if projection.is_empty() {
                Plane::ALL.to_vec()
            } else {
                projection.iter().map(|p| Plane::parse(p)).collect::<Result<Vec<_>, _>>()?
            };
            for p in emit_all(&ns, &planes, &out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Cmd::Verify { suite, seed, trials } => {
            let rows = run_suite(&suite, seed, trials)?;
            println!("{:<48} {:>12} {:>10}  result", "check", "residual", "threshold");
            let mut failed = 0;
            for r in &rows {
                let op = match r.rule {
                    Rule::AtMost => "<=",
                    Rule::Above => ">",
                };
                let verdict = if r.pass() { "PASS" } else { "FAIL" };
                failed += usize::from(!r.pass());
                println!("{:<48} {:>12.3e} {op:>2}{:>8.1e}  {verdict}", r.check, r.residual, r.threshold);
            }
            if failed > 0 {
                return Err(CliError::Fail(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Cmd::Oracle { scenario } => {
            let o = commands::oracle(&scenario)?;
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            println!("max componentwise error {:.3e} (tolerance {:.1e}) {verdict}", o.max_error, o.tolerance);
            if !o.pass {
                return Err(CliError::Fail("oracle deviation above tolerance".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("worldline-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
