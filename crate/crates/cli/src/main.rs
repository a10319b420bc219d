use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qrf_core::harness::{
    distribution_command, example_sn, load_group_file, run_suite, CheckId, ExampleConfig, StateSpec, SuiteConfig,
    SuiteReport, SCHEMA,
};
use qrf_core::representations::RepSpec;
use qrf_core::Error;

#[derive(Parser)]
#[command(
    name = "qrf",
    version,
    about = "Check relativisation and restriction identities for finite-group frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group operations
    Group {
        #[command(subcommand)]
        command: GroupCommand,
    },
    /// Run the verification suite and write a JSON report
    Verify {
        /// Builtin (z4, s3, s4, d4) or group file
        #[arg(long)]
        group: String,
        /// Base point; defaults to the space's canonical choice
        #[arg(long)]
        base: Option<usize>,
        /// Comma-separated check ids; all applicable checks when omitted
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// System representation spec file
        #[arg(long)]
        rep: Option<PathBuf>,
        /// Report path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Born distributions of a frame state over X and G
    Distribution {
        #[arg(long)]
        group: String,
        /// localized:<x>, invariant-pure, maximally-mixed, or a density-matrix file
        #[arg(long)]
        state: String,
        #[arg(long)]
        base: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The symmetric-group example on n points with d-dimensional factors
    ExampleSn {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Close a generator file into a Cayley table
    Build { file: PathBuf },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::config("out", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn summarise(report: &SuiteReport) {
    for v in &report.verdicts {
        let elapsed = report
            .timing
            .iter()
            .find(|(id, _)| *id == v.id)
            .map(|(_, d)| d.as_secs_f64())
            .unwrap_or(0.0);
        let status = if v.pass { "PASS" } else { "FAIL" };
        eprintln!("{status} {:<32} max_dev={:.3e}  {:.3}s", v.id, v.max_deviation, elapsed);
    }
    eprintln!(
        "{}",
        if report.pass {
            "all checks passed"
        } else {
            "some checks failed"
        }
    );
}

fn group_build(file: &Path) -> Result<String, Error> {
    let space = load_group_file(file)?;
    let g = &space.group;
    let elements: Vec<&[usize]> = g.elements().map(|e| space.defining.permutation(e)).collect();
    let cayley: Vec<Vec<usize>> = g
        .elements()
        .map(|a| g.elements().map(|b| g.mul(a, b)).collect())
        .collect();
    let inverse: Vec<usize> = g.elements().map(|e| g.inv(e)).collect();
    Ok(pretty(&json!({
        "schema": SCHEMA,
        "symbols": space.spec.symbols,
        "order": g.order(),
        "generators": g.generators(),
        "elements": elements,
        "inverse": inverse,
        "cayley": cayley,
        "transitive": space.defining.is_transitive(),
    })))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Group {
            command: GroupCommand::Build { file },
        } => {
            print!("{}", group_build(&file)?);
            Ok(true)
        }
        Command::Verify {
            group,
            base,
            checks,
            seed,
            tol,
            samples,
            rep,
            out,
        } => {
            let checks = checks
                .iter()
                .map(|c| c.parse::<CheckId>())
                .collect::<Result<Vec<_>, _>>()?;
            let system_rep = rep
                .map(|path| -> Result<RepSpec, Error> {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Error::config("rep", format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| Error::config("rep", format!("{}: {e}", path.display())))
                })
                .transpose()?;
            let config = SuiteConfig {
                group,
                base_point: base,
                system_rep,
                checks,
                tolerance: tol,
                samples,
                seed,
            };
            let report = run_suite(&config)?;
            summarise(&report);
            emit(&report.to_json(), out.as_deref())?;
            Ok(report.pass)
        }
        Command::Distribution {
            group,
            state,
            base,
            out,
        } => {
            let spec: StateSpec = state.parse()?;
            let report = distribution_command(&group, base, &spec)?;
            emit(&pretty(&json!(report)), out.as_deref())?;
            Ok(true)
        }
        Command::ExampleSn {
            n,
            dim,
            samples,
            seed,
            tol,
            out,
        } => {
            let report = example_sn(&ExampleConfig {
                n,
                factor_dim: dim,
                samples,
                seed,
                tolerance: tol,
            })?;
            summarise(&report);
            emit(&report.to_json(), out.as_deref())?;
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
