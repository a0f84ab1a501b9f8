use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use selab::output::write_atomic;
use selab::profile::warp_profile_csv;
use selab::schema::{report_schema, scenario_schema};
use selab::{run_file, Kind, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "selab", version, about = "Run stress-energy and monotonicity scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write `<id>.json` and `<id>.csv`.
    Run {
        scenario: PathBuf,
        /// Output directory; defaults to the scenario's `output.dir`, then $SELAB_OUT_DIR, then ./selab-out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid resolution override.
        #[arg(long)]
        resolution: Option<usize>,
        /// Worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List catalog charts, forms and immersions.
    ListCatalog,
    /// Print the JSON Schema of a scenario kind, or of its report.
    Schema {
        kind: String,
        #[arg(long)]
        report: bool,
    },
    /// Export the warp profile of a warped chart as CSV (r, f, f_prime, K_r).
    WarpProfile {
        chart: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every N-th node.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
}

/// Write to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, resolution, threads } => {
            let opts = RunOptions { out_dir: out, resolution, threads };
            match run_file(&scenario, &opts) {
                Ok(o) => {
                    let r = &o.rendered;
                    let head = match &r.first_failure {
                        None => format!("{}: {:?}", r.id, r.status),
                        Some(f) => format!("{}: {:?} ({f})", r.id, r.status),
                    };
                    emit(&format!("{head}\n  {}\n  {}\n", o.json_path.display(), o.csv_path.display()));
                    ExitCode::from(r.exit_code())
                }
                Err(e) => fail(e),
            }
        }
        Command::ListCatalog => {
            let lines = match selab_core::catalog::listing() {
                Ok(l) => l,
                Err(e) => return fail(RunError::Config(e.to_string())),
            };
            emit(&(lines.join("\n") + "\n"));
            ExitCode::SUCCESS
        }
        Command::Schema { kind, report } => {
            let Some(k) = Kind::parse(&kind) else {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                return fail(RunError::Config(format!("unknown kind {kind:?}; expected one of {}", names.join(", "))));
            };
            let v = if report { report_schema(k) } else { scenario_schema(k) };
            emit(&(serde_json::to_string_pretty(&v).expect("schemas serialize") + "\n"));
            ExitCode::SUCCESS
        }
        Command::WarpProfile { chart, out, every } => match warp_profile_csv(&chart, every) {
            Ok(text) => match out {
                Some(p) => match write_atomic(&p, text.as_bytes()) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => fail(e),
                },
                None => {
                    emit(&text);
                    ExitCode::SUCCESS
                }
            },
            Err(e) => fail(e),
        },
    }
}
