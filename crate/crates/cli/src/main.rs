use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod failure;
mod report;

use config::Config;
use failure::Failure;
use report::{Mode, Report};

/// Exact sumset balls, word metrics and embedding checks for a sequence in ⊕Z/m_i.
///
/// Exit status: 0 pass, 1 fail or counterexample, 2 window or budget
/// exhausted, 3 invalid input.
#[derive(Debug, Parser)]
#[command(name = "tcoarse", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Always rebuild layers, ignoring any cache directory.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Layer cache directory; defaults to $TCOARSE_CACHE_DIR when set.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    output: Mode,
    /// Seed for fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth profile |L_0|, …, |L_depth| and covering-number bounds.
    Ball {
        /// Largest n for covering bounds [default: window depth].
        #[arg(long)]
        covering: Option<usize>,
    },
    /// Word distance between two elements.
    Dist { x: String, y: String },
    /// A shortest word for an element.
    Decompose { x: String },
    /// Greedy FS-strict extraction of L terms from the window.
    ExtractFs { length: usize },
    /// FS-strictness, sign condition and swap condition of the configured prefix.
    CheckFs,
    /// Verify the canonical map on supports {0..s} at word depth nmax.
    VerifyEmbed { s: usize, nmax: usize },
    /// Word distances of the d-cube image.
    EmbedCube { d: usize },
    /// Slow-oscillation radius of a function file against radius m.
    SoCheck { file: PathBuf, m: usize },
    /// Chain certificate from y to z at radius m.
    Chain { y: String, z: String, m: usize },
    /// Re-verify a chain certificate file.
    VerifyChain { file: PathBuf },
    /// Seeded function file with radius at most m.
    SoFixture { m: usize },
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    cli.cache_dir
        .clone()
        .or_else(|| std::env::var_os("TCOARSE_CACHE_DIR").map(PathBuf::from))
}

fn run(cli: &Cli, report: &mut Report) -> Result<u8, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::invalid("--config PATH is required"))?;
    let cfg = Config::load(path)?;
    let ctx = commands::Context {
        cfg,
        cache: cache_dir(cli),
        seed: cli.seed,
    };
    commands::dispatch(&ctx, &cli.command, report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { failure::INVALID } else { failure::PASS });
        }
    };
    let mut report = Report::new(cli.output);
    let code = match run(&cli, &mut report) {
        Ok(code) => code,
        Err(f) => {
            let (kind, message) = (f.kind(), f.message.clone());
            report.emit("error", serde_json::json!({ "kind": kind, "message": message }), String::new);
            if report.mode() == Mode::Human {
                eprintln!("error: {}", f.message);
            }
            f.code
        }
    };
    report.emit("exit", serde_json::json!({ "status": code }), String::new);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(report.finish().as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code)
}
