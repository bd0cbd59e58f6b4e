use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use prodcheck::cli::{run, Mode, ReportFormat, RunConfig};
use prodcheck::translate::Caps;

/// Decide data-oblivious productivity of a stream specification.
#[derive(Parser)]
#[command(name = "prodcheck", version)]
struct Args {
    /// Specification file.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Decide)]
    mode: Mode,
    /// Only analyze this stream constant.
    #[arg(long)]
    root: Option<String>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report: ReportFormat,
    #[arg(long, default_value_t = Caps::default().max_columns)]
    max_columns: usize,
    #[arg(long, default_value_t = Caps::default().finitize_cap)]
    finitize_cap: usize,
    #[arg(long, default_value_t = Caps::default().oracle_prod_cap)]
    oracle_prod_cap: u64,
    #[arg(long, default_value_t = Caps::default().oracle_steps)]
    oracle_steps: usize,
    /// Print the equation systems behind each gate.
    #[arg(long)]
    verbose: bool,
    /// Print the solver's diagram columns.
    #[arg(long)]
    dump_columns: bool,
}

fn main() {
    let a = Args::parse();
    let caps = Caps {
        max_columns: a.max_columns.max(1),
        finitize_cap: a.finitize_cap.max(1),
        oracle_prod_cap: a.oracle_prod_cap.max(1),
        oracle_steps: a.oracle_steps.max(1),
    };
    let cfg = RunConfig {
        input: a.file,
        mode: a.mode,
        root: a.root,
        report: a.report,
        caps,
        verbose: a.verbose,
        dump_columns: a.dump_columns,
    };
    let out = run(&cfg);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(out.code);
}
