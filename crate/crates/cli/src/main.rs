//! `qpi`: batch driver for the verification engine.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "qpi", version, about = "Exact verification of q-analogues of Ramanujan-type series for 1/pi")]
struct Cli {
    /// Also write the report as JSON lines to this path.
    #[arg(long, global = true)]
    json: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact checks.
    #[command(subcommand)]
    Verify(Verify),
    /// Multiprecision evaluation.
    #[command(subcommand)]
    Eval(Eval),
    /// Classical limits.
    #[command(subcommand)]
    Limit(Limit),
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Compare both sides of an identity as truncated power series.
    Identity {
        name: String,
        #[arg(long, default_value_t = 60)]
        order: usize,
    },
    /// Check the telescoping relation of a WZ pair on a grid.
    Wz {
        family: String,
        #[arg(long, default_value_t = 10)]
        nmax: i64,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        kmin: i64,
        #[arg(long, default_value_t = 10)]
        kmax: i64,
    },
    /// Iterate a WZ pair and compare with its closed forms.
    Iterate {
        family: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        depth: u8,
        #[arg(long, default_value_t = 60)]
        order: usize,
    },
    /// Verify specializations of the quadratic or cubic transformation.
    Transform(TransformArgs),
    /// Check truncated sums against their congruences.
    Congruence {
        name: String,
        /// Comma-separated moduli (primes for cong_classical).
        #[arg(long, value_delimiter = ',', conflicts_with = "n_max")]
        n_list: Option<Vec<u64>>,
        #[arg(long, default_value_t = 25)]
        n_max: u64,
    },
}

#[derive(Args, Debug)]
struct TransformArgs {
    kind: String,
    /// Known specializations and the built-in battery.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    battery: bool,
    /// Parameters such as `s=2,a=q,d=-q,b=inf` or `s=2,a=q,c=1`.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, default_value_t = 60)]
    order: usize,
}

#[derive(Subcommand, Debug)]
enum Eval {
    /// Evaluate both sides of an identity at a rational `q`.
    Numeric {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 256)]
        prec_bits: usize,
        #[arg(long, default_value_t = 100_000)]
        terms: usize,
        /// Pass when the gap is below `10^tol_exp`.
        #[arg(long, default_value_t = -30, allow_hyphen_values = true)]
        tol_exp: i64,
    },
}

#[derive(Subcommand, Debug)]
enum Limit {
    /// Sum a classical series and compare with its `1/pi` constant.
    Pi {
        name: String,
        #[arg(long, default_value_t = 256)]
        prec_bits: usize,
        /// Term cap; defaults per series.
        #[arg(long)]
        terms: Option<usize>,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("QPI_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    configure_threads();
    let start = Instant::now();
    let records = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("run `qpi --help` for usage");
            return ExitCode::from(2);
        }
    };
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    let report = Report::new(command, records, start.elapsed().as_millis() as u64);
    if report.write_text(io::stdout().lock()).is_err() {
        return ExitCode::from(2);
    }
    if let Some(path) = &cli.json {
        let written = File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            report.write_json(&mut w)?;
            std::io::Write::flush(&mut w)
        });
        if let Err(e) = written {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
