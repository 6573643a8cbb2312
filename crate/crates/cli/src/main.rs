//! `pointless`: L-polynomials of a genus-3 double cover of a conic for all
//! primes below a bound, one JSON record per line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use pointless::curve_file::read_curve;
use pointless::driver::{run_pipeline, JobConfig, DEFAULT_NAIVE_THRESHOLD};

#[derive(Parser, Debug)]
#[command(name = "pointless", version, about)]
struct Args {
    /// Curve file with a [conic-quartic] and/or [model] section.
    #[arg(long)]
    curve: PathBuf,

    /// Primes below this bound are processed.
    #[arg(long = "N", value_name = "N")]
    bound: u64,

    /// Forest parameter; defaults to min(7, log2 of the leaf count).
    #[arg(long)]
    kappa: Option<u32>,

    /// Primes below this use point counting instead of lifting.
    #[arg(long, default_value_t = DEFAULT_NAIVE_THRESHOLD)]
    naive_threshold: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Cross-check small primes against counts on the conic and test
    /// annihilation by L(1), L(-1) on random elements for larger ones.
    #[arg(long)]
    verify: bool,
}

fn run(args: Args) -> anyhow::Result<()> {
    let source = read_curve(&args.curve).with_context(|| format!("reading {}", args.curve.display()))?;
    let mut cfg = JobConfig::new(source, args.bound);
    cfg.kappa = args.kappa;
    cfg.naive_threshold = args.naive_threshold;
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.verify = args.verify;
    let out = run_pipeline(&cfg)?;
    let s = &out.stats;
    log::info!(
        "model {:.2}s, forests {:.2}s, primes {:.2}s",
        s.model_secs,
        s.tree_secs,
        s.prime_secs
    );
    match &args.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            out.write_jsonl(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            out.write_jsonl(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("POINTLESS_LOG", "warn")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
