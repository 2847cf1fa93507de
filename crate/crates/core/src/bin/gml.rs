use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gauss_moments::precision::Precision;
use gauss_moments::sweep::{run_sweep, Emit, ResidueClass, SweepConfig, EXIT_ERROR};

/// Sweep primes and verify moments of generalized quadratic Gauss sums.
#[derive(Debug, Parser)]
#[command(name = "gml", version)]
struct Cli {
    #[arg(long, default_value_t = 5)]
    pmin: u64,
    #[arg(long, default_value_t = 500)]
    pmax: u64,
    /// Residue class of p: all, 1mod4 or 3mod4.
    #[arg(long, default_value = "all")]
    class: ResidueClass,
    /// Comma-separated values of n.
    #[arg(long, value_delimiter = ',', default_value = "1", allow_negative_numbers = true)]
    n: Vec<i64>,
    /// Comma-separated moment orders m in 1..=4.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    m: Vec<u32>,
    /// standard or extended.
    #[arg(long, default_value = "standard")]
    precision: Precision,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated outputs: csv, json, svg.
    #[arg(long, value_delimiter = ',', default_value = "csv,json")]
    emit: Vec<Emit>,
    /// Seed for the sampled values of a.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cache directory; GML_CACHE takes precedence.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Prime cutoff for the constant C.
    #[arg(long, default_value_t = gauss_moments::lfunc::DEFAULT_C_PMAX)]
    cmax_pmax: u64,
    /// Series cutoff per Euler factor of C.
    #[arg(long, default_value_t = gauss_moments::lfunc::DEFAULT_C_KMAX)]
    cmax_k: u32,
    /// Record per-prime wall-clock time in the outputs.
    #[arg(long)]
    timings: bool,
    #[arg(long, hide = true)]
    inject_fault: Option<u64>,
}

impl Cli {
    fn into_config(self) -> SweepConfig {
        let defaults = SweepConfig::default();
        let env_cache = std::env::var_os("GML_CACHE")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        SweepConfig {
            pmin: self.pmin,
            pmax: self.pmax,
            class: self.class,
            n_list: self.n,
            m_list: self.m,
            precision: self.precision,
            workers: self.workers.unwrap_or(defaults.workers),
            out_dir: self.out,
            emit: self.emit.into_iter().collect(),
            seed: self.seed,
            cache_dir: env_cache.or(self.cache),
            c_pmax: self.cmax_pmax,
            c_kmax: self.cmax_k,
            timings: self.timings,
            inject_fault: self.inject_fault,
            ..defaults
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = cli.into_config();
    match run_sweep(&cfg) {
        Ok(out) => {
            let r = &out.report;
            println!(
                "{} primes, {} identity failures, {} findings",
                r.primes.len(),
                r.failures.len(),
                r.findings.len()
            );
            for f in &r.failures {
                println!("FAIL p={} {}: {}", f.p, f.check, f.detail);
            }
            for path in &out.files {
                println!("wrote {}", path.display());
            }
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("gml: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
