//! Prime sweeps: per-prime records, caching, and CSV/JSON/SVG reports.

pub mod cache;
pub mod config;
pub mod record;
pub mod report;
pub mod svg;

use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::primes_in;
use crate::lfunc::{cached_constant_c, write_atomic, ConstantC};
use crate::par;
use crate::precision::{Ext, Precision};

pub use config::{Emit, ResidueClass, SweepConfig};
pub use record::PrimeRecord;
pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_IDENTITY_FAILURE: i32 = 2;

#[derive(Debug)]
pub struct SweepOutcome {
    pub status: i32,
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// Primes in `[pmin, pmax]` of the configured residue class, ascending.
pub fn sweep_primes(cfg: &SweepConfig) -> Vec<u64> {
    primes_in(cfg.pmin.max(3), cfg.pmax)
        .into_iter()
        .filter(|&p| cfg.class.contains(p))
        .collect()
}

fn obtain_record(p: u64, cfg: &SweepConfig, c: &ConstantC, fingerprint: &str) -> Result<PrimeRecord> {
    let start = Instant::now();
    let cached = cfg
        .cache_dir
        .as_deref()
        .and_then(|dir| cache::load_cache(dir, p, cfg.precision, fingerprint));
    let mut rec = match cached {
        Some(rec) => rec,
        None => {
            let ctx = record::build_context(p, cfg)?;
            let rec = match cfg.precision {
                Precision::Standard => record::compute_record::<f64>(&ctx, cfg, c)?,
                Precision::Extended => record::compute_record::<Ext>(&ctx, cfg, c)?,
            };
            if let Some(dir) = cfg.cache_dir.as_deref() {
                if let Err(e) = cache::store_cache(dir, cfg.precision, fingerprint, &rec) {
                    log::warn!("could not cache p = {p}: {e}");
                }
            }
            rec
        }
    };
    rec.runtime_ms = cfg.timings.then(|| start.elapsed().as_millis() as u64);
    Ok(rec)
}

fn compute_all(primes: &[u64], cfg: &SweepConfig, c: &ConstantC) -> Vec<Result<PrimeRecord>> {
    let fingerprint = cfg.fingerprint();
    // Largest primes first: they dominate the cost.
    let mut order = primes.to_vec();
    order.reverse();
    let work = || par::map_slice(&order, |&p| obtain_record(p, cfg, c, &fingerprint));
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                log::warn!("falling back to the global pool: {e}");
                work()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        work()
    }
}

/// Runs a sweep, writes the requested outputs, and returns the exit status:
/// [`EXIT_IDENTITY_FAILURE`] if any exact identity failed, otherwise
/// [`EXIT_OK`]. Configuration and I/O problems are returned as errors.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let c = cached_constant_c(cfg.cache_dir.as_deref(), cfg.c_pmax, cfg.c_kmax)?;
    let primes = sweep_primes(cfg);
    log::info!(
        "sweeping {} primes in [{}, {}] at {} precision",
        primes.len(),
        cfg.pmin,
        cfg.pmax,
        cfg.precision
    );
    let mut records = compute_all(&primes, cfg, &c)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.p);
    let report = Report::assemble(cfg.clone(), c, records);
    for f in &report.failures {
        log::error!("identity failure at p = {}: {} ({})", f.p, f.check, f.detail);
    }
    let files = write_outputs(cfg, &report)?;
    Ok(SweepOutcome {
        status: report.status,
        report,
        files,
    })
}

fn write_outputs(cfg: &SweepConfig, report: &Report) -> Result<Vec<PathBuf>> {
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        files.push(path);
        Ok(())
    };
    for emit in &cfg.emit {
        match emit {
            Emit::Csv => put("report.csv", report.to_csv())?,
            Emit::Json => put("report.json", report.to_json())?,
            Emit::Svg => {
                put("ratio.svg", svg::ratio_chart(report))?;
                put("residual.svg", svg::residual_chart(report))?;
            }
        }
    }
    Ok(files)
}
