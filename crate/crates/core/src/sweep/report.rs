use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::lfunc::ConstantC;

use super::cache::CODE_VERSION;
use super::config::SweepConfig;
use super::record::PrimeRecord;

/// Empirical bound applied to every normalized residual.
pub const THRESHOLD: f64 = 10.0;
/// Smallest prime at which the character-sum and closed-form residual
/// bounds are assessed.
pub const CHARSUM_MIN_P: u64 = 100;
/// Smallest prime at which the weighted residual bounds are assessed.
pub const WEIGHTED_MIN_P: u64 = 500;
/// Dyadic buckets for the conjecture-ratio trend.
pub const TREND_BUCKETS: [(u64, u64); 3] = [(500, 1000), (1000, 2000), (2000, 4000)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub p: u64,
    pub check: String,
    pub detail: String,
}

/// A normalized quantity above its empirical threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub p: Option<u64>,
    pub n: Option<i64>,
    pub m: Option<u32>,
    pub quantity: String,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: u64,
    pub hi: u64,
    pub count: usize,
    pub median_abs_deviation: Option<f64>,
}

/// Median `|conjecture_ratio - 1|` per dyadic bucket for one `(n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub n: i64,
    pub m: u32,
    pub buckets: Vec<Bucket>,
    pub non_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: SweepConfig,
    pub constant_c: ConstantC,
    pub primes: Vec<PrimeRecord>,
    pub failures: Vec<Failure>,
    pub findings: Vec<Finding>,
    pub trends: Vec<Trend>,
    pub status: i32,
}

fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

pub fn trends(primes: &[PrimeRecord], n_list: &[i64], m_list: &[u32]) -> Vec<Trend> {
    let mut out = Vec::new();
    for &n in n_list {
        for &m in m_list {
            let buckets: Vec<Bucket> = TREND_BUCKETS
                .iter()
                .map(|&(lo, hi)| {
                    let mut devs: Vec<f64> = primes
                        .iter()
                        .filter(|r| r.p >= lo && r.p < hi)
                        .flat_map(|r| r.moments.iter())
                        .filter(|mr| mr.n == n && mr.m == m)
                        .map(|mr| (mr.conjecture_ratio - 1.0).abs())
                        .collect();
                    Bucket {
                        lo,
                        hi,
                        count: devs.len(),
                        median_abs_deviation: median(&mut devs),
                    }
                })
                .collect();
            let medians: Vec<f64> = buckets.iter().filter_map(|b| b.median_abs_deviation).collect();
            let non_increasing = medians.windows(2).all(|w| w[1] <= w[0]);
            out.push(Trend {
                n,
                m,
                buckets,
                non_increasing,
            });
        }
    }
    out
}

pub fn findings(primes: &[PrimeRecord], trends: &[Trend]) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut flag = |p: u64, n: Option<i64>, m: Option<u32>, quantity: &str, value: f64| {
        if value > THRESHOLD || value.is_nan() {
            out.push(Finding {
                p: Some(p),
                n,
                m,
                quantity: quantity.into(),
                value,
                threshold: THRESHOLD,
            });
        }
    };
    for r in primes {
        let p = r.p;
        if p >= CHARSUM_MIN_P {
            flag(p, None, None, "t_norm", r.t_norm);
            flag(p, None, None, "triple_full_norm", r.triple_full_norm);
            flag(p, None, None, "max_s_norm", r.max_s_norm);
            flag(p, None, None, "max_r_norm", r.max_r_norm);
            flag(p, None, None, "n_norm", r.n_norm);
            flag(p, None, None, "max_diag_s_norm", r.max_diag_s_norm);
            flag(p, None, None, "diag_t_norm", r.diag_t_norm);
            flag(p, None, None, "max_diag_r_norm", r.max_diag_r_norm);
            flag(p, None, None, "diag_gen6_norm", r.diag_gen6_norm);
        }
        for mr in &r.moments {
            let (n, m) = (Some(mr.n), Some(mr.m));
            if p >= WEIGHTED_MIN_P {
                flag(p, n, m, "residual_norm", mr.residual_norm);
            }
            let assessed = mr.m == 4 || (mr.m == 3 && p % 4 == 1);
            if p >= CHARSUM_MIN_P && assessed {
                if let Some(v) = mr.closed_form_norm {
                    flag(p, n, m, "closed_form_norm", v);
                }
            }
        }
    }
    for r in primes {
        for (quantity, count) in [
            ("weil_bound_violations", r.weil_violations.len()),
            ("hasse_bound_violations", r.hasse_violations.len()),
        ] {
            if count > 0 {
                out.push(Finding {
                    p: Some(r.p),
                    n: None,
                    m: None,
                    quantity: quantity.into(),
                    value: count as f64,
                    threshold: 0.0,
                });
            }
        }
    }
    for t in trends.iter().filter(|t| !t.non_increasing) {
        out.push(Finding {
            p: None,
            n: Some(t.n),
            m: Some(t.m),
            quantity: "conjecture_ratio_trend".into(),
            value: 1.0,
            threshold: 0.0,
        });
    }
    out
}

pub fn failures(primes: &[PrimeRecord]) -> Vec<Failure> {
    primes
        .iter()
        .flat_map(|r| {
            r.failed_checks().map(move |c| Failure {
                p: r.p,
                check: c.name.clone(),
                detail: c.detail.clone(),
            })
        })
        .collect()
}

impl Report {
    pub fn assemble(config: SweepConfig, constant_c: ConstantC, primes: Vec<PrimeRecord>) -> Self {
        let (n_list, m_list) = config.normalized_lists();
        let trends = trends(&primes, &n_list, &m_list);
        let findings = findings(&primes, &trends);
        let failures = failures(&primes);
        let status = if failures.is_empty() { 0 } else { 2 };
        Self {
            version: CODE_VERSION.to_string(),
            config,
            constant_c,
            primes,
            failures,
            findings,
            trends,
            status,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let c = self.constant_c.value;
        for r in &self.primes {
            let diag_g3_ratio = r.diag_g3 / (c * r.p as f64 / 2.0);
            for mr in &r.moments {
                let fields = [
                    r.p.to_string(),
                    r.class.clone(),
                    mr.n.to_string(),
                    mr.m.to_string(),
                    real(mr.unweighted_all),
                    mr.closed_form.map(real).unwrap_or_default(),
                    real(mr.weighted),
                    real(mr.main_term),
                    real(mr.residual_norm),
                    real(mr.conjecture_ratio),
                    r.n_sum.to_string(),
                    r.t_sum.to_string(),
                    real(r.max_s_norm),
                    real(r.max_r_norm),
                    real(r.weil_margin),
                    real(diag_g3_ratio),
                    real(r.diag_gen6_norm),
                    r.runtime_ms.map(|t| t.to_string()).unwrap_or_default(),
                ];
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
        out
    }
}

pub const CSV_HEADER: &str = "p,class,n,m,unweighted_all,closed_form,weighted,main_term,residual_norm,conjecture_ratio,N,T,maxS_norm,maxR_norm,weil_margin,diag_g3_ratio,diag_gen6_norm,runtime_ms";

/// Seventeen significant digits in scientific notation.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}
