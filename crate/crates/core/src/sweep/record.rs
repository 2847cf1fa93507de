use serde::{Deserialize, Serialize};

use crate::charsum::{sample_a, CharSumRecord};
use crate::error::Result;
use crate::field::{reduce, Character, PrimeContext};
use crate::gauss::{gauss_closed, w_sum, GaussSpectrum, Roots};
use crate::lfunc::{diag_g3, diag_gen6, ConstantC, LSpectrum};
use crate::moments::MomentReport;
use crate::par;
use crate::precision::{ComplexValue, Real};

use super::config::{ResidueClass, SweepConfig};

/// Outcome of one exact identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything computed for one prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub class: String,
    pub n_sum: i64,
    pub t_sum: i64,
    pub triple_full: i64,
    pub n_norm: f64,
    pub t_norm: f64,
    pub triple_full_norm: f64,
    pub max_s_norm: f64,
    pub max_r_norm: f64,
    pub sampled_a: Vec<u64>,
    pub weil_margin: f64,
    pub weil_violations: Vec<u64>,
    pub hasse_violations: Vec<u64>,
    pub max_diag_s_norm: f64,
    pub diag_t_norm: f64,
    pub max_diag_r_norm: f64,
    pub diag_g3: f64,
    /// `diag_g3 / (C p / 2)`.
    pub diag_g3_ratio: f64,
    /// `|diag_g3 - C p / 2| / (p^{1/2} ln p)`.
    pub diag_g3_residual: f64,
    pub diag_g3_residual_ln2: f64,
    pub diag_gen6: f64,
    /// `diag_gen6 / (p ln p)`.
    pub diag_gen6_norm: f64,
    pub diag_gen6_norm_ln2: f64,
    /// Largest `| |G|^2 - (2p + (n/p) G(1;p) W(chi)) |` over even non-principal
    /// characters and all `n`.
    pub gen1_max_residual: f64,
    pub moments: Vec<MomentReport>,
    pub checks: Vec<Check>,
    pub skipped: Vec<String>,
    pub runtime_ms: Option<u64>,
}

impl PrimeRecord {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn build_context(p: u64, cfg: &SweepConfig) -> Result<PrimeContext> {
    let mut ctx = PrimeContext::new(p)?;
    if cfg.inject_fault == Some(p) {
        ctx.inject_legendre_fault(3);
    }
    Ok(ctx)
}

pub fn compute_record<R: Real>(ctx: &PrimeContext, cfg: &SweepConfig, c: &ConstantC) -> Result<PrimeRecord> {
    let p = ctx.p();
    let pf = p as f64;
    let ln = pf.ln();
    let tol = R::PRECISION.identity_tolerance();
    let (n_list, m_list) = cfg.normalized_lists();
    let roots = Roots::<R>::new(ctx);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();

    let sample = sample_a(p, cfg.seed, cfg.full_range_limit);
    let cs = CharSumRecord::compute(ctx, &sample)?;
    let defect = cs.decomposition_defect();
    checks.push(Check::new(
        "triple_full_decomposition",
        defect == 0,
        format!("triple_full - 2(p-3)^2 - T = {defect}"),
    ));
    let r1 = cs.r[&1];
    checks.push(Check::new("n_equals_r1", cs.n == r1, format!("N = {}, R(1) = {r1}", cs.n)));
    let k1 = cs.kernel.get(1);
    checks.push(Check::new(
        "kernel_at_one",
        k1 == p as i64 - 3,
        format!("K(1) = {k1}"),
    ));

    let hasse = (2.0 * pf.sqrt()).floor() as i64;
    let hasse_violations = (2..p).filter(|&t| cs.phi[t as usize].abs() > hasse).collect();
    let p15 = pf.powf(1.5);
    let max_diag_s_norm = cs.diag_s.values().map(|v| v.abs() as f64 / p15).fold(0.0, f64::max);
    let max_diag_r_norm = cs.diag_r.values().map(|v| v.abs() as f64 / pf).fold(0.0, f64::max);
    let diag_t_norm = cs.diag_t.abs() as f64 / p15;
    if sample.is_empty() {
        skipped.push("S(a), R(a) and proof diagnostics: no admissible a for p < 5".into());
    }

    let lvals = LSpectrum::compute(&roots);
    let g3 = diag_g3(&lvals).to_f64();
    let g6 = diag_gen6(&roots, &lvals).to_f64();
    let half_cp = c.value * pf / 2.0;

    // W(chi) for every even non-principal character, shared by all n.
    let even_k: Vec<u64> = (1..(p - 1) / 2).map(|j| 2 * j).collect();
    let ws: Vec<ComplexValue<R>> = par::map_slice(&even_k, |&k| {
        w_sum(&roots, &Character::new(p, k).expect("index below p - 1")).expect("matching modulus")
    });
    let g1 = gauss_closed::<R>(p)?;

    let mut moments = Vec::new();
    let mut gen1_max = 0.0f64;
    for &n in &n_list {
        if reduce(n, p) == 0 {
            skipped.push(format!("n = {n}: not coprime to p"));
            continue;
        }
        let gauss = GaussSpectrum::compute(&roots, n)?;
        let l = R::from_i64(ctx.legendre(n) as i64);
        let two_p = ComplexValue::from_real(R::from_i64(2 * p as i64));
        for (e, w) in gauss.nonprincipal().iter().zip(&ws) {
            let rhs = two_p.clone() + (g1.clone() * w.clone()).scale(&l);
            let d = (e.abs2.clone() - rhs.re).to_f64().hypot(rhs.im.to_f64());
            gen1_max = gen1_max.max(d);
        }
        for &m in &m_list {
            let rep = MomentReport::build(ctx, n, m, &gauss, &lvals, cs.n, cs.t, c)?;
            if let Some(rel) = rep.closed_form_rel_err {
                checks.push(Check::new(
                    format!("closed_form_n{n}_m{m}"),
                    rel <= tol,
                    format!("relative difference {rel:.3e}"),
                ));
            }
            moments.push(rep);
        }
    }
    if !even_k.is_empty() {
        checks.push(Check::new(
            "gen1_identity",
            gen1_max < tol * pf,
            format!("max residual {gen1_max:.3e}"),
        ));
    }

    Ok(PrimeRecord {
        p,
        class: ResidueClass::of(p).to_string(),
        n_sum: cs.n,
        t_sum: cs.t,
        triple_full: cs.triple_full,
        n_norm: cs.n_norm(),
        t_norm: cs.t_norm(),
        triple_full_norm: cs.triple_full_norm(),
        max_s_norm: cs.max_s_norm(),
        max_r_norm: cs.max_r_norm(),
        sampled_a: sample,
        weil_margin: cs.kernel.weil_margin(),
        weil_violations: cs.kernel.weil_violations(),
        hasse_violations,
        max_diag_s_norm,
        diag_t_norm,
        max_diag_r_norm,
        diag_g3: g3,
        diag_g3_ratio: g3 / half_cp,
        diag_g3_residual: (g3 - half_cp).abs() / (pf.sqrt() * ln),
        diag_g3_residual_ln2: (g3 - half_cp).abs() / (pf.sqrt() * ln * ln),
        diag_gen6: g6,
        diag_gen6_norm: g6 / (pf * ln),
        diag_gen6_norm_ln2: g6 / (pf * ln * ln),
        gen1_max_residual: gen1_max,
        moments,
        checks,
        skipped,
        runtime_ms: None,
    })
}
