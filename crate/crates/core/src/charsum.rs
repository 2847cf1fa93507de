//! Exact integer character sums built from Legendre symbols.
//!
//! Every higher sum factors through the kernel
//! `K(x) = sum_{b=1}^{p-1} rho(b^2 - x^2) rho(b^2 - 1)`, which depends on `x`
//! only through `x^2`. With the kernel table in hand, `N` and `T` cost
//! `O(p)` and each `S(a)` or `R(a)` costs `O(p)`.
//!
//! Sign orientation follows each displayed sum: `K` uses `rho(b^2 - x^2)`,
//! and sums written with `rho(x^2 - b^2)` pick up a factor `rho(-1)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::par;

#[inline]
fn rho(ctx: &PrimeContext, x: u64) -> i64 {
    ctx.legendre_table()[(x % ctx.p()) as usize] as i64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

fn nonzero(ctx: &PrimeContext, x: u64) -> Result<u64> {
    match x % ctx.p() {
        0 => Err(Error::InvalidResidue {
            a: x,
            p: ctx.p(),
            reason: "residue must be nonzero",
        }),
        r => Ok(r),
    }
}

fn not_unit_or_zero(ctx: &PrimeContext, a: u64) -> Result<u64> {
    let p = ctx.p();
    let r = a % p;
    if r == 0 || r == 1 || r == p - 1 {
        return Err(Error::InvalidResidue {
            a,
            p,
            reason: "a must avoid 0 and +-1",
        });
    }
    Ok(r)
}

/// Single kernel value `K(x)` by direct summation over `b`.
pub fn kernel(ctx: &PrimeContext, x: u64) -> Result<i64> {
    let x = nonzero(ctx, x)?;
    let p = ctx.p();
    let x2 = ctx.square(x);
    Ok((1..p)
        .map(|b| {
            let b2 = ctx.square(b);
            rho(ctx, sub_mod(b2, x2, p)) * rho(ctx, sub_mod(b2, 1, p))
        })
        .sum())
}

/// `K(x)` for every `x` in `[0, p)`; entry 0 is unused and set to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelTable {
    p: u64,
    values: Vec<i64>,
}

impl KernelTable {
    /// Uses `sum_{b=1}^{p-1} f(b^2) = 2 sum_{r in QR} f(r)` and computes one
    /// value per nonzero square.
    pub fn build(ctx: &PrimeContext) -> Self {
        let p = ctx.p();
        let leg = ctx.legendre_table();
        let residues = ctx.quadratic_residues();
        // rho(r - 1) per residue, hoisted out of the inner loop.
        let weight: Vec<i64> = residues
            .iter()
            .map(|&r| leg[((r + p - 1) % p) as usize] as i64)
            .collect();
        let per_square = par::map_slice(&residues, |&s| {
            let mut acc = 0i64;
            for (&r, &w) in residues.iter().zip(&weight) {
                let d = if r >= s { r - s } else { r + p - s };
                acc += leg[d as usize] as i64 * w;
            }
            2 * acc
        });
        let mut by_square = vec![0i64; p as usize];
        for (&s, &v) in residues.iter().zip(&per_square) {
            by_square[s as usize] = v;
        }
        let mut values = vec![0i64; p as usize];
        for x in 1..p {
            values[x as usize] = by_square[ctx.square(x) as usize];
        }
        Self { p, values }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn get(&self, x: u64) -> i64 {
        self.values[(x % self.p) as usize]
    }

    /// Values indexed by residue.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `max |K(x)|` over `x` with `x^2 != 1`.
    pub fn max_abs_off_unit(&self) -> i64 {
        let p = self.p;
        (2..p.saturating_sub(1))
            .map(|x| self.values[x as usize].abs())
            .max()
            .unwrap_or(0)
    }

    /// Residues `x` (with `x^2 != 1`) whose kernel exceeds `3 sqrt(p)`.
    pub fn weil_violations(&self) -> Vec<u64> {
        let p = self.p;
        let bound = 9 * p as i64; // |K| <= 3 sqrt(p)  <=>  K^2 <= 9p
        (2..p.saturating_sub(1))
            .filter(|&x| {
                let k = self.values[x as usize];
                k * k > bound
            })
            .collect()
    }

    /// `1 - max|K| / (3 sqrt p)`; nonnegative iff the Weil bound holds.
    pub fn weil_margin(&self) -> f64 {
        1.0 - self.max_abs_off_unit() as f64 / (3.0 * (self.p as f64).sqrt())
    }
}

/// `N = sum_{a=2}^{p-2} sum_c rho(a^2 - c^2) rho(c^2 - 1) rho(a^2 - 1)`
/// `= rho(-1) sum_a rho(a^2 - 1) K(a)`.
pub fn sum_n(ctx: &PrimeContext, kernel: &KernelTable) -> i64 {
    let p = ctx.p();
    let s: i64 = (2..p.saturating_sub(1))
        .map(|a| rho(ctx, sub_mod(ctx.square(a), 1, p)) * kernel.get(a))
        .sum();
    ctx.rho_minus_one() as i64 * s
}

/// `T = sum_{a=2}^{p-2} (sum_b rho(a^2 - b^2) rho(b^2 - 1))^2 = sum_a K(a)^2`.
pub fn sum_t(ctx: &PrimeContext, kernel: &KernelTable) -> i64 {
    (2..ctx.p().saturating_sub(1))
        .map(|a| kernel.get(a).pow(2))
        .sum()
}

/// `S(a) = sum_{b,c,d} rho(b^2 - a^2 c^2) rho(b^2 - 1) rho(d^2 - c^2) rho(d^2 - 1)
///       = sum_c K(ac) K(c)`, for `a` outside `{0, 1, -1}`.
pub fn triple_s(ctx: &PrimeContext, kernel: &KernelTable, a: u64) -> Result<i64> {
    let a = not_unit_or_zero(ctx, a)?;
    let p = ctx.p();
    Ok((1..p).map(|c| kernel.get(a * c % p) * kernel.get(c)).sum())
}

/// The `a = 1` triple sum over the full range, `sum_c K(c)^2`.
pub fn triple_full(ctx: &PrimeContext, kernel: &KernelTable) -> i64 {
    (1..ctx.p()).map(|c| kernel.get(c).pow(2)).sum()
}

/// `R(a) = sum_{b,c} rho(b^2 - a^2 c^2) rho(b^2 - 1) rho(c^2 - 1)
///       = sum_c rho(c^2 - 1) K(ac)`.
pub fn sum_r(ctx: &PrimeContext, kernel: &KernelTable, a: u64) -> Result<i64> {
    let a = nonzero(ctx, a)?;
    let p = ctx.p();
    Ok((1..p)
        .map(|c| rho(ctx, sub_mod(ctx.square(c), 1, p)) * kernel.get(a * c % p))
        .sum())
}

/// `phi(t) = sum_{b=1}^{p-1} rho(b - t) rho(b - 1) rho(b)`, the Frobenius
/// trace sum of the Legendre curve `y^2 = x(x-1)(x-t)` up to sign.
pub fn phi(ctx: &PrimeContext, t: u64) -> i64 {
    let p = ctx.p();
    let t = t % p;
    (1..p)
        .map(|b| rho(ctx, sub_mod(b, t, p)) * rho(ctx, b - 1) * rho(ctx, b))
        .sum()
}

/// `phi(t)` for every `t` in `[0, p)`.
pub fn phi_table(ctx: &PrimeContext) -> Vec<i64> {
    let p = ctx.p() as usize;
    let leg = ctx.legendre_table();
    // weight[b] = rho(b - 1) rho(b), zero at b = 0.
    let weight: Vec<i32> = (0..p)
        .map(|b| {
            if b == 0 {
                0
            } else {
                (leg[b - 1] as i32) * (leg[b] as i32)
            }
        })
        .collect();
    par::map_indexed(p, |t| {
        // b - t without a modulus: split at b = t.
        let hi: i32 = weight[t..]
            .iter()
            .zip(&leg[..p - t])
            .map(|(&w, &l)| w * l as i32)
            .sum();
        let lo: i32 = weight[..t]
            .iter()
            .zip(&leg[p - t..])
            .map(|(&w, &l)| w * l as i32)
            .sum();
        (hi + lo) as i64
    })
}

/// The three proof-internal sums for one `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofDiagnostics {
    /// `sum_c rho(c) phi(a^2 c) phi(c)`.
    pub s_prime: i64,
    /// `sum_c rho(c) phi(c)^2`.
    pub t_prime: i64,
    /// `sum_c rho(c^2 - c) phi(a^2 c)`.
    pub r_prime: i64,
    pub s_norm: f64,
    pub t_norm: f64,
    pub r_norm: f64,
}

pub fn proof_diagnostics(ctx: &PrimeContext, phi: &[i64], a: u64) -> Result<ProofDiagnostics> {
    let a = not_unit_or_zero(ctx, a)?;
    let p = ctx.p();
    let a2 = ctx.square(a);
    let mut s = 0i64;
    let mut t = 0i64;
    let mut r = 0i64;
    for c in 1..p {
        let rc = rho(ctx, c);
        let pc = phi[c as usize];
        let pac = phi[(a2 * c % p) as usize];
        s += rc * pac * pc;
        t += rc * pc * pc;
        r += rc * rho(ctx, c - 1) * pac;
    }
    let pf = p as f64;
    Ok(ProofDiagnostics {
        s_prime: s,
        t_prime: t,
        r_prime: r,
        s_norm: s.abs() as f64 / pf.powf(1.5),
        t_norm: t.abs() as f64 / pf.powf(1.5),
        r_norm: r.abs() as f64 / pf,
    })
}

/// Sample of `a` values used for `S(a)` and `R(a)` in sweeps: a fixed set
/// `{2, 3, p/3, p/2, p-2}` plus 16 seeded pseudorandom residues, or every
/// admissible `a` when `p <= full_range_limit`. Excludes `0, +-1`.
pub fn sample_a(p: u64, seed: u64, full_range_limit: u64) -> Vec<u64> {
    if p < 5 {
        return Vec::new();
    }
    if p <= full_range_limit {
        return (2..p - 1).collect();
    }
    let mut set = std::collections::BTreeSet::new();
    for a in [2, 3, p / 3, p / 2, p - 2] {
        set.insert(a);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for _ in 0..16 {
        set.insert(rng.gen_range(2..p - 1));
    }
    set.retain(|&a| a >= 2 && a <= p - 2);
    set.into_iter().collect()
}

/// All character sums for one prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharSumRecord {
    pub p: u64,
    pub kernel: KernelTable,
    pub n: i64,
    pub t: i64,
    pub triple_full: i64,
    pub s: BTreeMap<u64, i64>,
    pub r: BTreeMap<u64, i64>,
    pub phi: Vec<i64>,
    pub diag_s: BTreeMap<u64, i64>,
    pub diag_t: i64,
    pub diag_r: BTreeMap<u64, i64>,
}

impl CharSumRecord {
    /// Computes every sum for the given `a` sample. `R` is also evaluated
    /// at `a = 1`.
    pub fn compute(ctx: &PrimeContext, sample: &[u64]) -> Result<Self> {
        let kernel = KernelTable::build(ctx);
        let phi = phi_table(ctx);
        let p = ctx.p();
        let mut s = BTreeMap::new();
        let mut r = BTreeMap::new();
        let mut diag_s = BTreeMap::new();
        let mut diag_r = BTreeMap::new();
        r.insert(1, sum_r(ctx, &kernel, 1)?);
        for &a in sample {
            s.insert(a, triple_s(ctx, &kernel, a)?);
            r.insert(a, sum_r(ctx, &kernel, a)?);
            let d = proof_diagnostics(ctx, &phi, a)?;
            diag_s.insert(a, d.s_prime);
            diag_r.insert(a, d.r_prime);
        }
        let diag_t = (1..p).map(|c| rho(ctx, c) * phi[c as usize].pow(2)).sum();
        Ok(Self {
            p,
            n: sum_n(ctx, &kernel),
            t: sum_t(ctx, &kernel),
            triple_full: triple_full(ctx, &kernel),
            kernel,
            s,
            r,
            phi,
            diag_s,
            diag_t,
            diag_r,
        })
    }

    /// `triple_full - 2(p-3)^2 - T`, zero when the decomposition holds.
    pub fn decomposition_defect(&self) -> i64 {
        let p = self.p as i64;
        self.triple_full - 2 * (p - 3).pow(2) - self.t
    }

    pub fn max_s_norm(&self) -> f64 {
        let scale = (self.p as f64).powf(1.5);
        self.s.values().map(|v| v.abs() as f64 / scale).fold(0.0, f64::max)
    }

    pub fn max_r_norm(&self) -> f64 {
        let scale = self.p as f64;
        self.r.values().map(|v| v.abs() as f64 / scale).fold(0.0, f64::max)
    }

    pub fn t_norm(&self) -> f64 {
        let p = self.p as f64;
        (self.t as f64 - p * p).abs() / p.powf(1.5)
    }

    pub fn triple_full_norm(&self) -> f64 {
        let p = self.p as f64;
        (self.triple_full as f64 - 3.0 * p * p).abs() / p.powf(1.5)
    }

    pub fn n_norm(&self) -> f64 {
        self.n.abs() as f64 / self.p as f64
    }
}
