//! `L(1, chi)` for characters modulo a prime, the Euler-product constant
//! `C`, and the two L-weighted diagnostic sums.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{primes_in, Character};
use crate::gauss::Roots;
use crate::par;
use crate::precision::{Accumulator, ComplexSum, ComplexValue, NeumaierSum, Real};

/// Principal-branch `Log(1 - e(a/p)) = ln(2 sin(pi a/p)) + i pi (a/p - 1/2)`
/// for `a` in `[1, p)`; index 0 is unused.
pub struct LogTable<R> {
    re: Vec<R>,
    im: Vec<R>,
    entry_err: f64,
}

impl<R: Real> LogTable<R> {
    pub fn new(p: u64) -> Self {
        let two = R::from_i64(2);
        let pi = R::pi();
        let half = (p / 2) as usize;
        // ln(2 sin(pi a / p)) is symmetric under a -> p - a.
        let mut re = vec![R::zero(); p as usize];
        let mut max_re = 0.0f64;
        for a in 1..=half {
            let v = (two.clone() * R::sin_pi_ratio(a as u64, p)).ln();
            max_re = max_re.max(v.to_f64().abs());
            re[a] = v.clone();
            re[p as usize - a] = v;
        }
        let two_p = R::from_i64(2 * p as i64);
        let im = (0..p as i64)
            .map(|a| {
                if a == 0 {
                    R::zero()
                } else {
                    pi.clone() * R::from_i64(2 * a - p as i64) / two_p.clone()
                }
            })
            .collect();
        Self {
            re,
            im,
            entry_err: 8.0 * R::EPS * (1.0 + max_re + std::f64::consts::PI),
        }
    }

    #[inline]
    pub fn re(&self, a: usize) -> &R {
        &self.re[a]
    }

    #[inline]
    pub fn im(&self, a: usize) -> &R {
        &self.im[a]
    }

    #[inline]
    pub fn entry_err(&self) -> f64 {
        self.entry_err
    }
}

impl<R: Real> Roots<'_, R> {
    /// Logarithm table, built on first use.
    pub fn log_table(&self) -> &LogTable<R> {
        self.logs.get_or_init(|| LogTable::new(self.ctx().p()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LMethod {
    Closed,
    Series { terms: u64, tail_bound: f64 },
}

#[derive(Debug, Clone)]
pub struct LValueRecord<R> {
    pub p: u64,
    pub chi_index: u64,
    pub value: ComplexValue<R>,
    pub abs_value: R,
    pub abs_err: f64,
    pub method: LMethod,
}

fn require_nonprincipal(chi: &Character) -> Result<()> {
    if chi.is_principal() {
        return Err(Error::InvalidCharacter {
            index: chi.index(),
            p: chi.modulus(),
            reason: "L(1, chi) needs a non-principal character",
        });
    }
    Ok(())
}

/// `tau(chi) = sum_{a=1}^{p-1} chi(a) e(a/p)`.
pub fn tau<R: Real>(roots: &Roots<'_, R>, chi: &Character) -> Result<ComplexValue<R>> {
    roots.check_character(chi)?;
    let ctx = roots.ctx();
    let p = ctx.p();
    let order = ctx.order();
    let (add, mul) = (roots.additive(), roots.multiplicative());
    let err = roots.product_err();
    let mut sum = ComplexSum::new();
    for a in 1..p as usize {
        let e = (chi.index() * ctx.dlog_unchecked(a) % order) as usize;
        let (c1, s1) = (mul.cos(e), mul.sin(e));
        let (c2, s2) = (add.cos(a), add.sin(a));
        sum.push_parts(
            c1.clone() * c2.clone() - s1.clone() * s2.clone(),
            c1.clone() * s2.clone() + s1.clone() * c2.clone(),
            err,
        );
    }
    Ok(sum.finish())
}

/// Closed-form `L(1, chi_k)` from one pass over `a`: accumulates `tau` of
/// the conjugate character and the logarithm sum together.
fn closed_value<R: Real>(roots: &Roots<'_, R>, k: u64) -> ComplexValue<R> {
    let ctx = roots.ctx();
    let p = ctx.p();
    let order = ctx.order();
    let kbar = (order - k % order) % order;
    let (add, mul) = (roots.additive(), roots.multiplicative());
    let logs = roots.log_table();
    let tau_err = roots.product_err();
    let log_err = mul.entry_err() * (1.0 + 2.0 * (p as f64).ln()) + logs.entry_err() + 4.0 * R::EPS;
    let mut tau = ComplexSum::new();
    let mut sum = ComplexSum::new();
    for a in 1..p as usize {
        let e = (kbar * ctx.dlog_unchecked(a) % order) as usize;
        let (c, s) = (mul.cos(e), mul.sin(e));
        let (ca, sa) = (add.cos(a), add.sin(a));
        tau.push_parts(
            c.clone() * ca.clone() - s.clone() * sa.clone(),
            c.clone() * sa.clone() + s.clone() * ca.clone(),
            tau_err,
        );
        let (lr, li) = (logs.re(a), logs.im(a));
        sum.push_parts(
            c.clone() * lr.clone() - s.clone() * li.clone(),
            c.clone() * li.clone() + s.clone() * lr.clone(),
            log_err,
        );
    }
    -(sum.finish() / tau.finish())
}

/// `L(1, chi) = -(1 / tau(chi_bar)) sum_{a=1}^{p-1} chi_bar(a) Log(1 - e(a/p))`.
pub fn l1_closed<R: Real>(roots: &Roots<'_, R>, chi: &Character) -> Result<LValueRecord<R>> {
    roots.check_character(chi)?;
    require_nonprincipal(chi)?;
    let value = closed_value(roots, chi.index());
    let (abs_value, abs_err) = value.abs();
    Ok(LValueRecord {
        p: roots.ctx().p(),
        chi_index: chi.index(),
        value,
        abs_value,
        abs_err,
        method: LMethod::Closed,
    })
}

/// Residue-class harmonic sums `H_r = sum_{n <= N, n = r (mod p)} 1/n`,
/// shared by every character modulo `p`.
pub struct SeriesTable<R> {
    p: u64,
    terms: u64,
    h: Vec<R>,
    h_err: Vec<f64>,
}

impl<R: Real> SeriesTable<R> {
    pub fn new(p: u64, terms: u64) -> Result<Self> {
        if terms < p {
            return Err(Error::InvalidArgument(format!(
                "series needs at least p = {p} terms, got {terms}"
            )));
        }
        let mut acc: Vec<R::Sum> = (0..p).map(|_| R::Sum::default()).collect();
        let one = R::one();
        for n in 1..=terms {
            acc[(n % p) as usize].push(one.clone() / R::from_i64(n as i64));
        }
        let h_err: Vec<f64> = acc
            .iter()
            .map(|s| s.rounding_bound() + 2.0 * R::EPS * s.total().to_f64().abs())
            .collect();
        let h = acc.iter().map(|s| s.total()).collect();
        Ok(Self { p, terms, h, h_err })
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }
}

/// Partial sum `sum_{n <= N} chi(n)/n` with the Abel-summation tail bound
/// `2 max_x |sum_{n <= x} chi(n)| / (N + 1)` added to the rounding error.
pub fn l1_series_with<R: Real>(
    roots: &Roots<'_, R>,
    table: &SeriesTable<R>,
    chi: &Character,
) -> Result<LValueRecord<R>> {
    roots.check_character(chi)?;
    require_nonprincipal(chi)?;
    let ctx = roots.ctx();
    if table.p != ctx.p() {
        return Err(Error::InvalidArgument("series table modulus mismatch".into()));
    }
    let p = ctx.p();
    let order = ctx.order();
    let mul = roots.multiplicative();
    let mut sum = ComplexSum::new();
    let (mut ar, mut ai, mut max_partial) = (0.0f64, 0.0f64, 0.0f64);
    for r in 1..p as usize {
        let e = chi.index() * ctx.dlog_unchecked(r) % order;
        let (c, s) = (mul.cos(e as usize), mul.sin(e as usize));
        let h = &table.h[r];
        let hf = h.to_f64().abs();
        sum.push_parts(
            c.clone() * h.clone(),
            s.clone() * h.clone(),
            table.h_err[r] * 2.0 + mul.entry_err() * hf + 2.0 * R::EPS * hf,
        );
        let (cf, sf) = f64::cos_sin_turn(e, order);
        ar += cf;
        ai += sf;
        max_partial = max_partial.max(ar.hypot(ai));
    }
    // Slack for the f64 evaluation of the partial sums themselves.
    let max_partial = max_partial + 1e-12 * p as f64;
    let tail_bound = 2.0 * max_partial / (table.terms as f64 + 1.0);
    let partial = sum.finish();
    let value = ComplexValue::with_err(partial.re, partial.im, partial.err + tail_bound);
    let (abs_value, abs_err) = value.abs();
    Ok(LValueRecord {
        p,
        chi_index: chi.index(),
        value,
        abs_value,
        abs_err,
        method: LMethod::Series {
            terms: table.terms,
            tail_bound,
        },
    })
}

pub fn l1_series<R: Real>(
    roots: &Roots<'_, R>,
    chi: &Character,
    terms: u64,
) -> Result<LValueRecord<R>> {
    require_nonprincipal(chi)?;
    let table = SeriesTable::new(roots.ctx().p(), terms)?;
    l1_series_with(roots, &table, chi)
}

/// `L(1, chi_k)` for every non-principal `k`, indexed by `k` (entry 0 is a
/// zero placeholder). Only `k <= (p-1)/2` is evaluated; the rest follow
/// from `L(1, chi_bar) = conj L(1, chi)`.
pub struct LSpectrum<R> {
    pub p: u64,
    pub values: Vec<ComplexValue<R>>,
    pub abs: Vec<R>,
    pub abs_err: Vec<f64>,
}

impl<R: Real> LSpectrum<R> {
    pub fn compute(roots: &Roots<'_, R>) -> Self {
        let ctx = roots.ctx();
        let p = ctx.p();
        let order = ctx.order();
        let half = order / 2;
        roots.log_table();
        let lower = par::map_indexed(half as usize, |i| closed_value(roots, i as u64 + 1));
        let mut values = vec![ComplexValue::zero(); order as usize];
        for (i, v) in lower.into_iter().enumerate() {
            let k = i + 1;
            values[order as usize - k] = v.conj();
            values[k] = v;
        }
        let (abs, abs_err) = values
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { (R::zero(), 0.0) } else { v.abs() })
            .unzip();
        Self {
            p,
            values,
            abs,
            abs_err,
        }
    }

    /// `|L(1, chi_k)|`.
    pub fn abs_value(&self, k: u64) -> &R {
        &self.abs[k as usize]
    }

    pub fn even_nonprincipal(&self) -> impl Iterator<Item = (u64, &R)> {
        self.abs.iter().enumerate().skip(2).step_by(2).map(|(k, v)| (k as u64, v))
    }
}

/// Sum of `|L(1, chi)|` over the even non-principal characters.
pub fn diag_g3<R: Real>(spectrum: &LSpectrum<R>) -> R {
    let mut s = R::Sum::default();
    for (_, v) in spectrum.even_nonprincipal() {
        s.push(v.clone());
    }
    s.total()
}

/// `sum_{a=1}^{p-1} | sum_{chi != chi_0} chi(a) |L(1, chi)| |`.
///
/// Since `|L(1, chi)| = |L(1, chi_bar)|`, each inner sum is real:
/// `sum_k |L_k| cos(2 pi k t / (p-1))` for `a = g^t`.
pub fn diag_gen6<R: Real>(roots: &Roots<'_, R>, spectrum: &LSpectrum<R>) -> R {
    let order = roots.ctx().order() as usize;
    let mul = roots.multiplicative();
    let inner = par::map_indexed(order, |t| {
        let mut s = R::Sum::default();
        let mut e = t;
        for k in 1..order {
            s.push(spectrum.abs[k].clone() * mul.cos(e).clone());
            e += t;
            if e >= order {
                e -= order;
            }
        }
        s.total().abs()
    });
    let mut total = R::Sum::default();
    for v in inner {
        total.push(v);
    }
    total.total()
}

/// One truncated Euler factor `1 + sum_{k=1}^{kmax} c_k^2 p^{-2k}` with
/// `c_k = binom(2k, k) / 4^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerFactor {
    pub value: f64,
    /// Bound on the omitted terms `k > kmax`.
    pub tail_bound: f64,
}

pub fn euler_factor_c(prime: u64, kmax: u32) -> Result<EulerFactor> {
    if prime < 2 || kmax < 1 {
        return Err(Error::InvalidArgument(format!(
            "Euler factor needs prime >= 2 and kmax >= 1, got {prime}, {kmax}"
        )));
    }
    let (excess, next) = factor_terms(prime, kmax);
    let q = 1.0 / (prime as f64 * prime as f64);
    Ok(EulerFactor {
        value: 1.0 + excess,
        tail_bound: next / (1.0 - q),
    })
}

/// `(sum_{k=1}^{kmax} t_k, t_{kmax+1})` where `t_k = c_k^2 p^{-2k}`; uses
/// `t_k = t_{k-1} ((2k-1)/(2k))^2 / p^2`.
fn factor_terms(prime: u64, kmax: u32) -> (f64, f64) {
    let q = 1.0 / (prime as f64 * prime as f64);
    let mut t = 1.0;
    let mut s = NeumaierSum::default();
    for k in 1..=kmax {
        let r = (2 * k - 1) as f64 / (2 * k) as f64;
        t *= r * r * q;
        s.push(t);
    }
    let k = kmax + 1;
    let r = (2 * k - 1) as f64 / (2 * k) as f64;
    (s.total(), t * r * r * q)
}

/// Truncated product of Euler factors over primes up to `pmax`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantC {
    pub value: f64,
    pub pmax: u64,
    pub kmax: u32,
    /// Bound on `|C - value|`.
    pub tail_bound: f64,
}

/// The product is accumulated as a compensated sum of `ln(1 + x)`. The
/// bound combines the per-factor series tails, the rounding of the log-sum,
/// and the omitted primes: `sum_{p > P} ln f_p <= sum_{odd n > P} 1/(4(n^2-1))
/// <= 1/(8P)`.
pub fn constant_c(pmax: u64, kmax: u32) -> Result<ConstantC> {
    if pmax < 2 || kmax < 1 {
        return Err(Error::InvalidArgument(format!(
            "constant C needs pmax >= 2 and kmax >= 1, got {pmax}, {kmax}"
        )));
    }
    let mut log_sum = NeumaierSum::default();
    let mut log_err = 0.0;
    for p in primes_in(2, pmax) {
        let (excess, next) = factor_terms(p, kmax);
        let q = 1.0 / (p as f64 * p as f64);
        let l = excess.ln_1p();
        log_sum.push(l);
        log_err += next / (1.0 - q) + 4.0 * f64::EPSILON * l;
    }
    let omitted = 1.0 / (8.0 * pmax as f64);
    let log_value = log_sum.total();
    let value = log_value.exp();
    let log_bound = log_err + omitted + log_sum.rounding_bound();
    let tail_bound = value * log_bound.exp_m1() + 2.0 * f64::EPSILON * value;
    Ok(ConstantC {
        value,
        pmax,
        kmax,
        tail_bound,
    })
}

pub const DEFAULT_C_PMAX: u64 = 100_000;
pub const DEFAULT_C_KMAX: u32 = 20;

const C_CACHE_FILE: &str = "constant_c.txt";

pub fn c_cache_path(dir: &Path) -> PathBuf {
    dir.join(C_CACHE_FILE)
}

/// Parses a cache record `pmax kmax value tailBound`.
pub fn parse_c_record(text: &str) -> Option<ConstantC> {
    let mut it = text.split_whitespace();
    let c = ConstantC {
        pmax: it.next()?.parse().ok()?,
        kmax: it.next()?.parse().ok()?,
        value: it.next()?.parse().ok()?,
        tail_bound: it.next()?.parse().ok()?,
    };
    if it.next().is_some() || !c.value.is_finite() || c.value < 1.0 {
        return None;
    }
    Some(c)
}

pub fn format_c_record(c: &ConstantC) -> String {
    format!("{} {} {:e} {:e}\n", c.pmax, c.kmax, c.value, c.tail_bound)
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Returns `C(pmax, kmax)`, reading it from `dir` when a record with the
/// same cutoffs is present and writing it there otherwise.
pub fn cached_constant_c(dir: Option<&Path>, pmax: u64, kmax: u32) -> Result<ConstantC> {
    let Some(dir) = dir else {
        return constant_c(pmax, kmax);
    };
    let path = c_cache_path(dir);
    if let Ok(text) = fs::read_to_string(&path) {
        match parse_c_record(&text) {
            Some(c) if c.pmax == pmax && c.kmax == kmax => return Ok(c),
            Some(_) => {}
            None => log::warn!("ignoring malformed constant cache {}", path.display()),
        }
    }
    let c = constant_c(pmax, kmax)?;
    write_atomic(&path, format_c_record(&c).as_bytes())?;
    Ok(c)
}
