//! Classical and generalized quadratic Gauss sums.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{reduce, Character, PrimeContext};
use crate::par;
use crate::precision::{ComplexSum, ComplexValue, Real, UnitTable};

/// Per-prime tables of roots of unity of orders `p` and `p - 1`.
///
/// Everything in this crate that sums characters against additive
/// characters works from one `Roots` so the trigonometric work is done
/// once per prime.
pub struct Roots<'c, R: Real> {
    ctx: &'c PrimeContext,
    by_p: UnitTable<R>,
    by_order: UnitTable<R>,
    pub(crate) logs: OnceLock<crate::lfunc::LogTable<R>>,
}

impl<'c, R: Real> Roots<'c, R> {
    pub fn new(ctx: &'c PrimeContext) -> Self {
        Self {
            ctx,
            by_p: UnitTable::new(ctx.p()),
            by_order: UnitTable::new(ctx.order()),
            logs: OnceLock::new(),
        }
    }

    #[inline]
    pub fn ctx(&self) -> &'c PrimeContext {
        self.ctx
    }

    /// `e(j / p)`.
    #[inline]
    pub fn additive(&self) -> &UnitTable<R> {
        &self.by_p
    }

    /// `e(j / (p - 1))`.
    #[inline]
    pub fn multiplicative(&self) -> &UnitTable<R> {
        &self.by_order
    }

    /// `chi(a)` as a complex value; zero when `p | a`.
    pub fn chi(&self, chi: &Character, a: u64) -> ComplexValue<R> {
        match chi.exponent(self.ctx, a) {
            Some(e) => self.by_order.get(e),
            None => ComplexValue::zero(),
        }
    }

    pub(crate) fn check_character(&self, chi: &Character) -> Result<()> {
        if chi.modulus() != self.ctx.p() {
            return Err(Error::InvalidCharacter {
                index: chi.index(),
                p: chi.modulus(),
                reason: "modulus does not match the context",
            });
        }
        Ok(())
    }

    /// Error bound for one product of two table entries.
    #[inline]
    pub(crate) fn product_err(&self) -> f64 {
        let e = self.by_p.entry_err().max(self.by_order.entry_err());
        2.0 * e + e * e + 4.0 * R::EPS
    }
}

fn coprime_residue(n: i64, p: u64) -> Result<u64> {
    match reduce(n, p) {
        0 => Err(Error::NotCoprime { n, p }),
        r => Ok(r),
    }
}

/// `G(n; q) = sum_{a=1}^{q} e(n a^2 / q)` by direct summation.
pub fn classical_gauss<R: Real>(n: i64, q: u64) -> Result<ComplexValue<R>> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("classical Gauss sum needs q >= 2, got {q}")));
    }
    let table = UnitTable::<R>::new(q);
    let n = reduce(n, q) as u128;
    let mut sum = ComplexSum::new();
    for a in 1..=q as u128 {
        let j = (n * (a * a % q as u128) % q as u128) as usize;
        sum.push_parts(table.cos(j).clone(), table.sin(j).clone(), table.entry_err());
    }
    Ok(sum.finish())
}

/// Closed form of `G(1; q)`: `sqrt(q)`, `0`, `i sqrt(q)`, `(1 + i) sqrt(q)`
/// for `q = 1, 2, 3, 0 (mod 4)`.
pub fn gauss_closed<R: Real>(q: u64) -> Result<ComplexValue<R>> {
    if q < 1 {
        return Err(Error::InvalidArgument("closed form needs q >= 1".into()));
    }
    let r = R::from_i64(q as i64).sqrt();
    let err = 2.0 * R::EPS * r.to_f64();
    let (re, im) = match q % 4 {
        1 => (r, R::zero()),
        2 => (R::zero(), R::zero()),
        3 => (R::zero(), r),
        _ => (r.clone(), r),
    };
    Ok(ComplexValue::with_err(re, im, err))
}

#[derive(Debug, Clone)]
pub struct GaussSumRecord<R> {
    pub p: u64,
    pub n: i64,
    pub chi_index: u64,
    pub value: ComplexValue<R>,
    /// `|G|^2`.
    pub abs2: R,
    pub abs2_err: f64,
}

/// `G(n, chi; p) = sum_{a=1}^{p} chi(a) e(n a^2 / p)` by direct summation.
pub fn generalized_gauss<R: Real>(
    roots: &Roots<'_, R>,
    n: i64,
    chi: &Character,
) -> Result<GaussSumRecord<R>> {
    roots.check_character(chi)?;
    let ctx = roots.ctx();
    let p = ctx.p();
    let nr = coprime_residue(n, p)?;
    let (add, mul) = (roots.additive(), roots.multiplicative());
    let k = chi.index();
    let order = ctx.order();
    let term_err = roots.product_err();
    let mut sum = ComplexSum::new();
    // The a = p term vanishes since chi(p) = 0.
    for a in 1..p {
        let e = (k * ctx.dlog_unchecked(a as usize) % order) as usize;
        let u = (nr * ctx.square(a) % p) as usize;
        let (c1, s1) = (mul.cos(e), mul.sin(e));
        let (c2, s2) = (add.cos(u), add.sin(u));
        sum.push_parts(
            c1.clone() * c2.clone() - s1.clone() * s2.clone(),
            c1.clone() * s2.clone() + s1.clone() * c2.clone(),
            term_err,
        );
    }
    let value = sum.finish();
    let (abs2, abs2_err) = value.abs2();
    Ok(GaussSumRecord {
        p,
        n,
        chi_index: k,
        value,
        abs2,
        abs2_err,
    })
}

/// `G(n, chi; p)` for one even character in the batch.
#[derive(Debug, Clone)]
pub struct SpectrumEntry<R> {
    pub index: u64,
    pub value: ComplexValue<R>,
    pub abs2: R,
    pub abs2_err: f64,
}

/// Generalized Gauss sums for every even character (principal included) at
/// a fixed `n`, in ascending character index.
#[derive(Debug, Clone)]
pub struct GaussSpectrum<R> {
    pub p: u64,
    pub n: i64,
    pub entries: Vec<SpectrumEntry<R>>,
}

impl<R: Real> GaussSpectrum<R> {
    /// Writing `a = g^t`, `G(n, chi_k; p) = sum_t e(k t / (p-1)) e(n g^{2t} / p)`.
    /// The second factor has period `h = (p-1)/2` in `t`, so for even `k`
    /// the sum folds to `2 sum_{t<h}`. Characters are evaluated
    /// independently and collected in index order.
    pub fn compute(roots: &Roots<'_, R>, n: i64) -> Result<Self> {
        let ctx = roots.ctx();
        let p = ctx.p();
        let nr = coprime_residue(n, p)?;
        let h = ((p - 1) / 2) as usize;
        let order = ctx.order() as usize;
        let add = roots.additive();
        let mul = roots.multiplicative();
        let w: Vec<usize> = (0..h as u64)
            .map(|t| (nr * ctx.square(ctx.power(t)) % p) as usize)
            .collect();
        let term_err = roots.product_err();
        let two = R::from_i64(2);
        let entries = par::map_indexed(h, |j| {
            let k = 2 * j;
            let mut sum = ComplexSum::new();
            let mut e = 0usize;
            for &u in &w {
                let (c1, s1) = (mul.cos(e), mul.sin(e));
                let (c2, s2) = (add.cos(u), add.sin(u));
                sum.push_parts(
                    c1.clone() * c2.clone() - s1.clone() * s2.clone(),
                    c1.clone() * s2.clone() + s1.clone() * c2.clone(),
                    term_err,
                );
                e += k;
                if e >= order {
                    e -= order;
                }
            }
            let value = sum.finish().scale(&two);
            let (abs2, abs2_err) = value.abs2();
            SpectrumEntry {
                index: k as u64,
                value,
                abs2,
                abs2_err,
            }
        });
        Ok(Self { p, n, entries })
    }

    pub fn principal(&self) -> &SpectrumEntry<R> {
        &self.entries[0]
    }

    /// Even non-principal entries.
    pub fn nonprincipal(&self) -> &[SpectrumEntry<R>] {
        &self.entries[1..]
    }
}

/// `W(chi) = sum_{a=1}^{p-1} chi(a) ((a^2 - 1) / p)`.
pub fn w_sum<R: Real>(roots: &Roots<'_, R>, chi: &Character) -> Result<ComplexValue<R>> {
    roots.check_character(chi)?;
    let ctx = roots.ctx();
    let p = ctx.p();
    let mul = roots.multiplicative();
    let order = ctx.order();
    let mut sum = ComplexSum::new();
    for a in 2..p - 1 {
        // a = 1 and a = p - 1 give (0 / p) = 0.
        let rho = ctx.legendre_table()[((ctx.square(a) + p - 1) % p) as usize];
        if rho == 0 {
            continue;
        }
        let e = (chi.index() * ctx.dlog_unchecked(a as usize) % order) as usize;
        let (c, s) = (mul.cos(e).clone(), mul.sin(e).clone());
        if rho > 0 {
            sum.push_parts(c, s, mul.entry_err());
        } else {
            sum.push_parts(-c, -s, mul.entry_err());
        }
    }
    Ok(sum.finish())
}

fn require_even_nonprincipal(chi: &Character) -> Result<()> {
    if chi.is_principal() || !chi.is_even() {
        return Err(Error::InvalidCharacter {
            index: chi.index(),
            p: chi.modulus(),
            reason: "an even non-principal character is required",
        });
    }
    Ok(())
}

/// Right-hand side `2p + (n/p) G(1; p) W(chi)` of the `|G|^2` identity for
/// even non-principal characters.
pub fn abs2_identity_rhs<R: Real>(
    roots: &Roots<'_, R>,
    n: i64,
    chi: &Character,
) -> Result<ComplexValue<R>> {
    require_even_nonprincipal(chi)?;
    let ctx = roots.ctx();
    let p = ctx.p();
    coprime_residue(n, p)?;
    let w = w_sum(roots, chi)?;
    let g1 = gauss_closed::<R>(p)?;
    let twisted = (g1 * w).scale(&R::from_i64(ctx.legendre(n) as i64));
    Ok(ComplexValue::from_real(R::from_i64(2 * p as i64)) + twisted)
}

/// `| |G(n, chi; p)|^2 - (2p + (n/p) G(1; p) W(chi)) |`.
pub fn gen1_residual<R: Real>(roots: &Roots<'_, R>, n: i64, chi: &Character) -> Result<f64> {
    require_even_nonprincipal(chi)?;
    let lhs = generalized_gauss(roots, n, chi)?;
    let rhs = abs2_identity_rhs(roots, n, chi)?;
    let dre = (lhs.abs2 - rhs.re).to_f64();
    let dim = rhs.im.to_f64();
    Ok(dre.hypot(dim))
}
