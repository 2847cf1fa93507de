//! Residue arithmetic modulo an odd prime: primality, Legendre symbols,
//! primitive roots, discrete logarithms and the Dirichlet character group.
//!
//! Character values are kept exact: `chi_k(g^t) = e(k t / (p - 1))` is
//! reported as the rational exponent `k t mod (p - 1)` over `p - 1`.
//! Conversion to floating point happens in the numeric modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus for which dense residue tables are built.
pub const MAX_TABLE_MODULUS: u64 = 1 << 31;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, p)`.
#[inline]
pub fn reduce(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes in `[lo, hi]`, ascending, by a sieve of Eratosthenes.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 {
        return Err(Error::ModulusTooSmall(p));
    }
    if p.is_multiple_of(2) {
        return Err(Error::EvenModulus(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Legendre symbol `(a / p)` by Euler's criterion.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    let r = reduce(a, p);
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo the odd prime `p`.
pub fn smallest_primitive_root(p: u64) -> Result<u64> {
    check_odd_prime(p)?;
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .ok_or(Error::NotPrime(p))
}

/// An odd prime together with dense residue tables.
///
/// Immutable after construction and shared read-only across workers.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    generator: u64,
    /// `powers[t] = g^t mod p` for `t` in `[0, p - 1)`.
    powers: Vec<u32>,
    /// `dlog[a] = t` with `g^t = a`; `dlog[0]` is unused.
    dlog: Vec<u32>,
    legendre: Vec<i8>,
    squares: Vec<u32>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if p >= MAX_TABLE_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        let generator = smallest_primitive_root(p)?;
        let order = (p - 1) as usize;
        let mut powers = Vec::with_capacity(order);
        let mut dlog = vec![u32::MAX; p as usize];
        let mut x = 1u64;
        for t in 0..order {
            powers.push(x as u32);
            dlog[x as usize] = t as u32;
            x = x * generator % p;
        }
        let mut legendre = vec![0i8; p as usize];
        for (a, slot) in legendre.iter_mut().enumerate().skip(1) {
            *slot = if dlog[a] % 2 == 0 { 1 } else { -1 };
        }
        let squares = (0..p).map(|a| (a * a % p) as u32).collect();
        Ok(Self {
            p,
            generator,
            powers,
            dlog,
            legendre,
            squares,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Order of the multiplicative group, `p - 1`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.p - 1
    }

    #[inline]
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `g^t mod p`, `t` taken modulo `p - 1`.
    #[inline]
    pub fn power(&self, t: u64) -> u64 {
        self.powers[(t % (self.p - 1)) as usize] as u64
    }

    /// Discrete logarithm of a nonzero residue in `[1, p)`.
    #[inline]
    pub fn dlog(&self, a: u64) -> Option<u64> {
        match self.dlog.get(a as usize) {
            Some(&t) if a != 0 => Some(t as u64),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn dlog_unchecked(&self, a: usize) -> u64 {
        self.dlog[a] as u64
    }

    /// `(a / p)` for any integer `a`.
    #[inline]
    pub fn legendre(&self, a: i64) -> i8 {
        self.legendre[reduce(a, self.p) as usize]
    }

    /// Legendre values indexed by residue `0..p`.
    #[inline]
    pub fn legendre_table(&self) -> &[i8] {
        &self.legendre
    }

    #[inline]
    pub fn square(&self, a: u64) -> u64 {
        self.squares[(a % self.p) as usize] as u64
    }

    #[inline]
    pub fn squares_table(&self) -> &[u32] {
        &self.squares
    }

    /// `(-1 / p)`.
    #[inline]
    pub fn rho_minus_one(&self) -> i8 {
        self.legendre[(self.p - 1) as usize]
    }

    /// Nonzero quadratic residues in ascending order.
    pub fn quadratic_residues(&self) -> Vec<u64> {
        (1..self.p).filter(|&a| self.legendre[a as usize] == 1).collect()
    }

    /// Overwrites one Legendre table entry with zero. Used only to exercise
    /// the failure paths of the verification pipeline.
    #[doc(hidden)]
    pub fn inject_legendre_fault(&mut self, a: u64) {
        let idx = (a % self.p) as usize;
        self.legendre[idx] = 0;
    }

    pub fn character(&self, index: u64) -> Result<Character> {
        Character::new(self.p, index)
    }

    pub fn characters(&self, filter: CharFilter) -> Vec<Character> {
        enumerate_characters(self, filter)
    }
}

/// `build_context` entry point.
pub fn build_context(p: u64) -> Result<PrimeContext> {
    PrimeContext::new(p)
}

/// Dirichlet character `chi_k` modulo `p`, defined by
/// `chi_k(g^t) = e(k t / (p - 1))` for the smallest primitive root `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    p: u64,
    index: u64,
}

impl Character {
    pub fn new(p: u64, index: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if index >= p - 1 {
            return Err(Error::InvalidCharacter {
                index,
                p,
                reason: "index must lie in [0, p - 2]",
            });
        }
        Ok(Self { p, index })
    }

    pub fn principal(p: u64) -> Result<Self> {
        Self::new(p, 0)
    }

    /// The quadratic character, index `(p - 1) / 2`.
    pub fn quadratic(p: u64) -> Result<Self> {
        Self::new(p, (p - 1) / 2)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// `chi(-1) = (-1)^k`.
    #[inline]
    pub fn is_even(&self) -> bool {
        self.index.is_multiple_of(2)
    }

    pub fn conj(&self) -> Self {
        let order = self.p - 1;
        Self {
            p: self.p,
            index: (order - self.index) % order,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidArgument(format!(
                "characters modulo {} and {} cannot be multiplied",
                self.p, other.p
            )));
        }
        Ok(Self {
            p: self.p,
            index: (self.index + other.index) % (self.p - 1),
        })
    }

    /// Exponent `k * dlog(a) mod (p - 1)`; `None` when `p | a`.
    #[inline]
    pub(crate) fn exponent(&self, ctx: &PrimeContext, a: u64) -> Option<u64> {
        ctx.dlog(a % self.p)
            .map(|t| mul_mod(self.index, t, self.p - 1))
    }
}

/// Exact value of a character: zero, or the root of unity `e(num / den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl CharValue {
    /// Numeric value `(cos, sin)`; only used for diagnostics and tests.
    pub fn to_complex(self) -> (f64, f64) {
        match self {
            CharValue::Zero => (0.0, 0.0),
            CharValue::Root { num, den } => {
                let theta = std::f64::consts::TAU * num as f64 / den as f64;
                (theta.cos(), theta.sin())
            }
        }
    }
}

pub fn char_eval(ctx: &PrimeContext, chi: &Character, a: i64) -> Result<CharValue> {
    if chi.p != ctx.p {
        return Err(Error::InvalidCharacter {
            index: chi.index,
            p: chi.p,
            reason: "modulus does not match the context",
        });
    }
    let r = reduce(a, ctx.p);
    Ok(match chi.exponent(ctx, r) {
        None => CharValue::Zero,
        Some(num) => CharValue::Root {
            num,
            den: ctx.p - 1,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharFilter {
    All,
    Even,
    Odd,
    EvenNonprincipal,
}

/// Characters matching `filter`, ascending by index.
pub fn enumerate_characters(ctx: &PrimeContext, filter: CharFilter) -> Vec<Character> {
    let p = ctx.p;
    (0..p - 1)
        .filter(|&k| match filter {
            CharFilter::All => true,
            CharFilter::Even => k % 2 == 0,
            CharFilter::Odd => k % 2 == 1,
            CharFilter::EvenNonprincipal => k % 2 == 0 && k != 0,
        })
        .map(|index| Character { p, index })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order_of(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(0, 5), Ok(0));
        assert_eq!(legendre_symbol(4, 5), Ok(1));
        // 3^3 = 27 = 6 = -1 mod 7
        assert_eq!(pow_mod(3, 3, 7), 6);
        assert_eq!(legendre_symbol(3, 7), Ok(-1));
        assert_eq!(legendre_symbol(-1, 7), Ok(-1));
    }

    #[test]
    fn legendre_rejects_bad_moduli() {
        assert_eq!(legendre_symbol(1, 2), Err(Error::ModulusTooSmall(2)));
        assert_eq!(legendre_symbol(1, 10), Err(Error::EvenModulus(10)));
        assert_eq!(legendre_symbol(1, 9), Err(Error::NotPrime(9)));
        assert!(PrimeContext::new(1).is_err());
        assert_eq!(PrimeContext::new(15).unwrap_err(), Error::NotPrime(15));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(order_of(2, 5), 4);
        assert_eq!(PrimeContext::new(5).unwrap().generator(), 2);
        assert_eq!(order_of(2, 7), 3);
        assert_eq!(order_of(3, 7), 6);
        assert_eq!(PrimeContext::new(7).unwrap().generator(), 3);
        assert_eq!(PrimeContext::new(3).unwrap().generator(), 2);
    }

    #[test]
    fn primitive_root_is_smallest_by_brute_force() {
        for p in primes_in(3, 400) {
            let g = (2..p).find(|&g| order_of(g, p) == p - 1).unwrap();
            assert_eq!(smallest_primitive_root(p).unwrap(), g, "p = {p}");
        }
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let sieve = primes_in(0, 20_000);
        let mr: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn context_tables_are_consistent() {
        for p in primes_in(3, 300) {
            let ctx = PrimeContext::new(p).unwrap();
            let mut seen = vec![false; (p - 1) as usize];
            for a in 1..p {
                let t = ctx.dlog(a).unwrap();
                assert!(!seen[t as usize]);
                seen[t as usize] = true;
                assert_eq!(ctx.power(t), a);
            }
            assert_eq!(ctx.dlog(0), None);
            let lt = ctx.legendre_table();
            assert_eq!(lt[0], 0);
            assert_eq!(lt.iter().map(|&v| v as i64).sum::<i64>(), 0);
            for a in 1..p {
                assert_eq!(lt[ctx.square(a) as usize], 1);
                assert_eq!(lt[a as usize], legendre_symbol(a as i64, p).unwrap());
            }
            assert_eq!(ctx.rho_minus_one() == 1, p % 4 == 1);
        }
    }

    #[test]
    fn char_eval_examples() {
        let ctx = PrimeContext::new(5).unwrap();
        let chi0 = Character::principal(5).unwrap();
        for a in 1..5 {
            assert_eq!(
                char_eval(&ctx, &chi0, a).unwrap(),
                CharValue::Root { num: 0, den: 4 }
            );
        }
        assert_eq!(char_eval(&ctx, &chi0, 10).unwrap(), CharValue::Zero);
        for k in 0..4 {
            let chi = Character::new(5, k).unwrap();
            assert_eq!(
                char_eval(&ctx, &chi, 1).unwrap(),
                CharValue::Root { num: 0, den: 4 }
            );
        }
        // dlog(2) = 1, so chi_1(2) = e(1/4) = i
        let chi1 = Character::new(5, 1).unwrap();
        assert_eq!(
            char_eval(&ctx, &chi1, 2).unwrap(),
            CharValue::Root { num: 1, den: 4 }
        );
        let (re, im) = char_eval(&ctx, &chi1, 2).unwrap().to_complex();
        assert!(re.abs() < 1e-15 && (im - 1.0).abs() < 1e-15);
        let other = PrimeContext::new(7).unwrap();
        assert!(char_eval(&other, &chi1, 2).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let c5 = PrimeContext::new(5).unwrap();
        let even_np = enumerate_characters(&c5, CharFilter::EvenNonprincipal);
        assert_eq!(even_np, vec![Character::quadratic(5).unwrap()]);
        assert_eq!(even_np[0].index(), 2);
        let c3 = PrimeContext::new(3).unwrap();
        assert!(enumerate_characters(&c3, CharFilter::EvenNonprincipal).is_empty());
        let c7 = PrimeContext::new(7).unwrap();
        let odd: Vec<u64> = enumerate_characters(&c7, CharFilter::Odd)
            .iter()
            .map(|c| c.index())
            .collect();
        assert_eq!(odd, vec![1, 3, 5]);
        for p in primes_in(3, 100) {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(ctx.characters(CharFilter::All).len() as u64, p - 1);
            assert_eq!(ctx.characters(CharFilter::Even).len() as u64, (p - 1) / 2);
            assert_eq!(
                ctx.characters(CharFilter::EvenNonprincipal).len() as u64,
                (p - 3) / 2
            );
        }
    }

    #[test]
    fn group_structure() {
        let p = 13;
        let a = Character::new(p, 5).unwrap();
        let b = Character::new(p, 9).unwrap();
        assert_eq!(a.mul(&b).unwrap().index(), 2);
        assert_eq!(a.conj().index(), 7);
        assert_eq!(Character::principal(p).unwrap().conj().index(), 0);
        assert!(Character::new(p, 12).is_err());
        assert!(a.mul(&Character::new(7, 1).unwrap()).is_err());
    }

    /// Orthogonality checked exactly on exponents: the multiset of
    /// exponents `k * t mod (p - 1)` over all k is uniform unless t = 0.
    #[test]
    fn orthogonality_exact() {
        for p in primes_in(3, 200) {
            let ctx = PrimeContext::new(p).unwrap();
            let chars = ctx.characters(CharFilter::All);
            let evens = ctx.characters(CharFilter::Even);
            for a in 1..p {
                let (mut re, mut im) = (0.0, 0.0);
                for chi in &chars {
                    let (c, s) = char_eval(&ctx, chi, a as i64).unwrap().to_complex();
                    re += c;
                    im += s;
                }
                let expected = if a == 1 { (p - 1) as f64 } else { 0.0 };
                assert!((re - expected).abs() < 1e-9 && im.abs() < 1e-9, "p={p} a={a}");

                let (mut re, mut im) = (0.0, 0.0);
                for chi in &evens {
                    let (c, s) = char_eval(&ctx, chi, a as i64).unwrap().to_complex();
                    re += c;
                    im += s;
                }
                let expected = if a == 1 || a == p - 1 {
                    ((p - 1) / 2) as f64
                } else {
                    0.0
                };
                assert!((re - expected).abs() < 1e-9 && im.abs() < 1e-9, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn parity_from_minus_one() {
        for p in primes_in(3, 150) {
            let ctx = PrimeContext::new(p).unwrap();
            for chi in ctx.characters(CharFilter::All) {
                let v = char_eval(&ctx, &chi, -1).unwrap();
                let expected = if chi.is_even() { 0 } else { (p - 1) / 2 };
                assert_eq!(v, CharValue::Root { num: expected, den: p - 1 });
            }
        }
    }

    proptest! {
        #[test]
        fn quadratic_character_is_legendre(idx in 0usize..60, a in -1000i64..1000) {
            let primes = primes_in(3, 300);
            let p = primes[idx % primes.len()];
            let ctx = PrimeContext::new(p).unwrap();
            let chi = Character::quadratic(p).unwrap();
            let expected = match char_eval(&ctx, &chi, a).unwrap() {
                CharValue::Zero => 0,
                CharValue::Root { num: 0, .. } => 1,
                CharValue::Root { num, den } => {
                    prop_assert_eq!(2 * num, den);
                    -1
                }
            };
            prop_assert_eq!(ctx.legendre(a), expected);
        }

        #[test]
        fn legendre_is_multiplicative(idx in 0usize..60, a in 1u64..10_000, b in 1u64..10_000) {
            let primes = primes_in(3, 300);
            let p = primes[idx % primes.len()];
            let ctx = PrimeContext::new(p).unwrap();
            let ab = (a % p) * (b % p);
            prop_assert_eq!(
                ctx.legendre(ab as i64),
                ctx.legendre(a as i64) * ctx.legendre(b as i64)
            );
        }
    }
}
