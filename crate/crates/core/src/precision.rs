//! Real scalars under a precision policy, compensated summation, and
//! complex values that carry an accumulated error bound.
//!
//! Two scalar types implement [`Real`]: `f64` (53-bit mantissa, summed with
//! Neumaier compensation) and [`Ext`] (128-bit mantissa software float).
//! Numeric code is generic over `Real` so the same routine runs under
//! either policy.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use serde::{Deserialize, Serialize};

/// Precision policy selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    Extended,
}

impl Precision {
    /// Relative tolerance for identity checks under this policy.
    pub fn identity_tolerance(self) -> f64 {
        match self {
            Precision::Standard => 1e-8,
            Precision::Extended => 1e-20,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}`")),
        }
    }
}

/// Running sum of scalars with a bound on its own rounding error.
pub trait Accumulator<R>: Default {
    fn push(&mut self, x: R);
    fn total(&self) -> R;
    /// Bound on `|total - exact sum of pushed values|`.
    fn rounding_bound(&self) -> f64;
}

/// Scalar field used by all floating-point computations.
pub trait Real:
    Clone
    + Send
    + Sync
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Unit roundoff of one elementary operation.
    const EPS: f64;
    const PRECISION: Precision;
    type Sum: Accumulator<Self> + Send;

    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn pi() -> Self;
    /// `(cos 2 pi j / n, sin 2 pi j / n)`.
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self);
    /// `sin(pi j / n)`.
    fn sin_pi_ratio(j: u64, n: u64) -> Self;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Absolute error bound of one `cos_sin_turn` table entry.
    fn unit_entry_error() -> f64 {
        16.0 * Self::EPS
    }
}

/// Neumaier (improved Kahan-Babuska) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
    abs_sum: f64,
    n: u64,
}

impl Accumulator<f64> for NeumaierSum {
    #[inline]
    fn push(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
        self.abs_sum += x.abs();
        self.n += 1;
    }

    #[inline]
    fn total(&self) -> f64 {
        self.s + self.c
    }

    fn rounding_bound(&self) -> f64 {
        let u = f64::EPSILON / 2.0;
        2.0 * u * self.total().abs() + 2.0 * self.n as f64 * u * u * self.abs_sum
    }
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    const PRECISION: Precision = Precision::Standard;
    type Sum = NeumaierSum;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self) {
        // Fold into the first octant so the argument of sin/cos stays small.
        let j = j % n;
        let (num, den) = (8 * j as u128, n as u128);
        let octant = (num / den) as u8;
        let frac = |a: u128| -> f64 {
            let r = (a as f64) / (den as f64);
            std::f64::consts::FRAC_PI_4 * r
        };
        let rem = num - octant as u128 * den;
        let (c, s) = if octant.is_multiple_of(2) {
            let x = frac(rem);
            (x.cos(), x.sin())
        } else {
            let x = frac(den - rem);
            (x.sin(), x.cos())
        };
        match octant {
            0 => (c, s),
            1 => (c, s),
            2 => (-s, c),
            3 => (-s, c),
            4 => (-c, -s),
            5 => (-c, -s),
            6 => (s, -c),
            _ => (s, -c),
        }
    }
    fn sin_pi_ratio(j: u64, n: u64) -> Self {
        let (_, s) = Self::cos_sin_turn(j, 2 * n);
        s
    }
}

/// Mantissa width of [`Ext`], in bits.
pub const EXT_BITS: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// Extended-precision real with a 128-bit mantissa.
#[derive(Clone)]
pub struct Ext(BigFloat);

impl Ext {
    pub fn from_bigfloat(x: BigFloat) -> Self {
        Ext(x)
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.0
    }
}

impl fmt::Debug for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ext({})", self.0)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for Ext {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! ext_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Ext {
            type Output = Ext;
            #[inline]
            fn $method(self, rhs: Ext) -> Ext {
                Ext(self.0.$method(&rhs.0, EXT_BITS, RM))
            }
        }
    };
}

ext_binop!(Add, add);
ext_binop!(Sub, sub);
ext_binop!(Mul, mul);
ext_binop!(Div, div);

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(self.0.neg())
    }
}

/// Plain summation; the 128-bit mantissa leaves ample headroom.
#[derive(Clone, Debug)]
pub struct ExtSum {
    s: BigFloat,
    abs_sum: f64,
    n: u64,
}

impl Default for ExtSum {
    fn default() -> Self {
        Self {
            s: BigFloat::from_i64(0, EXT_BITS),
            abs_sum: 0.0,
            n: 0,
        }
    }
}

impl Accumulator<Ext> for ExtSum {
    fn push(&mut self, x: Ext) {
        self.abs_sum += x.to_f64().abs();
        self.s = self.s.add(&x.0, EXT_BITS, RM);
        self.n += 1;
    }

    fn total(&self) -> Ext {
        Ext(self.s.clone())
    }

    fn rounding_bound(&self) -> f64 {
        // Slightly inflated so the f64 view of abs_sum cannot undercount.
        (self.n as f64 + 1.0) * Ext::EPS * self.abs_sum * (1.0 + 1e-12)
    }
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        None => f64::NAN,
        Some((words, _, sign, exp, _)) => {
            if words.iter().all(|&w| w == 0) {
                return 0.0;
            }
            let top = *words.last().unwrap() as f64;
            let next = if words.len() >= 2 {
                words[words.len() - 2] as f64
            } else {
                0.0
            };
            let mantissa = top * 2f64.powi(-64) + next * 2f64.powi(-128);
            let v = mantissa * 2f64.powi(exp);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
    }
}

impl Real for Ext {
    const EPS: f64 = 2.938_735_877_055_719e-39; // 2^-128
    const PRECISION: Precision = Precision::Extended;
    type Sum = ExtSum;

    fn from_f64(x: f64) -> Self {
        Ext(BigFloat::from_f64(x, EXT_BITS))
    }
    fn from_i64(x: i64) -> Self {
        Ext(BigFloat::from_i64(x, EXT_BITS))
    }
    fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.0)
    }
    fn sqrt(&self) -> Self {
        Ext(self.0.sqrt(EXT_BITS, RM))
    }
    fn ln(&self) -> Self {
        CONSTS.with(|cc| Ext(self.0.ln(EXT_BITS, RM, &mut cc.borrow_mut())))
    }
    fn pi() -> Self {
        CONSTS.with(|cc| Ext(cc.borrow_mut().pi(EXT_BITS, RM)))
    }
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self) {
        let j = j % n;
        CONSTS.with(|cc| {
            let cc = &mut cc.borrow_mut();
            let wide = EXT_BITS + 64;
            let tau = cc.pi(wide, RM).mul(&BigFloat::from_u8(2, wide), wide, RM);
            let angle = tau
                .mul(&BigFloat::from_u64(j, wide), wide, RM)
                .div(&BigFloat::from_u64(n, wide), wide, RM);
            let c = angle.cos(wide, RM, cc);
            let s = angle.sin(wide, RM, cc);
            let mut c = Ext(c);
            let mut s = Ext(s);
            c.0.set_precision(EXT_BITS, RM).ok();
            s.0.set_precision(EXT_BITS, RM).ok();
            (c, s)
        })
    }
    fn sin_pi_ratio(j: u64, n: u64) -> Self {
        Self::cos_sin_turn(j, 2 * n).1
    }
}

/// Complex number with a running absolute error bound `err`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexValue<R> {
    pub re: R,
    pub im: R,
    pub err: f64,
}

impl<R: Real> ComplexValue<R> {
    pub fn new(re: R, im: R) -> Self {
        Self { re, im, err: 0.0 }
    }

    pub fn with_err(re: R, im: R, err: f64) -> Self {
        Self { re, im, err }
    }

    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero())
    }

    pub fn from_real(x: R) -> Self {
        Self::new(x, R::zero())
    }

    /// `e(j / n) = exp(2 pi i j / n)`.
    pub fn unit(j: u64, n: u64) -> Self {
        let (c, s) = R::cos_sin_turn(j, n);
        Self::with_err(c, s, R::unit_entry_error())
    }

    fn modulus_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn l1_f64(&self) -> f64 {
        self.re.to_f64().abs() + self.im.to_f64().abs()
    }

    pub fn conj(&self) -> Self {
        Self::with_err(self.re.clone(), -self.im.clone(), self.err)
    }

    /// Multiplies by an exactly known real scalar.
    pub fn scale(&self, k: &R) -> Self {
        let out = Self::new(self.re.clone() * k.clone(), self.im.clone() * k.clone());
        let err = self.err * k.to_f64().abs() + R::EPS * out.l1_f64();
        Self { err, ..out }
    }

    /// `|z|^2` with its error bound.
    pub fn abs2(&self) -> (R, f64) {
        let v = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        let m = self.modulus_f64();
        let err = 2.0 * m * self.err + self.err * self.err + 3.0 * R::EPS * v.to_f64().abs();
        (v, err)
    }

    pub fn abs(&self) -> (R, f64) {
        let (a2, e2) = self.abs2();
        let v = a2.sqrt();
        let vf = v.to_f64();
        let err = if vf > 0.0 {
            (self.err).min(e2 / vf) + 2.0 * R::EPS * vf
        } else {
            self.err
        };
        (v, err)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for ComplexValue<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let out = Self::new(self.re + rhs.re, self.im + rhs.im);
        let err = self.err + rhs.err + R::EPS * out.l1_f64();
        Self { err, ..out }
    }
}

impl<R: Real> Sub for ComplexValue<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let out = Self::new(self.re - rhs.re, self.im - rhs.im);
        let err = self.err + rhs.err + R::EPS * out.l1_f64();
        Self { err, ..out }
    }
}

impl<R: Real> Neg for ComplexValue<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::with_err(-self.re, -self.im, self.err)
    }
}

impl<R: Real> Mul for ComplexValue<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (ma, mb) = (self.modulus_f64(), rhs.modulus_f64());
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        let err = ma * rhs.err + mb * self.err + self.err * rhs.err + 4.0 * R::EPS * ma * mb;
        Self::with_err(re, im, err)
    }
}

impl<R: Real> Div for ComplexValue<R> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (d, _) = rhs.abs2();
        let mb = rhs.modulus_f64();
        let rhs_err = rhs.err;
        let re = (self.re.clone() * rhs.re.clone() + self.im.clone() * rhs.im.clone()) / d.clone();
        let im = (self.im * rhs.re - self.re.clone() * rhs.im) / d;
        let out = Self::new(re, im);
        let mq = out.modulus_f64();
        let err = if mb > rhs_err {
            (self.err + mq * rhs_err) / (mb - rhs_err) + 8.0 * R::EPS * mq
        } else {
            f64::INFINITY
        };
        Self { err, ..out }
    }
}

/// Compensated complex accumulator producing a [`ComplexValue`].
#[derive(Default)]
pub struct ComplexSum<R: Real> {
    re: R::Sum,
    im: R::Sum,
    input_err: f64,
}

impl<R: Real> ComplexSum<R> {
    pub fn new() -> Self {
        Self {
            re: R::Sum::default(),
            im: R::Sum::default(),
            input_err: 0.0,
        }
    }

    /// Adds a term whose components are exact up to `err`.
    #[inline]
    pub fn push_parts(&mut self, re: R, im: R, err: f64) {
        self.re.push(re);
        self.im.push(im);
        self.input_err += err;
    }

    pub fn push(&mut self, z: ComplexValue<R>) {
        self.push_parts(z.re, z.im, z.err);
    }

    pub fn finish(self) -> ComplexValue<R> {
        let err = self.input_err + self.re.rounding_bound() + self.im.rounding_bound();
        ComplexValue::with_err(self.re.total(), self.im.total(), err)
    }
}

/// Table of `e(j / n)` for `j` in `[0, n)`.
#[derive(Clone, Debug)]
pub struct UnitTable<R> {
    n: u64,
    cos: Vec<R>,
    sin: Vec<R>,
    entry_err: f64,
}

impl<R: Real> UnitTable<R> {
    pub fn new(n: u64) -> Self {
        assert!(n > 0, "unit table needs a positive order");
        let (cos, sin): (Vec<R>, Vec<R>) = (0..n).map(|j| R::cos_sin_turn(j, n)).unzip();
        Self {
            n,
            cos,
            sin,
            entry_err: R::unit_entry_error(),
        }
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn cos(&self, j: usize) -> &R {
        &self.cos[j]
    }

    #[inline]
    pub fn sin(&self, j: usize) -> &R {
        &self.sin[j]
    }

    #[inline]
    pub fn entry_err(&self) -> f64 {
        self.entry_err
    }

    pub fn get(&self, j: u64) -> ComplexValue<R> {
        let j = (j % self.n) as usize;
        ComplexValue::with_err(self.cos[j].clone(), self.sin[j].clone(), self.entry_err)
    }
}

/// Deterministic pairwise sum of a slice (fixed split order).
pub fn pairwise_sum<R: Real>(xs: &[R]) -> R {
    match xs.len() {
        0 => R::zero(),
        1 => xs[0].clone(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Rounding bound for [`pairwise_sum`] of values with total magnitude `abs_sum`.
pub fn pairwise_bound<R: Real>(len: usize, abs_sum: f64) -> f64 {
    let depth = (len.max(1) as f64).log2().ceil() + 1.0;
    depth * R::EPS * abs_sum
}
