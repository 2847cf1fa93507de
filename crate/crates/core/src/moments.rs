//! Weighted and unweighted `2m`-th moments of `|G(n, chi; p)|`, their closed
//! forms for `m = 3, 4`, and the normalized comparisons with the main terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{reduce, Character, PrimeContext};
use crate::gauss::{generalized_gauss, GaussSpectrum, Roots};
use crate::lfunc::{ConstantC, LSpectrum};
use crate::precision::{pairwise_bound, pairwise_sum, Real};

/// Main-term coefficient for `m = 1..=4`.
pub fn coeff(m: u32) -> Result<u64> {
    match m {
        1 => Ok(1),
        2 => Ok(3),
        3 => Ok(10),
        4 => Ok(35),
        _ => Err(Error::UnsupportedMoment(m)),
    }
}

fn legendre_of_coprime(ctx: &PrimeContext, n: i64) -> Result<i8> {
    if reduce(n, ctx.p()) == 0 {
        return Err(Error::NotCoprime { n, p: ctx.p() });
    }
    Ok(ctx.legendre(n))
}

/// Real value with an absolute error bound.
#[derive(Debug, Clone)]
pub struct Bounded<R> {
    pub value: R,
    pub err: f64,
}

/// `sum |G|^{2m}` over the even characters in `spectrum` (odd characters
/// contribute zero), optionally including the principal character.
pub fn moment_from_spectrum<R: Real>(
    spectrum: &GaussSpectrum<R>,
    m: u32,
    include_principal: bool,
) -> Result<Bounded<R>> {
    coeff(m)?;
    let skip = usize::from(!include_principal);
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    let terms: Vec<R> = spectrum.entries[skip..]
        .iter()
        .map(|e| {
            let v = e.abs2.powi(m);
            let a2 = e.abs2.to_f64();
            // d(x^m) <= m x^{m-1} dx, plus the rounding of the power itself.
            err += m as f64 * a2.powi(m as i32 - 1) * e.abs2_err
                + 2.0 * m as f64 * R::EPS * v.to_f64().abs();
            abs_sum += v.to_f64().abs();
            v
        })
        .collect();
    let value = pairwise_sum(&terms);
    Ok(Bounded {
        value,
        err: err + pairwise_bound::<R>(terms.len(), abs_sum),
    })
}

/// `sum_chi |G(n, chi; p)|^{2m}`, over all characters or the non-principal
/// ones.
pub fn moment_unweighted<R: Real>(
    roots: &Roots<'_, R>,
    n: i64,
    m: u32,
    include_principal: bool,
) -> Result<Bounded<R>> {
    coeff(m)?;
    let spectrum = GaussSpectrum::compute(roots, n)?;
    moment_from_spectrum(&spectrum, m, include_principal)
}

/// A closed form `int + sqrt_coeff * sqrt(p)` with integer parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub int: i128,
    pub sqrt_coeff: i128,
}

impl ClosedForm {
    pub fn eval<R: Real>(&self, p: u64) -> R {
        let root = R::from_i64(p as i64).sqrt();
        from_i128::<R>(self.int) + from_i128::<R>(self.sqrt_coeff) * root
    }

    pub fn is_integer(&self) -> bool {
        self.sqrt_coeff == 0
    }
}

fn from_i128<R: Real>(v: i128) -> R {
    const SHIFT: u128 = 1 << 62;
    let m = v.unsigned_abs();
    let (hi, lo) = ((m / SHIFT) as i64, (m % SHIFT) as i64);
    let x = if hi == 0 {
        R::from_i64(lo)
    } else {
        R::from_i64(hi) * R::from_i64(SHIFT as i64) + R::from_i64(lo)
    };
    if v < 0 {
        -x
    } else {
        x
    }
}

/// Sixth-moment closed form over all characters, given `N`.
pub fn moment6_closed(ctx: &PrimeContext, n: i64, big_n: i64) -> Result<ClosedForm> {
    let l = legendre_of_coprime(ctx, n)? as i128;
    let p = ctx.p() as i128;
    let nn = big_n as i128;
    Ok(if p % 4 == 1 {
        ClosedForm {
            int: (p - 1) * (10 * p.pow(3) - 25 * p * p - 16 * p - 1),
            sqrt_coeff: l * (p * (p - 1) * nn + 18 * p * p - 12 * p - 6),
        }
    } else {
        ClosedForm {
            int: (p - 1) * (10 * p.pow(3) - 25 * p * p - 4 * p - 1),
            sqrt_coeff: 0,
        }
    })
}

/// Eighth-moment closed form over all characters, given `N` and `T`.
pub fn moment8_closed(ctx: &PrimeContext, n: i64, big_n: i64, big_t: i64) -> Result<ClosedForm> {
    let l = legendre_of_coprime(ctx, n)? as i128;
    let p = ctx.p() as i128;
    let (nn, tt) = (big_n as i128, big_t as i128);
    let t_term = p * p * (p - 1) * tt;
    Ok(if p % 4 == 1 {
        ClosedForm {
            int: (p - 1) * (34 * p.pow(4) - 99 * p.pow(3) - 65 * p * p - 29 * p - 1) + t_term,
            sqrt_coeff: l * (56 * p.pow(3) + 8 * p * p - 56 * p - 8 + 8 * p * p * (p - 1) * nn),
        }
    } else {
        ClosedForm {
            int: (p - 1) * (34 * p.pow(4) - 99 * p.pow(3) + 7 * p * p - 5 * p - 1) + t_term,
            sqrt_coeff: 0,
        }
    })
}

/// Closed form of the all-character moment where one is known:
/// `(p-1)^2` for `m = 1`, and the sixth and eighth moment formulas.
pub fn closed_form(ctx: &PrimeContext, n: i64, m: u32, big_n: i64, big_t: i64) -> Result<Option<ClosedForm>> {
    coeff(m)?;
    legendre_of_coprime(ctx, n)?;
    let p = ctx.p() as i128;
    Ok(match m {
        1 => Some(ClosedForm {
            int: (p - 1) * (p - 1),
            sqrt_coeff: 0,
        }),
        3 => Some(moment6_closed(ctx, n, big_n)?),
        4 => Some(moment8_closed(ctx, n, big_n, big_t)?),
        _ => None,
    })
}

/// `sum_{chi != chi_0} |G|^{2m} |L(1, chi)|` over even characters.
pub fn moment_weighted_from<R: Real>(
    gauss: &GaussSpectrum<R>,
    lvals: &LSpectrum<R>,
    m: u32,
) -> Result<Bounded<R>> {
    coeff(m)?;
    if gauss.p != lvals.p {
        return Err(Error::InvalidArgument("spectra for different moduli".into()));
    }
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    let terms: Vec<R> = gauss
        .nonprincipal()
        .iter()
        .map(|e| {
            let g = e.abs2.powi(m);
            let l = lvals.abs_value(e.index);
            let (gf, lf) = (g.to_f64(), l.to_f64());
            let g_err = m as f64 * e.abs2.to_f64().powi(m as i32 - 1) * e.abs2_err
                + 2.0 * m as f64 * R::EPS * gf;
            err += g_err * lf + gf * lvals.abs_err[e.index as usize] + 2.0 * R::EPS * gf * lf;
            abs_sum += gf * lf;
            g * l.clone()
        })
        .collect();
    let value = pairwise_sum(&terms);
    Ok(Bounded {
        value,
        err: err + pairwise_bound::<R>(terms.len(), abs_sum),
    })
}

pub fn moment_weighted<R: Real>(roots: &Roots<'_, R>, n: i64, m: u32) -> Result<Bounded<R>> {
    coeff(m)?;
    let gauss = GaussSpectrum::compute(roots, n)?;
    let lvals = LSpectrum::compute(roots);
    moment_weighted_from(&gauss, &lvals, m)
}

/// The weighted moment summed over every non-principal character by direct
/// evaluation, odd ones included. Slow; used to confirm that odd characters
/// contribute nothing.
pub fn moment_weighted_all_nonprincipal<R: Real>(
    roots: &Roots<'_, R>,
    lvals: &LSpectrum<R>,
    n: i64,
    m: u32,
) -> Result<R> {
    coeff(m)?;
    let p = roots.ctx().p();
    let mut terms = Vec::with_capacity(p as usize);
    for k in 1..p - 1 {
        let chi = Character::new(p, k)?;
        let g = generalized_gauss(roots, n, &chi)?;
        terms.push(g.abs2.powi(m) * lvals.abs_value(k).clone());
    }
    Ok(pairwise_sum(&terms))
}

/// `coeff(m) C p^{m+1}`.
pub fn main_term(m: u32, p: u64, c: &ConstantC) -> Result<f64> {
    Ok(coeff(m)? as f64 * c.value * (p as f64).powi(m as i32 + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|weighted - main| / (p^{m+1/2} ln p)`.
    pub residual_norm: f64,
    /// Same with `ln^2 p`.
    pub residual_norm_ln2: f64,
    /// `weighted / (C unweighted_all)`.
    pub conjecture_ratio: f64,
}

pub fn residuals(p: u64, m: u32, weighted: f64, unweighted_all: f64, c: &ConstantC) -> Result<Residuals> {
    let main = main_term(m, p, c)?;
    let pf = p as f64;
    let ln = pf.ln();
    let scale = pf.powf(m as f64 + 0.5);
    let d = (weighted - main).abs();
    Ok(Residuals {
        residual_norm: d / (scale * ln),
        residual_norm_ln2: d / (scale * ln * ln),
        conjecture_ratio: if unweighted_all > 0.0 {
            weighted / (c.value * unweighted_all)
        } else {
            0.0
        },
    })
}

/// All reported quantities for one `(p, n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub p: u64,
    pub n: i64,
    pub m: u32,
    pub unweighted_all: f64,
    pub unweighted_all_err: f64,
    pub unweighted_nonprincipal: f64,
    pub closed_form: Option<f64>,
    /// Exact integer parts of the closed form, when one exists.
    pub closed_form_exact: Option<ClosedForm>,
    /// `|unweighted_all - closed_form| / closed_form`.
    pub closed_form_rel_err: Option<f64>,
    /// `|closed_form - c p^{m+1}| / p^{m+1/2}` with `c = 10, 35` for
    /// `m = 3, 4`.
    pub closed_form_norm: Option<f64>,
    pub weighted: f64,
    pub weighted_err: f64,
    pub main_term: f64,
    pub residual_norm: f64,
    pub residual_norm_ln2: f64,
    pub conjecture_ratio: f64,
}

impl MomentReport {
    #[allow(clippy::too_many_arguments)]
    pub fn build<R: Real>(
        ctx: &PrimeContext,
        n: i64,
        m: u32,
        gauss: &GaussSpectrum<R>,
        lvals: &LSpectrum<R>,
        big_n: i64,
        big_t: i64,
        c: &ConstantC,
    ) -> Result<Self> {
        let p = ctx.p();
        let all = moment_from_spectrum(gauss, m, true)?;
        let nonprincipal = moment_from_spectrum(gauss, m, false)?;
        let weighted = moment_weighted_from(gauss, lvals, m)?;
        let exact = closed_form(ctx, n, m, big_n, big_t)?;
        let unweighted_all = all.value.to_f64();
        let closed_r = exact.map(|cf| cf.eval::<R>(p));
        let closed_form = closed_r.as_ref().map(|v| v.to_f64());
        let closed_form_rel_err = closed_r.as_ref().map(|v| {
            let d = (all.value.clone() - v.clone()).abs().to_f64();
            d / v.to_f64().abs()
        });
        let closed_form_norm = match (m, closed_form) {
            (3 | 4, Some(v)) => {
                let lead = if m == 3 { 10.0 } else { 35.0 };
                let pf = p as f64;
                Some((v - lead * pf.powi(m as i32 + 1)).abs() / pf.powf(m as f64 + 0.5))
            }
            _ => None,
        };
        let w = weighted.value.to_f64();
        let res = residuals(p, m, w, unweighted_all, c)?;
        Ok(Self {
            p,
            n,
            m,
            unweighted_all,
            unweighted_all_err: all.err,
            unweighted_nonprincipal: nonprincipal.value.to_f64(),
            closed_form,
            closed_form_exact: exact,
            closed_form_rel_err,
            closed_form_norm,
            weighted: w,
            weighted_err: weighted.err,
            main_term: main_term(m, p, c)?,
            residual_norm: res.residual_norm,
            residual_norm_ln2: res.residual_norm_ln2,
            conjecture_ratio: res.conjecture_ratio,
        })
    }
}
