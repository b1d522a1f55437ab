//! The two-piece mollifier, the mollified first and second moments, the
//! kappa lower bound on the non-vanishing proportion, and the exact
//! theta-optimizer.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use super::lvalue::{l_central_hurwitz, l_central_hurwitz_with_table, zeta_half_table};
use super::{char_group, CharacterTable};
use crate::arith::{factor, gcd, mobius, mod_inverse};
use crate::error::{Error, Result};
use crate::expsum::gauss_sum_tau;
use crate::util::{pairwise_sum, pairwise_sum_complex};

pub type Rat = Ratio<i64>;

/// Mollifier shape: two Dirichlet-polynomial pieces of lengths
/// `M = floor(q^theta1)` and `R = floor(q^theta2)`, the second twisted by the
/// normalized Gauss sum. Each piece uses its own length as the coefficient
/// parameter `y`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MollifierConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub c1: f64,
    pub c2: f64,
    pub m_len: u64,
    pub r_len: u64,
}

impl MollifierConfig {
    pub fn new(q: u64, theta1: f64, theta2: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta1 < 0.5 && theta2 > 0.0 && theta2 < 0.5) {
            return Err(Error::ThetaOutOfRange);
        }
        let m_len = ((q as f64).powf(theta1).floor() as u64).max(1);
        let r_len = ((q as f64).powf(theta2).floor() as u64).max(1);
        Ok(MollifierConfig {
            theta1,
            theta2,
            c1,
            c2,
            m_len,
            r_len,
        })
    }
}

/// Mollifier coefficient `a(m) = mu(m) log(y/m) / log(y)`, zero past the
/// length and on non-square-free `m`; `a(1) = 1` for every length.
pub fn mollifier_coeff(m: u64, y: f64) -> f64 {
    assert!(m >= 1 && y >= 1.0);
    if m == 1 {
        return 1.0;
    }
    if m as f64 > y {
        return 0.0;
    }
    let mu = mobius(m).expect("m within ceiling");
    if mu == 0 {
        return 0.0;
    }
    mu as f64 * (y / m as f64).ln() / y.ln()
}

/// `M(chi) = c1 sum_{m<=M} a(m) chi(m) m^{-1/2}
///         + c2 (conj(tau_chi)/sqrt(q)) sum_{m<=R} a(m) conj(chi(m)) m^{-1/2}`.
pub fn mollifier_eval(chi: &CharacterTable, cfg: &MollifierConfig) -> Result<Complex64> {
    if !chi.primitive {
        return Err(Error::ImprimitiveCharacter {
            q: chi.q,
            conductor: chi.conductor,
        });
    }
    let mut piece1 = Complex64::new(0.0, 0.0);
    let y1 = cfg.m_len as f64;
    for m in 1..=cfg.m_len {
        let a = mollifier_coeff(m, y1);
        if a != 0.0 {
            piece1 += chi.value(m) * (a / (m as f64).sqrt());
        }
    }
    let mut piece2 = Complex64::new(0.0, 0.0);
    let y2 = cfg.r_len as f64;
    for m in 1..=cfg.r_len {
        let a = mollifier_coeff(m, y2);
        if a != 0.0 {
            piece2 += chi.value(m).conj() * (a / (m as f64).sqrt());
        }
    }
    let tau = gauss_sum_tau(chi).as_complex();
    Ok(cfg.c1 * piece1 + cfg.c2 * (tau.conj() / (chi.q as f64).sqrt()) * piece2)
}

/// Both sides of the Gauss-sum elimination identity for `(m, q) = 1`:
/// the primed sum of `tau_chi chi(m)` over even primitive characters equals
/// `sum_{q1 q2 = q, (q1,q2)=1} mu^2(q1) phi(q2) cos(2 pi inv(m q1)/q2)`.
pub fn tau_identity_check(q: u64, m: u64) -> Result<(Complex64, f64)> {
    if q == 0 {
        return Err(Error::Zero);
    }
    if q % 4 == 2 {
        return Err(Error::TwoModFour(q));
    }
    if q > 1 && gcd(m % q, q) != 1 {
        return Err(Error::NotCoprimeToModulus { b: m % q, q });
    }
    let mut lhs = Complex64::new(0.0, 0.0);
    for chi in char_group(q) {
        if chi.primitive && chi.is_even() {
            lhs += gauss_sum_tau(&chi).as_complex() * chi.value(m);
        }
    }
    let fm = factor(q)?;
    let mut rhs = 0.0;
    for &q1 in &fm.divisors() {
        let q2 = q / q1;
        if gcd(q1, q2) != 1 {
            continue;
        }
        if factor(q1)?.mu() == 0 {
            continue;
        }
        let phi_q2 = factor(q2)?.phi;
        let angle = if q2 == 1 {
            0.0
        } else {
            let inv = mod_inverse(m % q2 * (q1 % q2) % q2, q2)?;
            std::f64::consts::TAU * inv as f64 / q2 as f64
        };
        rhs += phi_q2 as f64 * angle.cos();
    }
    Ok((lhs, rhs))
}

/// Central values and mollifier values over the even primitive characters
/// mod `q`, in enumeration order.
struct MollifiedFamily {
    l: Vec<Complex64>,
    m: Vec<Complex64>,
    phistar: u64,
}

fn mollified_family(q: u64, cfg: &MollifierConfig) -> Result<MollifiedFamily> {
    if q < 3 {
        return Err(Error::ModulusTooSmall(q));
    }
    if q % 4 == 2 {
        return Err(Error::TwoModFour(q));
    }
    let fm = factor(q)?;
    let table = zeta_half_table(q);
    let mut l = Vec::new();
    let mut m = Vec::new();
    for chi in char_group(q) {
        if !(chi.primitive && chi.is_even()) {
            continue;
        }
        l.push(l_central_hurwitz_with_table(&chi, &table)?);
        m.push(mollifier_eval(&chi, cfg)?);
    }
    Ok(MollifiedFamily {
        l,
        m,
        phistar: fm.phistar,
    })
}

/// First mollified moment `(2/phistar) sum' L(1/2, chi) M(chi)` over even
/// primitive characters.
pub fn first_moment(q: u64, cfg: &MollifierConfig) -> Result<Complex64> {
    let fam = mollified_family(q, cfg)?;
    let products: Vec<Complex64> = fam.l.iter().zip(&fam.m).map(|(l, m)| l * m).collect();
    Ok(pairwise_sum_complex(&products) * (2.0 / fam.phistar as f64))
}

/// Second mollified moment `(2/phistar) sum' |L(1/2, chi) M(chi)|^2`.
pub fn second_moment(q: u64, cfg: &MollifierConfig) -> Result<f64> {
    let fam = mollified_family(q, cfg)?;
    let products: Vec<f64> = fam
        .l
        .iter()
        .zip(&fam.m)
        .map(|(l, m)| (l * m).norm_sqr())
        .collect();
    Ok(pairwise_sum(&products) * (2.0 / fam.phistar as f64))
}

/// Prediction for the second moment under the admissible-theta constraints:
/// `c1^2/theta1 + c2^2/theta2 + (c1+c2)^2`.
pub fn second_moment_prediction(cfg: &MollifierConfig) -> f64 {
    cfg.c1 * cfg.c1 / cfg.theta1 + cfg.c2 * cfg.c2 / cfg.theta2 + (cfg.c1 + cfg.c2).powi(2)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexParts {
    pub re: f64,
    pub im: f64,
}

/// Moment summary for one `(q, config)` pair.
///
/// `kappa_lb` comes from the raw Cauchy-Schwarz ratio
/// `|sum L M|^2 / (n_even_primitive * sum |L M|^2)`, which sidesteps the
/// family-normalization constant entirely.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub q: u64,
    pub config: MollifierConfig,
    pub m1: ComplexParts,
    pub m2: f64,
    pub kappa_lb: f64,
    pub n_even_primitive: u64,
    pub n_nonvanishing: u64,
    pub proportion: f64,
    /// Set when the Cauchy-Schwarz denominator vanishes (kappa_lb forced to 0)
    /// or the family is empty.
    pub degenerate: bool,
}

pub fn kappa_report(q: u64, cfg: &MollifierConfig, vanish_tol: f64) -> Result<MomentReport> {
    let fam = mollified_family(q, cfg)?;
    let n_ep = fam.l.len() as u64;
    let products: Vec<Complex64> = fam.l.iter().zip(&fam.m).map(|(l, m)| l * m).collect();
    let sq: Vec<f64> = products.iter().map(|z| z.norm_sqr()).collect();
    let sum_lm = pairwise_sum_complex(&products);
    let sum_sq = pairwise_sum(&sq);
    let m1 = sum_lm * (2.0 / fam.phistar as f64);
    let m2 = sum_sq * (2.0 / fam.phistar as f64);
    let denom = n_ep as f64 * sum_sq;
    let (kappa_lb, mut degenerate) = if denom > 0.0 {
        (sum_lm.norm_sqr() / denom, false)
    } else {
        (0.0, true)
    };
    let n_nonvanishing = fam.l.iter().filter(|l| l.norm() > vanish_tol).count() as u64;
    let proportion = if n_ep > 0 {
        n_nonvanishing as f64 / n_ep as f64
    } else {
        degenerate = true;
        1.0 // vacuous family
    };
    Ok(MomentReport {
        q,
        config: *cfg,
        m1: ComplexParts { re: m1.re, im: m1.im },
        m2,
        kappa_lb,
        n_even_primitive: n_ep,
        n_nonvanishing,
        proportion,
        degenerate,
    })
}

/// Count of even primitive characters mod `q` and of those with a
/// non-vanishing central value; total over all `q` (a modulus 2 mod 4
/// simply has an empty family).
pub fn nonvanishing_census(q: u64, vanish_tol: f64) -> Result<(u64, u64)> {
    if q == 0 {
        return Err(Error::Zero);
    }
    let table = if q > 1 { zeta_half_table(q) } else { Vec::new() };
    let mut n_ep = 0u64;
    let mut n_nonzero = 0u64;
    for chi in char_group(q) {
        if !(chi.primitive && chi.is_even()) {
            continue;
        }
        n_ep += 1;
        let l = if q == 1 {
            l_central_hurwitz(&chi)?
        } else {
            l_central_hurwitz_with_table(&chi, &table)?
        };
        if l.norm() > vanish_tol {
            n_nonzero += 1;
        }
    }
    Ok((n_ep, n_nonzero))
}

// ---------------------------------------------------------------------------
// Theta optimizer
// ---------------------------------------------------------------------------

/// The theta pair for the low range `gamma <= 1/5`:
/// `theta1 = (1-gamma)/4`, `theta2 = (1+gamma)/3`.
pub fn theta_choice_low(gamma: Rat) -> (Rat, Rat) {
    let one = Rat::from_integer(1);
    ((one - gamma) / Rat::from_integer(4), (one + gamma) / Rat::from_integer(3))
}

/// The theta pair for the high range `gamma > 1/5`:
/// `theta1 = (3-7gamma)/8`, `theta2 = (1+3gamma)/4`.
pub fn theta_choice_high(gamma: Rat) -> (Rat, Rat) {
    (
        (Rat::from_integer(3) - Rat::from_integer(7) * gamma) / Rat::from_integer(8),
        (Rat::from_integer(1) + Rat::from_integer(3) * gamma) / Rat::from_integer(4),
    )
}

/// `(1 + 1/(theta1+theta2))^{-1}`, the proportion the ratio optimum yields.
pub fn proportion_from_thetas(t1: Rat, t2: Rat) -> Rat {
    let s = t1 + t2;
    s / (Rat::from_integer(1) + s)
}

/// The admissibility constraints at the epsilon-zero boundary:
/// `4 t1 + 6 t2 <= 3 + gamma`, `2 t1 + t2 <= 1 - gamma`, `4 t1 <= 1 - gamma`.
pub fn theta_constraints_hold(t1: Rat, t2: Rat, gamma: Rat) -> bool {
    let one = Rat::from_integer(1);
    let three = Rat::from_integer(3);
    Rat::from_integer(4) * t1 + Rat::from_integer(6) * t2 <= three + gamma
        && Rat::from_integer(2) * t1 + t2 <= one - gamma
        && Rat::from_integer(4) * t1 <= one - gamma
}

/// Piecewise-optimal mollifier lengths for `gamma = log q-ring / log q` in
/// `[0, 1/3]`, and the resulting non-vanishing proportion:
/// `(7+gamma)/(19+gamma)` on the low branch, `(5-gamma)/(13-gamma)` on the
/// high branch, never below `7/19`.
pub fn theta_optimizer(gamma: Rat) -> Result<(Rat, Rat, Rat)> {
    if gamma < Rat::from_integer(0) || gamma > Rat::new(1, 3) {
        return Err(Error::GammaOutOfRange);
    }
    let (t1, t2) = if gamma <= Rat::new(1, 5) {
        theta_choice_low(gamma)
    } else {
        theta_choice_high(gamma)
    };
    Ok((t1, t2, proportion_from_thetas(t1, t2)))
}

/// Parse "a/b" or a plain decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let ipart: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().ok()?
        };
        if frac.is_empty() {
            return Some(Rat::from_integer(ipart));
        }
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let fpart: i64 = frac.parse().ok()?;
        let total = ipart.abs().checked_mul(scale)?.checked_add(fpart)?;
        let signed = if neg { -total } else { total };
        return Some(Rat::new(signed, scale));
    }
    s.parse::<i64>().ok().map(Rat::from_integer)
}
