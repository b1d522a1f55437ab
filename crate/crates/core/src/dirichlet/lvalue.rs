//! Central values `L(1/2, chi)` by two independent routes, plus the smooth
//! weight `V` entering the approximate functional equation.
//!
//! The Hurwitz route writes `L(1/2, chi) = q^{-1/2} sum_a chi(a) zeta(1/2, a/q)`
//! with Euler-Maclaurin evaluation of the Hurwitz zeta; the AFE route computes
//! `|L(1/2, chi)|^2` directly as a smoothly weighted double sum of effective
//! length about `q`. Each serves as the oracle for the other.

use num_complex::Complex64;
use std::sync::OnceLock;

use super::CharacterTable;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Hurwitz zeta at the central point
// ---------------------------------------------------------------------------

const B2K: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// `zeta(1/2, x)` for `x > 0` by Euler-Maclaurin; absolute accuracy well
/// below 1e-12 for `x <= 2`.
pub fn hurwitz_zeta_half(x: f64) -> f64 {
    assert!(x > 0.0, "Hurwitz zeta needs a positive shift");
    const N: usize = 24;
    const K: usize = 11;
    let s = 0.5;
    let mut sum = 0.0;
    for k in 0..N {
        sum += 1.0 / (x + k as f64).sqrt();
    }
    let w = x + N as f64;
    let rsw = 1.0 / w.sqrt();
    sum += -2.0 * w.sqrt(); // w^{1-s} / (s-1)
    sum += 0.5 * rsw;
    let mut poch = s; // (s)_{2j-1}
    let mut fact = 2.0; // (2j)!
    let mut wpow = rsw / w; // w^{-s-2j+1}
    for j in 1..=K {
        sum += B2K[j - 1] / fact * poch * wpow;
        let tj = 2.0 * j as f64;
        poch *= (s + tj - 1.0) * (s + tj);
        fact *= (tj + 1.0) * (tj + 2.0);
        wpow /= w * w;
    }
    sum
}

/// `zeta(1/2, a/q)` for `a = 1..=q` (index `a-1`), shared across a family.
pub fn zeta_half_table(q: u64) -> Vec<f64> {
    (1..=q)
        .map(|a| hurwitz_zeta_half(a as f64 / q as f64))
        .collect()
}

/// `L(1/2, chi)` via the Hurwitz-zeta route. Any non-principal character is
/// accepted; the modulus-one character degenerates to `zeta(1/2)`.
pub fn l_central_hurwitz(chi: &CharacterTable) -> Result<Complex64> {
    if chi.q == 1 {
        return Ok(Complex64::new(hurwitz_zeta_half(1.0), 0.0));
    }
    let table = zeta_half_table(chi.q);
    l_central_hurwitz_with_table(chi, &table)
}

/// Hurwitz route with a caller-provided `zeta(1/2, a/q)` table.
pub fn l_central_hurwitz_with_table(chi: &CharacterTable, table: &[f64]) -> Result<Complex64> {
    if chi.q == 1 {
        return Ok(Complex64::new(hurwitz_zeta_half(1.0), 0.0));
    }
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter(chi.q));
    }
    debug_assert_eq!(table.len() as u64, chi.q);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..chi.q {
        let v = chi.values[a as usize];
        if v != Complex64::new(0.0, 0.0) {
            acc += v * table[(a - 1) as usize];
        }
    }
    Ok(acc / (chi.q as f64).sqrt())
}

// ---------------------------------------------------------------------------
// The weight V
// ---------------------------------------------------------------------------

/// Lanczos log-gamma (g = 7, 9 terms), valid for `Re z > 0`.
fn ln_gamma_complex(z: Complex64) -> Complex64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(z.re > 0.0);
    let zm1 = z - 1.0;
    let mut a = Complex64::new(G[0], 0.0);
    for (k, &c) in G.iter().enumerate().skip(1) {
        a += c / (zm1 + k as f64);
    }
    let t = zm1 + 7.5;
    0.5 * (std::f64::consts::TAU).ln() + (zm1 + 0.5) * t.ln() - t + a.ln()
}

/// Quadrature weights for
/// `V(x) = (1/2 pi i) int_(2) Gamma(s/2 + 1/4)^2 / Gamma(1/4)^2 (pi x)^{-s} ds/s`
/// on the vertical line `Re s = 2`, truncated at `|Im s| = 60` (Simpson rule).
/// Grid points whose integrand factor is below 1e-24 are dropped; the kept
/// window is contiguous and symmetric, so per-`x` evaluation can run a phase
/// recurrence in `t`.
struct VWeightGrid {
    t0: f64,
    h: f64,
    gw: Vec<Complex64>,
}

const V_TRUNCATION: f64 = 60.0;
const V_INTERVALS: usize = 16384;

fn v_grid() -> &'static VWeightGrid {
    static GRID: OnceLock<VWeightGrid> = OnceLock::new();
    GRID.get_or_init(|| {
        let ln_gamma_quarter = ln_gamma_complex(Complex64::new(0.25, 0.0));
        let ln_pi = std::f64::consts::PI.ln();
        let h = 2.0 * V_TRUNCATION / V_INTERVALS as f64;
        let n_points = V_INTERVALS + 1;
        let raw: Vec<Complex64> = (0..n_points)
            .map(|k| {
                let t = -V_TRUNCATION + h * k as f64;
                let s = Complex64::new(2.0, t);
                let lg = ln_gamma_complex(s / 2.0 + 0.25);
                let g = (2.0 * lg - 2.0 * ln_gamma_quarter - s * ln_pi).exp() / s;
                let simpson = if k == 0 || k == n_points - 1 {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                g * (simpson * h / 3.0 / std::f64::consts::TAU)
            })
            .collect();
        let keep = |w: &Complex64| w.norm() > 1e-24;
        let first = raw.iter().position(keep).unwrap_or(0);
        let last = raw.iter().rposition(keep).unwrap_or(raw.len() - 1);
        VWeightGrid {
            t0: -V_TRUNCATION + h * first as f64,
            h,
            gw: raw[first..=last].to_vec(),
        }
    })
}

/// Real and imaginary parts of the `V(x)` quadrature. The imaginary part is
/// a pure numerical residue of the symmetric integrand.
pub fn v_weight_parts(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::NonPositive(x));
    }
    let grid = v_grid();
    let lnx = x.ln();
    let mut phase = Complex64::new(0.0, -grid.t0 * lnx).exp();
    let step = Complex64::new(0.0, -grid.h * lnx).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for w in &grid.gw {
        acc += w * phase;
        phase *= step;
    }
    let z = acc * x.powi(-2);
    Ok((z.re, z.im))
}

/// The smoothing weight `V(x)`: 1 at the origin, rapid decay past `x ~ 1`.
pub fn v_weight(x: f64) -> Result<f64> {
    v_weight_parts(x).map(|(re, _)| re)
}

// ---------------------------------------------------------------------------
// Approximate functional equation
// ---------------------------------------------------------------------------

/// Terms with `V(n1 n2 / q)` below this threshold are dropped. The tail this
/// leaves behind must stay small against the near-vanishing central values
/// in the family (|L|^2 down to ~4e-7 below q = 300), which forces the
/// threshold well under the headline 1e-3 cross-check tolerance.
pub const AFE_CUTOFF: f64 = 1e-12;

/// Cached `V(n/q)` values for one modulus, shared across its characters.
pub struct AfeContext {
    pub q: u64,
    v: Vec<f64>,
}

impl AfeContext {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1);
        let mut v = Vec::new();
        let mut n = 1u64;
        // V is decreasing, so scan until it drops below the cutoff.
        while n <= 10 * q + 10 {
            let val = v_weight(n as f64 / q as f64).expect("positive argument");
            if val < AFE_CUTOFF {
                break;
            }
            v.push(val);
            n += 1;
        }
        AfeContext { q, v }
    }

    /// Largest `n` with `V(n/q)` at or above the cutoff.
    pub fn cutoff(&self) -> u64 {
        self.v.len() as u64
    }
}

/// `|L(1/2, chi)|^2` for an even primitive character via the approximate
/// functional equation `2 sum chi(n1) conj(chi(n2)) (n1 n2)^{-1/2} V(n1 n2/q)`.
pub fn l_central_afe_sq(chi: &CharacterTable) -> Result<f64> {
    let ctx = AfeContext::new(chi.q);
    l_central_afe_sq_with(chi, &ctx)
}

/// AFE route with a caller-provided weight cache.
pub fn l_central_afe_sq_with(chi: &CharacterTable, ctx: &AfeContext) -> Result<f64> {
    assert_eq!(chi.q, ctx.q);
    if chi.q < 3 {
        return Err(Error::ModulusTooSmall(chi.q));
    }
    if !chi.primitive {
        return Err(Error::ImprimitiveCharacter {
            q: chi.q,
            conductor: chi.conductor,
        });
    }
    if !chi.is_even() {
        return Err(Error::OddCharacter(chi.q));
    }
    let nmax = ctx.cutoff();
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for n1 in 1..=nmax {
        let c1 = chi.value(n1);
        if c1 == zero {
            continue;
        }
        for n2 in 1..=nmax / n1 {
            let c2 = chi.value(n2).conj();
            if c2 == zero {
                continue;
            }
            let n = n1 * n2;
            acc += c1 * c2 * (ctx.v[(n - 1) as usize] / (n as f64).sqrt());
        }
    }
    // the double sum is invariant under (n1, n2) swap + conjugation
    debug_assert!(acc.im.abs() < 1e-8);
    Ok(2.0 * acc.re)
}

/// Evaluator selector for the two central-value routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMethod {
    Hurwitz,
    Afe,
}

#[derive(Debug, Clone, Copy)]
pub enum CentralValue {
    /// `L(1/2, chi)` itself.
    Hurwitz(Complex64),
    /// `|L(1/2, chi)|^2`.
    AfeModulusSquared(f64),
}

pub fn l_central(chi: &CharacterTable, method: LMethod) -> Result<CentralValue> {
    match method {
        LMethod::Hurwitz => l_central_hurwitz(chi).map(CentralValue::Hurwitz),
        LMethod::Afe => l_central_afe_sq(chi).map(CentralValue::AfeModulusSquared),
    }
}
