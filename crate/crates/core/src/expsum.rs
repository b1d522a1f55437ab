//! Exponential sums over residue rings.
//!
//! Covers the Kloosterman family `S(a,b;q)` (naive and CRT-accelerated),
//! Gauss sums, the Salie-type sum `S(gamma, mu, q)` over inverse squares,
//! polynomial Gauss sums over a full residue system, and the constrained
//! unit sum `U(gamma, mu, rho, q)` whose phase lives mod `q*rho`.
//!
//! Every evaluator sums values drawn from per-modulus root-of-unity tables
//! and carries a worst-case error estimate of [`TABLE_EPS`] per summed term.

use num_complex::Complex64;

use crate::arith::{self, gcd, mod_inverse, mul_mod, FactoredModulus};
use crate::dirichlet::CharacterTable;
use crate::error::{Error, Result};

/// Per-term precision budget of the root-of-unity tables.
pub const TABLE_EPS: f64 = 1e-12;

/// A complex exponential-sum value with an accumulated worst-case error
/// estimate in absolute magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl ExpSumValue {
    pub const ZERO: ExpSumValue = ExpSumValue {
        re: 0.0,
        im: 0.0,
        err: 0.0,
    };
    pub const ONE: ExpSumValue = ExpSumValue {
        re: 1.0,
        im: 0.0,
        err: 0.0,
    };

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Product with first-order error propagation.
    pub fn mul(&self, other: &ExpSumValue) -> ExpSumValue {
        let z = self.as_complex() * other.as_complex();
        ExpSumValue {
            re: z.re,
            im: z.im,
            err: self.abs() * other.err + other.abs() * self.err + self.err * other.err,
        }
    }
}

/// Precomputed table of `e(k/q)` for `k` in `[0, q)`.
pub struct RootTable {
    pub q: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let step = std::f64::consts::TAU / q as f64;
        let roots = (0..q)
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        RootTable { q, roots }
    }

    #[inline]
    pub fn e(&self, k: u64) -> Complex64 {
        self.roots[(k % self.q) as usize]
    }
}

/// The units of `q` paired with their inverses, canonical in `[0, q)`.
/// For `q = 1` the single residue class is represented by 0.
pub fn units_with_inverses(q: u64) -> Vec<(u64, u64)> {
    assert!(q >= 1);
    if q == 1 {
        return vec![(0, 0)];
    }
    (1..q)
        .filter(|&x| gcd(x, q) == 1)
        .map(|x| (x, mod_inverse(x, q).expect("unit is invertible")))
        .collect()
}

/// Reduce a signed parameter to its canonical residue.
pub fn reduce_signed(v: i64, q: u64) -> u64 {
    debug_assert!(q >= 1);
    v.rem_euclid(q as i64) as u64
}

/// Kloosterman sum `S(a,b;q)` summed directly over the units of `q`.
pub fn kloosterman_naive(a: u64, b: u64, q: u64) -> ExpSumValue {
    assert!(q >= 1);
    let tab = RootTable::new(q);
    let units = units_with_inverses(q);
    kloosterman_with(a, b, q, &tab, &units)
}

fn kloosterman_with(a: u64, b: u64, q: u64, tab: &RootTable, units: &[(u64, u64)]) -> ExpSumValue {
    let a = a % q;
    let b = b % q;
    let mut re = 0.0;
    let mut im = 0.0;
    for &(x, xi) in units {
        let idx = (mul_mod(a, x, q) + mul_mod(b, xi, q)) % q;
        let z = tab.e(idx);
        re += z.re;
        im += z.im;
    }
    ExpSumValue {
        re,
        im,
        err: units.len() as f64 * TABLE_EPS,
    }
}

/// Kloosterman evaluator with per-prime-power tables, reusable across many
/// `(a, b)` pairs for a fixed modulus.
pub struct KloostermanCtx {
    parts: Vec<PrimePowerPart>,
    q: u64,
}

struct PrimePowerPart {
    p: u64,
    pe: u64,
    even_exp: bool,
    /// `(q/p^e)^{-2} mod p^e`, the twist entering the multiplicative split.
    cof_inv_sq: u64,
    tab: RootTable,
    units: Vec<(u64, u64)>,
}

impl KloostermanCtx {
    pub fn new(fm: &FactoredModulus) -> Self {
        let parts = fm
            .factors
            .iter()
            .map(|&(p, e)| {
                let pe = p.pow(e);
                let cof = (fm.q / pe) % pe;
                let cof_inv = mod_inverse(cof, pe).expect("cofactor is a unit");
                PrimePowerPart {
                    p,
                    pe,
                    even_exp: e % 2 == 0,
                    cof_inv_sq: mul_mod(cof_inv, cof_inv, pe),
                    tab: RootTable::new(pe),
                    units: units_with_inverses(pe),
                }
            })
            .collect();
        KloostermanCtx { parts, q: fm.q }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `S(a,b;q)` via twisted multiplicativity:
    /// `S(a,b;q1q2) = S(a*inv(q2)^2, b; q1) * S(a*inv(q1)^2, b; q2)`.
    ///
    /// Prime-power parts `p^(2k)` vanish identically when exactly one of the
    /// two local arguments is divisible by `p`, and that zero is returned
    /// exactly.
    pub fn eval(&self, a: u64, b: u64) -> ExpSumValue {
        let mut acc = ExpSumValue::ONE;
        for part in &self.parts {
            let a_loc = mul_mod(a % part.pe, part.cof_inv_sq, part.pe);
            let b_loc = b % part.pe;
            if part.even_exp && ((a_loc % part.p == 0) != (b_loc % part.p == 0)) {
                return ExpSumValue::ZERO;
            }
            let local = kloosterman_with(a_loc, b_loc, part.pe, &part.tab, &part.units);
            acc = acc.mul(&local);
        }
        acc
    }
}

/// Kloosterman sum via the factored modulus.
pub fn kloosterman_fast(a: u64, b: u64, fm: &FactoredModulus) -> ExpSumValue {
    KloostermanCtx::new(fm).eval(a, b)
}

/// Gauss sum `tau_chi = sum_a chi(a) e(a/q)`.
pub fn gauss_sum_tau(chi: &CharacterTable) -> ExpSumValue {
    let q = chi.q;
    let tab = RootTable::new(q);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0u64;
    for (a, &v) in chi.values.iter().enumerate() {
        if v != Complex64::new(0.0, 0.0) {
            acc += v * tab.e(a as u64);
            terms += 1;
        }
    }
    ExpSumValue {
        re: acc.re,
        im: acc.im,
        err: 2.0 * terms as f64 * TABLE_EPS,
    }
}

/// Per-modulus evaluation context: root table plus the unit/inverse list,
/// shared across many parameter choices in a sweep.
pub struct ModCtx {
    pub q: u64,
    /// Radical of `q`.
    pub qstar: u64,
    tab: RootTable,
    units: Vec<(u64, u64)>,
}

impl ModCtx {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1);
        ModCtx {
            q,
            qstar: arith::factor(q).expect("q within ceiling").qstar,
            tab: RootTable::new(q),
            units: units_with_inverses(q),
        }
    }
}

/// Salie-type sum over units: `sum* e_q(gamma*inv(s)^2 + mu*s)`.
pub fn salie_type_s(gamma: i64, mu: i64, q: u64) -> ExpSumValue {
    salie_type_s_ctx(gamma, mu, &ModCtx::new(q))
}

/// [`salie_type_s`] against a shared context.
pub fn salie_type_s_ctx(gamma: i64, mu: i64, ctx: &ModCtx) -> ExpSumValue {
    let q = ctx.q;
    let g = reduce_signed(gamma, q);
    let m = reduce_signed(mu, q);
    let mut re = 0.0;
    let mut im = 0.0;
    for &(x, xi) in &ctx.units {
        let idx = (mul_mod(g, mul_mod(xi, xi, q), q) + mul_mod(m, x, q)) % q;
        let z = ctx.tab.e(idx);
        re += z.re;
        im += z.im;
    }
    ExpSumValue {
        re,
        im,
        err: ctx.units.len() as f64 * TABLE_EPS,
    }
}

/// Integer polynomial `P(x) = 1 + c1 x + ... + c_{k-1} x^{k-1}`; the constant
/// term is pinned to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolySpec {
    coeffs: Vec<i64>,
}

impl PolySpec {
    pub fn new(coeffs: Vec<i64>) -> Self {
        PolySpec { coeffs }
    }

    /// `P = 1`.
    pub fn one() -> Self {
        PolySpec { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Horner evaluation of `P(x) mod q`.
    pub fn eval_mod(&self, x: u64, q: u64) -> u64 {
        let x = x % q;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mul_mod(acc, x, q) + reduce_signed(c, q)) % q;
        }
        (mul_mod(acc, x, q) + 1) % q
    }
}

/// Polynomial Gauss sum over a full residue system:
/// `sum_{s mod q} e_q(a1*s + a2*s^2*P(s*qstar))` with `qstar` the radical of `q`.
pub fn poly_gauss_frak_s(a1: i64, a2: i64, q: u64, poly: &PolySpec) -> ExpSumValue {
    poly_gauss_frak_s_ctx(a1, a2, &ModCtx::new(q), poly)
}

/// [`poly_gauss_frak_s`] against a shared context.
pub fn poly_gauss_frak_s_ctx(a1: i64, a2: i64, ctx: &ModCtx, poly: &PolySpec) -> ExpSumValue {
    let q = ctx.q;
    let qstar = ctx.qstar % q;
    let u1 = reduce_signed(a1, q);
    let u2 = reduce_signed(a2, q);
    let mut re = 0.0;
    let mut im = 0.0;
    for s in 0..q {
        let pv = poly.eval_mod(mul_mod(s, qstar, q), q);
        let quad = mul_mod(u2, mul_mod(mul_mod(s, s, q), pv, q), q);
        let idx = (mul_mod(u1, s, q) + quad) % q;
        let z = ctx.tab.e(idx);
        re += z.re;
        im += z.im;
    }
    ExpSumValue {
        re,
        im,
        err: q as f64 * TABLE_EPS,
    }
}

/// Constrained unit sum
/// `U(gamma, mu, rho, q) = sum*_{u mod q, mu*u - gamma*inv(u)^2 = 0 mod rho}
///  e_{q rho}(gamma*inv(u)^2 + 2*mu*u)`,
/// with `inv(u)` taken mod `q*rho`. Requires `rho | q` and `3 !| rho`; the
/// summand is well defined on residues mod `q` exactly on the constrained set.
pub fn constrained_u(gamma: i64, mu: i64, rho: u64, q: u64) -> Result<ExpSumValue> {
    Ok(constrained_u_ctx(gamma, mu, &ConstrainedCtx::new(rho, q)?))
}

/// Tables for the constrained sum at one `(rho, q)` pair: the phase lives
/// mod `q*rho`, the units and their `q*rho`-inverses are shared.
pub struct ConstrainedCtx {
    pub q: u64,
    pub rho: u64,
    qr: u64,
    tab: RootTable,
    /// `(u, inv(u) mod q*rho)` over the units of `q`.
    units: Vec<(u64, u64)>,
}

impl ConstrainedCtx {
    pub fn new(rho: u64, q: u64) -> Result<Self> {
        if rho == 0 || q == 0 {
            return Err(Error::Zero);
        }
        if rho % 3 == 0 {
            return Err(Error::RhoDivisibleByThree(rho));
        }
        if q % rho != 0 {
            return Err(Error::RhoNotDivisor { rho, q });
        }
        let qr = q.checked_mul(rho).ok_or(Error::Overflow)?;
        let units = if q == 1 {
            Vec::new()
        } else {
            (1..q)
                .filter(|&u| gcd(u, q) == 1)
                .map(|u| {
                    let inv = mod_inverse(u, qr).expect("unit mod q is a unit mod q*rho");
                    (u, inv)
                })
                .collect()
        };
        Ok(ConstrainedCtx {
            q,
            rho,
            qr,
            tab: RootTable::new(qr),
            units,
        })
    }
}

/// [`constrained_u`] against a shared context.
pub fn constrained_u_ctx(gamma: i64, mu: i64, ctx: &ConstrainedCtx) -> ExpSumValue {
    if ctx.q == 1 {
        return ExpSumValue::ONE;
    }
    let (rho, qr) = (ctx.rho, ctx.qr);
    let g = reduce_signed(gamma, qr);
    let m = reduce_signed(mu, qr);
    let g_rho = g % rho;
    let m_rho = m % rho;
    let mut re = 0.0;
    let mut im = 0.0;
    let mut terms = 0u64;
    for &(u, ubar) in &ctx.units {
        if rho > 1 {
            let lhs = mul_mod(m_rho, u % rho, rho);
            let rhs = mul_mod(g_rho, mul_mod(ubar % rho, ubar % rho, rho), rho);
            if (lhs + rho - rhs) % rho != 0 {
                continue;
            }
        }
        let quad = mul_mod(g, mul_mod(ubar, ubar, qr), qr);
        let lin = mul_mod(m, u, qr);
        let idx = ((quad + lin) % qr + lin) % qr;
        let z = ctx.tab.e(idx);
        re += z.re;
        im += z.im;
        terms += 1;
    }
    ExpSumValue {
        re,
        im,
        err: terms as f64 * TABLE_EPS,
    }
}
