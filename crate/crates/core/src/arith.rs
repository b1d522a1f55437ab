//! Exact integer arithmetic: factorization, CRT, modular inverses, and the
//! modulus decompositions used throughout the sum evaluators.
//!
//! All residues are canonical representatives in `[0, q)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Hard input ceiling for [`factor`]; an engineering limit, not a
/// mathematical one.
pub const FACTOR_CEILING: u64 = 1 << 63;

const TRIAL_BOUND: u64 = 1_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    gcd(gcd(a, b), c)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

/// Deterministic Miller-Rabin, valid for the full u64 range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

/// Brent-cycle Pollard rho; `n` must be odd, composite, and free of factors
/// below the trial bound.
fn brent_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 22 {
                break;
            }
        }
        if d != 1 && d != n {
            return d;
        }
        c += 1;
    }
}

/// A modulus together with its prime-power factorization and the derived
/// quantities the evaluators need.
///
/// * `qstar`: the radical, i.e. the largest square-free divisor;
/// * `qring`: the product of primes entering `q` with an odd exponent >= 3;
/// * `phi`: Euler's totient;
/// * `phistar`: the number of primitive characters mod `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredModulus {
    pub q: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
    pub qstar: u64,
    pub qring: u64,
    pub phi: u64,
    pub phistar: u64,
}

impl FactoredModulus {
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// All divisors, sorted ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                for i in 0..len {
                    divs.push(divs[i] * pe);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Mobius function of `q`.
    pub fn mu(&self) -> i64 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            return 0;
        }
        if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Factor `n` exactly: trial division below 10^6, then deterministic
/// Miller-Rabin with a Pollard-rho split for any 64-bit cofactor.
pub fn factor(n: u64) -> Result<FactoredModulus> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n > FACTOR_CEILING {
        return Err(Error::AboveCeiling(n));
    }
    let q = n;
    let mut n = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        factors.push((p, e));
    };
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            push(p, e, &mut factors);
        }
    }
    let mut d = 7u64;
    // 2,4-wheel over residues 1,5 mod 6
    let mut step = 4u64;
    while d <= TRIAL_BOUND && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            push(d, e, &mut factors);
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        // Cofactor with no divisor below the trial bound: peel primes off
        // with rho until everything is certified prime.
        let mut stack = vec![n];
        let mut extra: Vec<u64> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime(m) {
                extra.push(m);
            } else {
                let d = brent_rho(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        extra.sort_unstable();
        let mut i = 0;
        while i < extra.len() {
            let p = extra[i];
            let mut e = 0;
            while i < extra.len() && extra[i] == p {
                e += 1;
                i += 1;
            }
            push(p, e, &mut factors);
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);

    let qstar = factors.iter().map(|&(p, _)| p).product();
    let qring = factors
        .iter()
        .filter(|&&(_, e)| e >= 3 && e % 2 == 1)
        .map(|&(p, _)| p)
        .product();
    let phi = factors
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product();
    // phistar is multiplicative: p - 2 at exponent one, p^(e-2)(p-1)^2 above.
    let phistar = factors
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p - 2
            } else {
                p.pow(e - 2) * (p - 1) * (p - 1)
            }
        })
        .product();

    Ok(FactoredModulus {
        q,
        factors,
        qstar,
        qring,
        phi,
        phistar,
    })
}

/// Mobius function.
pub fn mobius(n: u64) -> Result<i64> {
    Ok(factor(n)?.mu())
}

/// Inverse of `a` mod `q`, canonical in `[0, q)`.
pub fn mod_inverse(a: u64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Zero);
    }
    if q == 1 {
        return Ok(0);
    }
    let a0 = a % q;
    let (mut r, mut new_r) = (q as i128, a0 as i128);
    let (mut t, mut new_t) = (0i128, 1i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    if r != 1 {
        return Err(Error::NotInvertible {
            a: a0,
            q,
            g: r as u64,
        });
    }
    if t < 0 {
        t += q as i128;
    }
    Ok(t as u64)
}

/// The unique residue mod `q1*q2` congruent to `r1` mod `q1` and `r2` mod
/// `q2`; inputs are reduced first.
pub fn crt_pair(r1: u64, q1: u64, r2: u64, q2: u64) -> Result<u64> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::Zero);
    }
    if gcd(q1, q2) != 1 {
        return Err(Error::ModuliNotCoprime(q1, q2));
    }
    let m = q1.checked_mul(q2).ok_or(Error::Overflow)?;
    let r1 = r1 % q1;
    let r2 = r2 % q2;
    let q1_inv = mod_inverse(q1 % q2, q2)?;
    let diff = (r2 + q2 - r1 % q2) % q2;
    let k = mul_mod(diff, q1_inv, q2);
    Ok((r1 as u128 + q1 as u128 * k as u128) as u64 % m)
}

/// Coprime split of `q` into a square-free part, a square part, and the
/// odd-power-kernel part, with the odd power of 3 (if any) folded into the
/// square bucket.
///
/// `q = rho * c^2 * d^2 * dstar` when `three_odd` is false and
/// `q = rho * 3c^2 * d^2 * dstar` when it is true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SixOneDecomposition {
    pub rho: u64,
    pub c: u64,
    pub d: u64,
    pub dstar: u64,
    pub three_odd: bool,
}

pub fn decompose_six_one(fm: &FactoredModulus) -> SixOneDecomposition {
    let mut rho = 1u64;
    let mut c = 1u64;
    let mut d = 1u64;
    let mut dstar = 1u64;
    let mut three_odd = false;
    for &(p, e) in &fm.factors {
        if e == 1 {
            rho *= p;
        } else if e % 2 == 0 {
            c *= p.pow(e / 2);
        } else if p == 3 {
            // 3^(2k+1) = 3 * (3^k)^2 goes to the square bucket.
            three_odd = true;
            c *= 3u64.pow((e - 1) / 2);
        } else {
            d *= p.pow((e - 1) / 2);
            dstar *= p;
        }
    }
    SixOneDecomposition {
        rho,
        c,
        d,
        dstar,
        three_odd,
    }
}
