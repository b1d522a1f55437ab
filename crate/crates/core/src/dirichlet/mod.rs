//! Dirichlet characters mod q: value tables, parity, conductor, and
//! primitivity, enumerated through the CRT structure of the unit group.

pub mod lvalue;
pub mod moments;

use num_complex::Complex64;

use crate::arith::{self, gcd, pow_mod};
use crate::expsum::RootTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One Dirichlet character mod `q`.
///
/// `values[a]` is `chi(a)`, zero off the units. The conductor is the smallest
/// modulus inducing the character; `primitive` iff it equals `q`.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub q: u64,
    pub values: Vec<Complex64>,
    pub parity: Parity,
    pub conductor: u64,
    pub primitive: bool,
}

impl CharacterTable {
    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.q) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.conductor == 1
    }

    pub fn is_even(&self) -> bool {
        self.parity == Parity::Even
    }
}

/// Generators of the unit group mod a prime power, with their orders.
struct LocalGroup {
    pe: u64,
    orders: Vec<u64>,
    /// Flattened discrete logs: `dlog[a * stride + j]` is the exponent of
    /// generator `j` in `a`; `u32::MAX` off the units.
    dlog: Vec<u32>,
}

fn primitive_root_mod_p(p: u64) -> u64 {
    debug_assert!(p > 2);
    let pm1 = p - 1;
    let fac = arith::factor(pm1).expect("p-1 fits");
    'cand: for g in 2..p {
        for &(r, _) in &fac.factors {
            if pow_mod(g, pm1 / r, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn local_group(p: u64, e: u32) -> LocalGroup {
    let pe = p.pow(e);
    let gens: Vec<(u64, u64)> = if p == 2 {
        match e {
            1 => Vec::new(),
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, pe / 4)],
        }
    } else {
        let mut g = primitive_root_mod_p(p);
        if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
            g += p;
        }
        vec![(g, pe / p * (p - 1))]
    };
    let stride = gens.len();
    let mut dlog = vec![u32::MAX; pe as usize * stride.max(1)];
    match gens.as_slice() {
        [] => {}
        [(g, n)] => {
            let mut val = 1u64;
            for k in 0..*n {
                dlog[val as usize] = k as u32;
                val = val * g % pe;
            }
        }
        [(g0, n0), (g1, n1)] => {
            let mut v0 = 1u64;
            for k0 in 0..*n0 {
                let mut val = v0;
                for k1 in 0..*n1 {
                    dlog[val as usize * 2] = k0 as u32;
                    dlog[val as usize * 2 + 1] = k1 as u32;
                    val = val * g1 % pe;
                }
                v0 = v0 * g0 % pe;
            }
        }
        _ => unreachable!(),
    }
    LocalGroup {
        pe,
        orders: gens.iter().map(|&(_, n)| n).collect(),
        dlog,
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// All `phi(q)` Dirichlet characters mod `q`, in a deterministic order
/// (mixed-radix over the local generator exponents, principal first).
pub fn char_group(q: u64) -> Vec<CharacterTable> {
    assert!(q >= 1);
    if q == 1 {
        return vec![CharacterTable {
            q: 1,
            values: vec![Complex64::new(1.0, 0.0)],
            parity: Parity::Even,
            conductor: 1,
            primitive: true,
        }];
    }
    let fm = arith::factor(q).expect("q within ceiling");
    let locals: Vec<LocalGroup> = fm.factors.iter().map(|&(p, e)| local_group(p, e)).collect();

    let orders: Vec<u64> = locals.iter().flat_map(|l| l.orders.iter().copied()).collect();
    let group_exponent = orders.iter().fold(1u64, |acc, &n| lcm(acc, n));
    let roots = RootTable::new(group_exponent);
    let weights: Vec<u64> = orders.iter().map(|&n| group_exponent / n).collect();

    // per-residue generator exponents, concatenated across the local groups
    let stride = orders.len();
    let mut unit_logs: Vec<u32> = vec![u32::MAX; q as usize * stride.max(1)];
    let mut units: Vec<u64> = Vec::with_capacity(fm.phi as usize);
    for a in 0..q {
        if gcd(a, q) != 1 {
            continue;
        }
        units.push(a);
        let mut j = 0;
        for local in &locals {
            let a_local = (a % local.pe) as usize;
            for jj in 0..local.orders.len() {
                unit_logs[a as usize * stride + j] =
                    local.dlog[a_local * local.orders.len() + jj];
                j += 1;
            }
        }
    }

    let divisors = fm.divisors();
    let mut chars = Vec::with_capacity(fm.phi as usize);
    let mut r = vec![0u64; stride];
    loop {
        // global exponent of chi(a) as a multiple of 1/group_exponent
        let mut exps: Vec<u64> = vec![u64::MAX; q as usize];
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        for &a in &units {
            let mut e = 0u64;
            for j in 0..stride {
                let k = unit_logs[a as usize * stride + j] as u64;
                // (r_j k mod n_j) * (L / n_j), reduced mod L
                e = (e + ((r[j] * k) % group_exponent) * weights[j]) % group_exponent;
            }
            exps[a as usize] = e;
            values[a as usize] = roots.e(e);
        }
        let parity = if exps[(q - 1) as usize] == 0 {
            Parity::Even
        } else {
            Parity::Odd
        };
        let conductor = *divisors
            .iter()
            .find(|&&d| {
                let mut a = 1u64;
                while a < q {
                    if gcd(a, q) == 1 && exps[a as usize] != 0 {
                        return false;
                    }
                    a += d;
                }
                true
            })
            .expect("d = q always induces");
        chars.push(CharacterTable {
            q,
            values,
            parity,
            conductor,
            primitive: conductor == q,
        });

        // odometer over the exponent tuple
        let mut j = 0;
        loop {
            if j == stride {
                return chars;
            }
            r[j] += 1;
            if r[j] < orders[j] {
                break;
            }
            r[j] = 0;
            j += 1;
        }
    }
}
