//! The quartic Kloosterman average
//! `G_q(b) = sum_{h mod q} prod_i S(h, inv(b_i); q)`,
//! the paired-tuple set `D(p)`, the counting functions `N1`/`N2`, and the
//! averaged-bound machinery around `A(q) = sum_{b_i <= B} |G_q(b)|`.

use crate::arith::{factor, gcd, is_prime, mod_inverse, mul_mod};
use crate::error::{Error, Result};
use crate::expsum::{units_with_inverses, ExpSumValue, RootTable, TABLE_EPS};
use crate::util::{fit_loglog_slope, pairwise_sum, parallel_map_indexed};

/// A 4-tuple of positive integers; coprimality to the working modulus is
/// validated by each operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BTuple(pub [u64; 4]);

impl BTuple {
    pub fn new(b: [u64; 4]) -> Result<Self> {
        if b.contains(&0) {
            return Err(Error::Zero);
        }
        Ok(BTuple(b))
    }

    fn check_coprime(&self, q: u64) -> Result<()> {
        for &b in &self.0 {
            if gcd(b % q.max(1), q) != 1 && q > 1 {
                return Err(Error::NotCoprimeToModulus { b, q });
            }
        }
        Ok(())
    }
}

/// Rows of `S(h, c; q)` over all `h`, for a fixed second argument `c`.
/// Kloosterman sums are real, so only the cosine part is accumulated.
fn kloosterman_row(c: u64, q: u64, tab: &RootTable, units: &[(u64, u64)]) -> Vec<f64> {
    let mut row = vec![0.0f64; q as usize];
    for &(x, xi) in units {
        let base = mul_mod(c, xi, q);
        let mut idx = base as usize;
        let step = x as usize;
        let qd = q as usize;
        for slot in row.iter_mut() {
            *slot += tab.e(idx as u64).re;
            idx += step;
            if idx >= qd {
                idx -= qd;
            }
        }
    }
    row
}

/// `G_q(b)` summed directly: four Kloosterman vectors over all `h`, then the
/// product sum. Real within the accumulated error estimate.
pub fn g_naive(q: u64, b: &BTuple) -> Result<ExpSumValue> {
    if q == 0 {
        return Err(Error::Zero);
    }
    b.check_coprime(q)?;
    if q == 1 {
        return Ok(ExpSumValue::ONE);
    }
    let tab = RootTable::new(q);
    let units = units_with_inverses(q);
    // S(h, c; q) for all h, per distinct inverse argument; complex to keep
    // an honest imaginary residual for the reality check
    let mut args = [0u64; 4];
    for (i, &bi) in b.0.iter().enumerate() {
        args[i] = mod_inverse(bi % q, q)?;
    }
    let mut distinct: Vec<u64> = args.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let rows: Vec<(u64, Vec<ExpSumValue>)> = distinct
        .iter()
        .map(|&c| {
            let mut row = vec![ExpSumValue::ZERO; q as usize];
            for &(x, xi) in &units {
                let base = mul_mod(c, xi, q);
                let mut idx = base;
                for slot in row.iter_mut() {
                    let z = tab.e(idx);
                    slot.re += z.re;
                    slot.im += z.im;
                    idx += x;
                    if idx >= q {
                        idx -= q;
                    }
                }
            }
            for slot in row.iter_mut() {
                slot.err = units.len() as f64 * TABLE_EPS;
            }
            (c, row)
        })
        .collect();
    let row_of = |c: u64| -> &[ExpSumValue] {
        &rows[distinct.binary_search(&c).expect("present")].1
    };
    let (r0, r1, r2, r3) = (
        row_of(args[0]),
        row_of(args[1]),
        row_of(args[2]),
        row_of(args[3]),
    );
    let mut acc = ExpSumValue::ZERO;
    for h in 0..q as usize {
        let prod = r0[h].mul(&r1[h]).mul(&r2[h]).mul(&r3[h]);
        acc.re += prod.re;
        acc.im += prod.im;
        acc.err += prod.err;
    }
    Ok(acc)
}

/// Result of a rectangular `G_q` sweep over `1 <= b_i <= B`.
#[derive(Debug, Clone)]
pub struct GSweep {
    pub q: u64,
    pub bmax: u64,
    /// `(tuple, |G_q(tuple)|)` in lexicographic tuple order, coprime tuples only.
    pub entries: Vec<([u64; 4], f64)>,
    /// Number of grid tuples skipped for sharing a factor with `q`.
    pub skipped: u64,
}

/// Sweep `|G_q(b)|` over the full coprime grid `1 <= b_i <= B` via a
/// precomputed Kloosterman matrix. Non-coprime tuples are skipped and
/// counted, matching the starred-sum convention.
pub fn g_sweep(q: u64, bmax: u64, threads: usize) -> Result<GSweep> {
    if q == 0 || bmax == 0 {
        return Err(Error::Zero);
    }
    if bmax > q {
        return Err(Error::BExceedsQ { b: bmax, q });
    }
    let bs: Vec<u64> = (1..=bmax).filter(|&b| q == 1 || gcd(b, q) == 1).collect();
    let skipped = bmax.pow(4) - (bs.len() as u64).pow(4);
    if q == 1 {
        // every tuple contributes the empty-modulus value 1
        let mut entries = Vec::new();
        for &b1 in &bs {
            for &b2 in &bs {
                for &b3 in &bs {
                    for &b4 in &bs {
                        entries.push(([b1, b2, b3, b4], 1.0));
                    }
                }
            }
        }
        return Ok(GSweep {
            q,
            bmax,
            entries,
            skipped,
        });
    }
    let tab = RootTable::new(q);
    let units = units_with_inverses(q);
    let rows: Vec<Vec<f64>> = bs
        .iter()
        .map(|&b| {
            let inv = mod_inverse(b, q).expect("b is coprime to q");
            kloosterman_row(inv, q, &tab, &units)
        })
        .collect();
    let n = bs.len();
    let qd = q as usize;
    let values: Vec<Vec<([u64; 4], f64)>> = parallel_map_indexed(n, threads, |i1| {
        let r1 = &rows[i1];
        let mut out = Vec::with_capacity(n * n * n);
        for (i2, r2) in rows.iter().enumerate() {
            // product of the first two rows is shared across the inner loops
            let r12: Vec<f64> = (0..qd).map(|h| r1[h] * r2[h]).collect();
            for (i3, r3) in rows.iter().enumerate() {
                for (i4, r4) in rows.iter().enumerate() {
                    let mut g = 0.0;
                    for h in 0..qd {
                        g += r12[h] * r3[h] * r4[h];
                    }
                    out.push(([bs[i1], bs[i2], bs[i3], bs[i4]], g.abs()));
                }
            }
        }
        out
    });
    let entries: Vec<([u64; 4], f64)> = values.into_iter().flatten().collect();
    Ok(GSweep {
        q,
        bmax,
        entries,
        skipped,
    })
}

/// Whether every component of `b` pairs with another one mod `p` (the fully
/// paired set `D(p)`).
pub fn in_d(p: u64, b: &BTuple) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r: Vec<u64> = b.0.iter().map(|&x| x % p).collect();
    Ok((0..4).all(|i| (0..4).any(|j| j != i && r[i] == r[j])))
}

/// Square-root lookup over the units of `rho`: `roots[t]` lists the units
/// whose square is `t`.
fn unit_square_roots(rho: u64, units: &[(u64, u64)]) -> Vec<Vec<u64>> {
    let mut roots = vec![Vec::new(); rho as usize];
    for &(x, _) in units {
        roots[mul_mod(x, x, rho) as usize].push(x);
    }
    roots
}

/// `N1(rho, b)`: solutions `(s, s_1..s_4)` over units mod `rho` of
/// `sum s_i = 0` and `s s_i^2 = inv(b_i)` (all mod `rho`).
pub fn n1_count(rho: u64, b: &BTuple) -> Result<u64> {
    if rho == 0 {
        return Err(Error::Zero);
    }
    b.check_coprime(rho)?;
    if rho == 1 {
        return Ok(1);
    }
    let units = units_with_inverses(rho);
    let roots = unit_square_roots(rho, &units);
    let mut binv = [0u64; 4];
    for (i, &bi) in b.0.iter().enumerate() {
        binv[i] = mod_inverse(bi % rho, rho)?;
    }
    let mut count = 0u64;
    for &(_, sbar) in &units {
        // s s_i^2 = inv(b_i)  <=>  s_i^2 = sbar * inv(b_i)
        let r = |i: usize| &roots[mul_mod(sbar, binv[i], rho) as usize];
        for &s1 in r(0) {
            for &s2 in r(1) {
                let partial = (s1 + s2) % rho;
                for &s3 in r(2) {
                    let partial = (partial + s3) % rho;
                    for &s4 in r(3) {
                        if (partial + s4) % rho == 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `N2(rho, rhostar, b)`: solutions `(u, u_1..u_4)` over units mod `rho` of
/// `u u_i = inv(b_i) inv(u_i) (mod rho)` and
/// `sum (u u_i + inv(b_i) inv(u_i)) = 0 (mod rho rhostar)`, with canonical
/// lifts and inverses taken mod `rho rhostar`. `rhostar` must be the radical
/// of `rho`.
pub fn n2_count(rho: u64, rhostar: u64, b: &BTuple) -> Result<u64> {
    if rho == 0 || rhostar == 0 {
        return Err(Error::Zero);
    }
    let radical = factor(rho)?.qstar;
    if rhostar != radical {
        return Err(Error::BadRadical {
            got: rhostar,
            want: radical,
        });
    }
    b.check_coprime(rho)?;
    if rho == 1 {
        return Ok(1);
    }
    let m = rho.checked_mul(rhostar).ok_or(Error::Overflow)?;
    let units = units_with_inverses(rho);
    let roots = unit_square_roots(rho, &units);
    let mut binv_m = [0u64; 4];
    for (i, &bi) in b.0.iter().enumerate() {
        binv_m[i] = mod_inverse(bi % m, m)?;
    }
    let mut count = 0u64;
    for &(u, ubar) in &units {
        // membership weight of one candidate u_i, mod rho*rhostar
        let weight = |i: usize, ui: u64| -> u64 {
            let ui_inv_m = mod_inverse(ui, m).expect("unit");
            (mul_mod(u, ui, m) + mul_mod(binv_m[i], ui_inv_m, m)) % m
        };
        // u u_i = inv(b_i) inv(u_i) (mod rho)  <=>  u_i^2 = ubar inv(b_i)
        let mut cand: [Vec<u64>; 4] = Default::default();
        let mut empty = false;
        for i in 0..4 {
            let rs = &roots[mul_mod(ubar, binv_m[i] % rho, rho) as usize];
            if rs.is_empty() {
                empty = true;
                break;
            }
            cand[i] = rs.iter().map(|&ui| weight(i, ui)).collect();
        }
        if empty {
            continue;
        }
        for &w1 in &cand[0] {
            for &w2 in &cand[1] {
                let p12 = (w1 + w2) % m;
                for &w3 in &cand[2] {
                    let p123 = (p12 + w3) % m;
                    for &w4 in &cand[3] {
                        if (p123 + w4) % m == 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `A(q) = sum over the coprime grid of |G_q(b)|`, reduced along the fixed
/// pairwise tree so the result is bit-stable across worker counts.
pub fn a_sum(q: u64, bmax: u64, threads: usize) -> Result<f64> {
    let sweep = g_sweep(q, bmax, threads)?;
    let vals: Vec<f64> = sweep.entries.iter().map(|&(_, v)| v).collect();
    Ok(pairwise_sum(&vals))
}

/// The three-term averaged envelope
/// `B^4 q^{5/2} qring^{-1/2} + B^2 q^3 qring + B q^{7/2} qring^{1/2}`.
pub fn theorem12_envelope(q: u64, bmax: u64) -> Result<f64> {
    if q == 0 || bmax == 0 {
        return Err(Error::Zero);
    }
    if bmax > q {
        return Err(Error::BExceedsQ { b: bmax, q });
    }
    let qring = factor(q)?.qring as f64;
    let qf = q as f64;
    let bf = bmax as f64;
    Ok(bf.powi(4) * qf.powf(2.5) / qring.sqrt()
        + bf.powi(2) * qf.powi(3) * qring
        + bf * qf.powf(3.5) * qring.sqrt())
}

/// One `(q, B)` point of an envelope comparison.
#[derive(Debug, Clone, Copy)]
pub struct BoundPoint {
    pub q: u64,
    pub bmax: u64,
    pub value: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Averaged-bound comparison across a grid of moduli.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub grid: Vec<BoundPoint>,
    pub fitted_slope: Option<f64>,
    pub max_ratio: f64,
}

/// `A(q)` against the three-term envelope over a modulus grid, with the
/// fitted log-log slope of the ratio. `bmax_override` replaces the default
/// `B = min(q, 12)` and must not exceed any grid modulus.
pub fn theorem12_report(
    qs: &[u64],
    bmax_override: Option<u64>,
    threads: usize,
) -> Result<BoundReport> {
    let mut grid = Vec::with_capacity(qs.len());
    for &q in qs {
        let bmax = match bmax_override {
            Some(b) => {
                if b > q {
                    return Err(Error::BExceedsQ { b, q });
                }
                b
            }
            None => q.min(12),
        };
        let value = a_sum(q, bmax, threads)?;
        let envelope = theorem12_envelope(q, bmax)?;
        grid.push(BoundPoint {
            q,
            bmax,
            value,
            envelope,
            ratio: value / envelope,
        });
    }
    let pts: Vec<(f64, f64)> = grid.iter().map(|p| (p.q as f64, p.ratio)).collect();
    let fitted_slope = fit_loglog_slope(&pts);
    let max_ratio = grid.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(BoundReport {
        grid,
        fitted_slope,
        max_ratio,
    })
}

/// Maximum of `|G_p(b)|` over the two tuple classes for a prime modulus:
/// returns `(max over D(p), max off D(p))`.
///
/// Scans one representative per scaling-and-permutation orbit: `G_p` is
/// invariant under permutations of `b` and under common unit scaling, so
/// tuples of inverse arguments `(1, c2 <= c3 <= c4)` cover every class.
pub fn g_prime_max_split(p: u64) -> Result<(f64, f64)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let tab = RootTable::new(p);
    let units = units_with_inverses(p);
    // T[m] = S(1, m; p); S(h, c; p) = T[h c mod p] for unit h
    let mut t = vec![0.0f64; p as usize];
    for &(x, xi) in &units {
        let mut idx = x as usize;
        let step = xi as usize;
        let pd = p as usize;
        for slot in t.iter_mut() {
            *slot += tab.e(idx as u64).re;
            idx += step;
            if idx >= pd {
                idx -= pd;
            }
        }
    }
    let pd = p as usize;
    let mut max_in = 0.0f64;
    let mut max_out = 0.0f64;
    for c2 in 1..pd {
        for c3 in c2..pd {
            for c4 in c3..pd {
                // h = 0 contributes a product of four Ramanujan sums (-1)^4
                let mut g = 1.0f64;
                let (mut i2, mut i3, mut i4) = (0usize, 0usize, 0usize);
                for i1 in 1..pd {
                    i2 += c2;
                    if i2 >= pd {
                        i2 -= pd;
                    }
                    i3 += c3;
                    if i3 >= pd {
                        i3 -= pd;
                    }
                    i4 += c4;
                    if i4 >= pd {
                        i4 -= pd;
                    }
                    g += t[i1] * t[i2] * t[i3] * t[i4];
                }
                let a = g.abs();
                // sorted tuple (1, c2, c3, c4) is fully paired iff the first
                // and second halves pair up
                if c2 == 1 && c3 == c4 {
                    max_in = max_in.max(a);
                } else {
                    max_out = max_out.max(a);
                }
            }
        }
    }
    Ok((max_in, max_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::kloosterman_naive;

    fn g_brute(q: u64, b: &BTuple) -> ExpSumValue {
        // direct product of four independently evaluated Kloosterman sums
        let mut acc = ExpSumValue::ZERO;
        for h in 0..q {
            let mut prod = ExpSumValue::ONE;
            for &bi in &b.0 {
                let inv = mod_inverse(bi % q, q).unwrap();
                prod = prod.mul(&kloosterman_naive(h, inv, q));
            }
            acc.re += prod.re;
            acc.im += prod.im;
            acc.err += prod.err;
        }
        acc
    }

    #[test]
    fn g_naive_mod5_all_ones() {
        let b = BTuple::new([1, 1, 1, 1]).unwrap();
        let v = g_naive(5, &b).unwrap();
        assert!((v.re - 160.0).abs() < 1e-9, "G_5(1,1,1,1) = {}", v.re);
        assert!(v.im.abs() <= v.err);
        let brute = g_brute(5, &b);
        assert!((v.re - brute.re).abs() < 1e-9);
    }

    #[test]
    fn g_naive_matches_brute_on_composites() {
        for (q, b) in [
            (6u64, [1u64, 5, 1, 5]),
            (9, [1, 2, 4, 7]),
            (12, [1, 5, 7, 11]),
            (15, [2, 7, 11, 13]),
        ] {
            let b = BTuple::new(b).unwrap();
            let v = g_naive(q, &b).unwrap();
            let w = g_brute(q, &b);
            assert!(
                (v.re - w.re).abs() < 1e-7 && (v.im - w.im).abs() < 1e-7,
                "q={q}"
            );
        }
    }

    #[test]
    fn g_naive_edges() {
        let b = BTuple::new([3, 7, 9, 11]).unwrap();
        assert_eq!(g_naive(1, &b).unwrap().re, 1.0);
        assert!(matches!(
            g_naive(9, &BTuple::new([3, 1, 1, 1]).unwrap()),
            Err(Error::NotCoprimeToModulus { b: 3, q: 9 })
        ));
        assert!(matches!(BTuple::new([0, 1, 1, 1]), Err(Error::Zero)));
    }

    #[test]
    fn g_multiplicative() {
        let b = BTuple::new([1, 2, 4, 7]).unwrap();
        let g15 = g_naive(15, &b).unwrap();
        let g3 = g_naive(3, &b).unwrap();
        let g5 = g_naive(5, &b).unwrap();
        assert!(
            (g15.re - g3.re * g5.re).abs() < 1e-6,
            "{} vs {}",
            g15.re,
            g3.re * g5.re
        );
    }

    #[test]
    fn g_vanishes_when_n1_does() {
        // mod 3 every unit square is 1, so mixed tuples kill N1 and G_9
        let b = BTuple::new([1, 1, 1, 2]).unwrap();
        assert_eq!(n1_count(3, &b).unwrap(), 0);
        let g = g_naive(9, &b).unwrap();
        assert!(g.abs() < 1e-9, "|G_9| = {}", g.abs());
    }

    #[test]
    fn sweep_matches_naive_pointwise() {
        let sweep = g_sweep(5, 2, 1).unwrap();
        assert_eq!(sweep.entries.len(), 16);
        assert_eq!(sweep.skipped, 0);
        for &(b, v) in &sweep.entries {
            let g = g_naive(5, &BTuple(b)).unwrap();
            assert!((v - g.abs()).abs() < 1e-9, "b={b:?}");
        }
        // single coprime tuple at q=3, B=1
        let sweep = g_sweep(3, 1, 1).unwrap();
        assert_eq!(sweep.entries.len(), 1);
        assert_eq!(sweep.entries[0].0, [1, 1, 1, 1]);
    }

    #[test]
    fn sweep_skips_and_counts_noncoprime() {
        let sweep = g_sweep(6, 4, 1).unwrap();
        // units below 4 coprime to 6: {1}; skipped = 4^4 - 1
        assert_eq!(sweep.entries.len(), 1);
        assert_eq!(sweep.skipped, 255);
        assert!(matches!(
            g_sweep(5, 6, 1),
            Err(Error::BExceedsQ { b: 6, q: 5 })
        ));
    }

    #[test]
    fn sweep_deterministic_across_threads() {
        let a = g_sweep(45, 8, 1).unwrap();
        for threads in [2, 3, 8] {
            let b = g_sweep(45, 8, threads).unwrap();
            assert_eq!(a.entries.len(), b.entries.len());
            for (x, y) in a.entries.iter().zip(&b.entries) {
                assert_eq!(x.0, y.0);
                assert_eq!(x.1.to_bits(), y.1.to_bits(), "tuple {:?}", x.0);
            }
        }
    }

    #[test]
    fn in_d_examples() {
        let t = |b: [u64; 4]| BTuple::new(b).unwrap();
        assert!(in_d(5, &t([1, 1, 2, 2])).unwrap());
        assert!(!in_d(5, &t([1, 2, 3, 4])).unwrap());
        assert!(in_d(5, &t([1, 6, 2, 7])).unwrap());
        assert!(!in_d(5, &t([1, 1, 1, 2])).unwrap());
        assert!(in_d(5, &t([3, 3, 3, 3])).unwrap());
        assert!(matches!(in_d(6, &t([1, 1, 1, 1])), Err(Error::NotPrime(6))));
    }

    fn n1_brute(rho: u64, b: &BTuple) -> u64 {
        let mut count = 0;
        for s in 0..rho {
            if gcd(s, rho) != 1 {
                continue;
            }
            let sbar = mod_inverse(s, rho).unwrap();
            let ok = |i: usize, si: u64| {
                mul_mod(s, mul_mod(si, si, rho), rho)
                    == mod_inverse(b.0[i] % rho, rho).unwrap()
            };
            for s1 in 1..rho {
                for s2 in 1..rho {
                    for s3 in 1..rho {
                        for s4 in 1..rho {
                            if [s1, s2, s3, s4].iter().all(|&x| gcd(x, rho) == 1)
                                && (s1 + s2 + s3 + s4) % rho == 0
                                && ok(0, s1)
                                && ok(1, s2)
                                && ok(2, s3)
                                && ok(3, s4)
                            {
                                count += 1;
                            }
                        }
                    }
                }
            }
            let _ = sbar;
        }
        count
    }

    #[test]
    fn n1_examples_and_brute_force() {
        let ones = BTuple::new([1, 1, 1, 1]).unwrap();
        assert_eq!(n1_count(1, &ones).unwrap(), 1);
        assert_eq!(n1_count(2, &BTuple::new([1, 3, 5, 7]).unwrap()).unwrap(), 1);
        assert_eq!(n1_count(5, &ones).unwrap(), 12);
        assert_eq!(n1_brute(5, &ones), 12);
        for (rho, b) in [(3u64, [1u64, 2, 1, 2]), (4, [1, 3, 3, 1]), (5, [1, 2, 3, 4])] {
            let b = BTuple::new(b).unwrap();
            assert_eq!(n1_count(rho, &b).unwrap(), n1_brute(rho, &b), "rho={rho}");
        }
        assert!(matches!(
            n1_count(4, &BTuple::new([2, 1, 1, 1]).unwrap()),
            Err(Error::NotCoprimeToModulus { .. })
        ));
    }

    #[test]
    fn n1_multiplicative() {
        for (r1, r2) in [(2u64, 3u64), (3, 5), (4, 5), (5, 7), (8, 9)] {
            let b = BTuple::new([1, 11, 13, 17]).unwrap();
            let lhs = n1_count(r1 * r2, &b).unwrap();
            let rhs = n1_count(r1, &b).unwrap() * n1_count(r2, &b).unwrap();
            assert_eq!(lhs, rhs, "rho = {r1}*{r2}");
        }
    }

    fn n2_brute(rho: u64, rhostar: u64, b: &BTuple) -> u64 {
        let m = rho * rhostar;
        let mut count = 0;
        for u in 1..rho {
            if gcd(u, rho) != 1 {
                continue;
            }
            let mut stack = vec![(0usize, Vec::<u64>::new())];
            while let Some((depth, us)) = stack.pop() {
                if depth == 4 {
                    let total: u64 = us
                        .iter()
                        .enumerate()
                        .map(|(i, &ui)| {
                            let ui_inv = mod_inverse(ui, m).unwrap();
                            let bi_inv = mod_inverse(b.0[i] % m, m).unwrap();
                            (mul_mod(u, ui, m) + mul_mod(bi_inv, ui_inv, m)) % m
                        })
                        .fold(0, |a, x| (a + x) % m);
                    if total == 0 {
                        count += 1;
                    }
                    continue;
                }
                for ui in 1..rho {
                    if gcd(ui, rho) != 1 {
                        continue;
                    }
                    // condition 1 mod rho
                    let bi_inv = mod_inverse(b.0[depth] % rho, rho).unwrap();
                    let ui_inv = mod_inverse(ui, rho).unwrap();
                    if mul_mod(u, ui, rho) != mul_mod(bi_inv, ui_inv, rho) {
                        continue;
                    }
                    let mut next = us.clone();
                    next.push(ui);
                    stack.push((depth + 1, next));
                }
            }
        }
        count
    }

    #[test]
    fn n2_examples_and_brute_force() {
        let ones = BTuple::new([1, 1, 1, 1]).unwrap();
        assert_eq!(n2_count(1, 1, &ones).unwrap(), 1);
        let direct = n2_brute(5, 5, &ones);
        assert_eq!(n2_count(5, 5, &ones).unwrap(), direct);
        for (rho, b) in [(2u64, [1u64, 1, 1, 1]), (3, [1, 2, 2, 1]), (7, [1, 2, 3, 4])] {
            let b = BTuple::new(b).unwrap();
            let rhostar = factor(rho).unwrap().qstar;
            assert_eq!(
                n2_count(rho, rhostar, &b).unwrap(),
                n2_brute(rho, rhostar, &b),
                "rho={rho}"
            );
        }
        assert!(matches!(
            n2_count(4, 4, &ones),
            Err(Error::BadRadical { got: 4, want: 2 })
        ));
    }

    #[test]
    fn n2_membership_is_representative_independent() {
        // replacing u_i by u_i (1 + c p) must not change membership
        let p = 5u64;
        let m = p * p;
        let b = BTuple::new([1, 2, 3, 4]).unwrap();
        let binv: Vec<u64> = b.0.iter().map(|&x| mod_inverse(x % m, m).unwrap()).collect();
        let membership = |u: u64, us: [u64; 4]| -> bool {
            let cond1 = (0..4).all(|i| {
                let ui_inv = mod_inverse(us[i] % p, p).unwrap();
                mul_mod(u, us[i] % p, p)
                    == mul_mod(mod_inverse(b.0[i] % p, p).unwrap(), ui_inv, p)
            });
            let total: u64 = (0..4)
                .map(|i| {
                    let ui_inv = mod_inverse(us[i], m).unwrap();
                    (mul_mod(u, us[i], m) + mul_mod(binv[i], ui_inv, m)) % m
                })
                .fold(0, |a, x| (a + x) % m);
            cond1 && total == 0
        };
        for u in 1..p {
            for u1 in 1..p {
                for u2 in 1..p {
                    for u3 in 1..p {
                        for u4 in 1..p {
                            let base = membership(u, [u1, u2, u3, u4]);
                            for c in 1..p {
                                let lift = |x: u64| x * (1 + c * p) % m;
                                let shifted = membership(u, [lift(u1), lift(u2), lift(u3), lift(u4)]);
                                assert_eq!(base, shifted, "u={u} c={c}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a_sum_examples() {
        let v = a_sum(5, 1, 1).unwrap();
        assert!((v - 160.0).abs() < 1e-8);
        // q=3, B=2: sixteen tuples from {1,2}
        let sweep = g_sweep(3, 2, 1).unwrap();
        assert_eq!(sweep.entries.len(), 16);
        let direct: f64 = sweep.entries.iter().map(|&(_, v)| v).sum();
        assert!((a_sum(3, 2, 1).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn envelope_formula() {
        // q = 25 has empty odd-power kernel
        let e = theorem12_envelope(25, 2).unwrap();
        let expect = 16.0 * 25f64.powf(2.5) + 4.0 * 25f64.powi(3) + 2.0 * 25f64.powf(3.5);
        assert!((e - expect).abs() < 1e-9);
        // q = 8 has kernel 2
        let e = theorem12_envelope(8, 1).unwrap();
        let expect = 8f64.powf(2.5) / 2f64.sqrt() + 8f64.powi(3) * 2.0 + 8f64.powf(3.5) * 2f64.sqrt();
        assert!((e - expect).abs() < 1e-9);
        // for prime q and B = q the quartic term dominates
        let q = 101f64;
        let e = theorem12_envelope(101, 101).unwrap();
        assert!(e < 2.0 * q.powi(4) * q.powf(2.5));
        assert!(e > q.powi(4) * q.powf(2.5));
    }

    #[test]
    fn prime_scan_matches_full_enumeration() {
        // brute force over the whole coprime grid at p = 7
        let p = 7u64;
        let mut max_in = 0.0f64;
        let mut max_out = 0.0f64;
        for b1 in 1..p {
            for b2 in 1..p {
                for b3 in 1..p {
                    for b4 in 1..p {
                        let b = BTuple::new([b1, b2, b3, b4]).unwrap();
                        let g = g_naive(p, &b).unwrap().abs();
                        if in_d(p, &b).unwrap() {
                            max_in = max_in.max(g);
                        } else {
                            max_out = max_out.max(g);
                        }
                    }
                }
            }
        }
        let (scan_in, scan_out) = g_prime_max_split(p).unwrap();
        assert!((scan_in - max_in).abs() < 1e-7, "{scan_in} vs {max_in}");
        assert!((scan_out - max_out).abs() < 1e-7, "{scan_out} vs {max_out}");
    }
}
