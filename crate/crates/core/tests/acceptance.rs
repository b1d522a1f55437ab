//! Acceptance gates, one test per criterion. Each prints a single
//! `criterion NN [PASS|FAIL]` line (visible with `--nocapture`) before
//! asserting, so the full scorecard survives a red run.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use kappa_core::arith::{factor, gcd};
use kappa_core::dirichlet::lvalue::{
    hurwitz_zeta_half, l_central_afe_sq_with, l_central_hurwitz_with_table, zeta_half_table,
    AfeContext,
};
use kappa_core::dirichlet::moments::{
    first_moment, nonvanishing_census, proportion_from_thetas, second_moment,
    second_moment_prediction, tau_identity_check, theta_choice_high, theta_choice_low,
    theta_constraints_hold, theta_optimizer, MollifierConfig, Rat,
};
use kappa_core::dirichlet::char_group;
use kappa_core::expsum::{gauss_sum_tau, kloosterman_naive, KloostermanCtx};
use kappa_core::harness::suites::{
    lemma51_suite, lemma52_suite, lemma53_suite, prop42_suite, weil_suite, THM12_DEFAULT_GRID,
    THM12_FROZEN_RATIO_MAX,
};
use kappa_core::harness::{csv_bytes, PointRng};
use kappa_core::quartic::{g_naive, g_sweep, theorem12_report, BTuple};

fn report(id: u32, pass: bool, detail: &str) {
    println!(
        "criterion {id:02} [{}] {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn c01_kloosterman_fast_vs_naive() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..2000u64 {
        let mut rng = PointRng::new(0, &[101, k]);
        let q = 1 + rng.below(5000);
        let a = rng.below(q);
        let b = rng.below(q);
        let fm = factor(q).unwrap();
        let fast = KloostermanCtx::new(&fm).eval(a, b);
        let naive = kloosterman_naive(a, b, q);
        let diff = (fast.re - naive.re).hypot(fast.im - naive.im);
        worst = worst.max(diff);
        assert!(diff < 1e-6, "q={q} a={a} b={b} diff={diff}");
    }
    // exact vanishing at even prime powers with p | a
    let mut zero_cases = 0u64;
    'outer: for p in [2u64, 3, 5, 7] {
        let mut k = 1;
        while p.pow(2 * k) <= 5000 {
            let q = p.pow(2 * k);
            let fm = factor(q).unwrap();
            let ctx = KloostermanCtx::new(&fm);
            for j in 1..=u64::MAX {
                let a = j * p;
                if a >= q {
                    break;
                }
                let mut rng = PointRng::new(0, &[102, q, j]);
                let b = rng.unit_below(q);
                let v = ctx.eval(a, b);
                assert_eq!((v.re, v.im), (0.0, 0.0), "S({a},{b};{q}) must vanish");
                zero_cases += 1;
                if zero_cases >= 100 {
                    break 'outer;
                }
            }
            k += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = elapsed < Duration::from_secs(30) && zero_cases >= 100;
    report(
        1,
        pass,
        &format!(
            "fast vs naive on 2000 triples, worst diff {worst:.2e}; {zero_cases} exact zeros; {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
    assert!(zero_cases >= 100);
    assert!(
        elapsed < Duration::from_secs(30),
        "runtime {:?} exceeds 30 s",
        elapsed
    );
}

#[test]
fn c02_weil_envelope() {
    let out = weil_suite(1, 2000, 100, 0);
    let violations = out.points.iter().filter(|(_, ok)| !ok).count();
    report(
        2,
        out.pass,
        &format!(
            "{} sampled points up to q = 2000, {violations} violations",
            out.points.len()
        ),
    );
    assert_eq!(violations, 0);
    assert!(out.pass);
}

#[test]
fn c03_multiplicativity() {
    let mut pairs = 0u64;
    let mut worst = 0.0f64;
    let mut t = 0u64;
    while pairs < 50 {
        let mut rng = PointRng::new(0, &[103, t]);
        t += 1;
        let q1 = 2 + rng.below(19);
        let q2 = 2 + rng.below(400 / q1 - 1);
        if gcd(q1, q2) != 1 {
            continue;
        }
        let q = q1 * q2;
        let b = BTuple::new([
            rng.unit_below(q),
            rng.unit_below(q),
            rng.unit_below(q),
            rng.unit_below(q),
        ])
        .unwrap();
        let g = g_naive(q, &b).unwrap();
        let g1 = g_naive(q1, &b).unwrap();
        let g2 = g_naive(q2, &b).unwrap();
        let prod = g1.as_complex() * g2.as_complex();
        let diff = (g.as_complex() - prod).norm();
        worst = worst.max(diff);
        assert!(diff <= 1e-5, "q={q1}x{q2} diff={diff}");
        pairs += 1;
    }
    report(
        3,
        true,
        &format!("50 coprime pairs with q1*q2 <= 400, worst |G_q - G_q1 G_q2| = {worst:.2e}"),
    );
}

#[test]
fn c04_prop42_slopes() {
    let start = Instant::now();
    let out = prop42_suite(11, 199);
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed < Duration::from_secs(300);
    report(
        4,
        pass,
        &format!("{}; single-threaded {:.1}s", out.summary[0], elapsed.as_secs_f64()),
    );
    assert!(out.pass, "{}", out.summary[0]);
    assert!(
        elapsed < Duration::from_secs(300),
        "runtime {:?} exceeds 5 min",
        elapsed
    );
}

#[test]
fn c05_theorem12_trend() {
    let rep = theorem12_report(&THM12_DEFAULT_GRID, None, 1).unwrap();
    let ratio_ok = rep.max_ratio <= THM12_FROZEN_RATIO_MAX;
    let slope = rep.fitted_slope.expect("seven grid points");
    let slope_ok = slope <= 0.0;
    report(
        5,
        ratio_ok && slope_ok,
        &format!(
            "max ratio {:.4} vs frozen {THM12_FROZEN_RATIO_MAX} ({}); fitted slope {slope:+.3} vs limit 0 ({})",
            rep.max_ratio,
            if ratio_ok { "ok" } else { "exceeded" },
            if slope_ok { "ok" } else { "positive" },
        ),
    );
    assert!(ratio_ok, "max ratio {} above frozen constant", rep.max_ratio);
    // The prime point q = 101 runs at ratio ~0.90 while every prime-power
    // point shows near-total cancellation (ratios 0.015-0.14), so the fitted
    // slope across the stated grid is strongly positive. The per-point
    // values are cross-checked against an independent brute force; the
    // non-positive-slope requirement cannot hold on this grid.
    assert!(
        slope_ok,
        "fitted slope {slope:+.3} is positive on the stated grid \
         (prime q=101 ratio {:.3} dominates the prime-power points)",
        rep.grid.iter().find(|p| p.q == 101).unwrap().ratio
    );
}

#[test]
fn c06_lemma_envelopes() {
    let l51 = lemma51_suite(50, 2000, 40, 0);
    let l52 = lemma52_suite(50, 2000, 40, 0);
    let l53 = lemma53_suite(50, 1000, 40, 0);
    let pass = l51.pass && l52.pass && l53.pass;
    report(
        6,
        pass,
        &format!("{} | {} | {}", l51.summary[0], l52.summary[0], l53.summary[0]),
    );
    assert!(l51.pass, "{}", l51.summary[0]);
    assert!(l52.pass, "{}", l52.summary[0]);
    assert!(l53.pass, "{}", l53.summary[0]);
}

#[test]
fn c07_gauss_sum_modulus() {
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    for q in 1..=300u64 {
        for chi in char_group(q) {
            if !chi.primitive {
                continue;
            }
            let tau = gauss_sum_tau(&chi);
            let diff = (tau.abs() - (q as f64).sqrt()).abs();
            worst = worst.max(diff);
            assert!(diff < 1e-9, "q={q}: |tau| off by {diff:.2e}");
            checked += 1;
        }
    }
    report(
        7,
        true,
        &format!("|tau| = sqrt(q) within 1e-9 for {checked} primitive characters, worst {worst:.2e}"),
    );
}

#[test]
fn c08_tau_identity() {
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    for q in 1..=100u64 {
        if q % 4 == 2 {
            continue;
        }
        for m in 1..=q {
            if gcd(m % q, q) != 1 && q > 1 {
                continue;
            }
            let (lhs, rhs) = tau_identity_check(q, m).unwrap();
            let diff = (lhs - Complex64::new(rhs, 0.0)).norm();
            worst = worst.max(diff);
            assert!(diff <= 1e-8, "q={q} m={m} diff={diff:.2e}");
            checked += 1;
        }
    }
    report(
        8,
        true,
        &format!("identity holds at {checked} (q, m) pairs, worst |lhs-rhs| = {worst:.2e}"),
    );
}

#[test]
fn c09_lvalue_cross_oracle() {
    let anchor = hurwitz_zeta_half(1.0);
    let anchor_ok = (anchor - (-1.4603545)).abs() <= 1e-6;
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    for q in 3..=300u64 {
        if q % 4 == 2 {
            continue;
        }
        let chars: Vec<_> = char_group(q)
            .into_iter()
            .filter(|c| c.primitive && c.is_even())
            .collect();
        if chars.is_empty() {
            continue;
        }
        let table = zeta_half_table(q);
        let ctx = AfeContext::new(q);
        for chi in &chars {
            let hur = l_central_hurwitz_with_table(chi, &table).unwrap().norm_sqr();
            let afe = l_central_afe_sq_with(chi, &ctx).unwrap();
            let rel = (hur - afe).abs() / hur.max(1e-12);
            worst = worst.max(rel);
            assert!(rel < 1e-3, "q={q} rel={rel:.2e}");
            checked += 1;
        }
    }
    report(
        9,
        anchor_ok,
        &format!(
            "zeta(1/2) anchor {anchor:.9}; AFE vs Hurwitz on {checked} characters, worst rel {worst:.2e}"
        ),
    );
    assert!(anchor_ok, "zeta(1/2) = {anchor}");
}

#[test]
fn c10_moments() {
    let start = Instant::now();
    let mut m1_errs = Vec::new();
    for q in [101u64, 401, 1009] {
        let cfg = MollifierConfig::new(q, 0.2, 0.2, 0.5, 0.5).unwrap();
        let m1 = first_moment(q, &cfg).unwrap();
        m1_errs.push((m1 - Complex64::new(1.0, 0.0)).norm());
    }
    let m1_monotone = m1_errs[0] >= m1_errs[1] && m1_errs[1] >= m1_errs[2];
    let m1_final_ok = m1_errs[2] < 0.5;
    let cfg = MollifierConfig::new(1009, 0.2, 0.2, 0.5, 0.5).unwrap();
    let m2 = second_moment(1009, &cfg).unwrap();
    let prediction = second_moment_prediction(&cfg);
    let m2_ok = (m2 - prediction).abs() <= 0.5 * prediction;
    let elapsed = start.elapsed();
    let time_ok = elapsed < Duration::from_secs(600);
    report(
        10,
        m1_monotone && m1_final_ok && m2_ok && time_ok,
        &format!(
            "|M1-1| = {:.4} -> {:.4} -> {:.4} (monotone {}); M2(1009) = {m2:.3} vs main term {prediction} ({}); {:.1}s",
            m1_errs[0], m1_errs[1], m1_errs[2],
            if m1_monotone { "ok" } else { "broken" },
            if m2_ok { "within 50%" } else { "outside 50%" },
            elapsed.as_secs_f64()
        ),
    );
    assert!(m1_monotone, "|M1 - 1| not non-increasing: {m1_errs:?}");
    assert!(m1_final_ok, "|M1 - 1| = {} at q = 1009", m1_errs[2]);
    assert!(time_ok, "runtime {:?} exceeds 10 min", elapsed);
    // The mollifier holds floor(1009^0.2) = 3 terms, far from the regime in
    // which the second-moment asymptotic stabilizes; the value climbs
    // 0.80 -> 1.20 -> 1.53 across the q-grid toward the 3.5 main term but
    // remains outside the 50% window at desk scale. Both central-value
    // evaluators agree on the inputs to 1e-7, so the gap is a property of
    // the truncation, not of the computation.
    assert!(
        m2_ok,
        "M2(1009) = {m2:.3} outside 50% of the main term {prediction}"
    );
}

#[test]
fn c11_theta_optimizer_exact() {
    let seven_19 = Rat::new(7, 19);
    let three_8 = Rat::new(3, 8);
    let (_, _, p0) = theta_optimizer(Rat::new(0, 1)).unwrap();
    let (_, _, p13) = theta_optimizer(Rat::new(1, 3)).unwrap();
    let g15 = Rat::new(1, 5);
    let (a1, a2) = theta_choice_low(g15);
    let (b1, b2) = theta_choice_high(g15);
    let exact_ok = p0 == seven_19
        && p13 == seven_19
        && proportion_from_thetas(a1, a2) == three_8
        && proportion_from_thetas(b1, b2) == three_8;
    let mut grid_ok = true;
    let mut min_p = Rat::new(1, 1);
    for k in 0..=33i64 {
        let gamma = Rat::new(k, 100);
        if gamma > Rat::new(1, 3) {
            break;
        }
        let (t1, t2, p) = theta_optimizer(gamma).unwrap();
        grid_ok &= theta_constraints_hold(t1, t2, gamma);
        min_p = min_p.min(p);
    }
    let min_ok = min_p == seven_19;
    report(
        11,
        exact_ok && grid_ok && min_ok,
        &format!(
            "7/19 at endpoints: {exact_ok}; constraints on 0.01 grid: {grid_ok}; grid minimum {min_p}"
        ),
    );
    assert!(exact_ok && grid_ok && min_ok);
}

#[test]
fn c12_nonvanishing_census() {
    let mut families = 0u64;
    let mut total = 0u64;
    for q in 1..=300u64 {
        let (n_ep, n_nonzero) = nonvanishing_census(q, 1e-8).unwrap();
        if n_ep == 0 {
            continue;
        }
        assert_eq!(
            n_nonzero, n_ep,
            "q={q}: {n_nonzero}/{n_ep} central values above 1e-8"
        );
        families += 1;
        total += n_ep;
    }
    // well above the asymptotic 7/19 floor
    report(
        12,
        true,
        &format!("proportion 1.0 in all {families} families ({total} even primitive characters)"),
    );
    assert!(total > 0);
}

#[test]
fn c13_gsweep_performance() {
    let (q, bmax) = (101u64, 12u64);
    // batch several sweeps per timing sample and interleave the two worker
    // counts so concurrent load hits both fairly; keep the best sample each
    let time_batch = |threads: usize| {
        let t0 = Instant::now();
        for _ in 0..10 {
            let s = g_sweep(q, bmax, threads).unwrap();
            assert_eq!(s.entries.len(), 20736);
        }
        t0.elapsed() / 10
    };
    let _warm = (g_sweep(q, bmax, 1).unwrap(), g_sweep(q, bmax, 4).unwrap());
    let mut t1 = Duration::MAX;
    let mut t4 = Duration::MAX;
    for _ in 0..5 {
        t1 = t1.min(time_batch(1));
        t4 = t4.min(time_batch(4));
    }
    let speedup = t1.as_secs_f64() / t4.as_secs_f64();
    let single_ok = t1 < Duration::from_secs(10);
    let speedup_ok = speedup >= 3.0;

    // byte identity across worker counts
    let to_rows = |threads: usize| {
        let s = g_sweep(q, bmax, threads).unwrap();
        let rows: Vec<Vec<kappa_core::harness::Field>> = s
            .entries
            .iter()
            .map(|&(b, v)| {
                vec![
                    kappa_core::harness::Field::U(b[0]),
                    kappa_core::harness::Field::U(b[1]),
                    kappa_core::harness::Field::U(b[2]),
                    kappa_core::harness::Field::U(b[3]),
                    kappa_core::harness::Field::F(v),
                ]
            })
            .collect();
        csv_bytes(&["b1", "b2", "b3", "b4", "g_abs"], &rows).unwrap()
    };
    let bytes1 = to_rows(1);
    let bytes_ok = [2usize, 8].iter().all(|&t| to_rows(t) == bytes1);

    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    report(
        13,
        single_ok && speedup_ok && bytes_ok,
        &format!(
            "single-thread {:.1} ms ({}); speedup at 4 workers {speedup:.2}x on {cores} cores ({}); byte-identical across 1/2/8 workers: {bytes_ok}",
            t1.as_secs_f64() * 1e3,
            if single_ok { "ok" } else { "too slow" },
            if speedup_ok { "ok" } else { "below 3x" },
        ),
    );
    assert!(single_ok, "single-threaded sweep took {:?}", t1);
    assert!(bytes_ok, "output differs across worker counts");
    assert!(
        speedup_ok,
        "speedup {speedup:.2}x at 4 workers on a {cores}-core host (3x requires at least 3 usable cores)"
    );
}
