//! The envelope suites behind `bounds`/`suite`: sampled grids, per-point
//! checks, and slope fits, all reproducible from `(seed, coordinates)`.

use std::path::PathBuf;

use super::csv::{emit_csv, Field};
use super::rng::PointRng;
use crate::arith::{factor, gcd3};
use crate::error::{Error, Result};
use crate::expsum::{
    constrained_u_ctx, poly_gauss_frak_s_ctx, salie_type_s_ctx, ConstrainedCtx, KloostermanCtx,
    ModCtx, PolySpec,
};
use crate::quartic::{self, g_naive, n1_count, BTuple};
use crate::util::fit_loglog_slope;

/// Frozen regression constant for the `G_{rho^2} <= C rho^5 N1(rho)` check.
/// The seed-0 oracle run over the default grid reaches 1.0 exactly (the
/// envelope saturates at rho = 2 and 3); the margin absorbs float jitter.
pub const PROP43_FROZEN_C: f64 = 1.02;

/// Frozen ceiling for `A(q) / envelope` on the default modulus grid at
/// `B = min(q, 12)`; the oracle run observes 0.90099 at q = 101.
pub const THM12_FROZEN_RATIO_MAX: f64 = 0.91;

/// Default modulus grid for the averaged-bound trend check.
pub const THM12_DEFAULT_GRID: [u64; 7] = [8, 27, 32, 45, 99, 101, 125];

/// Default square-root grid for the `N1` envelope check.
pub const PROP43_DEFAULT_RHOS: [u64; 8] = [2, 3, 4, 5, 7, 9, 11, 13];

pub const CSV_SCHEMA: [&str; 7] = [
    "suite", "q", "param1", "param2", "value_abs", "envelope", "ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Weil,
    Lemma51,
    Lemma52,
    Lemma53,
    Prop42,
    Prop43,
    Thm12,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "weil" => Suite::Weil,
            "lemma51" => Suite::Lemma51,
            "lemma52" => Suite::Lemma52,
            "lemma53" => Suite::Lemma53,
            "prop42" => Suite::Prop42,
            "prop43" => Suite::Prop43,
            "thm12" => Suite::Thm12,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Weil => "weil",
            Suite::Lemma51 => "lemma51",
            Suite::Lemma52 => "lemma52",
            Suite::Lemma53 => "lemma53",
            Suite::Prop42 => "prop42",
            Suite::Prop43 => "prop43",
            Suite::Thm12 => "thm12",
        }
    }

    fn stream_id(&self) -> u64 {
        match self {
            Suite::Weil => 1,
            Suite::Lemma51 => 2,
            Suite::Lemma52 => 3,
            Suite::Lemma53 => 4,
            Suite::Prop42 => 5,
            Suite::Prop43 => 6,
            Suite::Thm12 => 7,
        }
    }

    /// Default grid bounds and sample count.
    pub fn defaults(&self) -> (u64, u64, u64) {
        match self {
            Suite::Weil => (1, 2000, 100),
            Suite::Lemma51 | Suite::Lemma52 => (50, 2000, 40),
            Suite::Lemma53 => (50, 1000, 40),
            Suite::Prop42 => (11, 199, 0),
            Suite::Prop43 => (2, 13, 20),
            Suite::Thm12 => (8, 125, 0),
        }
    }
}

/// One sweep invocation. Identical configs (thread count aside) reproduce
/// byte-identical CSV output.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub suite: Suite,
    pub qmin: u64,
    pub qmax: u64,
    pub samples: u64,
    pub bmax: Option<u64>,
    pub threads: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl SweepConfig {
    pub fn new(suite: Suite, out: PathBuf) -> Self {
        let (qmin, qmax, samples) = suite.defaults();
        SweepConfig {
            suite,
            qmin,
            qmax,
            samples,
            bmax: None,
            threads: 1,
            seed: 0,
            out,
        }
    }
}

/// Everything a suite run produces besides the CSV file.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub rows: Vec<Vec<Field>>,
    /// One line per grid point: `(label, pass)`.
    pub points: Vec<(String, bool)>,
    pub summary: Vec<String>,
    pub pass: bool,
}

fn log_grid(qmin: u64, qmax: u64, count: usize) -> Vec<u64> {
    if qmin > qmax {
        return Vec::new();
    }
    let lo = qmin.max(1) as f64;
    let hi = qmax as f64;
    let mut qs: Vec<u64> = (0..count)
        .map(|k| {
            let t = if count == 1 {
                0.0
            } else {
                k as f64 / (count - 1) as f64
            };
            (lo * (hi / lo).powf(t)).round() as u64
        })
        .collect();
    qs.sort_unstable();
    qs.dedup();
    qs
}

fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| crate::arith::is_prime(n)).collect()
}

fn row(
    suite: Suite,
    q: u64,
    p1: u64,
    p2: u64,
    value: f64,
    envelope: f64,
    ratio: f64,
) -> Vec<Field> {
    vec![
        Field::S(suite.name().to_string()),
        Field::U(q),
        Field::U(p1),
        Field::U(p2),
        Field::F(value),
        Field::F(envelope),
        Field::F(ratio),
    ]
}

/// Weil-Estermann envelope `|S(a,b;q)| <= d(q) (a,b,q)^{1/2} q^{1/2}` on a
/// sampled grid; a hard per-point bound.
pub fn weil_suite(qmin: u64, qmax: u64, samples: u64, seed: u64) -> SuiteOutcome {
    let suite = Suite::Weil;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut pass = true;
    let mut max_ratio = 0.0f64;
    for q in qmin.max(1)..=qmax {
        let fm = factor(q).expect("grid modulus in range");
        let ctx = KloostermanCtx::new(&fm);
        let d = fm.divisor_count() as f64;
        for k in 0..samples {
            let mut rng = PointRng::new(seed, &[suite.stream_id(), q, k]);
            let a = rng.below(q);
            let b = rng.below(q);
            let value = ctx.eval(a, b).abs();
            let envelope = d * (gcd3(a, b, q) as f64).sqrt() * (q as f64).sqrt();
            let ratio = value / envelope;
            let ok = ratio <= 1.0 + 1e-9;
            max_ratio = max_ratio.max(ratio);
            pass &= ok;
            points.push((format!("weil q={q} a={a} b={b} ratio={ratio:.6}"), ok));
            rows.push(row(suite, q, a, b, value, envelope, ratio));
        }
    }
    let summary = vec![format!(
        "weil: {} points, max ratio {max_ratio:.6}, bound ratio <= 1",
        points.len()
    )];
    SuiteOutcome {
        rows,
        points,
        summary,
        pass,
    }
}

/// Shared shape of the three square-root-cancellation suites: per-modulus
/// maxima of a normalized sum, then a log-log slope fit against `q`.
struct SlopeSuite {
    rows: Vec<Vec<Field>>,
    per_q_max: Vec<(f64, f64)>,
}

const SLOPE_LIMIT: f64 = 0.6;

fn slope_outcome(suite: Suite, built: SlopeSuite, limit: f64) -> SuiteOutcome {
    let slope = fit_loglog_slope(&built.per_q_max);
    let (pass, desc) = match slope {
        Some(s) => (s <= limit, format!("{s:.4}")),
        None => (true, "n/a (empty grid)".to_string()),
    };
    let points = built
        .per_q_max
        .iter()
        .map(|&(q, m)| (format!("{} q={} max={m:.6}", suite.name(), q as u64), true))
        .collect();
    SuiteOutcome {
        rows: built.rows,
        points,
        summary: vec![format!(
            "{}: fitted slope {desc} (limit {limit}), {} moduli",
            suite.name(),
            built.per_q_max.len()
        )],
        pass,
    }
}

/// Salie-type envelope: slope of `max |S(gamma,mu,q)| / (gamma,mu,q)^{1/2}`
/// over every modulus in the range.
pub fn lemma51_suite(qmin: u64, qmax: u64, samples: u64, seed: u64) -> SuiteOutcome {
    let suite = Suite::Lemma51;
    let mut rows = Vec::new();
    let mut per_q_max = Vec::new();
    for q in qmin.max(1)..=qmax {
        let ctx = ModCtx::new(q);
        let mut best = 0.0f64;
        for k in 0..samples {
            let mut rng = PointRng::new(seed, &[suite.stream_id(), q, k]);
            let gamma = rng.below(q);
            let mu = rng.below(q);
            let value = salie_type_s_ctx(gamma as i64, mu as i64, &ctx).abs();
            let g = (gcd3(gamma, mu, q) as f64).sqrt();
            let envelope = g * (q as f64).sqrt();
            rows.push(row(suite, q, gamma, mu, value, envelope, value / envelope));
            best = best.max(value / g);
        }
        per_q_max.push((q as f64, best));
    }
    slope_outcome(suite, SlopeSuite { rows, per_q_max }, SLOPE_LIMIT)
}

/// Polynomial Gauss-sum envelope over three polynomial choices.
pub fn lemma52_suite(qmin: u64, qmax: u64, samples: u64, seed: u64) -> SuiteOutcome {
    let suite = Suite::Lemma52;
    let polys = [
        PolySpec::one(),
        PolySpec::new(vec![1]),
        PolySpec::new(vec![2, 3]),
    ];
    let mut rows = Vec::new();
    let mut per_q_max = Vec::new();
    for q in qmin.max(1)..=qmax {
        let ctx = ModCtx::new(q);
        let mut best = 0.0f64;
        for (pi, poly) in polys.iter().enumerate() {
            for k in 0..samples {
                let mut rng = PointRng::new(seed, &[suite.stream_id(), q, pi as u64, k]);
                let a1 = rng.below(q);
                let a2 = rng.below(q);
                let value = poly_gauss_frak_s_ctx(a1 as i64, a2 as i64, &ctx, poly).abs();
                let g = (gcd3(a1, a2, q) as f64).sqrt();
                let envelope = g * (q as f64).sqrt();
                rows.push(row(suite, q, a1, a2, value, envelope, value / envelope));
                best = best.max(value / g);
            }
        }
        per_q_max.push((q as f64, best));
    }
    slope_outcome(suite, SlopeSuite { rows, per_q_max }, SLOPE_LIMIT)
}

/// Constrained-sum envelope: slope of
/// `max |U(gamma,mu,rho,q)| rho^{1/2} / (gamma,mu,q)^{1/2}` with `rho` over
/// the square-free divisors of `q` coprime to 3 and `(gamma,mu,rho) = 1`.
pub fn lemma53_suite(qmin: u64, qmax: u64, samples: u64, seed: u64) -> SuiteOutcome {
    let suite = Suite::Lemma53;
    let mut rows = Vec::new();
    let mut per_q_max = Vec::new();
    // the q*rho root tables make a full-range scan expensive; a dense log
    // grid keeps the arithmetic mix balanced across scales
    for q in log_grid(qmin, qmax, 48) {
        let fm = factor(q).expect("grid modulus in range");
        let rhos: Vec<u64> = factor(fm.qstar)
            .expect("radical in range")
            .divisors()
            .into_iter()
            .filter(|&r| r % 3 != 0)
            .collect();
        let mut best = 0.0f64;
        for &rho in &rhos {
            let ctx = ConstrainedCtx::new(rho, q).expect("rho divides q and avoids 3");
            for k in 0..samples {
                let mut rng = PointRng::new(seed, &[suite.stream_id(), q, rho, k]);
                let gamma = rng.below(q);
                let mu = rng.below(q);
                if gcd3(gamma, mu, rho) != 1 {
                    continue;
                }
                let value = constrained_u_ctx(gamma as i64, mu as i64, &ctx).abs();
                let g = (gcd3(gamma, mu, q) as f64).sqrt();
                let envelope = g * (q as f64).sqrt() / (rho as f64).sqrt();
                rows.push(row(suite, q, rho, k, value, envelope, value / envelope));
                best = best.max(value * (rho as f64).sqrt() / g);
            }
        }
        per_q_max.push((q as f64, best));
    }
    slope_outcome(suite, SlopeSuite { rows, per_q_max }, SLOPE_LIMIT)
}

/// Prime-modulus split of the quartic average: fitted slope of
/// `max |G_p|` off the paired set (limit 2.65) and on it (limit 3.15).
pub fn prop42_suite(qmin: u64, qmax: u64) -> SuiteOutcome {
    let suite = Suite::Prop42;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut in_pts = Vec::new();
    let mut out_pts = Vec::new();
    for p in primes_in(qmin.max(11), qmax.min(199)) {
        let (max_in, max_out) = quartic::g_prime_max_split(p).expect("p is prime");
        let pf = p as f64;
        rows.push(row(suite, p, 1, 0, max_in, pf.powi(3), max_in / pf.powi(3)));
        rows.push(row(
            suite,
            p,
            0,
            0,
            max_out,
            pf.powf(2.5),
            max_out / pf.powf(2.5),
        ));
        points.push((format!("prop42 p={p} paired_max={max_in:.3}"), true));
        points.push((format!("prop42 p={p} unpaired_max={max_out:.3}"), true));
        in_pts.push((pf, max_in));
        out_pts.push((pf, max_out));
    }
    let slope_in = fit_loglog_slope(&in_pts);
    let slope_out = fit_loglog_slope(&out_pts);
    let pass = match (slope_in, slope_out) {
        (Some(si), Some(so)) => si <= 3.15 && so <= 2.65,
        _ => true,
    };
    let summary = vec![format!(
        "prop42: paired slope {:?} (limit 3.15), unpaired slope {:?} (limit 2.65)",
        slope_in, slope_out
    )];
    SuiteOutcome {
        rows,
        points,
        summary,
        pass,
    }
}

/// `|G_{rho^2}(b)| <= C rho^5 N1(rho, b)` with the frozen constant; tuples
/// with `N1 = 0` must make the average vanish outright.
pub fn prop43_suite(trials: u64, seed: u64) -> SuiteOutcome {
    let suite = Suite::Prop43;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut pass = true;
    let mut max_ratio = 0.0f64;
    for &rho in &PROP43_DEFAULT_RHOS {
        let q = rho * rho;
        for t in 0..trials {
            let mut rng = PointRng::new(seed, &[suite.stream_id(), rho, t]);
            let b = BTuple::new([
                rng.unit_below(q),
                rng.unit_below(q),
                rng.unit_below(q),
                rng.unit_below(q),
            ])
            .expect("nonzero units");
            let g = g_naive(q, &b).expect("coprime tuple").abs();
            let n1 = n1_count(rho, &b).expect("coprime tuple");
            let envelope = (rho as f64).powi(5) * n1 as f64;
            let (ratio, ok) = if n1 == 0 {
                (0.0, g <= 1e-5)
            } else {
                let r = g / envelope;
                max_ratio = max_ratio.max(r);
                (r, r <= PROP43_FROZEN_C)
            };
            pass &= ok;
            points.push((
                format!("prop43 rho={rho} trial={t} n1={n1} ratio={ratio:.4}"),
                ok,
            ));
            rows.push(row(suite, q, rho, t, g, envelope, ratio));
        }
    }
    let summary = vec![format!(
        "prop43: max ratio {max_ratio:.4} against frozen C = {PROP43_FROZEN_C}"
    )];
    SuiteOutcome {
        rows,
        points,
        summary,
        pass,
    }
}

/// Averaged-bound trend: `A(q)/envelope` must stay below the frozen ceiling
/// and fit a non-positive slope across the modulus grid.
pub fn thm12_suite(
    qmin: u64,
    qmax: u64,
    bmax: Option<u64>,
    threads: usize,
) -> Result<SuiteOutcome> {
    let suite = Suite::Thm12;
    let qs: Vec<u64> = THM12_DEFAULT_GRID
        .iter()
        .copied()
        .filter(|&q| q >= qmin && q <= qmax)
        .collect();
    let report = quartic::theorem12_report(&qs, bmax, threads)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut pass = true;
    for p in &report.grid {
        let ok = p.ratio <= THM12_FROZEN_RATIO_MAX;
        pass &= ok;
        points.push((
            format!("thm12 q={} B={} ratio={:.6e}", p.q, p.bmax, p.ratio),
            ok,
        ));
        rows.push(row(suite, p.q, p.bmax, 0, p.value, p.envelope, p.ratio));
    }
    if let Some(s) = report.fitted_slope {
        pass &= s <= 0.0;
    }
    let summary = vec![format!(
        "thm12: max ratio {:.6e} (frozen {THM12_FROZEN_RATIO_MAX:.2e}), slope {:?} (limit 0)",
        report.max_ratio, report.fitted_slope
    )];
    Ok(SuiteOutcome {
        rows,
        points,
        summary,
        pass,
    })
}

/// Dispatch a configured suite.
pub fn run_suite_outcome(cfg: &SweepConfig) -> Result<SuiteOutcome> {
    Ok(match cfg.suite {
        Suite::Weil => weil_suite(cfg.qmin, cfg.qmax, cfg.samples, cfg.seed),
        Suite::Lemma51 => lemma51_suite(cfg.qmin, cfg.qmax, cfg.samples, cfg.seed),
        Suite::Lemma52 => lemma52_suite(cfg.qmin, cfg.qmax, cfg.samples, cfg.seed),
        Suite::Lemma53 => lemma53_suite(cfg.qmin, cfg.qmax, cfg.samples, cfg.seed),
        Suite::Prop42 => prop42_suite(cfg.qmin, cfg.qmax),
        Suite::Prop43 => prop43_suite(cfg.samples, cfg.seed),
        Suite::Thm12 => thm12_suite(cfg.qmin, cfg.qmax, cfg.bmax, cfg.threads)?,
    })
}

/// Run a suite end to end: compute, write the CSV, print the per-point
/// report, and map the result to the exit-code contract
/// (0 all-pass, 1 bound failure, 2 usage/IO error).
pub fn run_suite(cfg: &SweepConfig) -> i32 {
    let outcome = match run_suite_outcome(cfg) {
        Ok(o) => o,
        Err(Error::BExceedsQ { b, q }) => {
            eprintln!("usage error: B = {b} exceeds grid modulus q = {q}");
            return 2;
        }
        Err(e) => {
            eprintln!("usage error: {e}");
            return 2;
        }
    };
    if let Err(e) = emit_csv(&cfg.out, &CSV_SCHEMA, &outcome.rows) {
        eprintln!("cannot write {}: {e}", cfg.out.display());
        return 2;
    }
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    for (label, ok) in &outcome.points {
        let _ = writeln!(w, "{} {label}", if *ok { "PASS" } else { "FAIL" });
    }
    for line in &outcome.summary {
        let _ = writeln!(w, "{line}");
    }
    let _ = writeln!(
        w,
        "suite {} -> {}",
        cfg.suite.name(),
        if outcome.pass { "PASS" } else { "FAIL" }
    );
    let _ = w.flush();
    if outcome.pass {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::csv::csv_bytes;

    #[test]
    fn weil_small_grid_passes() {
        let out = weil_suite(1, 60, 20, 7);
        assert!(out.pass);
        assert_eq!(out.rows.len(), 60 * 20);
    }

    #[test]
    fn empty_grid_is_a_pass_with_header_only() {
        let out = weil_suite(10, 9, 20, 7);
        assert!(out.pass);
        assert!(out.rows.is_empty());
        let bytes = csv_bytes(&CSV_SCHEMA, &out.rows).unwrap();
        assert_eq!(
            bytes,
            b"suite,q,param1,param2,value_abs,envelope,ratio\n"
        );
    }

    #[test]
    fn suites_are_deterministic() {
        let a = lemma51_suite(50, 200, 10, 3);
        let b = lemma51_suite(50, 200, 10, 3);
        assert_eq!(
            csv_bytes(&CSV_SCHEMA, &a.rows).unwrap(),
            csv_bytes(&CSV_SCHEMA, &b.rows).unwrap()
        );
        let c = lemma51_suite(50, 200, 10, 4);
        assert_ne!(
            csv_bytes(&CSV_SCHEMA, &a.rows).unwrap(),
            csv_bytes(&CSV_SCHEMA, &c.rows).unwrap()
        );
    }

    #[test]
    fn thm12_respects_thread_count_bytewise() {
        let a = thm12_suite(8, 50, None, 1).unwrap();
        let b = thm12_suite(8, 50, None, 4).unwrap();
        assert_eq!(
            csv_bytes(&CSV_SCHEMA, &a.rows).unwrap(),
            csv_bytes(&CSV_SCHEMA, &b.rows).unwrap()
        );
    }

    #[test]
    fn thm12_rejects_oversized_bmax() {
        assert!(matches!(
            thm12_suite(8, 125, Some(200), 1),
            Err(Error::BExceedsQ { .. })
        ));
    }

    #[test]
    fn log_grid_shape() {
        let g = log_grid(50, 2000, 24);
        assert_eq!(*g.first().unwrap(), 50);
        assert_eq!(*g.last().unwrap(), 2000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(log_grid(10, 9, 24).is_empty());
    }

    #[test]
    fn suite_parse_roundtrip() {
        for name in ["weil", "lemma51", "lemma52", "lemma53", "prop42", "prop43", "thm12"] {
            assert_eq!(Suite::parse(name).unwrap().name(), name);
        }
        assert!(Suite::parse("nope").is_none());
    }
}
