//! `kappa`: factorizations, exponential-sum sweeps, envelope suites, and
//! mollified-moment reports from the command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kappa_core::arith::{decompose_six_one, factor};
use kappa_core::dirichlet::moments::{
    kappa_report, nonvanishing_census, parse_rational, theta_optimizer, MollifierConfig,
};
use kappa_core::harness::{csv_bytes, load_config, run_suite, Field, Suite, SweepConfig};
use kappa_core::quartic::g_sweep;

#[derive(Parser)]
#[command(
    name = "kappa",
    version,
    about = "Kloosterman-sum averages and mollified central-value moments"
)]
struct Cli {
    /// Worker threads (KAPPA_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled grids.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout for the data commands when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Factor q and print the derived decompositions as JSON.
    Factor {
        #[arg(long)]
        q: u64,
    },
    /// Sweep |G_q| over the coprime grid 1 <= b_i <= B.
    Gsweep {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        bmax: u64,
    },
    /// Run one envelope suite and write its CSV report.
    Bounds {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        qmin: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        bmax: Option<u64>,
    },
    /// Mollified-moment report for one modulus as JSON.
    Moments {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long, default_value_t = 1e-8)]
        vanish_tol: f64,
    },
    /// Optimal mollifier lengths and proportion for gamma in [0, 1/3].
    Theta {
        /// Exact rational ("1/5") or decimal ("0.2").
        #[arg(long)]
        gamma: String,
    },
    /// Non-vanishing census over a modulus range.
    Proportion {
        #[arg(long)]
        qmin: u64,
        #[arg(long)]
        qmax: u64,
        #[arg(long, default_value_t = 1e-8)]
        vanish_tol: f64,
    },
    /// Run a suite described by the config file (overridable by flags).
    Suite {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        qmin: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        bmax: Option<u64>,
    },
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn write_out(out: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().write_all(bytes),
    }
}

struct Merged {
    cfg: BTreeMap<String, String>,
    threads: usize,
    seed: u64,
    out: Option<PathBuf>,
}

fn merge(cli: &Cli) -> Result<Merged, String> {
    let cfg = match &cli.config {
        Some(path) => load_config(path).map_err(|e| e.to_string())?,
        None => BTreeMap::new(),
    };
    let cfg_u64 = |key: &str| -> Result<Option<u64>, String> {
        cfg.get(key)
            .map(|v| v.parse::<u64>().map_err(|_| format!("bad {key}: {v}")))
            .transpose()
    };
    let mut threads = cli
        .threads
        .or(cfg_u64("threads")?.map(|v| v as usize))
        .unwrap_or(1);
    if let Ok(v) = std::env::var("KAPPA_THREADS") {
        threads = v
            .parse::<usize>()
            .map_err(|_| format!("bad KAPPA_THREADS: {v}"))?;
    }
    let seed = cli.seed.or(cfg_u64("seed")?).unwrap_or(0);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.get("out").map(PathBuf::from));
    Ok(Merged {
        cfg,
        threads: threads.max(1),
        seed,
        out,
    })
}

fn build_sweep(
    merged: &Merged,
    name: Option<&str>,
    qmin: Option<u64>,
    qmax: Option<u64>,
    samples: Option<u64>,
    bmax: Option<u64>,
) -> Result<SweepConfig, String> {
    let name = name
        .map(str::to_string)
        .or_else(|| merged.cfg.get("suite").cloned())
        .ok_or("no suite named (flag --suite/--name or config key suite)")?;
    let suite = Suite::parse(&name).ok_or_else(|| format!("unknown suite: {name}"))?;
    let out = merged
        .out
        .clone()
        .ok_or("an output path is required (--out or config key out)")?;
    let mut cfg = SweepConfig::new(suite, out);
    cfg.threads = merged.threads;
    cfg.seed = merged.seed;
    let from_cfg = |key: &str| -> Result<Option<u64>, String> {
        merged
            .cfg
            .get(key)
            .map(|v| v.parse::<u64>().map_err(|_| format!("bad {key}: {v}")))
            .transpose()
    };
    if let Some(v) = qmin.or(from_cfg("qmin")?) {
        cfg.qmin = v;
    }
    if let Some(v) = qmax.or(from_cfg("qmax")?) {
        cfg.qmax = v;
    }
    if let Some(v) = samples.or(from_cfg("samples")?) {
        cfg.samples = v;
    }
    cfg.bmax = bmax.or(from_cfg("bmax")?);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let merged = match merge(&cli) {
        Ok(m) => m,
        Err(e) => return usage(&e),
    };

    match &cli.cmd {
        Cmd::Factor { q } => {
            let fm = match factor(*q) {
                Ok(fm) => fm,
                Err(e) => return usage(&e.to_string()),
            };
            let six = decompose_six_one(&fm);
            let mut value = serde_json::to_value(&fm).expect("serializable");
            value["six_one"] = serde_json::to_value(&six).expect("serializable");
            let text = serde_json::to_string_pretty(&value).expect("serializable");
            if write_out(&merged.out, format!("{text}\n").as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Cmd::Gsweep { q, bmax } => {
            let sweep = match g_sweep(*q, *bmax, merged.threads) {
                Ok(s) => s,
                Err(e) => return usage(&e.to_string()),
            };
            let rows: Vec<Vec<Field>> = sweep
                .entries
                .iter()
                .map(|&(b, v)| {
                    vec![
                        Field::U(b[0]),
                        Field::U(b[1]),
                        Field::U(b[2]),
                        Field::U(b[3]),
                        Field::F(v),
                    ]
                })
                .collect();
            let bytes = csv_bytes(&["b1", "b2", "b3", "b4", "g_abs"], &rows)
                .expect("fixed-width rows");
            if let Err(e) = write_out(&merged.out, &bytes) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(2);
            }
            eprintln!(
                "swept {} coprime tuples, skipped {}",
                sweep.entries.len(),
                sweep.skipped
            );
            ExitCode::SUCCESS
        }
        Cmd::Bounds {
            suite,
            qmin,
            qmax,
            samples,
            bmax,
        } => {
            let cfg = match build_sweep(&merged, Some(suite), *qmin, *qmax, *samples, *bmax) {
                Ok(c) => c,
                Err(e) => return usage(&e),
            };
            ExitCode::from(run_suite(&cfg) as u8)
        }
        Cmd::Suite {
            name,
            qmin,
            qmax,
            samples,
            bmax,
        } => {
            let cfg = match build_sweep(&merged, name.as_deref(), *qmin, *qmax, *samples, *bmax) {
                Ok(c) => c,
                Err(e) => return usage(&e),
            };
            ExitCode::from(run_suite(&cfg) as u8)
        }
        Cmd::Moments {
            q,
            theta1,
            theta2,
            c1,
            c2,
            vanish_tol,
        } => {
            let cfg = match MollifierConfig::new(*q, *theta1, *theta2, *c1, *c2) {
                Ok(c) => c,
                Err(e) => return usage(&e.to_string()),
            };
            let report = match kappa_report(*q, &cfg, *vanish_tol) {
                Ok(r) => r,
                Err(e) => return usage(&e.to_string()),
            };
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            if write_out(&merged.out, format!("{text}\n").as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Cmd::Theta { gamma } => {
            let g = match parse_rational(gamma) {
                Some(g) => g,
                None => return usage(&format!("cannot parse gamma: {gamma}")),
            };
            let (t1, t2, p) = match theta_optimizer(g) {
                Ok(t) => t,
                Err(e) => return usage(&e.to_string()),
            };
            let as_f64 = |r: &kappa_core::dirichlet::moments::Rat| {
                *r.numer() as f64 / *r.denom() as f64
            };
            println!("gamma      = {g} = {}", as_f64(&g));
            println!("theta1     = {t1} = {}", as_f64(&t1));
            println!("theta2     = {t2} = {}", as_f64(&t2));
            println!("proportion = {p} = {}", as_f64(&p));
            ExitCode::SUCCESS
        }
        Cmd::Proportion {
            qmin,
            qmax,
            vanish_tol,
        } => {
            if *qmin == 0 {
                return usage("qmin must be at least 1");
            }
            let mut rows = Vec::new();
            for q in *qmin..=*qmax {
                let (n_ep, n_nonzero) = match nonvanishing_census(q, *vanish_tol) {
                    Ok(v) => v,
                    Err(e) => return usage(&e.to_string()),
                };
                // an empty family is vacuously non-vanishing
                let proportion = if n_ep == 0 {
                    1.0
                } else {
                    n_nonzero as f64 / n_ep as f64
                };
                rows.push(vec![
                    Field::U(q),
                    Field::U(n_ep),
                    Field::U(n_nonzero),
                    Field::F(proportion),
                ]);
            }
            let bytes = csv_bytes(
                &["q", "n_even_primitive", "n_nonvanishing", "proportion"],
                &rows,
            )
            .expect("fixed-width rows");
            if let Err(e) = write_out(&merged.out, &bytes) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
    }
}
