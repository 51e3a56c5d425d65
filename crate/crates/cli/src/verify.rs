use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cue_hurwitz::algebra::{format_rational, rat, QSeries, Rational};
use cue_hurwitz::hypergeom::{
    cauchy_product_series, diaconis_expectation, hypergeom_series, mss_polynomial, HypergeomParams,
};
use cue_hurwitz::numeric::{hciz_check, kgr_proportionality, schur_mc_norm};
use cue_hurwitz::partitions::{enumerate_partitions, Partition};
use cue_hurwitz::symgroup::{centralizer_order, CHARACTER_CAP};

use crate::{CliError, Outcome, Status};

#[derive(Clone, Copy, ValueEnum)]
pub enum Identity {
    Cauchy,
    Mss,
    Diaconis,
    Hciz,
    Kgr,
    SchurNorm,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    identity: Identity,
    /// Matrix size N.
    #[arg(long = "N")]
    big_n: Option<usize>,
    /// Series truncation order in z.
    #[arg(long)]
    order: Option<usize>,
    /// Largest degree for `diaconis`.
    #[arg(long, default_value_t = 5)]
    dmax: usize,
    /// HCIZ coupling q.
    #[arg(long, default_value_t = 0.01)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials for `cauchy` and `mss`.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Haar samples for `schur-norm`.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    /// Partition for `schur-norm`, e.g. "2,1".
    #[arg(long, default_value = "1")]
    lambda: String,
    /// Tolerance for `hciz` and `kgr`.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Upper parameter x for `kgr`.
    #[arg(long, default_value_t = 2.5)]
    x: f64,
    /// Lower parameter y for `kgr`.
    #[arg(long, default_value_t = 3.5)]
    y: f64,
}

pub fn run(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let (name, report, seeded) = match args.identity {
        Identity::Cauchy => ("cauchy", cauchy(args)?, true),
        Identity::Mss => ("mss", mss(args)?, true),
        Identity::Diaconis => ("diaconis", diaconis(args)?, false),
        Identity::Hciz => ("hciz", hciz(args)?, true),
        Identity::Kgr => ("kgr", kgr(args)?, true),
        Identity::SchurNorm => ("schur-norm", schur_norm(args)?, true),
    };
    let pass = report["pass"].as_bool().unwrap_or(false);
    let mut output = report;
    output["identity"] = json!(name);
    if seeded {
        output["seed"] = json!(args.seed);
    }
    Ok(Outcome {
        output,
        status: if pass { Status::Success } else { Status::AssertionFailed },
        seeds: if seeded { vec![args.seed] } else { Vec::new() },
    })
}

fn positive(value: usize, flag: &str) -> Result<usize, CliError> {
    if value == 0 {
        Err(CliError::Usage(format!("{flag} must be positive")))
    } else {
        Ok(value)
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-9..=9), rng.random_range(1..=5))
}

fn rational_list(values: &[Rational]) -> Value {
    json!(values.iter().map(format_rational).collect::<Vec<_>>())
}

fn first_difference(left: &QSeries, right: &QSeries) -> Option<usize> {
    (0..=left.order()).find(|&k| left.coeff(k) != right.coeff(k))
}

fn cauchy(args: &VerifyArgs) -> Result<Value, CliError> {
    let n = positive(args.big_n.unwrap_or(3), "--N")?;
    let order = args.order.unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let params = HypergeomParams::default();
    for trial in 0..args.trials {
        let a: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let b: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let schur_side = hypergeom_series(&params, &a, &b, order).map_err(|e| CliError::Failure(e.to_string()))?;
        let product_side = cauchy_product_series(&a, &b, order);
        if let Some(k) = first_difference(&schur_side, &product_side) {
            return Ok(json!({
                "pass": false, "N": n, "order": order, "trials": args.trials,
                "counterexample": {
                    "trial": trial, "a": rational_list(&a), "b": rational_list(&b), "power": k,
                    "schur_side": format_rational(schur_side.coeff(k)),
                    "product_side": format_rational(product_side.coeff(k)),
                },
            }));
        }
    }
    Ok(json!({"pass": true, "N": n, "order": order, "trials": args.trials}))
}

fn mss(args: &VerifyArgs) -> Result<Value, CliError> {
    let max_n = positive(args.big_n.unwrap_or(4), "--N")?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut displayed_sign_disagrees = 0;
    let mut checked = 0;
    for n in 1..=max_n {
        let order = args.order.unwrap_or(n + 3);
        let params = HypergeomParams::new(vec![rat(-1, 1)], vec![rat(n as i64, 1)]);
        for trial in 0..args.trials {
            let a: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            let b: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            let series = hypergeom_series(&params, &a, &b, order).map_err(|e| CliError::Failure(e.to_string()))?;
            let derived = mss_polynomial(&a, &b, order, true);
            if let Some(k) = first_difference(&series, &derived) {
                return Ok(json!({
                    "pass": false, "max_N": max_n, "trials": args.trials,
                    "counterexample": {
                        "N": n, "trial": trial, "a": rational_list(&a), "b": rational_list(&b), "power": k,
                        "series": format_rational(series.coeff(k)),
                        "polynomial": format_rational(derived.coeff(k)),
                    },
                }));
            }
            if series != mss_polynomial(&a, &b, order, false) {
                displayed_sign_disagrees += 1;
            }
            checked += 1;
        }
    }
    Ok(json!({
        "pass": true,
        "max_N": max_n,
        "trials": args.trials,
        "checked": checked,
        "sign": "(-z)^d",
        "all_plus_sign_disagreements": displayed_sign_disagrees,
    }))
}

fn diaconis(args: &VerifyArgs) -> Result<Value, CliError> {
    let dmax = positive(args.dmax, "--dmax")?;
    if dmax > CHARACTER_CAP {
        return Err(CliError::Usage(format!("--dmax is capped at {CHARACTER_CAP}")));
    }
    let mut checked = 0;
    for d in 1..=dmax {
        let parts = enumerate_partitions(d, None);
        for big_n in d..=d + 3 {
            for alpha in &parts {
                for beta in &parts {
                    let value =
                        diaconis_expectation(alpha, beta, big_n).map_err(|e| CliError::Failure(e.to_string()))?;
                    let expected = if alpha == beta {
                        centralizer_order(alpha)
                    } else {
                        0.into()
                    };
                    if value != expected {
                        return Ok(json!({
                            "pass": false, "dmax": dmax,
                            "counterexample": {
                                "alpha": alpha, "beta": beta, "N": big_n,
                                "value": value.to_string(), "expected": expected.to_string(),
                            },
                        }));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(json!({"pass": true, "dmax": dmax, "checked": checked}))
}

/// `N` well-separated values in `[lo, lo + width)`.
fn separated(rng: &mut ChaCha8Rng, n: usize, lo: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + width * (i as f64 + 0.25 + 0.5 * rng.random::<f64>()) / n as f64)
        .collect()
}

fn hciz(args: &VerifyArgs) -> Result<Value, CliError> {
    let n = positive(args.big_n.unwrap_or(2), "--N")?;
    let order = args.order.unwrap_or(40);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let a = separated(&mut rng, n, -1.0, 2.0);
    let b = separated(&mut rng, n, -1.0, 2.0);
    let report =
        hciz_check(Complex64::new(args.q, 0.0), &a, &b, order).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(json!({
        "pass": report.relative_error < args.tol,
        "N": n, "q": args.q, "order": order, "tol": args.tol, "a": a, "b": b,
        "determinant_side": report.determinant_side,
        "series_side": report.series_side,
        "relative_error": report.relative_error,
    }))
}

fn kgr(args: &VerifyArgs) -> Result<Value, CliError> {
    let n = positive(args.big_n.unwrap_or(2), "--N")?;
    let order = args.order.unwrap_or(60);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let c = |x: f64| Complex64::new(x, 0.0);
    let a = separated(&mut rng, n, 0.1, 0.9);
    let b = separated(&mut rng, n, 0.1, 0.9);
    let zs = [0.02, 0.05, 0.09];
    let params = HypergeomParams::new(vec![c(args.x)], vec![c(args.y)]);
    let report = kgr_proportionality(
        &params,
        &zs.map(c),
        &a.iter().copied().map(c).collect::<Vec<_>>(),
        &b.iter().copied().map(c).collect::<Vec<_>>(),
        order,
    )
    .map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(json!({
        "pass": report.spread < args.tol,
        "N": n, "x": args.x, "y": args.y, "order": order, "tol": args.tol, "a": a, "b": b, "z": zs,
        "ratios": report.ratios,
        "spread": report.spread,
    }))
}

fn schur_norm(args: &VerifyArgs) -> Result<Value, CliError> {
    let n = positive(args.big_n.unwrap_or(2), "--N")?;
    let parts: Vec<usize> = args
        .lambda
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--lambda: {e}")))?;
    let lambda = Partition::new(parts).map_err(|e| CliError::Usage(format!("--lambda: {e}")))?;
    let samples = positive(args.samples, "--samples")?;
    let est = schur_mc_norm(&lambda, n, samples, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let z = est.z_score(1.0);
    Ok(json!({
        "pass": z <= 5.0,
        "N": n, "lambda": lambda, "samples": samples,
        "estimate": est.estimate, "stderr": est.stderr, "z_score": z,
    }))
}
