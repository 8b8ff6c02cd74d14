use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use spats::channel::{convolve_grid, fokker_planck_evolve, ConvolutionSpec, FokkerPlanckSpec, FpScheme};
use spats::negativity::{pnw_numeric, pnw_spats_analytic};
use spats::states::{evolve_fock_diagonal, spats_weights, ChannelParams, DEFAULT_TAIL_TOL};
use spats::threshold::{
    threshold_numeric_spats, threshold_numeric_spats_pnw, threshold_spats, verify_theorem_batch, TheoremConfig,
    ThresholdReport, THEOREM_SCOPE_NOTE,
};
use spats::wigner::{
    default_extent, eval_fock_diagonal_wigner, eval_spats_wigner_evolved, eval_spats_wigner_initial, sample_grid,
    try_sample_grid, GridSpec,
};

use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_jsonl, write_with_sidecar, Sidecar};
use crate::{Format, PnwCurveArgs, Suite, ThresholdArgs, ThresholdMethodArg, VerifyArgs, WignerGridArgs};

const PNW_ABS_TOL: f64 = 1e-9;
const PNW_BASE_RESOLUTION: usize = 64;

fn check_bar_n(bar_n: f64) -> CliResult<()> {
    if bar_n >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--bar-n must be >= 0, got {bar_n}")))
    }
}

pub fn wigner_grid(args: &WignerGridArgs) -> CliResult<()> {
    check_bar_n(args.bar_n)?;
    let channel = ChannelParams::new(args.n, args.gamma_t)?;
    if args.resolution < 2 {
        return Err(CliError::Usage("--resolution must be at least 2".into()));
    }
    let extent = args.extent.unwrap_or_else(|| default_extent(args.bar_n, args.n));
    if extent <= 0.0 {
        return Err(CliError::Usage("--extent must be positive".into()));
    }
    let spec = GridSpec::square(extent, args.resolution)?;
    let grid = sample_grid(|pt| eval_spats_wigner_evolved(pt, &channel, args.bar_n), &spec)?;

    let mut sidecar = Sidecar::new("wigner-grid", args.format.name(), &args.out);
    sidecar.parameters = json!({
        "bar_n": args.bar_n,
        "n": args.n,
        "gamma_t": args.gamma_t,
        "extent": extent,
        "resolution": args.resolution,
        "columns": ["q", "p", "w"],
    });
    sidecar.tolerances = json!({ "normalization": grid.norm_tol() });
    sidecar.summary = json!({
        "min": grid.min(),
        "max": grid.max(),
        "integral": grid.integral(),
        "threshold_gamma_t": threshold_spats(args.n),
    });

    write_with_sidecar(&args.out, &sidecar, |w| match args.format {
        Format::Csv => grid.write_csv(w),
        Format::Jsonl => {
            for i in 0..spec.nq {
                for j in 0..spec.np {
                    let row = json!({ "q": spec.q_at(i), "p": spec.p_at(j), "w": grid.value(i, j) });
                    serde_json::to_writer(&mut *w, &row)?;
                    w.write_all(b"\n")?;
                }
            }
            Ok(())
        }
    })
}

#[derive(Debug, Clone, Serialize)]
struct PnwRow {
    gamma_t: f64,
    bar_n: f64,
    pnw_analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pnw_numeric: Option<f64>,
}

pub fn pnw_curve(args: &PnwCurveArgs) -> CliResult<()> {
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if args.bar_n.is_empty() {
        return Err(CliError::Usage("--bar-n needs at least one value".into()));
    }
    for &b in &args.bar_n {
        check_bar_n(b)?;
    }
    ChannelParams::new(args.n, args.gamma_t)?;

    let mut seeds = args.bar_n.clone();
    seeds.sort_by(f64::total_cmp);
    seeds.dedup();
    let cells: Vec<(f64, usize)> = seeds
        .iter()
        .flat_map(|&b| (0..args.steps).map(move |k| (b, k)))
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|&(bar_n, k)| -> CliResult<PnwRow> {
            let gamma_t = args.gamma_t * k as f64 / (args.steps - 1) as f64;
            let channel = ChannelParams::new(args.n, gamma_t)?;
            let pnw_numeric = if args.numeric {
                let f = |pt| eval_spats_wigner_evolved(pt, &channel, bar_n);
                Some(pnw_numeric(&f, default_extent(bar_n, args.n), PNW_BASE_RESOLUTION, PNW_ABS_TOL)?.volume)
            } else {
                None
            };
            Ok(PnwRow {
                gamma_t,
                bar_n,
                pnw_analytic: pnw_spats_analytic(&channel, bar_n).volume,
                pnw_numeric,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    rows.sort_by(|a, b| a.bar_n.total_cmp(&b.bar_n).then(a.gamma_t.total_cmp(&b.gamma_t)));

    let intercepts: Vec<Value> = seeds
        .iter()
        .map(|&b| {
            let first_zero = rows
                .iter()
                .find(|r| r.bar_n == b && r.pnw_analytic == 0.0)
                .map(|r| r.gamma_t);
            json!({ "bar_n": b, "first_zero_gamma_t": first_zero })
        })
        .collect();

    let mut sidecar = Sidecar::new("pnw-curve", args.format.name(), &args.out);
    let mut columns = vec!["gamma_t", "bar_n", "pnw_analytic"];
    if args.numeric {
        columns.push("pnw_numeric");
    }
    sidecar.parameters = json!({
        "bar_n": seeds,
        "n": args.n,
        "gamma_t_max": args.gamma_t,
        "steps": args.steps,
        "numeric": args.numeric,
        "columns": columns,
    });
    sidecar.tolerances = if args.numeric {
        json!({ "pnw_numeric_abs_tol": PNW_ABS_TOL, "pnw_numeric_base_resolution": PNW_BASE_RESOLUTION })
    } else {
        json!({})
    };
    sidecar.summary = json!({
        "threshold_gamma_t": threshold_spats(args.n),
        "first_zero": intercepts,
    });

    write_with_sidecar(&args.out, &sidecar, |w| match args.format {
        Format::Csv => {
            writeln!(w, "{}", columns.join(","))?;
            for r in &rows {
                let mut line = format!(
                    "{},{},{}",
                    fmt_f64(r.gamma_t),
                    fmt_f64(r.bar_n),
                    fmt_f64(r.pnw_analytic)
                );
                if let Some(v) = r.pnw_numeric {
                    line.push(',');
                    line.push_str(&fmt_f64(v));
                }
                writeln!(w, "{line}")?;
            }
            Ok(())
        }
        Format::Jsonl => write_jsonl(w, &rows),
    })
}

fn threshold_reports(
    ns: &[f64],
    seeds: &[f64],
    tol: f64,
    method: ThresholdMethodArg,
) -> CliResult<Vec<ThresholdReport>> {
    let cases: Vec<(f64, f64)> = ns.iter().flat_map(|&n| seeds.iter().map(move |&b| (n, b))).collect();
    let reports = cases
        .par_iter()
        .map(|&(n, bar_n)| match method {
            ThresholdMethodArg::Origin => threshold_numeric_spats(n, bar_n, tol),
            ThresholdMethodArg::Pnw => threshold_numeric_spats_pnw(n, bar_n, tol),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports)
}

pub fn threshold(args: &ThresholdArgs) -> CliResult<()> {
    if args.n.is_empty() || args.bar_n.is_empty() {
        return Err(CliError::Usage("--n and --bar-n need at least one value".into()));
    }
    let reports = threshold_reports(&args.n, &args.bar_n, args.tol, args.method)?;
    let max_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);

    let mut sidecar = Sidecar::new("threshold", args.format.name(), &args.out);
    sidecar.parameters = json!({
        "n": args.n,
        "bar_n": args.bar_n,
        "method": match args.method { ThresholdMethodArg::Origin => "origin-sign-root", ThresholdMethodArg::Pnw => "pnw-vanishing" },
        "bracket": [0.0, 2.0],
    });
    sidecar.tolerances = json!({ "bisection": args.tol });
    sidecar.summary = json!({ "cases": reports.len(), "max_residual": max_residual });

    write_with_sidecar(&args.out, &sidecar, |w| match args.format {
        Format::Jsonl => write_jsonl(w, &reports),
        Format::Csv => {
            writeln!(w, "n,bar_n,gamma_t_c_analytic,gamma_t_c_numeric,residual")?;
            for r in &reports {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    fmt_f64(r.n),
                    fmt_f64(r.bar_n),
                    fmt_f64(r.gamma_t_c_analytic),
                    fmt_f64(r.gamma_t_c_numeric),
                    fmt_f64(r.residual)
                )?;
            }
            Ok(())
        }
    })
}

const ORACLE_CASES: [(f64, f64, f64); 2] = [(1.0, 0.5, 0.3), (0.0, 0.0, 0.5)];
const TOL_CONVOLUTION: f64 = 1e-8;
const TOL_FINITE_DIFFERENCE: f64 = 1e-3;
const TOL_FOCK: f64 = 1e-6;
const TOL_THRESHOLD: f64 = 1e-8;
const THEOREM_STATES: usize = 50;
const THEOREM_CUTOFF: usize = 12;
const THEOREM_CHANNELS: [f64; 3] = [0.0, 0.5, 1.0];

fn comparison(case: Value, check: &str, value: f64, tolerance: f64) -> Value {
    json!({
        "suite": "oracles",
        "case": case,
        "check": check,
        "max_abs_diff": value,
        "tolerance": tolerance,
        "passed": value < tolerance,
    })
}

fn oracle_records() -> CliResult<Vec<Value>> {
    let mut records = Vec::new();
    for (bar_n, n, gamma_t) in ORACLE_CASES {
        let channel = ChannelParams::new(n, gamma_t)?;
        let case = json!({ "bar_n": bar_n, "n": n, "gamma_t": gamma_t });
        let fine = GridSpec::square(6.0, 241)?;
        let coarse = GridSpec::square(6.0, 61)?;
        let closed_fine = sample_grid(|pt| eval_spats_wigner_evolved(pt, &channel, bar_n), &fine)?;
        let closed_coarse = sample_grid(|pt| eval_spats_wigner_evolved(pt, &channel, bar_n), &coarse)?;
        let initial = |pt| eval_spats_wigner_initial(pt, bar_n);

        let conv_spec = ConvolutionSpec {
            abs_tol: 1e-9,
            ..ConvolutionSpec::default()
        };
        let conv = convolve_grid(&initial, &channel, &coarse, &conv_spec)?;
        records.push(comparison(
            case.clone(),
            "closed-form-vs-convolution",
            conv.max_abs_diff(&closed_coarse)?,
            TOL_CONVOLUTION,
        ));

        let fp_spec = FokkerPlanckSpec {
            dt: FokkerPlanckSpec::stable_dt(&fine, n),
            scheme: FpScheme::Adi,
        };
        let run = fokker_planck_evolve(&sample_grid(initial, &fine)?, &channel, &fp_spec)?;
        let mut fd = comparison(
            case.clone(),
            "closed-form-vs-finite-difference",
            run.grid.max_abs_diff(&closed_fine)?,
            TOL_FINITE_DIFFERENCE,
        );
        fd["mass_drift"] = json!(run.mass_drift());
        fd["steps"] = json!(run.steps);
        records.push(fd);

        let evolved = evolve_fock_diagonal(&spats_weights(bar_n, DEFAULT_TAIL_TOL)?, &channel, 1e-13)?;
        let fock = try_sample_grid(|pt| eval_fock_diagonal_wigner(pt, &evolved), &fine)?;
        records.push(comparison(
            case,
            "closed-form-vs-fock-basis",
            fock.max_abs_diff(&closed_fine)?,
            TOL_FOCK,
        ));
    }
    Ok(records)
}

fn threshold_records() -> CliResult<Vec<Value>> {
    let ns = [0.0, 0.5, 1.0, 2.0];
    let seeds = [0.0, 3.0 / 7.0, 1.0, 10.0];
    let reports = threshold_reports(&ns, &seeds, 1e-12, ThresholdMethodArg::Origin)?;
    let mut records = Vec::new();
    for n in ns {
        let group: Vec<&ThresholdReport> = reports.iter().filter(|r| r.n == n).collect();
        let lo = group.iter().map(|r| r.gamma_t_c_numeric).fold(f64::INFINITY, f64::min);
        let hi = group
            .iter()
            .map(|r| r.gamma_t_c_numeric)
            .fold(f64::NEG_INFINITY, f64::max);
        for r in &group {
            let mut v = serde_json::to_value(r).expect("report serializes");
            v["suite"] = json!("thresholds");
            v["tolerance"] = json!(TOL_THRESHOLD);
            v["passed"] = json!(r.residual < TOL_THRESHOLD);
            records.push(v);
        }
        records.push(json!({
            "suite": "thresholds",
            "check": "seed-independence",
            "n": n,
            "spread": hi - lo,
            "tolerance": TOL_THRESHOLD,
            "passed": hi - lo < TOL_THRESHOLD,
        }));
    }
    Ok(records)
}

fn theorem_records(seed: u64) -> CliResult<Vec<Value>> {
    let reports = verify_theorem_batch(
        seed,
        THEOREM_STATES,
        THEOREM_CUTOFF,
        &THEOREM_CHANNELS,
        &TheoremConfig::default(),
    )?;
    Ok(reports
        .iter()
        .map(|r| serde_json::to_value(r).expect("report serializes"))
        .collect())
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    if args.format != Format::Jsonl {
        return Err(CliError::Usage(
            "verify writes JSON lines only; use --format jsonl".into(),
        ));
    }
    let (records, suite_name) = match args.suite {
        Suite::Oracles => (oracle_records()?, "oracles"),
        Suite::Theorem => (theorem_records(args.seed)?, "theorem"),
        Suite::Thresholds => (threshold_records()?, "thresholds"),
    };
    let failed: Vec<&Value> = records.iter().filter(|r| r["passed"] != json!(true)).collect();

    let config = TheoremConfig::default();
    let mut sidecar = Sidecar::new("verify", args.format.name(), &args.out);
    sidecar.parameters = match args.suite {
        Suite::Oracles => {
            json!({ "suite": suite_name, "cases": ORACLE_CASES.iter().map(|(b, n, t)| json!({"bar_n": b, "n": n, "gamma_t": t})).collect::<Vec<_>>() })
        }
        Suite::Theorem => json!({
            "suite": suite_name,
            "seed": args.seed,
            "states": THEOREM_STATES,
            "cutoff": THEOREM_CUTOFF,
            "channel_n": THEOREM_CHANNELS,
            "grid": config.grid,
            "scope": THEOREM_SCOPE_NOTE,
        }),
        Suite::Thresholds => {
            json!({ "suite": suite_name, "n": [0.0, 0.5, 1.0, 2.0], "bar_n": [0.0, 3.0 / 7.0, 1.0, 10.0] })
        }
    };
    sidecar.tolerances = match args.suite {
        Suite::Oracles => json!({
            "closed_form_vs_convolution": TOL_CONVOLUTION,
            "closed_form_vs_finite_difference": TOL_FINITE_DIFFERENCE,
            "closed_form_vs_fock_basis": TOL_FOCK,
        }),
        Suite::Theorem => json!({
            "origin": config.tol_origin,
            "grid_min": config.tol_min,
            "q_identity": config.tol_q,
            "fock_step": config.step_tol,
        }),
        Suite::Thresholds => json!({ "residual": TOL_THRESHOLD, "bisection": 1e-12 }),
    };
    sidecar.summary = json!({ "cases": records.len(), "failed": failed.len() });

    write_with_sidecar(&args.out, &sidecar, |w| write_jsonl(w, &records))?;

    if failed.is_empty() {
        Ok(())
    } else {
        for f in &failed {
            eprintln!("{f}");
        }
        Err(CliError::Verification(format!(
            "{} of {} {suite_name} cases failed",
            failed.len(),
            records.len()
        )))
    }
}
