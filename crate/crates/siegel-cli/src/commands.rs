//! The five commands.

use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::json;

use siegel::arithmetic::{brjuno_sum, classify, continued_fraction, ClassifyConfig};
use siegel::herman::{
    conjugacy_samples, modulus_estimate, rotation_number, solve_lambda, CircleFamily,
    HermanError, RotationMode,
};
use siegel::linearizer::{
    conformal_radius, linearizer_coeffs, verify_conjugacy, LinearizerSeries, RadiusMethod,
    MIN_FIT_COEFFS,
};
use siegel::search::{
    linearizer_distance, radius_scan, scan_alphas, semicontinuity_probe, target_radius_search,
    OracleConfig, RadiusOracle, SearchConfig, SearchError, SearchTrace,
};

use crate::alpha_lit::{parse_alpha, parse_quotients, parse_scales};
use crate::output::{write_atomic, Header};
use crate::{
    BrjunoArgs, CliError, CliResult, FamilyArgs, HermanArgs, HermanCommand, RadiusArgs, ScanArgs,
    SearchArgs,
};

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn cmd_brjuno(args: &BrjunoArgs, json_out: bool) -> CliResult<()> {
    if args.terms == 0 {
        return Err(usage("--terms must be >= 1"));
    }
    let x = match (&args.alpha, &args.quotients) {
        (Some(alpha), None) => parse_alpha(alpha).map_err(usage)?,
        (None, Some(quotients)) => parse_quotients(quotients).map_err(usage)?,
        _ => return Err(usage("exactly one of --alpha or --quotients is required")),
    };
    let cf = continued_fraction(&x, args.terms, args.cutoff).map_err(usage)?;
    let sum = brjuno_sum(&cf, args.terms).map_err(usage)?;
    let class = classify(
        &x,
        &ClassifyConfig {
            max_terms: args.terms,
            rational_cutoff: args.cutoff,
            ..ClassifyConfig::default()
        },
    );
    let terms = cf.brjuno_terms();
    if json_out {
        let quotients: Vec<String> = cf.quotients().iter().map(|a| a.to_string()).collect();
        let convergents: Vec<[String; 2]> = cf
            .convergents()
            .iter()
            .map(|(p, q)| [p.to_string(), q.to_string()])
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "alpha": x.value(),
                "terminated": cf.terminated(),
                "quotients": quotients,
                "convergents": convergents,
                "brjuno_partial_sum": sum.partial_sum,
                "brjuno_terms_used": sum.terms_used,
                "divergence_flag": sum.divergence_flag,
                "classification": class.to_string(),
            }))
            .expect("serializable")
        );
        return Ok(());
    }
    println!("alpha = {}", x.value());
    println!("terminated (rational detected): {}", cf.terminated());
    let quotient_list: Vec<String> = cf.quotients().iter().map(|a| a.to_string()).collect();
    println!("quotients: {}", quotient_list.join(" "));
    println!("convergents (position, p, q):");
    for (i, (p, q)) in cf.convergents().iter().enumerate() {
        println!("  {:3}  {p}  {q}", i + 1);
    }
    println!("brjuno terms ln(q_(n+1))/q_n and partial sums:");
    let mut partial = 0.0;
    for (i, t) in terms.iter().enumerate() {
        partial += t;
        println!("  {:3}  {t:.12}  {partial:.12}", i + 1);
    }
    println!(
        "brjuno partial sum over {} terms = {} (divergence flag: {})",
        sum.terms_used, sum.partial_sum, sum.divergence_flag
    );
    println!("classification: {class}");
    Ok(())
}

pub fn cmd_radius(args: &RadiusArgs, json_out: bool) -> CliResult<()> {
    if args.order < MIN_FIT_COEFFS {
        return Err(usage(format!(
            "--order {} is below the minimum {MIN_FIT_COEFFS} needed for a radius fit",
            args.order
        )));
    }
    if !(args.sigma > 0.0) {
        return Err(usage("--sigma must be positive"));
    }
    let alpha = parse_alpha(&args.alpha).map_err(usage)?;
    let series = linearizer_coeffs(&alpha, args.order, args.sigma);
    let hadamard = conformal_radius(&series, RadiusMethod::HadamardFit, args.window_fraction)
        .map_err(usage)?;
    let tail = conformal_radius(&series, RadiusMethod::TailSlope, args.window_fraction)
        .map_err(usage)?;
    let residual = match series.resonance() {
        Some(_) => None,
        None => {
            let m = args.verify.unwrap_or_else(|| series.order().min(512));
            Some(verify_conjugacy(&series, m).map_err(usage)?)
        }
    };
    if let Some(path) = &args.coeffs_out {
        write_series_file(path, &series, &args.alpha)?;
    }
    if json_out {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "alpha": alpha.value(),
                "order": series.order(),
                "sigma": series.sigma(),
                "resonance_order": series.resonance().map(|r| r.order),
                "conjugacy_residual": residual,
                "radius_hadamard": hadamard.value,
                "radius_tail_slope": tail.value,
                "uncertainty": hadamard.uncertainty,
                "resonant_zero": hadamard.resonant_zero,
            }))
            .expect("serializable")
        );
        return Ok(());
    }
    println!("alpha = {}", alpha.value());
    println!("order = {} (sigma = {})", series.order(), series.sigma());
    match series.resonance() {
        Some(res) => {
            println!("resonance at order {} (divisor {:.3e})", res.order, res.divisor_magnitude);
            println!("conformal radius = 0 (exact: resonant parameter)");
        }
        None => {
            println!(
                "conjugacy residual (order {}) = {:.3e}",
                args.verify.unwrap_or_else(|| series.order().min(512)),
                residual.expect("non-resonant")
            );
            println!("radius (hadamard-fit) = {} +/- {}", hadamard.value, hadamard.uncertainty);
            println!("radius (tail-slope)  = {}", tail.value);
            if let Some((lo, hi)) = hadamard.window {
                println!("fit window: orders {lo}..{hi}");
            }
        }
    }
    Ok(())
}

fn write_series_file(path: &PathBuf, series: &LinearizerSeries, alpha_lit: &str) -> CliResult<()> {
    let mut header = Header::new("radius --coeffs-out");
    header
        .push("alpha", alpha_lit)
        .push("alpha_value", series.alpha().value())
        .push("sigma", series.sigma())
        .push("order", series.order())
        .columns("n,re_d,im_d,ln_abs_c");
    let mut body = header.render();
    for (i, d) in series.coeffs().iter().enumerate() {
        let n = i + 1;
        body.push_str(&format!("{n},{},{},{}\n", d.re, d.im, series.ln_coeff(n)));
    }
    write_atomic(path, &body)
}

pub fn cmd_search(args: &SearchArgs, json_out: bool) -> CliResult<()> {
    let alpha0 = parse_alpha(&args.alpha0).map_err(usage)?;
    let oracle = RadiusOracle::new(OracleConfig { order: args.order, ..OracleConfig::default() });
    let r0 = oracle.radius(alpha0.value());
    let r_target = match (args.r_target, args.target_ratio) {
        (Some(v), None) => v,
        (None, Some(ratio)) => ratio * r0,
        _ => return Err(usage("exactly one of --r-target or --target-ratio is required")),
    };
    if !(r_target > 0.0) {
        return Err(usage(format!("target radius must be positive, got {r_target}")));
    }
    let tol = args.tol.unwrap_or(0.02 * r_target);
    let cfg = SearchConfig {
        max_stages: args.max_stages,
        seed: args.seed,
        ..SearchConfig::default()
    };
    let result = target_radius_search(alpha0.value(), r_target, args.delta, tol, &oracle, &cfg);
    let (trace, failure): (&SearchTrace, Option<&SearchError>) = match &result {
        Ok(trace) => (trace, None),
        Err(err) => match search_error_trace(err) {
            Some(trace) => (trace, Some(err)),
            None => return Err(usage(err)),
        },
    };
    if let Some(path) = &args.out {
        write_trace_file(path, args, trace, r_target, tol)?;
    }
    // Distance between the final and initial linearizers on the target disk.
    let final_dist = if trace.stages.len() > 1 {
        let order = trace.stages.last().expect("nonempty").order;
        let s0 = oracle.series_at(trace.stages[0].beta, order);
        let sf = oracle.series_at(trace.final_alpha, order);
        linearizer_distance(&s0, &sf, cfg.dist_radius_factor * r_target, cfg.dist_grid)
            .map_err(|e| CliError::NonConverged(e.to_string()))?
    } else {
        0.0
    };
    let final_r = trace.stages.last().expect("nonempty").radius.value;
    if json_out {
        let stages: Vec<_> = trace
            .stages
            .iter()
            .map(|s| {
                json!({
                    "index": s.index,
                    "beta": s.beta,
                    "epsilon": s.epsilon,
                    "requested_radius": s.requested_radius,
                    "radius": s.radius.value,
                    "distance": s.distance,
                    "order": s.order,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "alpha0": alpha0.value(),
                "r_target": r_target,
                "tol": tol,
                "delta": args.delta,
                "converged": trace.converged,
                "final_alpha": trace.final_alpha,
                "final_radius": final_r,
                "distance_to_initial": final_dist,
                "stages": stages,
                "failure": failure.map(|e| e.to_string()),
            }))
            .expect("serializable")
        );
    } else {
        println!("alpha0 = {} (r = {r0})", alpha0.value());
        println!("target radius = {r_target} (tol {tol}, delta {})", args.delta);
        for s in &trace.stages {
            println!(
                "stage {:2}: beta = {:.17} eps = {:.3e} requested = {:.8} r = {:.8} dist = {:.3e} order = {}",
                s.index, s.beta, s.epsilon, s.requested_radius, s.radius.value, s.distance,
                s.order
            );
        }
        println!("converged = {}", trace.converged);
        println!("final alpha = {:.17} (moved {:.3e})", trace.final_alpha,
            (trace.final_alpha - alpha0.value()).abs());
        println!("final radius = {final_r}");
        println!("distance to initial linearizer on |z| <= {} : {final_dist:.3e}",
            cfg.dist_radius_factor * r_target);
        if let Some(err) = failure {
            println!("failure: {err}");
        }
    }
    match failure {
        None => Ok(()),
        Some(err) => Err(CliError::NonConverged(err.to_string())),
    }
}

fn search_error_trace(err: &SearchError) -> Option<&SearchTrace> {
    match err {
        SearchError::MarginUncertified { trace, .. }
        | SearchError::NoCrossing { trace, .. }
        | SearchError::StageIvt { trace, .. }
        | SearchError::StageBudget { trace, .. } => Some(trace),
        _ => None,
    }
}

fn write_trace_file(
    path: &PathBuf,
    args: &SearchArgs,
    trace: &SearchTrace,
    r_target: f64,
    tol: f64,
) -> CliResult<()> {
    let mut header = Header::new("search");
    header
        .push("alpha0", &args.alpha0)
        .push("r_target", r_target)
        .push("delta", args.delta)
        .push("tol", tol)
        .push("order", args.order)
        .push("max_stages", args.max_stages)
        .push("seed", args.seed)
        .columns("i,beta,epsilon,requested_r,r_est,uncertainty,distance,order");
    let mut body = header.render();
    for s in &trace.stages {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.index,
            s.beta,
            s.epsilon,
            s.requested_radius,
            s.radius.value,
            s.radius.uncertainty,
            s.distance,
            s.order
        ));
    }
    body.push_str("# summary\n");
    body.push_str(&format!("# converged = {}\n", trace.converged));
    body.push_str(&format!("# final_alpha = {}\n", trace.final_alpha));
    body.push_str(&format!(
        "# final_radius = {}\n",
        trace.stages.last().expect("nonempty").radius.value
    ));
    body.push_str(&format!("# stages = {}\n", trace.stages.len()));
    write_atomic(path, &body)
}

pub fn cmd_scan(args: &ScanArgs, json_out: bool) -> CliResult<()> {
    if args.count == 0 {
        return Err(usage("--count must be >= 1"));
    }
    if args.count > args.max_points {
        return Err(usage(format!(
            "grid of {} points exceeds the budget of {} (raise --max-points deliberately)",
            args.count, args.max_points
        )));
    }
    if !(args.from > 0.0 && args.to < 1.0 && args.from <= args.to) {
        return Err(usage("scan window must satisfy 0 < from <= to < 1"));
    }
    if args.order < MIN_FIT_COEFFS {
        return Err(usage(format!("--order must be at least {MIN_FIT_COEFFS}")));
    }
    let oracle = RadiusOracle::new(OracleConfig { order: args.order, ..OracleConfig::default() });
    let alphas = scan_alphas(args.from, args.to, args.count, args.snap_qmax);
    let rows = radius_scan(&oracle, &alphas);

    let mut header = Header::new("scan");
    header
        .push("from", args.from)
        .push("to", args.to)
        .push("count", args.count)
        .push("order", args.order)
        .push("snap_qmax", args.snap_qmax)
        .push("seed", args.seed)
        .columns("alpha,r_est,uncertainty,resonant");
    let mut body = header.render();
    for row in &rows {
        body.push_str(&format!(
            "{},{},{},{}\n",
            row.alpha, row.radius, row.uncertainty, row.resonant as u8
        ));
    }

    let probe = match &args.probe_alpha {
        Some(lit) => {
            let center = parse_alpha(lit).map_err(usage)?;
            let scales = parse_scales(&args.probe_scales).map_err(usage)?;
            let table = semicontinuity_probe(
                center.value(),
                &scales,
                args.probe_samples,
                &oracle,
                args.seed,
            );
            body.push_str("# probe\n");
            body.push_str(&format!("# probe_alpha = {}\n", center.value()));
            body.push_str("# columns = scale,left_max,right_max,usc_margin,lsc_surrogate\n");
            for row in &table {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.scale, row.left_max, row.right_max, row.usc_margin, row.lsc_surrogate
                ));
            }
            Some(table)
        }
        None => None,
    };

    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("scan.csv"));
    write_atomic(&out, &body)?;

    let zeros = rows.iter().filter(|r| r.resonant).count();
    if json_out {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "rows": rows.len(),
                "resonant_zeros": zeros,
                "min_radius": rows.iter().map(|r| r.radius).fold(f64::INFINITY, f64::min),
                "max_radius": rows.iter().map(|r| r.radius).fold(0.0, f64::max),
                "probe_rows": probe.as_ref().map(|t| t.len()),
                "out": out.display().to_string(),
            }))
            .expect("serializable")
        );
    } else {
        println!("wrote {} rows to {}", rows.len(), out.display());
        println!("resonant zeros: {zeros}");
        if let Some(table) = &probe {
            println!("probe rows: {}", table.len());
        }
    }
    Ok(())
}

fn build_family(family: &FamilyArgs, lambda: f64) -> CliResult<CircleFamily> {
    match family.family.as_str() {
        "blaschke" => {
            if family.a_im != 0.0 {
                return Err(usage("--a-im only applies to the arnold family"));
            }
            CircleFamily::blaschke(family.a, lambda).map_err(usage)
        }
        "arnold" => CircleFamily::arnold(Complex64::new(family.a, family.a_im), lambda)
            .map_err(usage),
        other => Err(usage(format!("unknown family `{other}` (blaschke or arnold)"))),
    }
}

fn parse_mode(mode: &str) -> CliResult<RotationMode> {
    match mode {
        "birkhoff" => Ok(RotationMode::Birkhoff),
        "accelerated" | "convergent-accelerated" => Ok(RotationMode::ConvergentAccelerated),
        other => Err(usage(format!("unknown mode `{other}` (birkhoff or accelerated)"))),
    }
}

fn parse_rho_target(lit: &str) -> CliResult<f64> {
    if let Ok(v) = lit.trim().parse::<f64>() {
        if (0.0..1.0).contains(&v) {
            return Ok(v);
        }
        return Err(usage(format!("rotation target must lie in [0,1), got {v}")));
    }
    Ok(parse_alpha(lit).map_err(usage)?.value())
}

fn herman_error(err: HermanError) -> CliError {
    match err {
        HermanError::RotationTooUncertain { .. } => CliError::NonConverged(err.to_string()),
        _ => CliError::Usage(err.to_string()),
    }
}

pub fn cmd_herman(args: &HermanArgs, json_out: bool) -> CliResult<()> {
    match &args.command {
        HermanCommand::Rotnum { family, lambda, iters, mode } => {
            let fam = build_family(family, *lambda)?;
            let mode = parse_mode(mode)?;
            let est = rotation_number(&fam, *iters, mode).map_err(herman_error)?;
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "lambda": lambda,
                        "rho": est.value,
                        "error_bound": est.error_bound,
                    }))
                    .expect("serializable")
                );
            } else {
                println!("rho({lambda}) = {} (error bound {:.3e})", est.value, est.error_bound);
            }
            Ok(())
        }
        HermanCommand::Solve { family, rho, tol } => {
            let fam = build_family(family, 0.0)?;
            let target = parse_rho_target(rho)?;
            let sol = solve_lambda(&fam, target, *tol).map_err(herman_error)?;
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "rho_target": target,
                        "lambda": sol.lambda,
                        "rho": sol.rho.value,
                        "error_bound": sol.rho.error_bound,
                        "mode_locked": sol.mode_locked,
                    }))
                    .expect("serializable")
                );
            } else {
                println!("lambda = {:.17}", sol.lambda);
                println!("rho(lambda) = {} (error bound {:.3e})", sol.rho.value, sol.rho.error_bound);
                println!("mode locked: {}", sol.mode_locked);
            }
            Ok(())
        }
        HermanCommand::Conjugacy { family, lambda, rho, samples, out } => {
            let lambda = match (lambda, rho) {
                (Some(l), None) => *l,
                (None, Some(r)) => {
                    let fam = build_family(family, 0.0)?;
                    let target = parse_rho_target(r)?;
                    solve_lambda(&fam, target, 1e-8).map_err(herman_error)?.lambda
                }
                _ => return Err(usage("exactly one of --lambda or --rho is required")),
            };
            let fam = build_family(family, lambda)?;
            let conj = conjugacy_samples(&fam, *samples).map_err(herman_error)?;
            let modulus = modulus_estimate(&conj, None).ok();
            if let Some(path) = out {
                let mut header = Header::new("herman conjugacy");
                header
                    .push("family", &family.family)
                    .push("a", family.a)
                    .push("lambda", lambda)
                    .push("samples", samples)
                    .push("rho", conj.rho.value)
                    .push("rho_error_bound", conj.rho.error_bound);
                if let Some(m) = modulus {
                    header.push("modulus_estimate", m);
                }
                header.columns("k,re_w,im_w");
                let mut body = header.render();
                for (k, w) in conj.points().iter().enumerate() {
                    body.push_str(&format!("{k},{},{}\n", w.re, w.im));
                }
                body.push_str("# fourier\n");
                body.push_str("# columns = j,re_T,im_T,ln_abs_T\n");
                for (j, c) in conj.fourier_iter() {
                    body.push_str(&format!("{j},{},{},{}\n", c.re, c.im, c.norm().ln()));
                }
                write_atomic(path, &body)?;
            }
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "lambda": lambda,
                        "rho": conj.rho.value,
                        "rho_error_bound": conj.rho.error_bound,
                        "samples": samples,
                        "j_max": conj.j_max(),
                        "modulus_estimate": modulus,
                    }))
                    .expect("serializable")
                );
            } else {
                println!("lambda = {lambda:.17}");
                println!("rho = {} (error bound {:.3e})", conj.rho.value, conj.rho.error_bound);
                println!("samples = {} (fourier |j| <= {})", samples, conj.j_max());
                match modulus {
                    Some(m) => println!("half-modulus estimate = {m}"),
                    None => println!("half-modulus estimate unavailable (too few usable coefficients)"),
                }
            }
            Ok(())
        }
        HermanCommand::Lockscan { family, from, to, grid, iters, out } => {
            if *grid < 2 {
                return Err(usage("--grid must be >= 2"));
            }
            let fam = build_family(family, 0.0)?;
            let step = (to - from) / (*grid - 1) as f64;
            let mut rows = Vec::with_capacity(*grid);
            for i in 0..*grid {
                let lambda = from + step * i as f64;
                let est =
                    rotation_number(&fam.with_lambda(lambda), *iters, RotationMode::Birkhoff)
                        .map_err(herman_error)?;
                rows.push((lambda, est.value, est.error_bound));
            }
            let violations = rows
                .windows(2)
                .filter(|w| w[1].1 < w[0].1 - (w[0].2 + w[1].2))
                .count();
            if let Some(path) = out {
                let mut header = Header::new("herman lockscan");
                header
                    .push("family", &family.family)
                    .push("a", family.a)
                    .push("from", from)
                    .push("to", to)
                    .push("grid", grid)
                    .push("iters", iters)
                    .columns("lambda,rho,error_bound");
                let mut body = header.render();
                for (lambda, rho, bound) in &rows {
                    body.push_str(&format!("{lambda},{rho},{bound}\n"));
                }
                write_atomic(path, &body)?;
            }
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "rows": rows.len(),
                        "monotonicity_violations": violations,
                        "rho_first": rows.first().map(|r| r.1),
                        "rho_last": rows.last().map(|r| r.1),
                    }))
                    .expect("serializable")
                );
            } else {
                println!("lockscan: {} rows, monotonicity violations beyond bounds: {violations}",
                    rows.len());
            }
            Ok(())
        }
    }
}
