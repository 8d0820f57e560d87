//! One function per subcommand. Each renders its files in memory; nothing is
//! written unless the experiment ran to a verdict.

use std::path::Path;

use fixpoint_core::bounds::{bound_ratio, new_scheme_bound, picard_mann_bound, BoundInputs};
use fixpoint_core::contraction::estimate_weak_contraction;
use fixpoint_core::csvio::{format_float, render_traces, write_table};
use fixpoint_core::delay::{method_of_steps_oracle, solve_dde};
use fixpoint_core::harness::{compare_schemes_with, stability_experiment, PerturbationSpec, StabilityReport};
use fixpoint_core::problems::{delay_problem, scalar_problem, ScalarProblem};
use fixpoint_core::{Point, StopReason};

use crate::config::{Command, RunConfig};
use crate::output::{trace_plot_script, Outputs};
use crate::Failure;

/// Files to write plus an optional failed verdict. Verdict failures (no
/// convergence, hypothesis not certified) still commit their files as
/// evidence; errors before that point write nothing.
type Outcome = (Outputs, Option<Failure>);

pub fn dispatch(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let (outputs, verdict) = match cmd {
        Command::Compare => compare(cfg)?,
        Command::Stability => stability(cfg)?,
        Command::Dde => dde(cfg)?,
        Command::Bounds => bounds(cfg)?,
        Command::Certify => certify(cfg)?,
    };
    for path in outputs.commit(out)? {
        println!("wrote {}", path.display());
    }
    verdict.map_or(Ok(()), Err)
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_table(&mut buf, header, rows)?;
    Ok(buf)
}

fn scalar(cfg: &RunConfig, default: &str) -> Result<ScalarProblem, Failure> {
    let mut prob = scalar_problem(cfg.problem.as_deref().unwrap_or(default))?;
    if let Some(x0) = cfg.x0 {
        if !prob.map.contains(&x0) {
            return Err(Failure::config(format!("x0 = {x0} is outside the domain of {}", prob.name)));
        }
        prob.x0 = x0;
    }
    Ok(prob)
}

fn compare(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let prob = scalar(cfg, "cuberoot")?;
    let kinds = cfg.scheme_kinds()?;
    let sched = cfg.schedule.build()?;
    let report = compare_schemes_with(&kinds, &prob.map, &prob.x0, &sched, cfg.tol, cfg.max_iter, cfg.stopping())?;

    println!("problem {} from x0 = {}", prob.name, prob.x0);
    for run in &report.runs {
        let t = &run.trace;
        let status = match run.iterations_to_tol {
            Some(n) => format!("tolerance {:e} met at n = {n}", cfg.tol),
            None => format!("tolerance not met, stopped by {} at n = {}", t.stop_reason, t.last().n),
        };
        let err = t.final_err().map_or("-".to_string(), |e| format!("{e:.3e}"));
        println!("  {:<11} {status}, final err {err}", run.kind.name());
    }
    let names: Vec<&str> = report.ordering.iter().map(|k| k.name()).collect();
    println!("ordering: {}", names.join(" < "));

    let traces: Vec<_> = report.runs.iter().map(|r| &r.trace).collect();
    let mut outputs = Outputs::default();
    outputs.add("compare.csv", render_traces(traces.iter().copied())?);
    let (column, label) = if prob.map.fixed_point().is_some() {
        (4, "|x_n - p|")
    } else {
        (5, "|x_n - T x_n|")
    };
    outputs.add("compare.gp", trace_plot_script("compare.csv", &kinds, column, label));

    let diverged: Vec<&str> = report
        .runs
        .iter()
        .filter(|r| r.trace.stop_reason == StopReason::Diverged)
        .map(|r| r.kind.name())
        .collect();
    let verdict = (!diverged.is_empty()).then(|| Failure::nonconvergence(format!("diverged: {}", diverged.join(", "))));
    Ok((outputs, verdict))
}

fn stability(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let prob = scalar(cfg, "cuberoot")?;
    let sched = cfg.schedule.build()?;
    let specs = [
        PerturbationSpec::Decaying {
            c: cfg.perturbation_c,
            q: cfg.perturbation_q,
        },
        PerturbationSpec::Constant { c: cfg.perturbation_c },
    ];
    let reports = specs
        .iter()
        .map(|&s| stability_experiment(&prob.map, &prob.x0, &sched, s, cfg.horizon))
        .collect::<Result<Vec<StabilityReport<f64>>, _>>()?;

    let mut rows = Vec::new();
    for rep in &reports {
        println!(
            "{}: tail n >= {}: eps max {:.3e}, err in [{:.3e}, {:.3e}]; verdict_forward {}, verdict_converse {}",
            rep.perturbation.name(),
            rep.tail_start,
            rep.tail_eps_max,
            rep.tail_err_min,
            rep.tail_err_max,
            rep.verdict_forward,
            rep.verdict_converse
        );
        rows.extend(rep.records.iter().map(|r| {
            vec![
                rep.perturbation.name().to_string(),
                r.n.to_string(),
                format_float(r.z),
                format_float(r.eps),
                format_float(r.err),
            ]
        }));
    }
    let mut outputs = Outputs::default();
    outputs.add("stability.csv", table(&["perturbation", "n", "z", "eps", "err"], rows)?);
    let verdict = reports.iter().find(|r| r.diverged).map(|rep| {
        Failure::nonconvergence(format!(
            "{} perturbation drove the iteration out of range",
            rep.perturbation.name()
        ))
    });
    Ok((outputs, verdict))
}

fn dde(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let name = cfg.problem.as_deref().unwrap_or("negfeedback");
    let (t0, b) = (cfg.t0.unwrap_or(0.0), cfg.b.unwrap_or(0.45));
    let prob = delay_problem(name, t0, b)?;
    println!(
        "C5: 2δ(b−t0) = 2·{}·({} − {}) = {} < 1",
        prob.delta,
        prob.b,
        prob.t0,
        prob.c5_value()
    );
    let sched = cfg.schedule.build()?;
    let sol = solve_dde(&prob, cfg.h, &sched, cfg.tol, cfg.max_iter)?;
    print!("{}", sol.report);
    let oracle = method_of_steps_oracle(&prob, cfg.h)?;
    let sup = sol.solution.distance(&oracle);
    println!(
        "{} iterations ({}), sup error vs reference {:.6e}",
        sol.trace.last().n,
        sol.trace.stop_reason,
        sup
    );

    let rows = sol
        .solution
        .iter()
        .zip(oracle.iter())
        .map(|((t, x), (_, r))| vec![format_float(t), format_float(x), format_float(r), format_float((x - r).abs())])
        .collect();
    let mut outputs = Outputs::default();
    outputs.add("solution.csv", table(&["t", "x", "x_ref", "abs_err"], rows)?);
    let verdict = if sol.report.any_violated() {
        Some(Failure::hypothesis(format!("condition check failed:\n{}", sol.report)))
    } else if !sol.converged {
        Some(Failure::nonconvergence(format!(
            "no convergence within {} iterations (residual {:.3e})",
            cfg.max_iter,
            sol.trace.last().residual
        )))
    } else {
        None
    };
    Ok((outputs, verdict))
}

fn bounds(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let delta = match (cfg.delta, cfg.problem.as_deref()) {
        (Some(d), _) => d,
        (None, Some(p)) => p
            .strip_prefix("linear-")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Failure::config(format!("bounds needs delta or a linear-<δ> problem, got {p:?}")))?,
        (None, None) => return Err(Failure::config("bounds needs delta")),
    };
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Failure::config(format!("delta must lie in (0, 1), got {delta}")));
    }
    let sched = cfg.schedule.build()?;
    let inp = BoundInputs::new(delta, sched.alpha.clone(), sched.beta.clone(), cfg.initial_err, 0)?;
    let rows: Vec<Vec<String>> = (0..=cfg.n_max)
        .map(|n| {
            let i = inp.with_n(n);
            vec![
                n.to_string(),
                format_float(new_scheme_bound(&i)),
                format_float(picard_mann_bound(&i)),
                format_float(bound_ratio(&i)),
            ]
        })
        .collect();
    println!("delta = {delta}, rows n = 0..={}", cfg.n_max);
    let mut outputs = Outputs::default();
    outputs.add(
        "bounds.csv",
        table(&["n", "new_scheme_bound", "picard_mann_bound", "bound_ratio"], rows)?,
    );
    Ok((outputs, None))
}

fn certify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let prob = scalar(cfg, "linear-0.5")?;
    let est = estimate_weak_contraction(&prob.map, cfg.samples, cfg.seed, &cfg.l_grid)?;
    println!(
        "{}: delta_hat = {:.12} at L = {} from {} samples (seed {}), max slack {:.3e}, certified {}",
        prob.name, est.delta_hat, est.l_hat, est.samples, est.sampler_seed, est.max_violation, est.certified
    );
    let rows = est
        .per_l
        .iter()
        .map(|&(l, d)| vec![format_float(l), format_float(d)])
        .collect();
    let mut outputs = Outputs::default();
    outputs.add("certify.csv", table(&["L", "delta_hat"], rows)?);
    let verdict = (!est.certified).then(|| {
        Failure::hypothesis(format!(
            "{} is not a weak contraction on the sampled pairs (delta_hat = {})",
            prob.name, est.delta_hat
        ))
    });
    Ok((outputs, verdict))
}
