//! Subcommand bodies. Each fills the defaults it uses into the config so
//! that the embedded copy reruns to the same result.

use serde_json::{json, Value};

use super::config::{
    config_err, AlternativeChoice, ConfigError, KSpec, LambdaSpec, MiddleChoice, RunConfig,
    TargetKind,
};
use super::output::{num, opt_num, Plot, Report, Table};
use super::{CliError, Command, SignalAction};
use crate::bifurcate::{
    find_double_saddle_node, find_saddle_node, BifurcationResult, CurveOptions, CurvePoint,
    CurveTarget, PredicateOptions, WindowRule,
};
use crate::bounded::{
    auto_bounds, certify, lower_bounded, middle_bounded, separation, upper_bounded,
    BoundedSolutionEstimate, LowerMode, LowerSign, Pullback, Window,
};
use crate::figures::{
    curve_figure, figure, CurveFigure, Figure, FigureId, ShiftCurve, TransitionFigure,
    TransitionRun,
};
use crate::integrate::{solve, SolveOptions};
use crate::models::{preset, ConcavityOrder, ModelSpec};
use crate::signals::{membership_check, PSpaceParams};
use crate::transitions::{find_tipping, AttractivePath, TransitionProblem, TransitionSetup};

type Result<T> = std::result::Result<T, CliError>;

pub(super) fn dispatch(command: &Command, cfg: &mut RunConfig) -> Result<Report> {
    let report = match command {
        Command::Signal { action } => signal(*action, cfg)?,
        Command::Solve => solve_cmd(cfg)?,
        Command::Bounded => bounded(cfg)?,
        Command::Bifurcate => bifurcate(cfg)?,
        Command::Curve => curve(cfg)?,
        Command::Classify => classify(cfg)?,
        Command::Tip => tip(cfg)?,
        Command::Reproduce { figure } => reproduce(*figure, cfg)?,
    };
    let mut report = report;
    // The config is complete only now; put it in front of the result.
    let result = std::mem::take(&mut report.json);
    // Where the files go and how many threads ran are not part of the run.
    let recorded = RunConfig {
        out: None,
        jobs: None,
        ..cfg.clone()
    };
    report.json = json!({
        "command": command.name(),
        "config": recorded,
        "result": result,
    });
    Ok(report)
}

fn fill<T: Copy>(slot: &mut Option<T>, default: T) -> T {
    *slot.get_or_insert(default)
}

fn positive(name: &str, v: f64) -> std::result::Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        config_err(format!("{name} must be positive, got {v}"))
    }
}

fn window(cfg: &mut RunConfig, default: Window) -> Result<Window> {
    let (a, b) = cfg.window_or([default.start, default.end])?;
    cfg.window = Some([a, b]);
    let dt = positive("dt", fill(&mut cfg.dt, default.dt))?;
    if dt > b - a {
        return Err(CliError::Config(format!(
            "dt = {dt} exceeds the window length"
        )));
    }
    Ok(Window::with_dt(a, b, dt))
}

/// Predicate settings: `base` with the window, pullback and bound keys of
/// the config applied.
fn predicate(cfg: &mut RunConfig, base: PredicateOptions) -> Result<PredicateOptions> {
    let mut p = base.with_window(window(cfg, base.window)?);
    p.bounded.tol = positive("bounded_tol", fill(&mut cfg.bounded_tol, base.bounded.tol))?;
    p.bounded.max_doublings = fill(&mut cfg.max_doublings, base.bounded.max_doublings);
    p.bounded.gamma_min = positive(
        "gamma_min",
        fill(&mut cfg.gamma_min, base.bounded.gamma_min),
    )?;
    p.x_lo = cfg.x_lo.or(base.x_lo);
    p.x_hi = cfg.x_hi.or(base.x_hi);
    Ok(p)
}

fn default_target(spec: &ModelSpec) -> TargetKind {
    match spec.concavity_order() {
        ConcavityOrder::First => TargetKind::Single,
        ConcavityOrder::Second => TargetKind::Double,
    }
}

/// Single or double target from the config, defaulting to `base`.
fn curve_target(cfg: &mut RunConfig, base: CurveTarget) -> Result<CurveTarget> {
    let kind = match (cfg.target, base) {
        (Some(k), _) => k,
        (None, CurveTarget::Single { .. }) => TargetKind::Single,
        (None, CurveTarget::Double { .. }) => TargetKind::Double,
    };
    cfg.target = Some(kind);
    match (kind, base) {
        (TargetKind::Single, base) => {
            let (lo, hi) = match (cfg.lambda_range()?, base) {
                (Some(r), _) => r,
                (None, CurveTarget::Single { lo, hi }) => (lo, hi),
                (None, CurveTarget::Double { seed, radius }) => {
                    (seed - 4.0 * radius, seed + 4.0 * radius)
                }
            };
            cfg.lambda = Some(LambdaSpec::Range([lo, hi]));
            Ok(CurveTarget::Single { lo, hi })
        }
        (TargetKind::Double, base) => {
            let (s0, r0) = match base {
                CurveTarget::Double { seed, radius } => (seed, radius),
                CurveTarget::Single { lo, hi } => (0.5 * (lo + hi), 0.1 * (hi - lo)),
            };
            let seed = fill(&mut cfg.lambda_seed, s0);
            let radius = positive("radius", fill(&mut cfg.radius, r0))?;
            Ok(CurveTarget::Double { seed, radius })
        }
    }
}

fn status(r: &BifurcationResult) -> &'static str {
    if r.values.iter().all(|v| v.within_tol) {
        "ok"
    } else {
        "unresolved"
    }
}

fn curve_header(target: TargetKind, with_shift: bool) -> Table {
    let mut cols = Vec::new();
    if with_shift {
        cols.push("s");
    }
    cols.push("k");
    match target {
        TargetKind::Single => cols.push("lambda_tilde"),
        TargetKind::Double => cols.extend(["lambda_minus", "lambda_plus"]),
    }
    cols.extend(["bracket_width", "status"]);
    Table::new(&cols)
}

fn curve_row(
    table: &mut Table,
    target: TargetKind,
    s: Option<f64>,
    k: f64,
    result: Option<&BifurcationResult>,
) {
    let mut row = Vec::new();
    if let Some(s) = s {
        row.push(num(s));
    }
    row.push(num(k));
    let n = match target {
        TargetKind::Single => 1,
        TargetKind::Double => 2,
    };
    match result {
        Some(r) => {
            row.extend(r.values.iter().take(n).map(|v| num(v.value)));
            row.push(num(r.bracket_width()));
            row.push(status(r).into());
        }
        None => {
            row.extend(std::iter::repeat(String::new()).take(n + 1));
            row.push("failed".into());
        }
    }
    table.push(row);
}

fn curve_series(points: &[CurvePoint], target: TargetKind) -> Vec<(&'static str, Vec<(f64, f64)>)> {
    let column = |i: usize| {
        points
            .iter()
            .filter_map(|p| p.values().and_then(|v| v.get(i).map(|&l| (p.k, l))))
            .collect::<Vec<_>>()
    };
    match target {
        TargetKind::Single => vec![("lambda_tilde", column(0))],
        TargetKind::Double => vec![("lambda_minus", column(0)), ("lambda_plus", column(1))],
    }
}

fn failures(points: &[CurvePoint]) -> Option<String> {
    let failed: Vec<String> = points
        .iter()
        .filter(|p| p.result.is_none())
        .map(|p| format!("k = {}: {}", p.k, p.error.as_deref().unwrap_or("")))
        .collect();
    (!failed.is_empty()).then(|| {
        format!(
            "{} grid point(s) failed; {}",
            failed.len(),
            failed.join("; ")
        )
    })
}

fn signal(action: SignalAction, cfg: &mut RunConfig) -> Result<Report> {
    let sig = match &cfg.signal {
        Some(s) => s.clone(),
        None => {
            let spec = cfg.model_spec()?;
            match spec.forcing() {
                Some(s) => s.clone(),
                None => {
                    return Err(CliError::Config(format!(
                        "model {} has no forcing signal; pass --signal",
                        spec.id()
                    )))
                }
            }
        }
    };
    let (a, b) = cfg.window_or([-10.0, 10.0])?;
    cfg.window = Some([a, b]);
    let stride = positive("stride", fill(&mut cfg.stride, 0.05))?;
    let per_unit = (1.0 / stride).round().max(1.0) as usize;
    match action {
        SignalAction::Eval => {
            let samples = sig.sample(a, b, per_unit);
            let mut table = Table::new(&["t", "value"]);
            for &(t, v) in &samples {
                table.push(vec![num(t), num(v)]);
            }
            let (lo, hi) = samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &(_, v)| {
                    (l.min(v), h.max(v))
                });
            Ok(Report::new(
                "signal",
                json!({ "samples": samples.len(), "min": lo, "max": hi }),
            )
            .table("", table)
            .plot(Plot::new("signal", "t", "value").series("signal", samples)))
        }
        SignalAction::Check => {
            let params = *cfg.p_space.get_or_insert(PSpaceParams::default());
            PSpaceParams::new(params.k1, params.k2).map_err(|e| CliError::Config(e.to_string()))?;
            let report = membership_check(&sig, params, (a, b), per_unit);
            Ok(Report::new("signal_check", json!(report)))
        }
    }
}

fn solve_cmd(cfg: &mut RunConfig) -> Result<Report> {
    let family = cfg.family()?;
    let lambda = cfg.lambda_value()?;
    let (s, t_end) = cfg.window_or([0.0, 10.0])?;
    cfg.window = Some([s, t_end]);
    let x0 = fill(&mut cfg.x0, 0.0);
    let stride = positive("stride", fill(&mut cfg.stride, 0.05))?;
    let opts = SolveOptions::with_tol(positive("tol", fill(&mut cfg.tol, 1e-8))?);
    let traj = solve(&family.field(lambda), s, x0, t_end, opts)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let samples = traj.sample(stride);
    let mut table = Table::new(&["t", "x"]);
    for &(t, x) in &samples {
        table.push(vec![num(t), num(x)]);
    }
    let json = json!({
        "status": traj.status,
        "escape_time": traj.status.escape().map(|e| e.time),
        "final_state": traj.final_state(),
        "end": traj.end(),
        "stats": traj.stats,
    });
    Ok(Report::new("solve", json).table("", table).plot(
        Plot::new(format!("{} at lambda = {lambda}", family.name()), "t", "x").series("x", samples),
    ))
}

fn bounded(cfg: &mut RunConfig) -> Result<Report> {
    let spec = cfg.model_spec()?;
    let family = cfg.family()?;
    let lambda = cfg.lambda_value()?;
    let p = predicate(cfg, PredicateOptions::default())?;
    let field = family.field(lambda);
    let opts = p.bounded;
    let order = spec.concavity_order();
    let sign = match order {
        ConcavityOrder::First => LowerSign::Negative,
        ConcavityOrder::Second => LowerSign::Any,
    };
    let (x_lo, x_hi) = match (p.x_lo, p.x_hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        (lo, hi) => {
            let (alo, ahi) = auto_bounds(&field, &p.window, sign)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            (lo.unwrap_or(alo), hi.unwrap_or(ahi))
        }
    };
    let numerical = |e: crate::bounded::BoundedError| CliError::Numerical(e.to_string());
    let upper = upper_bounded(&field, p.window, x_hi, &opts).map_err(numerical)?;
    let lower_mode = match order {
        ConcavityOrder::First => LowerMode::Backward,
        ConcavityOrder::Second => LowerMode::Forward,
    };
    let lower = lower_bounded(&field, p.window, x_lo, lower_mode, &opts).map_err(numerical)?;
    let mut runs: Vec<(&str, Pullback)> = vec![("upper", upper), ("lower", lower)];
    let mut notes: Vec<String> = Vec::new();
    if order == ConcavityOrder::Second {
        if let (Some(l), Some(u)) = (runs[1].1.estimate(), runs[0].1.estimate()) {
            if l.converged && u.converged {
                let method = fill(&mut cfg.method, MiddleChoice::BackwardPullback);
                match middle_bounded(&field, l, u, method.into(), &opts) {
                    Ok(m) => runs.push(("middle", Pullback::Bounded(m))),
                    Err(e) => notes.push(format!("middle solution not found: {e}")),
                }
            }
        }
    }
    let mut certificates = serde_json::Map::new();
    for (name, run) in &mut runs {
        if let Pullback::Bounded(est) = run {
            if est.converged {
                let c = certify(&field, est, &opts);
                if let Ok(c) = &c {
                    est.certificate = c.certificate;
                }
                let v = match c {
                    Ok(c) => json!(c),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                certificates.insert(name.to_string(), v);
            }
        }
    }
    let estimates: Vec<(&str, &BoundedSolutionEstimate)> = runs
        .iter()
        .filter_map(|(n, r)| r.estimate().filter(|e| e.converged).map(|e| (*n, e)))
        .collect();
    let mut separations = serde_json::Map::new();
    for (i, (a, ea)) in estimates.iter().enumerate() {
        for (b, eb) in &estimates[i + 1..] {
            if let Ok(d) = separation(ea, eb) {
                separations.insert(format!("{a}-{b}"), json!(d));
            }
        }
    }
    let mut report = Report::new(
        "bounded",
        json!({
            "lambda": lambda,
            "x_lo": x_lo,
            "x_hi": x_hi,
            "solutions": runs.iter().map(|(n, r)| (n.to_string(), json!(summary(r)))).collect::<serde_json::Map<_, _>>(),
            "certificates": certificates,
            "separations": separations,
            "notes": notes,
        }),
    );
    // Wide table first (stdout), then one file per role.
    let times = p.window.times();
    let mut header = vec!["t"];
    header.extend(estimates.iter().map(|(n, _)| *n));
    let mut wide = Table::new(&header);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(estimates.iter().map(|(_, e)| num(e.values[i])));
        wide.push(row);
    }
    report = report.table("", wide);
    let mut plot = Plot::new(format!("bounded solutions at lambda = {lambda}"), "t", "x");
    for (name, est) in &estimates {
        let mut t = Table::new(&["t", "x"]);
        for (time, x) in est.samples() {
            t.push(vec![num(time), num(x)]);
        }
        report = report.table(name, t);
        plot = plot.series(*name, est.samples());
    }
    Ok(report.plot(plot))
}

/// Residual, convergence and escape of a pullback, without the samples.
fn summary(run: &Pullback) -> Value {
    match run {
        Pullback::Bounded(e) => json!({
            "converged": e.converged,
            "residual": e.residual,
            "depth": e.depth,
            "direction": e.direction,
            "min": e.inf(),
            "max": e.sup(),
        }),
        Pullback::Escapes { escape, depth } => json!({ "escape": escape, "depth": depth }),
    }
}

fn bifurcate(cfg: &mut RunConfig) -> Result<Report> {
    let spec = cfg.model_spec()?;
    let family = cfg.family()?;
    let (lo, hi) = family.range();
    let base = match default_target(&spec) {
        TargetKind::Single => CurveTarget::Single { lo, hi },
        TargetKind::Double => CurveTarget::Double {
            seed: 0.5 * (lo + hi),
            radius: 0.1 * (hi - lo),
        },
    };
    let target = curve_target(cfg, base)?;
    let tol = positive("tol", fill(&mut cfg.tol, 1e-6))?;
    // The undetermined zone next to a fold shrinks like gamma_min².
    let mut base = PredicateOptions::default();
    base.bounded.gamma_min = base.bounded.gamma_min.min(tol.sqrt());
    let p = predicate(cfg, base)?;
    let result = match target {
        CurveTarget::Single { lo, hi } => find_saddle_node(&family, lo, hi, tol, &p),
        CurveTarget::Double { seed, radius } => {
            find_double_saddle_node(&family, seed, radius, tol, &p)
        }
    }
    .map_err(|e| CliError::Numerical(e.to_string()))?;
    let kind = cfg.target.unwrap_or(TargetKind::Single);
    let mut table = curve_header(kind, false);
    curve_row(&mut table, kind, None, cfg.k_value()?, Some(&result));
    Ok(Report::new("bifurcate", json!(result)).table("", table))
}

/// A `CurveFigure` whose preset matches the config, used as defaults.
fn matching_curve_figure(preset_name: &str) -> Option<CurveFigure> {
    FigureId::ALL
        .into_iter()
        .filter_map(curve_figure)
        .find(|c| c.preset == preset_name)
}

/// Curve options from the config over `base`.
fn curve_options(cfg: &mut RunConfig, base: CurveOptions) -> Result<CurveOptions> {
    let target = curve_target(cfg, base.target)?;
    let tol = positive("tol", fill(&mut cfg.tol, base.tol))?;
    let predicate = predicate(cfg, base.predicate)?;
    let window_rule = match (cfg.tail_reach, base.window_rule) {
        (Some(reach), _) => WindowRule::BlendTail {
            reach: positive("tail_reach", reach)?,
        },
        (None, WindowRule::BlendTail { reach }) => {
            cfg.tail_reach = Some(reach);
            WindowRule::BlendTail { reach }
        }
        (None, WindowRule::Fixed) => WindowRule::Fixed,
    };
    Ok(CurveOptions {
        target,
        tol,
        warm_start: fill(&mut cfg.warm_start, base.warm_start),
        cross_checks: fill(&mut cfg.cross_checks, base.cross_checks),
        seed: fill(&mut cfg.seed, base.seed),
        predicate,
        window_rule,
    })
}

fn curve(cfg: &mut RunConfig) -> Result<Report> {
    let Some(name) = cfg.preset.clone() else {
        return Err(CliError::Config(
            "curve needs a preset family (--preset NAME)".into(),
        ));
    };
    if cfg.model.is_some() {
        // Checks that model and preset agree.
        let probe = RunConfig {
            k: None,
            ..cfg.clone()
        };
        probe.model_spec()?;
    }
    let grid = cfg.k_grid()?;
    let s = fill(&mut cfg.shift, 0.0);
    let base = match matching_curve_figure(&name) {
        Some(f) => f.options,
        None => {
            let spec = preset(&name, grid[0], s).map_err(|e| CliError::Config(e.to_string()))?;
            let family = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
            let (lo, hi) = family.range();
            let target = match default_target(&spec) {
                TargetKind::Single => CurveTarget::Single { lo, hi },
                TargetKind::Double => CurveTarget::Double {
                    seed: 0.5 * (lo + hi),
                    radius: 0.1 * (hi - lo),
                },
            };
            CurveOptions {
                target,
                tol: 1e-6,
                warm_start: true,
                cross_checks: 2,
                seed: 0,
                predicate: PredicateOptions::default(),
                window_rule: WindowRule::Fixed,
            }
        }
    };
    let options = curve_options(cfg, base)?;
    let fig = CurveFigure {
        id: FigureId::Fig1,
        preset: name.clone(),
        shifts: vec![s],
        grid,
        options,
    };
    let curves = fig.run().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(curve_report(
        &name,
        &curves,
        cfg.target.unwrap_or(TargetKind::Single),
        &name,
    ))
}

fn curve_report(stem: &str, curves: &[ShiftCurve], target: TargetKind, title: &str) -> Report {
    let with_shift = curves.len() > 1;
    let mut table = curve_header(target, with_shift);
    let mut plot = Plot::new(title, "k", "lambda");
    let mut failure = None;
    for c in curves {
        for p in &c.table.points {
            curve_row(
                &mut table,
                target,
                with_shift.then_some(c.s),
                p.k,
                p.result.as_ref(),
            );
        }
        for (name, pts) in curve_series(&c.table.points, target) {
            let label = if with_shift {
                format!("{name} (s = {})", c.s)
            } else {
                name.to_string()
            };
            plot = plot.series(label, pts);
        }
        failure = failure.or_else(|| failures(&c.table.points));
    }
    let mut report = Report::new(stem, json!({ "curves": curves }))
        .table("", table)
        .plot(plot);
    report.failure = failure;
    report
}

/// The transition problem of the config. Presets of the bundled transition
/// figures supply their setup as defaults.
fn transition(cfg: &mut RunConfig) -> Result<(TransitionProblem, Option<TransitionFigure>)> {
    let fig = cfg.preset.as_deref().and_then(|p| {
        [FigureId::Fig3, FigureId::Sec42]
            .into_iter()
            .filter_map(crate::figures::transition_figure)
            .find(|f| f.preset == p)
    });
    let base = match &fig {
        Some(f) => {
            if cfg.k.is_none() {
                cfg.k = Some(KSpec::Value(f.k));
            }
            if cfg.future_preset.is_none() && cfg.future_model.is_none() {
                cfg.future_preset = Some(f.future_preset.clone());
                cfg.future_k = Some(f.future_k);
            }
            if cfg.alternative.is_none() {
                cfg.alternative = Some(match f.problem.alternative {
                    crate::transitions::Alternative::None => AlternativeChoice::None,
                    crate::transitions::Alternative::LowerAttractor => {
                        AlternativeChoice::LowerAttractor
                    }
                });
            }
            f.setup
        }
        None => TransitionSetup::new(Window::new(-40.0, 0.0), 100.0),
    };
    let family = cfg.family()?;
    let future = cfg
        .future_spec()?
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut setup = base;
    setup.anchor = window(cfg, base.anchor)?;
    setup.horizon = fill(&mut cfg.horizon, base.horizon);
    if !(setup.horizon > setup.anchor.end) {
        return Err(CliError::Config(format!(
            "horizon {} must lie after the anchor window end {}",
            setup.horizon, setup.anchor.end
        )));
    }
    setup.bounded.tol = positive("bounded_tol", fill(&mut cfg.bounded_tol, base.bounded.tol))?;
    setup.bounded.max_doublings = fill(&mut cfg.max_doublings, base.bounded.max_doublings);
    setup.x_hi = cfg.x_hi.or(base.x_hi);
    let alternative = fill(&mut cfg.alternative, AlternativeChoice::None);
    let problem =
        TransitionProblem::new(family, future, setup).with_alternative(alternative.into());
    Ok((problem, fig))
}

fn path_table(paths: &[std::result::Result<AttractivePath, String>]) -> (Table, Plot) {
    let mut table = Table::new(&["lambda", "t", "x"]);
    let mut plot = Plot::new("attractive solutions", "t", "x");
    for p in paths.iter().flatten() {
        for &(t, x) in &p.samples {
            table.push(vec![num(p.lambda), num(t), num(x)]);
        }
        plot = plot.series(format!("lambda = {}", p.lambda), p.samples.clone());
    }
    (table, plot)
}

fn classify(cfg: &mut RunConfig) -> Result<Report> {
    let lambda = cfg.lambda_value()?;
    let (mut problem, _) = transition(cfg)?;
    problem.setup.tol = positive("tol", fill(&mut cfg.tol, problem.setup.tol))?;
    let verdict = problem
        .verdict(lambda)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut report = Report::new("classify", json!(verdict));
    if let Some(stride) = cfg.stride {
        let path = problem
            .path(lambda, positive("stride", stride)?)
            .map_err(|e| CliError::Numerical(e.to_string()));
        let (table, plot) = path_table(&[path.map_err(|e| e.to_string())]);
        report = report.table("path", table).plot(plot);
    }
    Ok(report)
}

fn tip(cfg: &mut RunConfig) -> Result<Report> {
    let (problem, fig) = transition(cfg)?;
    let (lo, hi) = match (cfg.lambda_range()?, &fig) {
        (Some(r), _) => r,
        (None, Some(f)) => f.bracket,
        (None, None) => {
            return Err(CliError::Config(
                "tip needs a bracket (--lambda LO:HI)".into(),
            ))
        }
    };
    cfg.lambda = Some(LambdaSpec::Range([lo, hi]));
    let tol = positive(
        "tol",
        fill(&mut cfg.tol, fig.as_ref().map_or(1e-6, |f| f.tol)),
    )?;
    let result =
        find_tipping(&problem, lo, hi, tol).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut probes = Table::new(&["lambda", "outcome", "note"]);
    for p in &result.probes {
        probes.push(vec![num(p.lambda), p.outcome.to_string(), p.note.clone()]);
    }
    let mut report = Report::new("tip", json!(result)).table("probes", probes);
    if let Some(stride) = cfg.stride {
        let stride = positive("stride", stride)?;
        let lambdas = [lo, result.value(), hi];
        let paths: Vec<_> = lambdas
            .iter()
            .map(|&l| problem.path(l, stride).map_err(|e| e.to_string()))
            .collect();
        let (table, plot) = path_table(&paths);
        report = report.table("paths", table).plot(plot);
    }
    Ok(report)
}

fn reproduce(id: Option<FigureId>, cfg: &mut RunConfig) -> Result<Report> {
    let Some(id) = id.or(cfg.figure) else {
        return Err(CliError::Config(
            "reproduce needs a figure (fig1, fig2, fig3, fig5, fig6, sec42)".into(),
        ));
    };
    cfg.figure = Some(id);
    match figure(id) {
        Figure::Curve(mut fig) => {
            if cfg.k.is_some() {
                fig.grid = cfg.k_grid()?;
            }
            if let Some(s) = cfg.shift {
                fig.shifts = vec![s];
            }
            // Only explicitly given keys change the figure's options.
            let given = cfg.clone();
            let mut scratch = cfg.clone();
            fig.options = curve_options(&mut scratch, fig.options)?;
            *cfg = given;
            let target = match fig.options.target {
                CurveTarget::Single { .. } => TargetKind::Single,
                CurveTarget::Double { .. } => TargetKind::Double,
            };
            let curves = fig.run().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(curve_report(id.as_str(), &curves, target, id.as_str()))
        }
        Figure::Transition(mut fig) => {
            if let Some(h) = cfg.horizon {
                fig = fig.clone().with_setup(TransitionSetup {
                    horizon: h,
                    ..fig.setup
                });
            }
            if let Some(r) = cfg.lambda_range()? {
                fig.bracket = r;
            }
            if let Some(tol) = cfg.tol {
                fig.tol = positive("tol", tol)?;
            }
            if let Some(stride) = cfg.stride {
                fig.stride = positive("stride", stride)?;
            }
            let run = fig.run();
            Ok(transition_report(id, &fig, run))
        }
    }
}

fn transition_report(id: FigureId, fig: &TransitionFigure, run: TransitionRun) -> Report {
    let (paths, mut plot) = path_table(&run.paths);
    plot.title = format!("{id}: attractive solutions");
    let mut verdicts = Table::new(&[
        "lambda",
        "verdict",
        "escape_time",
        "distance_tracked",
        "distance_alternative",
    ]);
    for (l, v) in &run.verdicts {
        match v {
            Ok(v) => verdicts.push(vec![
                num(*l),
                format!("{:?}", v.verdict).to_lowercase(),
                opt_num(v.escape.map(|e| e.time)),
                opt_num(v.distance_tracked),
                opt_num(v.distance_alternative),
            ]),
            Err(_) => verdicts.push(vec![
                num(*l),
                "failed".into(),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
    }
    let failure = match &run.tipping {
        Err(e) => Some(format!("tipping search failed: {e}")),
        Ok(_) => None,
    };
    let mut report = Report::new(
        id.as_str(),
        json!({
            "figure": fig,
            "lambda_critical": run.tipping.as_ref().ok().map(|r| r.value()),
            "tipping": run.tipping,
            "verdicts": run.verdicts,
            "paths": run.paths.iter().map(|p| match p {
                Ok(p) => json!({ "lambda": p.lambda, "samples": p.samples.len(), "escape": p.escape }),
                Err(e) => json!({ "error": e }),
            }).collect::<Vec<_>>(),
        }),
    )
    .table("", paths)
    .table("verdicts", verdicts)
    .plot(plot);
    report.failure = failure;
    report
}
