use anyhow::{anyhow, bail, Result};
use flrw_blowup::config::RunConfig;
use flrw_blowup::exponents::{flrw_thresholds, threshold_set, ExponentSet, RootDescriptor, Threshold};
use flrw_blowup::kato::{KatoOrder, KatoProblem};
use flrw_blowup::params::lightcone_radius;
use flrw_blowup::regions::{
    applicable_bounds, bound_value, classify_region, region_curves, region_grid, BoundKind, GridSpec,
};
use flrw_blowup::solver::run;
use flrw_blowup::specfun::{BesselContext, Phi, PhiQ};
use flrw_blowup::sweep::{compare_prediction, predicted_bound, run_sweep, SweepSettings};
use serde_json::json;

use crate::output::{g12, opt, Out};
use crate::{BesselArgs, BoundsArgs, ExponentsArgs, KatoArgs, RegionsArgs, SimulateArgs, SweepArgs, TestfnArgs};

type Rows = Vec<(String, String)>;

fn row(k: &str, v: String) -> (String, String) {
    (k.to_string(), v)
}

fn root(r: &RootDescriptor<f64>) -> String {
    match r {
        RootDescriptor::Finite(v) => g12(*v),
        RootDescriptor::AllP => "all p".into(),
    }
}

fn threshold(t: &Threshold<f64>) -> String {
    match t {
        Threshold::Finite(v) => g12(*v),
        Threshold::NoFiniteThreshold => "none".into(),
    }
}

fn exponent_rows(s: &ExponentSet<f64>) -> Rows {
    vec![
        row("p_G", g12(s.p_g)),
        row("p_G'", g12(s.p_g_prime)),
        row("p_0", g12(s.p_0)),
        row("p_c'", root(&s.p_c_prime)),
        row("p_0'", threshold(&s.p_0_prime)),
        row("p_F'", g12(s.p_f_prime)),
        row("p_F", g12(s.p_f_ref)),
        row("p_c", root(&s.p_c_ref)),
        row("mu_crossing", g12(s.mu_crossing)),
        row("mu_star", g12(s.mu_star)),
        row("mu_zero", g12(s.mu_zero)),
    ]
}

fn kind_fields(k: &BoundKind<f64>) -> String {
    match *k {
        BoundKind::PowerLaw { k } => format!("k={}", g12(k)),
        BoundKind::Exponential { r } => format!("r={}", g12(r)),
        BoundKind::ImplicitPowerLog { s, l, m } => format!("s={} l={} m={}", g12(s), g12(l), g12(m)),
    }
}

pub fn exponents(cfg: &RunConfig, args: &ExponentsArgs, out: &Out) -> Result<()> {
    let n = cfg.n;
    let record = match cfg.w {
        Some(w) => {
            let f = flrw_thresholds(n, w)?;
            let mut rows = vec![
                row("n", n.to_string()),
                row("w", g12(w)),
                row("alpha", g12(f.alpha)),
                row("mu", g12(f.mu)),
                row("regime", format!("{:?}", f.regime)),
                row("p_damping", g12(f.p_damping)),
            ];
            if let Some(s) = &f.decelerating {
                rows.extend(exponent_rows(s));
            } else {
                rows.push(row("p_G", g12(f.p_g)));
            }
            if let Some(r) = &f.p_c_prime_w {
                rows.push(row("p_c'(w)", root(r)));
            }
            (rows, serde_json::to_value(f)?)
        }
        None if cfg.alpha < 1.0 => {
            let s = threshold_set(n, cfg.alpha, cfg.mu)?;
            let mut rows = vec![row("n", n.to_string()), row("alpha", g12(cfg.alpha)), row("mu", g12(cfg.mu))];
            rows.extend(exponent_rows(&s));
            (rows, serde_json::to_value(s)?)
        }
        None => {
            let s = flrw_blowup::exponents::p_glassey(n as f64)?;
            let damping = 1.0 + 1.0 / cfg.mu;
            let rows = vec![
                row("n", n.to_string()),
                row("alpha", g12(cfg.alpha)),
                row("mu", g12(cfg.mu)),
                row("p_G", g12(s)),
                row("p_damping", g12(damping)),
            ];
            let v = json!({ "n": n, "alpha": cfg.alpha, "mu": cfg.mu, "p_g": s, "p_damping": damping });
            (rows, v)
        }
    };
    out.json("exponents.json", &record.1)?;
    if args.json {
        out.say(serde_json::to_string_pretty(&record.1)?);
    } else {
        out.table(&record.0);
    }
    Ok(())
}

pub fn bounds(cfg: &RunConfig, _: &BoundsArgs, out: &Out) -> Result<()> {
    let m = cfg.model()?;
    let all = applicable_bounds(&m);
    let label = classify_region(&m);
    let header = ["source", "applicable", "kind", "parameters", "exponent", "t_at_epsilon", "condition"];
    let mut rows = Vec::new();
    for b in &all {
        let t = if b.applicable { bound_value(&b.kind, m.epsilon).ok().map(|v| v.t) } else { None };
        rows.push(vec![
            b.source.tag().to_string(),
            b.applicable.to_string(),
            b.kind.name().to_string(),
            kind_fields(&b.kind),
            g12(b.kind.exponent()),
            opt(t),
            b.condition.clone(),
        ]);
    }
    out.csv("bounds.csv", &header, &rows)?;
    for r in rows.iter().filter(|r| r[1] == "true") {
        out.say(format!("{:<24} {:<12} {:<28} T <= {}", r[0], r[2], r[3], r[5]));
    }
    match &label.winner {
        Some(b) => out.say(format!("region {} (best: {})", label.region.label(), b.source.tag())),
        None => out.say("region none: no blow-up result applies"),
    }
    Ok(())
}

pub fn regions(_: &RunConfig, args: &RegionsArgs, out: &Out) -> Result<()> {
    let figure = args.figure.ok_or_else(|| anyhow!("--figure is required"))?;
    let mut spec = GridSpec::<f64>::figure(figure)?;
    spec = spec.with_resolution(args.nx.unwrap_or(spec.nx), args.np.unwrap_or(spec.np));
    let grid = region_grid(&spec)?;
    let curves = region_curves(&spec)?;
    let rows: Vec<_> = grid
        .iter()
        .map(|r| {
            vec![
                g12(r.x),
                g12(r.p),
                r.region.label().to_string(),
                r.bound_kind.unwrap_or("").to_string(),
                opt(r.exponent),
            ]
        })
        .collect();
    out.csv("grid.csv", &["x", "p", "region", "bound_kind", "exponent"], &rows)?;
    let rows: Vec<_> = curves.iter().map(|c| vec![c.curve.clone(), g12(c.x), g12(c.p)]).collect();
    out.csv("curves.csv", &["curve_name", "x", "p"], &rows)?;
    out.say(format!("figure {figure}: {} grid cells, {} curve points", grid.len(), curves.len()));
    Ok(())
}

pub fn bessel(_: &RunConfig, args: &BesselArgs, out: &Out) -> Result<()> {
    let nu = args.nu.ok_or_else(|| anyhow!("--nu is required"))?;
    let ts = args.t.clone().ok_or_else(|| anyhow!("--t is required"))?;
    let ctx = BesselContext::new(nu);
    let mut rows = Vec::new();
    for &t in &ts {
        let k = ctx.bessel_k(t)?;
        let lk = ctx.log_bessel_k(t)?;
        let r = ctx.identity_residuals(t)?;
        rows.push(vec![g12(nu), g12(t), g12(k), g12(lk), g12(r.ode), g12(r.recurrence), g12(r.asymptotic)]);
    }
    let header = ["nu", "t", "k", "log_k", "ode_residual", "recurrence_residual", "asymptotic_residual"];
    out.csv("bessel.csv", &header, &rows)?;
    out.say(header.join(","));
    for r in &rows {
        out.say(r.join(","));
    }
    Ok(())
}

pub fn testfn_check(cfg: &RunConfig, args: &TestfnArgs, out: &Out) -> Result<()> {
    let m = cfg.model()?;
    if m.alpha >= 1.0 {
        bail!("test functions need alpha < 1 (got {})", m.alpha);
    }
    let phi = Phi::new(&m)?;
    let phi_q = args.q.map(|q| PhiQ::new(&m, q)).transpose()?;
    let ts = args.t.clone().unwrap_or_else(|| vec![1.0, 2.0, 5.0, 10.0, 20.0]);
    let mut rows = Vec::new();
    for &t in &ts {
        let a = lightcone_radius(t, m.alpha)?;
        for r in [0.0, 0.5 * a, a + m.radius] {
            let check = phi.phit_check(t)?;
            let mut line = vec![
                g12(t),
                g12(r),
                g12(phi.phi(t, r)?),
                g12(phi.phi_t(t, r)?),
                g12(phi.pde_residual(t, r)?),
                g12((check.log_derivative - check.ratio_form).abs() / check.ratio_form.abs()),
            ];
            match &phi_q {
                Some(pq) => {
                    line.push(g12(pq.phi_q(t, r)?));
                    line.push(g12(pq.phi_q_t(t, r)?));
                    line.push(opt(pq.envelope_ratio(t, r).ok()));
                }
                None => line.extend([String::new(), String::new(), String::new()]),
            }
            rows.push(line);
        }
    }
    let header = ["t", "r", "phi", "phi_t", "pde_residual", "phit_mismatch", "phi_q", "phi_q_t", "envelope_ratio"];
    out.csv("testfn.csv", &header, &rows)?;
    let worst = rows.iter().map(|r| r[4].parse::<f64>().unwrap_or(f64::NAN)).fold(0.0, f64::max);
    out.say(format!("nu = {}", g12(phi.nu())));
    out.say(format!("{} points, max relative pde residual {}", rows.len(), g12(worst)));
    Ok(())
}

fn kato_problem(args: &KatoArgs) -> Result<KatoProblem<f64>> {
    let order = KatoOrder::parse(args.order.as_deref().unwrap_or("first"))?;
    let spec = args.params.as_deref().unwrap_or("");
    let pairs: Vec<(&str, f64)> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("expected key=value, got `{kv}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| anyhow!("`{}`: not a number", k.trim()))?;
            Ok((k.trim(), v))
        })
        .collect::<Result<_>>()?;
    let p = pairs.iter().find(|(k, _)| *k == "p").map(|x| x.1).unwrap_or(2.0);
    let mut kp = KatoProblem::new(order, p);
    for (k, v) in pairs {
        match k {
            "p" => {}
            "a" => kp.a = v,
            "b" => kp.b = v,
            "c" => kp.c = v,
            "q" => kp.q = v,
            "r" => kp.r = v,
            "mu" => kp.mu = v,
            "A0" => kp.a0 = v,
            "A1" => kp.a1 = v,
            "R" => kp.radius = v,
            "T0" => kp.t0 = v,
            "T1" => kp.t1 = v,
            "F0" => kp.f0 = v,
            "dF0" => kp.df0 = v,
            other => bail!("unknown Kato parameter `{other}`"),
        }
    }
    kp.validate()?;
    Ok(kp)
}

pub fn kato(_: &RunConfig, args: &KatoArgs, out: &Out) -> Result<()> {
    let kp = kato_problem(args)?;
    let delta = args.delta.unwrap_or(0.1);
    let horizon = args.horizon.unwrap_or(1e12);
    let level = args.oracle_threshold.unwrap_or(1e12);
    let bound = kp.lifespan_bound()?;
    let first = kp.order == KatoOrder::FirstOrder;
    let growth = first.then(|| kp.growth_e());
    let divergence = if first { kp.divergence_time(delta, horizon).ok() } else { None };
    let oracle = kp.ode_oracle(level, horizon).ok();
    out.table(&[
        row("order", kp.order.key().into()),
        row("M", g12(kp.m_exponent())),
        row("E", opt(growth)),
        row("bound", format!("{} {}", bound.name(), kind_fields(&bound))),
        row("divergence_time", opt(divergence)),
        row("oracle_time", opt(oracle)),
    ]);
    out.json(
        "kato.json",
        &json!({
            "problem": kp,
            "m": kp.m_exponent(),
            "e": growth,
            "bound": bound,
            "delta": delta,
            "divergence_time": divergence,
            "oracle_time": oracle,
        }),
    )
}

pub fn simulate(cfg: &RunConfig, _: &SimulateArgs, out: &Out) -> Result<()> {
    let sc = cfg.solver_config()?;
    let o = run(&sc)?;
    let rows: Vec<_> = o
        .diagnostics
        .iter()
        .map(|d| vec![g12(d.t), g12(d.int_u), g12(d.int_ut), g12(d.sup_v), g12(d.support_radius)])
        .collect();
    out.csv("run.csv", &["t", "int_u", "int_ut", "sup_v", "support_radius"], &rows)?;
    let predicted = predicted_bound(&sc);
    let bound_t = predicted.as_ref().and_then(|b| bound_value(&b.kind, sc.model.epsilon).ok()).map(|v| v.t);
    out.json(
        "summary.json",
        &json!({
            "blew_up": o.blew_up,
            "t_num": o.t_num,
            "t_confirm": o.t_confirm,
            "sensitivity": o.sensitivity,
            "converged": o.converged,
            "stop": o.stop,
            "steps": o.steps,
            "max_sup_v": o.max_sup_v,
            "support_violation": o.support_violation,
            "min_int_ut": o.min_int_ut,
            "max_dt_ratio": o.max_dt_ratio,
            "predicted": predicted,
            "predicted_t": bound_t,
            "parameters": cfg,
        }),
    )?;
    out.table(&[
        row("blew_up", o.blew_up.to_string()),
        row("t_num", opt(o.t_num)),
        row("sensitivity", opt(o.sensitivity)),
        row("converged", o.converged.to_string()),
        row("stop", format!("{:?}", o.stop)),
        row("steps", o.steps.to_string()),
        row("bound_at_epsilon", opt(bound_t)),
    ]);
    Ok(())
}

pub fn sweep(cfg: &RunConfig, args: &SweepArgs, out: &Out) -> Result<()> {
    let base = cfg.solver_config()?;
    let eps = args.eps.clone().unwrap_or_else(|| vec![0.8, 0.4, 0.2, 0.1, 0.05]);
    let mut settings = SweepSettings::default();
    if let Some(s) = args.slack {
        settings.slack = s;
    }
    if let Some(m) = args.min_steps {
        settings.min_steps = m;
    }
    let result = run_sweep(&base, &eps, &settings)?;
    let report = compare_prediction(&result, settings.slack);
    let rows: Vec<_> = result
        .points
        .iter()
        .map(|p| {
            vec![
                g12(p.epsilon),
                opt(p.t_num),
                p.converged.to_string(),
                p.blew_up.to_string(),
                opt(p.sensitivity),
                g12(p.dr),
                g12(p.t_max),
                p.steps.to_string(),
            ]
        })
        .collect();
    let header = ["epsilon", "t_num", "converged", "blew_up", "sensitivity", "dr", "t_max", "steps"];
    out.csv("sweep.csv", &header, &rows)?;
    let fit = result.fit.as_ref();
    out.json(
        "fit.json",
        &json!({
            "slope": fit.map(|f| f.slope),
            "intercept": fit.map(|f| f.intercept),
            "r2": fit.map(|f| f.r2),
            "points": fit.map(|f| f.points),
            "gamma_fit": report.gamma_fit,
            "predicted_k": report.predicted_k,
            "ratio": report.ratio,
            "verdict": report.verdict,
            "message": report.message,
            "checks": report.checks,
            "censored": result.censored,
            "monotonicity_violations": result.monotonicity_violations,
            "notes": result.notes,
        }),
    )?;
    for r in &rows {
        out.say(format!("eps {:<14} t_num {:<18} converged {}", r[0], r[1], r[2]));
    }
    out.say(format!("{:?}: {}", report.verdict, report.message));
    Ok(())
}
