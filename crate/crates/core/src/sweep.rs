//! ε-families of simulations and the log–log fit of `T_num` against `1/ε`.
//!
//! The theorems give upper bounds only. A sweep therefore checks the
//! one-sided inequality `T_num <= slack * bound(ε)` at every point and
//! reports the slope match as consistency, not sharpness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::lightcone_radius_unchecked;
use crate::regions::{applicable_bounds, best_bound, bound_value, BoundKind, LifespanBound};
use crate::scalar::{c, Real};
use crate::solver::{run, SolverConfig};

/// Minimum number of blown-up, converged points for a fit.
pub const MIN_FIT_POINTS: usize = 4;
/// Relative slope mismatch tolerated by the consistency check.
pub const SLOPE_TOL: f64 = 0.25;
/// Relative tolerance for the monotonicity check.
pub const MONOTONE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings<T> {
    /// `T_num` is expected near `expect_factor * bound(ε)` (`C = 1`); `dr`
    /// is reduced until that time needs at least `min_steps` steps.
    pub expect_factor: T,
    pub min_steps: usize,
    /// One-sided check: `T_num <= slack * bound(ε)`. Runs stop at that
    /// time, so a censored point is a violation.
    pub slack: T,
    /// Floor on the horizon.
    pub min_horizon: T,
}

impl<T: Real> Default for SweepSettings<T> {
    fn default() -> Self {
        Self { expect_factor: c(10.0), min_steps: 1000, slack: c(1e3), min_horizon: c(4.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    pub epsilon: T,
    pub blew_up: bool,
    pub t_num: Option<T>,
    pub converged: bool,
    pub sensitivity: Option<T>,
    pub dr: T,
    pub t_max: T,
    pub steps: usize,
}

impl<T: Real> SweepPoint<T> {
    /// Enters the fit.
    pub fn usable(&self) -> bool {
        self.blew_up && self.converged && self.t_num.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit<T> {
    pub slope: T,
    pub intercept: T,
    pub r2: T,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<T> {
    /// Sorted by decreasing ε.
    pub points: Vec<SweepPoint<T>>,
    pub fit: Option<Fit<T>>,
    pub predicted: Option<LifespanBound<T>>,
    /// ε values that did not blow up (or did not converge) within the horizon.
    pub censored: Vec<T>,
    /// Consecutive pairs `(ε_i, ε_{i+1})` where `T_num` dropped by more
    /// than the monotonicity tolerance.
    pub monotonicity_violations: Vec<(T, T)>,
    pub notes: Vec<String>,
}

/// Ordinary least squares of `ln T` against `ln(1/ε)`.
pub fn fit_log_log<T: Real>(eps: &[T], times: &[T]) -> Result<Fit<T>> {
    if eps.len() != times.len() || eps.len() < 2 {
        return domain("fit needs at least two (ε, T) pairs of equal length");
    }
    let xs: Vec<T> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<T> = times.iter().map(|t| t.ln()).collect();
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |s, &x| s + x) / n;
    let my = ys.iter().fold(T::zero(), |s, &y| s + y) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    if !(sxx > c::<T>(1e-300)) || !sxx.is_finite() {
        return Err(Error::Degenerate("all ε values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == T::zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    Ok(Fit { slope, intercept, r2, points: xs.len() })
}

/// Fit over the usable points of a sweep.
pub fn fit_scaling<T: Real>(result: &SweepResult<T>) -> Result<Fit<T>> {
    let (eps, times): (Vec<T>, Vec<T>) =
        result.points.iter().filter(|p| p.usable()).map(|p| (p.epsilon, p.t_num.unwrap())).unzip();
    if eps.len() < MIN_FIT_POINTS {
        return domain(format!("{} usable points, at least {MIN_FIT_POINTS} needed for a fit", eps.len()));
    }
    fit_log_log(&eps, &times)
}

/// Strongest applicable bound for the sweep's model, if any.
pub fn predicted_bound<T: Real>(base: &SolverConfig<T>) -> Option<LifespanBound<T>> {
    best_bound(&applicable_bounds(&base.model)).ok()
}

/// Per-ε solver settings: horizon from the predicted bound, `dr` refined
/// so the horizon spans at least `min_steps` speed-limited steps.
pub fn config_for<T: Real>(
    base: &SolverConfig<T>,
    epsilon: T,
    predicted: Option<&LifespanBound<T>>,
    settings: &SweepSettings<T>,
) -> SolverConfig<T> {
    let mut cfg = *base;
    cfg.model.epsilon = epsilon;
    let bound = predicted.and_then(|b| bound_value(&b.kind, epsilon).ok()).map(|v| v.t);
    let bound = bound.filter(|t| t.is_finite());
    cfg.t_max = match bound {
        Some(t) => (t * settings.slack).max(settings.min_horizon),
        None => base.t_max,
    };
    let t_expect = bound.map(|t| t * settings.expect_factor).unwrap_or(cfg.t_max).min(cfg.t_max);
    let reach = lightcone_radius_unchecked(t_expect, cfg.model.alpha);
    let dr_steps = reach / (cfg.cfl * T::from_usize_lossy(settings.min_steps));
    if dr_steps > T::zero() {
        cfg.dr = cfg.dr.min(dr_steps);
    }
    cfg.r_max = cfg.model.radius + lightcone_radius_unchecked(cfg.t_max, cfg.model.alpha) + c::<T>(10.0) * cfg.dr;
    cfg
}

/// One simulation per ε, run concurrently, collected in decreasing ε.
pub fn run_sweep<T: Real>(base: &SolverConfig<T>, epsilons: &[T], settings: &SweepSettings<T>) -> Result<SweepResult<T>> {
    if epsilons.is_empty() {
        return domain("no ε values given");
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return domain("ε values must be strictly decreasing");
    }
    if epsilons.iter().any(|e| !(*e > T::zero())) {
        return domain("ε values must be > 0");
    }
    let predicted = predicted_bound(base);
    let mut points: Vec<SweepPoint<T>> = epsilons
        .par_iter()
        .map(|&eps| {
            let cfg = config_for(base, eps, predicted.as_ref(), settings);
            run(&cfg).map(|o| SweepPoint {
                epsilon: eps,
                blew_up: o.blew_up,
                t_num: o.t_num,
                converged: o.converged,
                sensitivity: o.sensitivity,
                dr: cfg.dr,
                t_max: cfg.t_max,
                steps: o.steps,
            })
        })
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| b.epsilon.partial_cmp(&a.epsilon).unwrap());

    let censored = points.iter().filter(|p| !p.usable()).map(|p| p.epsilon).collect();
    let mut monotonicity_violations = Vec::new();
    for w in points.windows(2) {
        if let (Some(a), Some(b)) = (w[0].t_num, w[1].t_num) {
            if b < a * (T::one() - c::<T>(MONOTONE_TOL)) {
                monotonicity_violations.push((w[0].epsilon, w[1].epsilon));
            }
        }
    }
    let mut result = SweepResult { points, fit: None, predicted, censored, monotonicity_violations, notes: Vec::new() };
    match fit_scaling(&result) {
        Ok(f) => result.fit = Some(f),
        Err(e) => result.notes.push(format!("fit skipped: {e}")),
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    /// Slope within tolerance and every point under the bound.
    Pass,
    /// Every point under the bound, slope outside tolerance.
    Warn,
    /// Some point exceeds `slack * bound(ε)`.
    Fail,
    /// No fit, or a non power-law prediction.
    Qualitative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck<T> {
    pub epsilon: T,
    /// Detected lifespan, or the horizon for a point that never blew up.
    pub t_num: T,
    pub bound: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport<T> {
    pub gamma_fit: Option<T>,
    pub predicted_k: Option<T>,
    /// `gamma_fit / predicted_k`.
    pub ratio: Option<T>,
    pub checks: Vec<BoundCheck<T>>,
    pub verdict: Verdict,
    pub message: String,
}

/// Compares a sweep with its predicted bound.
pub fn compare_prediction<T: Real>(result: &SweepResult<T>, slack: T) -> PredictionReport<T> {
    let qualitative = |msg: String, checks| PredictionReport {
        gamma_fit: result.fit.map(|f| f.slope),
        predicted_k: None,
        ratio: None,
        checks,
        verdict: Verdict::Qualitative,
        message: msg,
    };
    let Some(pred) = &result.predicted else {
        return qualitative("no applicable lifespan bound".into(), Vec::new());
    };
    let mut checks = Vec::new();
    for p in &result.points {
        let Ok(b) = bound_value(&pred.kind, p.epsilon) else { continue };
        match p.t_num {
            Some(t) => checks.push(BoundCheck { epsilon: p.epsilon, t_num: t, bound: b.t, ok: t <= slack * b.t }),
            // Survived past the slackened bound: the bound fails at this ε.
            None if p.t_max >= slack * b.t => {
                checks.push(BoundCheck { epsilon: p.epsilon, t_num: p.t_max, bound: b.t, ok: false })
            }
            None => {}
        }
    }
    let bounded = checks.iter().all(|c| c.ok);
    let k = match pred.kind {
        BoundKind::PowerLaw { k } => k,
        _ => {
            let mut r = qualitative(format!("{} bound: no slope prediction", pred.kind.name()), checks);
            if !bounded {
                r.verdict = Verdict::Fail;
                r.message.push_str("; one-sided bound violated");
            }
            return r;
        }
    };
    let Some(fit) = result.fit else {
        let mut r = qualitative("too few usable points for a fit".into(), checks);
        r.predicted_k = Some(k);
        if !bounded {
            r.verdict = Verdict::Fail;
        }
        return r;
    };
    let ratio = fit.slope / k;
    let within = (ratio - T::one()).abs() <= c(SLOPE_TOL);
    let verdict = match (bounded, within) {
        (false, _) => Verdict::Fail,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Warn,
    };
    let message = format!(
        "consistency: fitted slope {} vs predicted {} (ratio {}); one-sided bound {}",
        fit.slope,
        k,
        ratio,
        if bounded { "holds" } else { "violated" }
    );
    PredictionReport { gamma_fit: Some(fit.slope), predicted_k: Some(k), ratio: Some(ratio), checks, verdict, message }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: [f64; 5] = [0.8, 0.4, 0.2, 0.1, 0.05];

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = EPS.iter().map(|e| e.powf(-1.5)).collect();
        let f = fit_log_log(&EPS, &t).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t: Vec<f64> = EPS.iter().map(|e| e.powf(-1.5) * (1.0 + rng.gen_range(-0.05..0.05))).collect();
            let f = fit_log_log(&EPS, &t).unwrap();
            assert!((f.slope - 1.5).abs() < 0.1, "{}", f.slope);
        }
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let f = fit_log_log(&EPS, &[3.0; 5]).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn coincident_abscissas_are_rejected() {
        assert!(fit_log_log(&[0.1, 0.1, 0.1, 0.1], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    fn synthetic(times: &[Option<f64>]) -> SweepResult<f64> {
        let points = EPS
            .iter()
            .zip(times)
            .map(|(&e, t)| SweepPoint {
                epsilon: e,
                blew_up: t.is_some(),
                t_num: *t,
                converged: t.is_some(),
                sensitivity: None,
                dr: 0.1,
                t_max: 1e3,
                steps: 0,
            })
            .collect();
        let mut r = SweepResult {
            points,
            fit: None,
            predicted: Some(LifespanBound {
                source: crate::regions::BoundSource::GlasseySubcritical,
                kind: BoundKind::PowerLaw { k: 1.5 },
                condition: String::new(),
                applicable: true,
            }),
            censored: vec![],
            monotonicity_violations: vec![],
            notes: vec![],
        };
        r.fit = fit_scaling(&r).ok();
        r
    }

    #[test]
    fn verdicts() {
        let exact: Vec<_> = EPS.iter().map(|e| Some(2.0 * e.powf(-1.5))).collect();
        assert_eq!(compare_prediction(&synthetic(&exact), 1e3).verdict, Verdict::Pass);
        let shallow: Vec<_> = EPS.iter().map(|e| Some(2.0 * e.powf(-0.5))).collect();
        assert_eq!(compare_prediction(&synthetic(&shallow), 1e3).verdict, Verdict::Warn);
        let huge: Vec<_> = EPS.iter().map(|e| Some(1e4 * e.powf(-1.5))).collect();
        assert_eq!(compare_prediction(&synthetic(&huge), 1e3).verdict, Verdict::Fail);
        let censored = [None, None, None, None, None];
        let r = compare_prediction(&synthetic(&censored), 1e3);
        assert_eq!(r.verdict, Verdict::Qualitative);
    }
}
