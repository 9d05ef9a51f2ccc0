//! Radial method-of-lines solver for
//! `u_tt - t^{-2 alpha} Δu + (mu/t) u_t = N`, `N = |u_t|^p` or `|u_r|^p`,
//! started at `t = 1`.
//!
//! Space: second-order central differences on `r_i = i dr`, even reflection
//! at the axis (`Δu(0) = n u_rr(0)`), homogeneous Dirichlet at `r_max`.
//! Time: classical four-stage Runge–Kutta on the first-order system
//! `(u, v = u_t)`, with the step tied to the instantaneous speed `t^{-alpha}`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{lightcone_radius_unchecked, ModelParams, Nonlinearity};
use crate::quad;
use crate::regions::{data_hypothesis, DataHypothesis};
use crate::scalar::{c, Real};
use crate::specfun::unit_sphere_area;

/// Smallest time step before a run is declared blown up.
pub const DT_UNDERFLOW: f64 = 1e-12;
/// Values below this count as zero for the support radius.
pub const TAIL_TOL: f64 = 1e-10;
/// Cells updated beyond the light cone. The explicit stencil spreads four
/// cells per step, but the discrete tail underflows to zero within a few
/// cells of the cone, so cells past this margin stay exactly zero.
pub const WINDOW_MARGIN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialProfile {
    /// `u0 = b^2`; `u1 = 2 u0 + b` for `|u_t|^p`, `u1 = b` for `|∇u|^p`,
    /// with `b(r) = bump(r/R)`.
    Standard,
    /// `u0 = b^2`, `u1 = 0`.
    PositionOnly,
    /// `u0 = 0`, `u1 = b`.
    VelocityOnly,
}

impl InitialProfile {
    pub fn key(self) -> &'static str {
        match self {
            InitialProfile::Standard => "standard",
            InitialProfile::PositionOnly => "position",
            InitialProfile::VelocityOnly => "velocity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(InitialProfile::Standard),
            "position" => Ok(InitialProfile::PositionOnly),
            "velocity" => Ok(InitialProfile::VelocityOnly),
            other => Err(Error::Config(format!("unknown profile '{other}' (expected standard, position, velocity)"))),
        }
    }
}

/// `exp(1 - 1/(1 - s^2))` on `|s| < 1`, zero elsewhere.
pub fn bump<T: Real>(s: T) -> T {
    let s2 = s * s;
    if s2 >= T::one() {
        T::zero()
    } else {
        (T::one() - T::one() / (T::one() - s2)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub model: ModelParams<T>,
    pub dr: T,
    pub r_max: T,
    pub cfl: T,
    pub t_max: T,
    /// Optional absolute cap on the step, on top of the speed-based bound.
    pub dt_cap: T,
    pub blowup_threshold: T,
    /// The run continues to `blowup_threshold * confirm_factor` to measure
    /// how sensitive the detected time is to the threshold.
    pub confirm_factor: T,
    pub profile: InitialProfile,
    /// `false` drops the nonlinear term.
    pub nonlinear: bool,
    /// Diagnostics are recorded every this many accepted steps (0: only at
    /// the start and the end).
    pub diag_every: usize,
}

impl<T: Real> SolverConfig<T> {
    /// Defaults: `cfl = 0.5`, threshold `1e6` confirmed at `1e8`, no extra
    /// step cap, `r_max = R + A(t_max) + 10 dr`.
    pub fn new(model: ModelParams<T>, dr: T, t_max: T) -> Self {
        let r_max = Self::min_radius(&model, dr, t_max);
        Self {
            model,
            dr,
            r_max,
            cfl: c(0.5),
            t_max,
            dt_cap: T::infinity(),
            blowup_threshold: c(1e6),
            confirm_factor: c(100.0),
            profile: InitialProfile::Standard,
            nonlinear: true,
            diag_every: 50,
        }
    }

    fn min_radius(model: &ModelParams<T>, dr: T, t_max: T) -> T {
        let t = if t_max >= T::one() { t_max } else { T::one() };
        model.radius + lightcone_radius_unchecked(t, model.alpha.max(T::zero())) + c::<T>(10.0) * dr
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        let mut errs = Vec::new();
        if m.n < 1 {
            errs.push(format!("n must be >= 1 (got {})", m.n));
        }
        if !(m.alpha >= T::zero()) || !(m.mu >= T::zero()) {
            errs.push("alpha and mu must be >= 0".to_string());
        }
        if !(m.p > T::one()) {
            errs.push(format!("p must be > 1 (got {})", m.p));
        }
        if !(m.epsilon >= T::zero()) {
            errs.push(format!("epsilon must be >= 0 (got {})", m.epsilon));
        }
        if !(m.radius > T::zero()) {
            errs.push(format!("R must be > 0 (got {})", m.radius));
        }
        if !(self.dr > T::zero()) {
            errs.push(format!("dr must be > 0 (got {})", self.dr));
        }
        if !(self.t_max > T::one()) {
            errs.push(format!("t_max must be > 1 (got {})", self.t_max));
        }
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            errs.push(format!("cfl must lie in (0, 1] (got {})", self.cfl));
        }
        if !(self.dt_cap > T::zero()) {
            errs.push("dt_cap must be > 0".to_string());
        }
        if !(self.blowup_threshold > T::zero()) || !(self.confirm_factor >= T::one()) {
            errs.push("blow-up threshold must be > 0 and confirm factor >= 1".to_string());
        }
        if errs.is_empty() && self.r_max < Self::min_radius(m, self.dr, self.t_max) {
            errs.push(format!(
                "r_max = {} is inside R + A(t_max) + 10 dr = {}",
                self.r_max,
                Self::min_radius(m, self.dr, self.t_max)
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn cells(&self) -> usize {
        (self.r_max / self.dr).ceil().to_usize().unwrap_or(0) + 1
    }

    /// Speed-limited step at time `t`, before adaptive shrinking.
    pub fn dt_limit(&self, t: T) -> T {
        let mut dt = self.cfl * self.dr * t.powf(self.model.alpha);
        dt = dt.min(self.dt_cap);
        if self.model.mu > T::zero() {
            // Keeps the damping term inside the explicit stability region.
            dt = dt.min(t / self.model.mu);
        }
        dt
    }

    pub fn radius_at(&self, i: usize) -> T {
        self.dr * T::from_usize_lossy(i)
    }

    /// Undamped, unscaled profiles `(u0(r), u1(r))`.
    pub fn profile_at(&self, r: T) -> (T, T) {
        let b = bump(r / self.model.radius);
        let u0 = b * b;
        match self.profile {
            InitialProfile::Standard => match self.model.nonlinearity {
                Nonlinearity::TimeDerivative => (u0, c::<T>(2.0) * u0 + b),
                Nonlinearity::SpaceDerivative => (u0, b),
            },
            InitialProfile::PositionOnly => (u0, T::zero()),
            InitialProfile::VelocityOnly => (T::zero(), b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub t: T,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub steps: usize,
}

/// Discrete data `ε (u0, u1)` on the grid, after checking the sign
/// hypotheses required by the theorems that apply to the configuration.
pub fn init<T: Real>(cfg: &SolverConfig<T>) -> Result<FieldState<T>> {
    cfg.validate()?;
    let m = &cfg.model;
    let cells = cfg.cells();
    let (mut u, mut v) = (vec![T::zero(); cells], vec![T::zero(); cells]);
    let mut violations = Vec::new();
    let need = if cfg.nonlinear && m.in_theorem_scope() && m.epsilon > T::zero() {
        Some(data_hypothesis(m))
    } else {
        None
    };
    let mut nontrivial = false;
    for i in 0..cells - 1 {
        let (a, b) = cfg.profile_at(cfg.radius_at(i));
        nontrivial |= a != T::zero() || b != T::zero();
        if let Some(h) = need {
            let ok = match h {
                DataHypothesis::U1AboveU0 => b >= a && a >= T::zero(),
                DataHypothesis::U1Nonnegative => b >= T::zero(),
                DataHypothesis::BothNonnegative => a >= T::zero() && b >= T::zero(),
            };
            if !ok && violations.is_empty() {
                violations.push(format!("initial data violate {h:?} at r = {}", cfg.radius_at(i)));
            }
        }
        u[i] = m.epsilon * a;
        v[i] = m.epsilon * b;
    }
    if let (Some(DataHypothesis::U1Nonnegative), false) = (need, v.iter().any(|x| *x > T::zero())) {
        violations.push("u1 must be nontrivial".to_string());
    }
    if need.is_some() && !nontrivial {
        violations.push("initial data must be nontrivial".to_string());
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(FieldState { t: T::one(), u, v, steps: 0 })
}

/// Scratch space for one Runge–Kutta step.
#[derive(Debug, Clone)]
struct Stages<T> {
    ku: [Vec<T>; 4],
    kv: [Vec<T>; 4],
    us: Vec<T>,
    vs: Vec<T>,
    inv_r: Vec<T>,
    /// Never shrinks, so stage buffers hold no stale values inside it.
    active: usize,
}

impl<T: Real> Stages<T> {
    fn new(cfg: &SolverConfig<T>) -> Self {
        let n = cfg.cells();
        let z = || vec![T::zero(); n];
        let inv_r = (0..n)
            .map(|i| if i == 0 { T::zero() } else { T::one() / cfg.radius_at(i) })
            .collect();
        Self { ku: [z(), z(), z(), z()], kv: [z(), z(), z(), z()], us: z(), vs: z(), inv_r, active: 0 }
    }
}

fn rhs<T: Real>(cfg: &SolverConfig<T>, inv_r: &[T], t: T, u: &[T], v: &[T], du: &mut [T], dv: &mut [T]) {
    let m = &cfg.model;
    let last = u.len() - 1;
    let active = du.len();
    let nf = T::from_u32(m.n).unwrap();
    let nm1 = nf - T::one();
    let inv_dr2 = T::one() / (cfg.dr * cfg.dr);
    let inv_2dr = T::one() / (c::<T>(2.0) * cfg.dr);
    let speed2 = t.powf(-c::<T>(2.0) * m.alpha);
    let damp = m.mu / t;
    let (p, grad) = (m.p, m.nonlinearity == Nonlinearity::SpaceDerivative);
    for i in 0..active {
        du[i] = v[i];
        if i == last {
            dv[i] = T::zero();
            continue;
        }
        let (lap, ur) = if i == 0 {
            (nf * c::<T>(2.0) * (u[1] - u[0]) * inv_dr2, T::zero())
        } else {
            let ur = (u[i + 1] - u[i - 1]) * inv_2dr;
            ((u[i + 1] - c::<T>(2.0) * u[i] + u[i - 1]) * inv_dr2 + nm1 * inv_r[i] * ur, ur)
        };
        let mut acc = speed2 * lap - damp * v[i];
        if cfg.nonlinear {
            acc = acc + if grad { ur.abs().powf(p) } else { v[i].abs().powf(p) };
        }
        dv[i] = acc;
    }
}

/// Number of leading cells that can be nonzero after a step ending at `t`.
fn active_cells<T: Real>(cfg: &SolverConfig<T>, t: T) -> usize {
    let reach = (cfg.model.radius + lightcone_radius_unchecked(t, cfg.model.alpha)) / cfg.dr;
    let k = reach.ceil().to_usize().unwrap_or(usize::MAX).saturating_add(WINDOW_MARGIN);
    k.min(cfg.cells())
}

/// One classical RK4 step of size `dt`; returns the new `(u, v)` in place.
/// Only the cells inside the light-cone window are touched.
fn rk4<T: Real>(cfg: &SolverConfig<T>, st: &mut Stages<T>, t: T, u: &mut [T], v: &mut [T], dt: T) {
    let half = dt / c(2.0);
    st.active = st.active.max(active_cells(cfg, t + dt));
    let n = st.active;
    let Stages { ku, kv, us, vs, inv_r, .. } = st;
    let [k1u, k2u, k3u, k4u] = ku.each_mut().map(|k| &mut k[..n]);
    let [k1v, k2v, k3v, k4v] = kv.each_mut().map(|k| &mut k[..n]);
    rhs(cfg, inv_r, t, u, v, k1u, k1v);
    for i in 0..n {
        us[i] = u[i] + half * k1u[i];
        vs[i] = v[i] + half * k1v[i];
    }
    rhs(cfg, inv_r, t + half, us, vs, k2u, k2v);
    for i in 0..n {
        us[i] = u[i] + half * k2u[i];
        vs[i] = v[i] + half * k2v[i];
    }
    rhs(cfg, inv_r, t + half, us, vs, k3u, k3v);
    for i in 0..n {
        us[i] = u[i] + dt * k3u[i];
        vs[i] = v[i] + dt * k3v[i];
    }
    rhs(cfg, inv_r, t + dt, us, vs, k4u, k4v);
    let sixth = dt / c(6.0);
    let two = c::<T>(2.0);
    for i in 0..n {
        u[i] = u[i] + sixth * (k1u[i] + two * k2u[i] + two * k3u[i] + k4u[i]);
        v[i] = v[i] + sixth * (k1v[i] + two * k2v[i] + two * k3v[i] + k4v[i]);
    }
}

fn sup_abs<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, &y| if y.is_finite() { m.max(y.abs()) } else { T::infinity() })
}

/// Advances `state` by one fixed step `dt`, without adaptivity.
pub fn step<T: Real>(state: &mut FieldState<T>, cfg: &SolverConfig<T>, dt: T) {
    let mut st = Stages::new(cfg);
    rk4(cfg, &mut st, state.t, &mut state.u, &mut state.v, dt);
    state.t = state.t + dt;
    state.steps += 1;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagRecord<T> {
    pub t: T,
    /// `∫ u dx`.
    pub int_u: T,
    /// `∫ u_t dx`.
    pub int_ut: T,
    pub sup_v: T,
    /// Largest radius where `|u| > 1e-10`.
    pub support_radius: T,
}

fn radial_integral<T: Real>(cfg: &SolverConfig<T>, f: &[T]) -> T {
    let nm1 = (cfg.model.n - 1) as i32;
    let mut s = T::zero();
    for (i, &y) in f.iter().enumerate() {
        let w = if i == 0 || i + 1 == f.len() { c::<T>(0.5) } else { T::one() };
        s = s + w * y * cfg.radius_at(i).powi(nm1);
    }
    s * cfg.dr * unit_sphere_area::<T>(cfg.model.n)
}

pub fn diagnostics<T: Real>(state: &FieldState<T>, cfg: &SolverConfig<T>) -> DiagRecord<T> {
    let tail = c::<T>(TAIL_TOL);
    let support = state.u.iter().rposition(|x| x.abs() > tail).map(|i| cfg.radius_at(i)).unwrap_or(T::zero());
    DiagRecord {
        t: state.t,
        int_u: radial_integral(cfg, &state.u),
        int_ut: radial_integral(cfg, &state.v),
        sup_v: sup_abs(&state.v),
        support_radius: support,
    }
}

/// Largest `|u|` outside `R + A(t) + 3 dr`.
pub fn support_check<T: Real>(state: &FieldState<T>, cfg: &SolverConfig<T>) -> T {
    support_check_upto(state, cfg, state.u.len())
}

fn support_check_upto<T: Real>(state: &FieldState<T>, cfg: &SolverConfig<T>, upto: usize) -> T {
    let edge = cfg.model.radius + lightcone_radius_unchecked(state.t, cfg.model.alpha) + c::<T>(3.0) * cfg.dr;
    state.u[..upto.min(state.u.len())]
        .iter()
        .enumerate()
        .filter(|(i, _)| cfg.radius_at(*i) > edge)
        .fold(T::zero(), |m, (_, y)| m.max(y.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// `sup |u_t|` crossed the confirmation threshold.
    Threshold,
    /// The adaptive step fell below the underflow limit.
    StepUnderflow,
    /// Reached `t_max` without blow-up.
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome<T> {
    pub blew_up: bool,
    /// First time `sup |u_t|` exceeded the blow-up threshold.
    pub t_num: Option<T>,
    /// First time it exceeded `threshold * confirm_factor`.
    pub t_confirm: Option<T>,
    /// `(t_confirm - t_num) / t_num`.
    pub sensitivity: Option<T>,
    /// `sensitivity < 1%`.
    pub converged: bool,
    pub stop: StopReason,
    pub max_sup_v: T,
    pub steps: usize,
    /// Largest value of [`support_check`] seen during the run.
    pub support_violation: T,
    /// Smallest `∫ u_t dx` seen during the run.
    pub min_int_ut: T,
    /// Largest accepted step relative to [`SolverConfig::dt_limit`].
    pub max_dt_ratio: T,
    pub diagnostics: Vec<DiagRecord<T>>,
}

/// Integrates until blow-up is detected and confirmed, or `t_max`.
pub fn run<T: Real>(cfg: &SolverConfig<T>) -> Result<SimOutcome<T>> {
    let mut state = init(cfg)?;
    let mut st = Stages::new(cfg);
    let n = state.u.len();
    let (mut u_new, mut v_new) = (vec![T::zero(); n], vec![T::zero(); n]);
    let threshold = cfg.blowup_threshold;
    let confirm = threshold * cfg.confirm_factor;
    let growth_floor = sup_abs(&state.v).max(sup_abs(&state.u)).max(T::min_positive_value());
    let mut scale = T::one();
    let mut t_num = None;
    let mut t_confirm = None;
    let mut stop = StopReason::Horizon;
    let mut sup_v = sup_abs(&state.v);
    let mut max_sup_v = sup_v;
    let mut diags = vec![diagnostics(&state, cfg)];
    let mut support_violation = support_check(&state, cfg);
    let mut min_int_ut = diags[0].int_ut;
    let mut max_dt_ratio = T::zero();
    let dt_floor = c::<T>(DT_UNDERFLOW);
    while state.t < cfg.t_max {
        let limit = cfg.dt_limit(state.t);
        let dt = (limit * scale).min(cfg.t_max - state.t);
        if dt < dt_floor {
            if state.t < cfg.t_max - dt_floor {
                stop = StopReason::StepUnderflow;
                t_num.get_or_insert(state.t);
                t_confirm.get_or_insert(state.t);
            }
            break;
        }
        u_new.copy_from_slice(&state.u);
        v_new.copy_from_slice(&state.v);
        rk4(cfg, &mut st, state.t, &mut u_new, &mut v_new, dt);
        let sup_new = sup_abs(&v_new);
        if !sup_new.is_finite() || sup_new > c::<T>(2.0) * sup_v.max(growth_floor) {
            scale = scale / c(2.0);
            continue;
        }
        if sup_new < c::<T>(1.2) * sup_v {
            scale = (scale * c(1.2)).min(T::one());
        }
        std::mem::swap(&mut state.u, &mut u_new);
        std::mem::swap(&mut state.v, &mut v_new);
        state.t = state.t + dt;
        state.steps += 1;
        sup_v = sup_new;
        max_sup_v = max_sup_v.max(sup_v);
        max_dt_ratio = max_dt_ratio.max(dt / limit);
        // Cells past the window are exactly zero.
        support_violation = support_violation.max(support_check_upto(&state, cfg, st.active));
        if cfg.diag_every > 0 && state.steps % cfg.diag_every == 0 {
            let d = diagnostics(&state, cfg);
            min_int_ut = min_int_ut.min(d.int_ut);
            diags.push(d);
        }
        if sup_v > threshold && t_num.is_none() {
            t_num = Some(state.t);
        }
        if sup_v > confirm {
            t_confirm = Some(state.t);
            stop = StopReason::Threshold;
            break;
        }
    }
    let last = diagnostics(&state, cfg);
    min_int_ut = min_int_ut.min(last.int_ut);
    diags.push(last);
    let blew_up = t_num.is_some();
    let sensitivity = match (t_num, t_confirm) {
        (Some(a), Some(b)) => Some((b - a) / a),
        _ => None,
    };
    Ok(SimOutcome {
        blew_up,
        t_num,
        t_confirm,
        sensitivity,
        converged: sensitivity.map(|s| s < c(0.01)).unwrap_or(false),
        stop,
        max_sup_v,
        steps: state.steps,
        support_violation,
        min_int_ut,
        max_dt_ratio,
        diagnostics: diags,
    })
}

/// Integrates to exactly `t_end` with speed-limited steps and no
/// adaptivity (for linear validation runs).
pub fn evolve_to<T: Real>(cfg: &SolverConfig<T>, t_end: T) -> Result<FieldState<T>> {
    let mut state = init(cfg)?;
    let mut st = Stages::new(cfg);
    while state.t < t_end {
        let dt = cfg.dt_limit(state.t).min(t_end - state.t);
        rk4(cfg, &mut st, state.t, &mut state.u, &mut state.v, dt);
        state.t = if t_end - state.t - dt <= c::<T>(1e-14) * t_end { t_end } else { state.t + dt };
        state.steps += 1;
    }
    Ok(state)
}

/// Exact linear solution for `n = 3`, `alpha = mu = 0` on the grid of `cfg`
/// at time `t`, from d'Alembert's formula for `w = r u`.
pub fn dalembert_reference<T: Real>(cfg: &SolverConfig<T>, t: T) -> Result<Vec<T>> {
    let m = &cfg.model;
    if m.n != 3 || m.alpha != T::zero() || m.mu != T::zero() {
        return domain("d'Alembert reference needs n = 3 and alpha = mu = 0");
    }
    let tau = t - T::one();
    let eps = m.epsilon;
    let w0 = |s: T| s * cfg.profile_at(s.abs()).0;
    let w1 = |s: T| s * cfg.profile_at(s.abs()).1;
    // G(x) = ∫_0^x s u1(s) ds; ∫_a^b w1 = G(|b|) - G(|a|) since w1 is odd.
    let g = |x: T| -> Result<T> {
        let x = x.abs().min(m.radius);
        quad::integrate(w1, T::zero(), x, c(1e-13), c(1e-16))
    };
    let mut out = vec![T::zero(); cfg.cells()];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let r = cfg.radius_at(i);
        let w = (w0(r + tau) + w0(r - tau)) / c(2.0) + (g(r + tau)? - g(r - tau)?) / c(2.0);
        *slot = eps * w / r;
    }
    // u(t, 0) = W0'(tau) + W1(tau)
    let h = c::<T>(1e-5);
    out[0] = eps * ((w0(tau + h) - w0(tau - h)) / (c::<T>(2.0) * h) + w1(tau));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport<T> {
    pub dr: [T; 3],
    /// Max-norm errors against the exact solution, off the axis.
    pub errors: [T; 3],
    /// `log2(e(dr/2) / e(dr/4))`.
    pub order: T,
}

/// Observed order of the linear scheme at `dr`, `dr/2`, `dr/4` against the
/// d'Alembert solution at `t_end`.
pub fn convergence_test<T: Real>(cfg: &SolverConfig<T>, t_end: T) -> Result<ConvergenceReport<T>> {
    let mut dr = [T::zero(); 3];
    let mut errors = [T::zero(); 3];
    for k in 0..3 {
        let mut c2 = *cfg;
        c2.nonlinear = false;
        c2.dr = cfg.dr / T::from_u32(1 << k).unwrap();
        c2.t_max = t_end.max(c2.t_max);
        c2.r_max = SolverConfig::min_radius(&c2.model, c2.dr, c2.t_max).max(cfg.r_max);
        let state = evolve_to(&c2, t_end)?;
        let exact = dalembert_reference(&c2, t_end)?;
        dr[k] = c2.dr;
        errors[k] = state.u.iter().zip(&exact).skip(1).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    }
    let order = if errors[2] == T::zero() { T::infinity() } else { (errors[1] / errors[2]).log2() };
    Ok(ConvergenceReport { dr, errors, order })
}
