//! Lifespan upper bounds, their selection, and the region diagrams.
//!
//! Every bound is stated with the convention `C = 1`; only exponents are
//! ever compared.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exponents::{
    gamma_prime, p_c_prime, p_c_prime_w, p_fujita_prime, p_glassey_prime, p_zero, p_zero_prime, critical_w,
    mu_crossing, mu_star, mu_zero, RootDescriptor, Threshold, CRITICAL_TOL,
};
use crate::kato::{KatoOrder, KatoProblem};
use crate::params::{FlrwParams, ModelParams, Nonlinearity};
use crate::scalar::{c, Real};

/// Shape of an upper bound on the lifespan `T` in a small parameter `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind<T> {
    /// `T <= ε^{-k}`.
    PowerLaw { k: T },
    /// `T <= exp(ε^{-r})`.
    Exponential { r: T },
    /// `T^s (ln T)^{-l} <= ε^{-m}`.
    ImplicitPowerLog { s: T, l: T, m: T },
}

impl<T: Real> BoundKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::PowerLaw { .. } => "power",
            BoundKind::Exponential { .. } => "exponential",
            BoundKind::ImplicitPowerLog { .. } => "implicit",
        }
    }

    /// The headline exponent: `k`, `r`, or the log-free power `m/s`.
    pub fn exponent(&self) -> T {
        match *self {
            BoundKind::PowerLaw { k } => k,
            BoundKind::Exponential { r } => r,
            BoundKind::ImplicitPowerLog { s, m, .. } => m / s,
        }
    }

    /// Re-expresses a bound in `A0^{-1}` as a bound in `ε^{-1}` for
    /// `A0 = ε^p`. Implicit bounds are normalised to right-hand exponent `p - 1`.
    pub fn with_data_power(self, p: T) -> Self {
        match self {
            BoundKind::PowerLaw { k } => BoundKind::PowerLaw { k: k * p },
            BoundKind::Exponential { r } => BoundKind::Exponential { r: r * p },
            BoundKind::ImplicitPowerLog { s, l, m } => {
                let lam = (p - T::one()) / (p * m);
                BoundKind::ImplicitPowerLog { s: s * lam, l: l * lam, m: p - T::one() }
            }
        }
    }

    /// Ranking key: power-type bounds first, ordered by exponent, then the
    /// exponential ones by rate. Log corrections only break exact ties.
    fn rank(&self) -> (u8, T, u8) {
        match *self {
            BoundKind::PowerLaw { k } => (0, k, 0),
            BoundKind::ImplicitPowerLog { s, l, m } => (0, m / s, u8::from(l != T::zero())),
            BoundKind::Exponential { r } => (1, r, 0),
        }
    }
}

/// Which theorem branch produced a bound. Declaration order is the order of
/// appearance and breaks ties in [`best_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundSource {
    GlasseySubcritical,
    GlasseyCritical,
    DampingSubcritical,
    AcceleratedTimeLog,
    AcceleratedTimePower,
    StraussSubcritical,
    SecondaryThreshold,
    StraussCritical,
    FujitaSubcritical,
    FujitaCritical,
    AcceleratedSpaceLog,
    AcceleratedSpacePower,
}

impl BoundSource {
    pub const TIME: [BoundSource; 5] = [
        BoundSource::GlasseySubcritical,
        BoundSource::GlasseyCritical,
        BoundSource::DampingSubcritical,
        BoundSource::AcceleratedTimeLog,
        BoundSource::AcceleratedTimePower,
    ];
    pub const SPACE: [BoundSource; 7] = [
        BoundSource::StraussSubcritical,
        BoundSource::SecondaryThreshold,
        BoundSource::StraussCritical,
        BoundSource::FujitaSubcritical,
        BoundSource::FujitaCritical,
        BoundSource::AcceleratedSpaceLog,
        BoundSource::AcceleratedSpacePower,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BoundSource::GlasseySubcritical => "glassey-subcritical",
            BoundSource::GlasseyCritical => "glassey-critical",
            BoundSource::DampingSubcritical => "damping-subcritical",
            BoundSource::AcceleratedTimeLog => "accelerated-time-log",
            BoundSource::AcceleratedTimePower => "accelerated-time-power",
            BoundSource::StraussSubcritical => "strauss-subcritical",
            BoundSource::SecondaryThreshold => "secondary-threshold",
            BoundSource::StraussCritical => "strauss-critical",
            BoundSource::FujitaSubcritical => "fujita-subcritical",
            BoundSource::FujitaCritical => "fujita-critical",
            BoundSource::AcceleratedSpaceLog => "accelerated-space-log",
            BoundSource::AcceleratedSpacePower => "accelerated-space-power",
        }
    }

    pub fn condition(self) -> &'static str {
        match self {
            BoundSource::GlasseySubcritical => "0 <= alpha < 1 and 1 < p < p_G'",
            BoundSource::GlasseyCritical => "0 <= alpha < 1 and p = p_G'",
            BoundSource::DampingSubcritical => "0 <= alpha < 1 and 1 < p < p_0",
            BoundSource::AcceleratedTimeLog => "alpha = 1 and 1 < p < 1 + 1/mu",
            BoundSource::AcceleratedTimePower => "alpha > 1 and 1 < p < 1 + 1/mu",
            BoundSource::StraussSubcritical => "0 <= alpha < 1 and 1 < p < p_c' (all p when gamma' > 0 for every p)",
            BoundSource::SecondaryThreshold => "0 <= alpha < 1 and 1 < p < p_0' (finite)",
            BoundSource::StraussCritical => {
                "p = p_c' > p_F' (n >= 3); n = 2: alpha > 2/7 and p > max(p_F', 2); R <= 1/(2(1-alpha))"
            }
            BoundSource::FujitaSubcritical => "0 <= alpha < 1 and 1 < p < p_F'",
            BoundSource::FujitaCritical => "0 <= alpha < 1 and p = p_F'",
            BoundSource::AcceleratedSpaceLog => "alpha = 1 and p > 1",
            BoundSource::AcceleratedSpacePower => "alpha > 1 and p > 1",
        }
    }

    /// Sign condition the initial data must satisfy for this branch.
    pub fn data_hypothesis(self) -> DataHypothesis {
        match self {
            BoundSource::GlasseySubcritical | BoundSource::GlasseyCritical => DataHypothesis::U1AboveU0,
            BoundSource::DampingSubcritical | BoundSource::AcceleratedTimeLog | BoundSource::AcceleratedTimePower => {
                DataHypothesis::U1Nonnegative
            }
            _ => DataHypothesis::BothNonnegative,
        }
    }
}

/// Sign hypotheses on `(u0, u1)` used by the blow-up theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataHypothesis {
    /// `u1 >= u0 >= 0`.
    U1AboveU0,
    /// `u1 >= 0`.
    U1Nonnegative,
    /// `u0 >= 0` and `u1 >= 0`.
    BothNonnegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifespanBound<T> {
    pub source: BoundSource,
    /// Formal value of the bound; meaningful only when `applicable`.
    pub kind: BoundKind<T>,
    pub condition: String,
    pub applicable: bool,
}

impl<T: Real> LifespanBound<T> {
    fn new(source: BoundSource, kind: BoundKind<T>, applicable: bool) -> Self {
        Self { source, kind, condition: source.condition().to_string(), applicable }
    }
}

fn nf<T: Real>(n: u32) -> T {
    T::from_u32(n).unwrap()
}

fn below<T: Real>(p: T, threshold: T) -> bool {
    p < threshold - c(CRITICAL_TOL)
}

fn at<T: Real>(p: T, threshold: T) -> bool {
    (p - threshold).abs() <= c(CRITICAL_TOL)
}

/// Formal exponent of one theorem branch at `m`.
fn bound_kind<T: Real>(source: BoundSource, m: &ModelParams<T>) -> BoundKind<T> {
    let (n, alpha, mu, p) = (nf::<T>(m.n), m.alpha, m.mu, m.p);
    let one = T::one();
    let two = c::<T>(2.0);
    let pm1 = p - one;
    let om = one - alpha;
    let q_space = (p + n * pm1) * om;
    match source {
        BoundSource::GlasseySubcritical => {
            let k = pm1 / (one - (om * (n - one) + mu + alpha) * pm1 / two);
            BoundKind::PowerLaw { k }
        }
        BoundSource::GlasseyCritical => BoundKind::Exponential { r: pm1 },
        BoundSource::DampingSubcritical => BoundKind::PowerLaw { k: pm1 / (one - pm1 * (n * om + mu)) },
        BoundSource::AcceleratedTimeLog => BoundKind::ImplicitPowerLog { s: one - mu * pm1, l: n * pm1, m: pm1 },
        BoundSource::AcceleratedTimePower => BoundKind::PowerLaw { k: pm1 / (one - mu * pm1) },
        BoundSource::StraussSubcritical => {
            let g = gamma_prime(m.n, p, alpha, mu).unwrap_or(T::nan());
            BoundKind::PowerLaw { k: two * p * pm1 / (om * g) }
        }
        BoundSource::SecondaryThreshold => {
            let den = (one - mu - (n + one) * om) * pm1 + one + alpha;
            BoundKind::PowerLaw { k: pm1 / den }
        }
        BoundSource::StraussCritical => BoundKind::Exponential { r: p * pm1 },
        BoundSource::FujitaSubcritical => BoundKind::PowerLaw { k: pm1 / (two - q_space) },
        BoundSource::FujitaCritical => {
            let r = if mu <= one { p * pm1 / (p + one) } else { pm1 };
            BoundKind::Exponential { r }
        }
        BoundSource::AcceleratedSpaceLog => BoundKind::ImplicitPowerLog { s: two, l: p + n * pm1, m: pm1 },
        BoundSource::AcceleratedSpacePower => BoundKind::PowerLaw { k: pm1 / two },
    }
}

fn is_applicable<T: Real>(source: BoundSource, m: &ModelParams<T>) -> bool {
    if !m.in_theorem_scope() {
        return false;
    }
    let (n, alpha, mu, p) = (m.n, m.alpha, m.mu, m.p);
    let one = T::one();
    let sub = alpha < one;
    let damping_cap = || mu == T::zero() || below(p, one + one / mu);
    match source {
        BoundSource::GlasseySubcritical => sub && below(p, p_glassey_prime(n, alpha, mu)),
        BoundSource::GlasseyCritical => sub && at(p, p_glassey_prime(n, alpha, mu)),
        BoundSource::DampingSubcritical => sub && below(p, p_zero(n, alpha, mu)),
        BoundSource::AcceleratedTimeLog => alpha == one && damping_cap(),
        BoundSource::AcceleratedTimePower => alpha > one && damping_cap(),
        BoundSource::StraussSubcritical => {
            sub && p_c_prime(n, alpha, mu).map(|r| r.is_below(p, c(CRITICAL_TOL))).unwrap_or(false)
        }
        BoundSource::SecondaryThreshold => match p_zero_prime(n, alpha, mu) {
            Threshold::Finite(v) => sub && below(p, v),
            Threshold::NoFiniteThreshold => false,
        },
        BoundSource::StraussCritical => {
            if !sub {
                return false;
            }
            let Ok(RootDescriptor::Finite(pc)) = p_c_prime(n, alpha, mu) else {
                return false;
            };
            let pf = p_fujita_prime(n, alpha);
            let above = if n >= 3 {
                pc > pf + c(CRITICAL_TOL)
            } else {
                alpha > c(2.0 / 7.0) && pc > pf.max(c(2.0)) + c(CRITICAL_TOL)
            };
            at(p, pc) && above && m.radius <= one / (c::<T>(2.0) * (one - alpha))
        }
        BoundSource::FujitaSubcritical => sub && below(p, p_fujita_prime(n, alpha)),
        BoundSource::FujitaCritical => sub && at(p, p_fujita_prime(n, alpha)),
        BoundSource::AcceleratedSpaceLog => alpha == one,
        BoundSource::AcceleratedSpacePower => alpha > one,
    }
}

fn sources(nl: Nonlinearity) -> &'static [BoundSource] {
    match nl {
        Nonlinearity::TimeDerivative => &BoundSource::TIME,
        Nonlinearity::SpaceDerivative => &BoundSource::SPACE,
    }
}

/// Every theorem branch for the nonlinearity of `m`, each flagged with
/// whether its hypotheses hold at `m`.
pub fn applicable_bounds<T: Real>(m: &ModelParams<T>) -> Vec<LifespanBound<T>> {
    sources(m.nonlinearity)
        .iter()
        .map(|&s| LifespanBound::new(s, bound_kind(s, m), is_applicable(s, m)))
        .collect()
}

/// The asymptotically smallest applicable bound as `ε -> 0`.
pub fn best_bound<T: Real>(bounds: &[LifespanBound<T>]) -> Result<LifespanBound<T>> {
    bounds
        .iter()
        .filter(|b| b.applicable)
        .min_by(|x, y| {
            let (a, b) = (x.kind.rank(), y.kind.rank());
            a.0.cmp(&b.0)
                .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.2.cmp(&b.2))
                .then(x.source.cmp(&y.source))
        })
        .cloned()
        .ok_or_else(|| Error::Degenerate("no applicable lifespan bound".into()))
}

/// Weakest data sign hypothesis under which some applicable theorem gives
/// blow-up at `m`.
pub fn data_hypothesis<T: Real>(m: &ModelParams<T>) -> DataHypothesis {
    let hyps: Vec<DataHypothesis> =
        applicable_bounds(m).iter().filter(|b| b.applicable).map(|b| b.source.data_hypothesis()).collect();
    let default = match m.nonlinearity {
        Nonlinearity::TimeDerivative => DataHypothesis::U1AboveU0,
        Nonlinearity::SpaceDerivative => DataHypothesis::BothNonnegative,
    };
    if hyps.contains(&DataHypothesis::U1Nonnegative) {
        DataHypothesis::U1Nonnegative
    } else {
        hyps.first().copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    G,
    O,
    C,
    F,
    A,
    NoBlowupResult,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::G => "G",
            Region::O => "O",
            Region::C => "C",
            Region::F => "F",
            Region::A => "A",
            Region::NoBlowupResult => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel<T> {
    pub region: Region,
    pub winner: Option<LifespanBound<T>>,
}

/// Region of `m` read off from the winning bound.
pub fn classify_region<T: Real>(m: &ModelParams<T>) -> RegionLabel<T> {
    let Ok(best) = best_bound(&applicable_bounds(m)) else {
        return RegionLabel { region: Region::NoBlowupResult, winner: None };
    };
    let region = match best.source {
        BoundSource::GlasseySubcritical | BoundSource::GlasseyCritical => Region::G,
        BoundSource::DampingSubcritical | BoundSource::SecondaryThreshold => Region::O,
        BoundSource::StraussSubcritical | BoundSource::StraussCritical => Region::C,
        BoundSource::FujitaSubcritical | BoundSource::FujitaCritical => Region::F,
        BoundSource::AcceleratedTimeLog
        | BoundSource::AcceleratedTimePower
        | BoundSource::AcceleratedSpaceLog
        | BoundSource::AcceleratedSpacePower => Region::A,
    };
    RegionLabel { region, winner: Some(best) }
}

/// Kato-lemma instance behind a power-type bound, with `A0 = ε^p`.
/// `None` for branches not proved through a Kato lemma.
pub fn kato_instance<T: Real>(source: BoundSource, m: &ModelParams<T>) -> Option<KatoProblem<T>> {
    let (n, alpha, mu, p) = (nf::<T>(m.n), m.alpha, m.mu, m.p);
    let one = T::one();
    let two = c::<T>(2.0);
    let pm1 = p - one;
    let om = one - alpha;
    let q_space = (p + n * pm1) * om;
    let (order, a, b, cc, q, r) = match source {
        BoundSource::DampingSubcritical => {
            let q = n * om * pm1;
            (KatoOrder::FirstOrder, mu * (p + one) + q, T::zero(), mu + one, q, T::zero())
        }
        BoundSource::AcceleratedTimeLog => {
            (KatoOrder::FirstOrder, mu * (p + one), n * pm1, mu + one, T::zero(), n * pm1)
        }
        BoundSource::AcceleratedTimePower => {
            (KatoOrder::FirstOrder, mu * (p + one), T::zero(), mu + one, T::zero(), T::zero())
        }
        BoundSource::StraussSubcritical => {
            let a = mu * (one + p / two) + om * (n - one) * p / two + p * om;
            let b = mu + alpha * p / two + om * (n - one) + two;
            (KatoOrder::SecondOrder, a, b, T::zero(), q_space, T::zero())
        }
        BoundSource::SecondaryThreshold => {
            (KatoOrder::SecondOrder, q_space + p * mu, p + two, T::zero(), q_space, T::zero())
        }
        BoundSource::FujitaSubcritical => (KatoOrder::SecondOrder, mu + q_space, mu + two, T::zero(), q_space, T::zero()),
        BoundSource::FujitaCritical => (KatoOrder::SecondOrderLog, T::zero(), one, T::zero(), two, T::zero()),
        BoundSource::AcceleratedSpaceLog => {
            let l = p + n * pm1;
            (KatoOrder::SecondOrderLogQ, mu, l, mu + two, l, T::zero())
        }
        BoundSource::AcceleratedSpacePower => {
            (KatoOrder::SecondOrderLogQ, mu, T::zero(), mu + two, T::zero(), T::zero())
        }
        BoundSource::GlasseySubcritical | BoundSource::GlasseyCritical | BoundSource::StraussCritical => return None,
    };
    let mut k = KatoProblem::new(order, p);
    k.a = a;
    k.b = b;
    k.c = cc;
    k.q = q;
    k.r = r;
    k.mu = mu;
    k.a0 = m.epsilon.powf(p);
    k.radius = m.radius;
    Some(k)
}

/// Value of a bound at `ε` with `C = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue<T> {
    pub t: T,
    /// `true` for implicit bounds solved numerically.
    pub implicit: bool,
    /// `true` when the implicit relation does not single out one `T`.
    pub nonunique: bool,
}

/// Evaluates a bound at `ε`: `ε^{-k}`, `exp(ε^{-r})`, or the root `T > e` of
/// `T^s (ln T)^{-l} = ε^{-m}` on the branch where the left side increases.
pub fn bound_value<T: Real>(kind: &BoundKind<T>, epsilon: T) -> Result<BoundValue<T>> {
    if !(epsilon > T::zero()) {
        return domain(format!("epsilon must be > 0 (got {epsilon})"));
    }
    let explicit = |t: T| Ok(BoundValue { t, implicit: false, nonunique: false });
    match *kind {
        BoundKind::PowerLaw { k } => explicit(epsilon.powf(-k)),
        BoundKind::Exponential { r } => explicit(epsilon.powf(-r).exp()),
        BoundKind::ImplicitPowerLog { s, l, m } => {
            if !(s > T::zero()) {
                return Ok(BoundValue { t: T::infinity(), implicit: true, nonunique: true });
            }
            // In x = ln T: g(x) = s x - l ln x, increasing for x > l/s.
            let rhs = -m * epsilon.ln();
            let g = |x: T| s * x - l * x.ln();
            let lo0 = T::one().max(l / s);
            if g(lo0) >= rhs {
                return Ok(BoundValue { t: lo0.exp(), implicit: true, nonunique: true });
            }
            let (mut lo, mut hi) = (lo0, lo0 * c(2.0));
            while g(hi) < rhs {
                lo = hi;
                hi = hi * c(2.0);
                if !hi.is_finite() {
                    return Err(Error::Degenerate("implicit bound root overflows".into()));
                }
            }
            for _ in 0..300 {
                let mid = (lo + hi) / c(2.0);
                if g(mid) < rhs {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= c::<T>(4.0) * T::epsilon() * hi {
                    break;
                }
            }
            Ok(BoundValue { t: ((lo + hi) / c(2.0)).exp(), implicit: true, nonunique: false })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XAxis {
    Mu,
    W,
}

/// A rectangular `(x, p)` grid of cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub n: u32,
    pub x_axis: XAxis,
    /// Fixed `alpha` for the `mu` axis; ignored for the `w` axis.
    pub alpha: T,
    pub nonlinearity: Nonlinearity,
    pub x_range: (T, T),
    pub p_range: (T, T),
    pub nx: usize,
    pub np: usize,
}

impl<T: Real> GridSpec<T> {
    /// Settings of the seven reference diagrams (`n = 3`).
    pub fn figure(id: u8) -> Result<Self> {
        let time = Nonlinearity::TimeDerivative;
        let space = Nonlinearity::SpaceDerivative;
        let (axis, alpha, nl, x_range, p_range) = match id {
            1 => (XAxis::Mu, 0.2, time, (0.0, 3.0), (1.0, 3.0)),
            2 => (XAxis::Mu, 0.9, time, (0.0, 1.0), (1.0, 4.0)),
            3 => (XAxis::Mu, 0.0, space, (0.0, 3.0), (1.0, 3.0)),
            4 => (XAxis::Mu, 0.3, space, (0.0, 3.0), (1.0, 3.0)),
            5 => (XAxis::Mu, 0.7, space, (0.0, 3.0), (1.0, 6.0)),
            6 => (XAxis::W, 0.0, time, (-1.0, 1.0), (1.0, 4.0)),
            7 => (XAxis::W, 0.0, space, (-1.0, 1.0), (1.0, 4.0)),
            _ => return domain(format!("figure must be 1..=7 (got {id})")),
        };
        Ok(Self {
            n: 3,
            x_axis: axis,
            alpha: c(alpha),
            nonlinearity: nl,
            x_range: (c(x_range.0), c(x_range.1)),
            p_range: (c(p_range.0), c(p_range.1)),
            nx: 200,
            np: 200,
        })
    }

    pub fn with_resolution(mut self, nx: usize, np: usize) -> Self {
        self.nx = nx;
        self.np = np;
        self
    }

    fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.nx == 0 || self.np == 0 {
            errs.push("resolution must be positive".to_string());
        }
        if !(self.x_range.0 < self.x_range.1) || !(self.p_range.0 < self.p_range.1) {
            errs.push("ranges must be non-empty intervals".to_string());
        }
        if self.p_range.0 < T::one() {
            errs.push("p range must lie in [1, ∞)".to_string());
        }
        match self.x_axis {
            XAxis::Mu => {
                if self.x_range.0 < T::zero() {
                    errs.push("mu range must lie in [0, ∞)".to_string());
                }
                if self.alpha < T::zero() {
                    errs.push("alpha must be >= 0".to_string());
                }
            }
            XAxis::W => {
                if self.x_range.0 < -T::one() || self.x_range.1 > T::one() {
                    errs.push("w range must lie in [-1, 1]".to_string());
                }
                if self.n < 2 {
                    errs.push("w axis needs n >= 2".to_string());
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    fn centre(lo: T, hi: T, i: usize, count: usize) -> T {
        lo + (hi - lo) * (T::from_usize_lossy(i) + c(0.5)) / T::from_usize_lossy(count)
    }

    /// Model parameters at abscissa `x` and exponent `p` (`ε = 1`, `R = 1/2`).
    pub fn model_at(&self, x: T, p: T) -> Result<ModelParams<T>> {
        let (eps, radius) = (T::one(), c(0.5));
        match self.x_axis {
            XAxis::Mu => Ok(ModelParams::new(self.n, self.alpha, x, p, eps, radius, self.nonlinearity)),
            XAxis::W => {
                let f = FlrwParams::new(self.n, x)?;
                Ok(ModelParams::new(self.n, f.alpha(), f.mu(), p, eps, radius, self.nonlinearity))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow<T> {
    pub x: T,
    pub p: T,
    pub region: Region,
    pub bound_kind: Option<&'static str>,
    pub exponent: Option<T>,
}

/// Classifies every cell of the grid; rows are ordered by `(x, p)`.
pub fn region_grid<T: Real>(spec: &GridSpec<T>) -> Result<Vec<GridRow<T>>> {
    spec.validate()?;
    let cols: Result<Vec<Vec<GridRow<T>>>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| {
            let x = GridSpec::centre(spec.x_range.0, spec.x_range.1, i, spec.nx);
            (0..spec.np)
                .map(|j| {
                    let p = GridSpec::centre(spec.p_range.0, spec.p_range.1, j, spec.np);
                    let label = classify_region(&spec.model_at(x, p)?);
                    Ok(GridRow {
                        x,
                        p,
                        region: label.region,
                        bound_kind: label.winner.as_ref().map(|b| b.kind.name()),
                        exponent: label.winner.as_ref().map(|b| b.kind.exponent()),
                    })
                })
                .collect()
        })
        .collect();
    Ok(cols?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub curve: String,
    pub x: T,
    pub p: T,
}

/// Threshold curves `p(x)` and vertical marker lines of the diagram.
pub fn region_curves<T: Real>(spec: &GridSpec<T>) -> Result<Vec<CurvePoint<T>>> {
    spec.validate()?;
    let n = spec.n;
    let (x_lo, x_hi) = spec.x_range;
    let samples = spec.nx.max(2);
    let xs: Vec<T> = (0..=samples)
        .map(|i| x_lo + (x_hi - x_lo) * T::from_usize_lossy(i) / T::from_usize_lossy(samples))
        .collect();
    let mut out = Vec::new();
    let mut push = |name: &str, x: T, p: Option<T>| {
        if let Some(p) = p.filter(|p| p.is_finite()) {
            out.push(CurvePoint { curve: name.to_string(), x, p });
        }
    };
    let vertical = |name: &str, x: T, out: &mut Vec<CurvePoint<T>>| {
        if x >= x_lo && x <= x_hi {
            out.push(CurvePoint { curve: name.to_string(), x, p: spec.p_range.0 });
            out.push(CurvePoint { curve: name.to_string(), x, p: spec.p_range.1 });
        }
    };
    let one = T::one();
    let two = c::<T>(2.0);
    let nn = nf::<T>(n);
    match spec.x_axis {
        XAxis::Mu => {
            let alpha = spec.alpha;
            if alpha >= one {
                for &mu in &xs {
                    push("p_damping", mu, Some(one + one / mu));
                }
                return Ok(out);
            }
            let om = one - alpha;
            for &mu in &xs {
                match spec.nonlinearity {
                    Nonlinearity::TimeDerivative => {
                        push("p_G_prime", mu, Some(p_glassey_prime(n, alpha, mu)));
                        push("p_0", mu, Some(p_zero(n, alpha, mu)));
                    }
                    Nonlinearity::SpaceDerivative => {
                        push("p_c_prime", mu, p_c_prime(n, alpha, mu)?.finite());
                        push("p_F_prime", mu, Some(p_fujita_prime(n, alpha)));
                        push("p_0_prime", mu, p_zero_prime(n, alpha, mu).finite());
                        let fc = two * om / ((nn + one) * om - mu + alpha);
                        push("fc_split", mu, Some(fc).filter(|v| *v > T::zero()));
                        let oc = two * om / ((nn + one) * om + mu + alpha - two);
                        push("oc_split", mu, Some(oc).filter(|v| *v > T::zero()));
                    }
                }
            }
            match spec.nonlinearity {
                Nonlinearity::TimeDerivative => vertical("mu_crossing", mu_crossing(n, alpha), &mut out),
                Nonlinearity::SpaceDerivative => {
                    vertical("mu_star", mu_star(n, alpha), &mut out);
                    vertical("mu_zero", mu_zero(n, alpha), &mut out);
                }
            }
        }
        XAxis::W => {
            for &w in &xs {
                if w <= -one {
                    continue;
                }
                let f = FlrwParams::new(n, w)?;
                let (alpha, mu) = (f.alpha(), f.mu());
                if alpha < one {
                    match spec.nonlinearity {
                        Nonlinearity::TimeDerivative => push("p_G_prime", w, Some(p_glassey_prime(n, alpha, mu))),
                        Nonlinearity::SpaceDerivative => {
                            push("p_c_prime", w, p_c_prime_w(n, w)?.finite());
                            push("p_F_prime", w, Some(p_fujita_prime(n, alpha)));
                        }
                    }
                } else if spec.nonlinearity == Nonlinearity::TimeDerivative {
                    push("p_damping", w, Some(one + one / mu));
                }
            }
            vertical("w_boundary", two / nn - one, &mut out);
            if spec.nonlinearity == Nonlinearity::SpaceDerivative {
                let ws = critical_w::<T>(n)?;
                if !ws.out_of_range {
                    vertical("w_star", ws.w, &mut out);
                }
            }
        }
    }
    Ok(out)
}
