//! Problem parameters, the FLRW mapping to `(alpha, mu)`, the scale factor
//! and the light-cone radius.
//!
//! The model problem is
//!
//! ```text
//! u_tt - t^{-2 alpha} Δu + (mu / t) u_t = N(u),   t > 1, x in R^n,
//! u(1) = eps u0,  u_t(1) = eps u1,   supp u0, u1 ⊂ {|x| <= R}
//! ```
//!
//! with `N(u) = |u_t|^p` or `|∇u|^p`. A spatially flat FLRW background with
//! scale factor `a(t) = c t^{2/(n(1+w))}` reduces to this form with
//! `alpha = 2/(n(1+w))` and `mu = 2/(1+w)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{c, Real};

/// Which derivative enters the power nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Nonlinearity {
    /// `|u_t|^p`
    TimeDerivative,
    /// `|∇_x u|^p`
    SpaceDerivative,
}

impl Nonlinearity {
    /// Short config-file spelling (`ut` / `grad`).
    pub fn key(self) -> &'static str {
        match self {
            Nonlinearity::TimeDerivative => "ut",
            Nonlinearity::SpaceDerivative => "grad",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ut" | "time" | "timederivative" | "u_t" => Ok(Nonlinearity::TimeDerivative),
            "grad" | "space" | "spacederivative" | "gradient" => Ok(Nonlinearity::SpaceDerivative),
            other => Err(Error::Config(format!(
                "unknown nonlinearity `{other}` (expected `ut` or `grad`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub n: u32,
    pub alpha: T,
    pub mu: T,
    pub p: T,
    pub epsilon: T,
    /// Radius of the ball containing the support of the data.
    pub radius: T,
    pub nonlinearity: Nonlinearity,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n: u32, alpha: T, mu: T, p: T, epsilon: T, radius: T, nonlinearity: Nonlinearity) -> Self {
        Self { n, alpha, mu, p, epsilon, radius, nonlinearity }
    }

    /// Returns `self` if every invariant holds, otherwise an error listing
    /// each violated invariant.
    pub fn validate(self) -> Result<Self> {
        let mut errs = Vec::new();
        if self.n < 1 {
            errs.push(format!("n must be an integer >= 1 (got {})", self.n));
        }
        if !(self.alpha >= T::zero()) {
            errs.push(format!("alpha must be >= 0 (got {})", self.alpha));
        }
        if !(self.mu >= T::zero()) {
            errs.push(format!("mu must be >= 0 (got {})", self.mu));
        }
        if !(self.p > T::one()) {
            errs.push(format!("p must be > 1 (got {})", self.p));
        }
        if !(self.epsilon > T::zero()) {
            errs.push(format!("epsilon must be > 0 (got {})", self.epsilon));
        }
        if !(self.radius > T::zero()) {
            errs.push(format!("R must be > 0 (got {})", self.radius));
        }
        if !self.alpha.is_finite() || !self.mu.is_finite() || !self.p.is_finite() {
            errs.push("alpha, mu and p must be finite".to_string());
        }
        if errs.is_empty() {
            Ok(self)
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// The blow-up theorems are stated for `n >= 2`; `n = 1` is only used to
    /// validate the solver.
    pub fn in_theorem_scope(&self) -> bool {
        self.n >= 2
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_p(mut self, p: T) -> Self {
        self.p = p;
        self
    }

    pub fn with_mu(mut self, mu: T) -> Self {
        self.mu = mu;
        self
    }

    /// Propagation regime of the reduced equation, read off from `alpha`.
    pub fn regime(&self) -> Regime {
        Regime::from_alpha(self.alpha)
    }
}

/// Expansion regime of the FLRW background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `w < 2/n - 1`, equivalently `alpha > 1`.
    Accelerating,
    /// `w = 2/n - 1`, equivalently `alpha = 1`.
    Boundary,
    /// `w > 2/n - 1`, equivalently `alpha < 1`.
    Decelerating,
}

impl Regime {
    pub fn from_alpha<T: Real>(alpha: T) -> Self {
        if alpha > T::one() {
            Regime::Accelerating
        } else if alpha == T::one() {
            Regime::Boundary
        } else {
            Regime::Decelerating
        }
    }
}

/// Tolerance used to snap `w` onto the regime boundary `2/n - 1`.
pub const BOUNDARY_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlrwParams<T> {
    pub n: u32,
    /// Equation-of-state constant, `-1 < w <= 1`.
    pub w: T,
    /// Scale-factor constant `c`; only enters [`scale_factor`].
    pub c_scale: T,
}

impl<T: Real> FlrwParams<T> {
    pub fn new(n: u32, w: T) -> Result<Self> {
        Self::with_scale(n, w, T::one())
    }

    pub fn with_scale(n: u32, w: T, c_scale: T) -> Result<Self> {
        if n < 2 {
            return domain(format!("FLRW mapping needs n >= 2 (got {n})"));
        }
        if !(w > -T::one() && w <= T::one()) {
            return domain(format!("w must satisfy -1 < w <= 1 (got {w})"));
        }
        if !(c_scale > T::zero()) {
            return domain(format!("scale-factor constant must be > 0 (got {c_scale})"));
        }
        Ok(Self { n, w, c_scale })
    }

    fn boundary_w(&self) -> T {
        c::<T>(2.0) / T::from_u32(self.n).unwrap() - T::one()
    }

    fn on_boundary(&self) -> bool {
        (self.w - self.boundary_w()).abs() <= c(BOUNDARY_SNAP)
    }

    /// `alpha = 2/(n(1+w))`, exactly 1 on the regime boundary.
    pub fn alpha(&self) -> T {
        if self.on_boundary() {
            return T::one();
        }
        let n = T::from_u32(self.n).unwrap();
        c::<T>(2.0) / (n * (T::one() + self.w))
    }

    /// `mu = 2/(1+w)`, exactly `n` on the regime boundary.
    pub fn mu(&self) -> T {
        if self.on_boundary() {
            return T::from_u32(self.n).unwrap();
        }
        c::<T>(2.0) / (T::one() + self.w)
    }

    pub fn regime(&self) -> Regime {
        if self.on_boundary() {
            Regime::Boundary
        } else if self.w < self.boundary_w() {
            Regime::Accelerating
        } else {
            Regime::Decelerating
        }
    }
}

/// Maps an FLRW background onto the model problem.
pub fn flrw_to_model<T: Real>(
    f: &FlrwParams<T>,
    p: T,
    epsilon: T,
    radius: T,
    nonlinearity: Nonlinearity,
) -> Result<ModelParams<T>> {
    // Re-check in case the struct was built by hand.
    let f = FlrwParams::with_scale(f.n, f.w, f.c_scale)?;
    ModelParams::new(f.n, f.alpha(), f.mu(), p, epsilon, radius, nonlinearity).validate()
}

/// `a(t) = c t^{2/(n(1+w))}`.
pub fn scale_factor<T: Real>(t: T, f: &FlrwParams<T>) -> Result<T> {
    if !(t > T::zero()) {
        return domain(format!("scale factor needs t > 0 (got {t})"));
    }
    let n = T::from_u32(f.n).unwrap();
    let expo = c::<T>(2.0) / (n * (T::one() + f.w));
    Ok(f.c_scale * t.powf(expo))
}

/// Light-cone radius `A(t) = ∫_1^t s^{-alpha} ds`.
///
/// The logarithmic branch is taken only for `alpha == 1` exactly.
pub fn lightcone_radius<T: Real>(t: T, alpha: T) -> Result<T> {
    if !(t >= T::one()) {
        return domain(format!("light-cone radius needs t >= 1 (got {t})"));
    }
    if alpha < T::zero() {
        return domain(format!("alpha must be >= 0 (got {alpha})"));
    }
    Ok(lightcone_radius_unchecked(t, alpha))
}

pub(crate) fn lightcone_radius_unchecked<T: Real>(t: T, alpha: T) -> T {
    if alpha == T::zero() {
        return t - T::one();
    }
    let lt = t.ln();
    if alpha == T::one() {
        return lt;
    }
    // (t^{1-a} - 1)/(1-a); expm1 keeps both power branches accurate near a = 1.
    let k = T::one() - alpha;
    (k * lt).exp_m1() / k
}
