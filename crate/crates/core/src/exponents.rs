//! Critical exponents and threshold parameters.
//!
//! Everything here is closed-form algebra in `(n, alpha, mu)` or, for the
//! FLRW background, in `(n, w)`. The only non-trivial numerics are the
//! quadratic roots, which use the cancellation-free form.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::params::{FlrwParams, Regime};
use crate::scalar::{c, Real};

/// Tolerance for deciding `p == threshold` when selecting critical branches.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Positive root of a quadratic threshold equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RootDescriptor<T> {
    Finite(T),
    /// The quadratic is positive for every `p > 1` (non-positive leading
    /// coefficient), so the subcritical condition holds for all `p`.
    AllP,
}

impl<T: Real> RootDescriptor<T> {
    pub fn finite(&self) -> Option<T> {
        match *self {
            RootDescriptor::Finite(v) => Some(v),
            RootDescriptor::AllP => None,
        }
    }

    /// `p` strictly below the root (always true for [`RootDescriptor::AllP`]).
    pub fn is_below(&self, p: T, tol: T) -> bool {
        match *self {
            RootDescriptor::Finite(v) => p < v - tol,
            RootDescriptor::AllP => true,
        }
    }
}

/// A threshold that may fail to exist as a finite exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold<T> {
    Finite(T),
    NoFiniteThreshold,
}

impl<T: Real> Threshold<T> {
    pub fn finite(&self) -> Option<T> {
        match *self {
            Threshold::Finite(v) => Some(v),
            Threshold::NoFiniteThreshold => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet<T> {
    pub n: u32,
    pub alpha: T,
    pub mu: T,
    /// Minkowski Glassey exponent `1 + 2/(n-1)`.
    pub p_g: T,
    /// Glassey exponent generalised to damping and speed decay.
    pub p_g_prime: T,
    /// First-order (damping driven) threshold for `|u_t|^p`.
    pub p_0: T,
    /// Strauss-type root for `|∇u|^p`.
    pub p_c_prime: RootDescriptor<T>,
    /// Secondary threshold for `|∇u|^p`.
    pub p_0_prime: Threshold<T>,
    /// Fujita-type (heat-like) threshold for `|∇u|^p`.
    pub p_f_prime: T,
    /// Fujita exponent of the `|u|^p` equation, for comparison.
    pub p_f_ref: T,
    /// Strauss root of the `|u|^p` equation, for comparison.
    pub p_c_ref: RootDescriptor<T>,
    /// `mu` at which `p_g_prime == p_0`.
    pub mu_crossing: T,
    /// `mu` at which `p_c_prime == p_f_prime`.
    pub mu_star: T,
    /// `mu` at which `p_c_prime == p_0_prime`.
    pub mu_zero: T,
}

fn nf<T: Real>(n: u32) -> T {
    T::from_u32(n).unwrap()
}

fn require_alpha_below_one<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return domain(format!("needs 0 <= alpha < 1 (got {alpha})"));
    }
    Ok(())
}

/// Largest root of `a x^2 + b x + c = 0` without cancellation.
///
/// Returns `None` for a negative discriminant or a degenerate equation.
pub(crate) fn larger_root<T: Real>(a: T, b: T, cc: T) -> Option<T> {
    if a == T::zero() {
        return if b == T::zero() { None } else { Some(-cc / b) };
    }
    let disc = b * b - c::<T>(4.0) * a * cc;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let q = -(b + b.signum() * sq) / c(2.0);
    let (r1, r2) = if q == T::zero() { (T::zero(), T::zero()) } else { (q / a, cc / q) };
    Some(r1.max(r2))
}

/// Minkowski Glassey exponent `p_G(n) = 1 + 2/(n-1)`; `n` may be fractional
/// (it is evaluated at `n + mu`).
pub fn p_glassey<T: Real>(n: T) -> Result<T> {
    if !(n > T::one()) {
        return domain(format!("p_G(n) needs n > 1 (got {n})"));
    }
    Ok(T::one() + c::<T>(2.0) / (n - T::one()))
}

pub fn p_glassey_prime<T: Real>(n: u32, alpha: T, mu: T) -> T {
    let n = nf::<T>(n);
    T::one() + c::<T>(2.0) / ((T::one() - alpha) * (n - T::one()) + mu + alpha)
}

pub fn p_zero<T: Real>(n: u32, alpha: T, mu: T) -> T {
    T::one() + T::one() / (nf::<T>(n) * (T::one() - alpha) + mu)
}

pub fn p_fujita_prime<T: Real>(n: u32, alpha: T) -> T {
    T::one() + (T::one() + alpha) / ((nf::<T>(n) + T::one()) * (T::one() - alpha))
}

pub fn p_zero_prime<T: Real>(n: u32, alpha: T, mu: T) -> Threshold<T> {
    let den = (nf::<T>(n) + T::one()) * (T::one() - alpha) + mu - T::one();
    if den <= T::zero() {
        Threshold::NoFiniteThreshold
    } else {
        Threshold::Finite(T::one() + (T::one() + alpha) / den)
    }
}

pub fn p_fujita_ref<T: Real>(n: u32, alpha: T) -> T {
    T::one() + c::<T>(2.0) / (nf::<T>(n) * (T::one() - alpha))
}

pub fn mu_crossing<T: Real>(n: u32, alpha: T) -> T {
    let n = nf::<T>(n);
    alpha * (n + c(2.0)) - (n + T::one())
}

pub fn mu_star<T: Real>(n: u32, alpha: T) -> T {
    let k = (nf::<T>(n) + T::one()) * (T::one() - alpha);
    k + alpha - c::<T>(2.0) * k * (T::one() - alpha) / (k + T::one() + alpha)
}

pub fn mu_zero<T: Real>(n: u32, alpha: T) -> T {
    let n = nf::<T>(n);
    -(n - T::one()) * (T::one() - alpha)
        + (c::<T>(3.0) * alpha * alpha - c::<T>(4.0) * alpha + c(2.0)).sqrt()
}

/// Coefficients `(A, B)` of `gamma' = -A p^2 + B p + 2`.
fn gamma_prime_coeffs<T: Real>(n: u32, alpha: T, mu: T) -> (T, T) {
    let n = nf::<T>(n);
    let one_m = T::one() - alpha;
    let lead = n + T::one() + (mu - alpha) / one_m;
    let lin = n + T::one() + (mu + c::<T>(3.0) * alpha) / one_m;
    (lead, lin)
}

/// The quadratic `gamma'(n, p, alpha, mu)` whose positive root is the
/// Strauss-type threshold for `|∇u|^p`.
pub fn gamma_prime<T: Real>(n: u32, p: T, alpha: T, mu: T) -> Result<T> {
    require_alpha_below_one(alpha)?;
    let (a, b) = gamma_prime_coeffs(n, alpha, mu);
    Ok(-a * p * p + b * p + c(2.0))
}

pub fn p_c_prime<T: Real>(n: u32, alpha: T, mu: T) -> Result<RootDescriptor<T>> {
    require_alpha_below_one(alpha)?;
    let (a, b) = gamma_prime_coeffs(n, alpha, mu);
    Ok(positive_root(a, b))
}

/// Positive root of `-A p^2 + B p + 2`, or `AllP` when `A <= 0`.
fn positive_root<T: Real>(a: T, b: T) -> RootDescriptor<T> {
    if a <= T::zero() {
        return RootDescriptor::AllP;
    }
    // A p^2 - B p - 2 = 0 has roots of opposite sign; take the positive one.
    match larger_root(a, -b, -c::<T>(2.0)) {
        Some(r) => RootDescriptor::Finite(r),
        None => RootDescriptor::AllP,
    }
}

/// `gamma(n, p, alpha, mu)` of the `|u|^p` equation (comparison only).
pub fn gamma_ref<T: Real>(n: u32, p: T, alpha: T, mu: T) -> Result<T> {
    require_alpha_below_one(alpha)?;
    let (a, b) = gamma_ref_coeffs(n, alpha, mu);
    Ok(-a * p * p + b * p + c(2.0))
}

fn gamma_ref_coeffs<T: Real>(n: u32, alpha: T, mu: T) -> (T, T) {
    let n = nf::<T>(n);
    let one_m = T::one() - alpha;
    (n - T::one() + (mu - alpha) / one_m, n + T::one() + (mu + c::<T>(3.0) * alpha) / one_m)
}

pub fn p_c_ref<T: Real>(n: u32, alpha: T, mu: T) -> Result<RootDescriptor<T>> {
    require_alpha_below_one(alpha)?;
    let (a, b) = gamma_ref_coeffs(n, alpha, mu);
    Ok(positive_root(a, b))
}

/// Every exponent and threshold parameter for one `(n, alpha, mu)` with
/// `0 <= alpha < 1`.
pub fn threshold_set<T: Real>(n: u32, alpha: T, mu: T) -> Result<ExponentSet<T>> {
    require_alpha_below_one(alpha)?;
    if n < 2 {
        return domain(format!("exponents need n >= 2 (got {n})"));
    }
    Ok(ExponentSet {
        n,
        alpha,
        mu,
        p_g: p_glassey(nf::<T>(n))?,
        p_g_prime: p_glassey_prime(n, alpha, mu),
        p_0: p_zero(n, alpha, mu),
        p_c_prime: p_c_prime(n, alpha, mu)?,
        p_0_prime: p_zero_prime(n, alpha, mu),
        p_f_prime: p_fujita_prime(n, alpha),
        p_f_ref: p_fujita_ref(n, alpha),
        p_c_ref: p_c_ref(n, alpha, mu)?,
        mu_crossing: mu_crossing(n, alpha),
        mu_star: mu_star(n, alpha),
        mu_zero: mu_zero(n, alpha),
    })
}

/// `gamma_0'(n, p, w) = (1 - 2/(n(1+w))) gamma'(n, p, alpha(w), mu(w))`,
/// written out as a polynomial in `p`.
pub fn gamma0_prime<T: Real>(n: u32, p: T, w: T) -> Result<T> {
    if !(w > -T::one() && w <= T::one()) {
        return domain(format!("w must satisfy -1 < w <= 1 (got {w})"));
    }
    let (a, b, k) = gamma0_coeffs(n, w);
    Ok(-a * p * p + b * p + k)
}

fn gamma0_coeffs<T: Real>(n: u32, w: T) -> (T, T, T) {
    let nn = nf::<T>(n);
    let s = c::<T>(4.0) / (nn * (T::one() + w));
    (nn + T::one() - s, nn + T::one() + s, c::<T>(2.0) - s)
}

/// Positive root of `gamma_0'(n, p, w)`.
pub fn p_c_prime_w<T: Real>(n: u32, w: T) -> Result<RootDescriptor<T>> {
    if !(w > -T::one() && w <= T::one()) {
        return domain(format!("w must satisfy -1 < w <= 1 (got {w})"));
    }
    let (a, b, k) = gamma0_coeffs::<T>(n, w);
    if a <= T::zero() {
        return Ok(RootDescriptor::AllP);
    }
    Ok(match larger_root(-a, b, k) {
        Some(r) => RootDescriptor::Finite(r),
        None => RootDescriptor::AllP,
    })
}

/// Larger root `w*` of the quadratic on which `p_F'(n, w) = p_c'(n, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalW<T> {
    pub w: T,
    /// `true` when `w*` lies outside the admissible range `(-1, 1]`.
    pub out_of_range: bool,
}

pub fn critical_w<T: Real>(n: u32) -> Result<CriticalW<T>> {
    if n < 2 {
        return domain(format!("w* needs n >= 2 (got {n})"));
    }
    let nn = nf::<T>(n);
    let two = c::<T>(2.0);
    let n3 = nn * nn * nn;
    let a = n3 * (nn + T::one());
    let b = two * nn * (nn * nn * (nn + T::one()) - (c::<T>(3.0) * nn + c(4.0)) * (nn - T::one()));
    let k = n3 * (nn + T::one()) - two * nn * (c::<T>(3.0) * nn + c(4.0)) * (nn - T::one())
        + c::<T>(8.0) * (nn * nn - nn - T::one());
    let w = larger_root(a, b, k).ok_or_else(|| crate::Error::Degenerate("w* quadratic has no real root".into()))?;
    Ok(CriticalW { w, out_of_range: !(w > -T::one() && w <= T::one()) })
}

/// Exponents of the FLRW background `(n, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlrwThresholds<T> {
    pub n: u32,
    pub w: T,
    pub alpha: T,
    pub mu: T,
    pub regime: Regime,
    /// Minkowski Glassey exponent, for reference.
    pub p_g: T,
    /// `1 + 1/mu`: the `|u_t|^p` condition when `alpha >= 1`.
    pub p_damping: T,
    /// Full set of the `alpha < 1` exponents; `None` unless decelerating.
    pub decelerating: Option<ExponentSet<T>>,
    /// Root of `gamma_0'`; `None` unless decelerating.
    pub p_c_prime_w: Option<RootDescriptor<T>>,
}

pub fn flrw_thresholds<T: Real>(n: u32, w: T) -> Result<FlrwThresholds<T>> {
    let f = FlrwParams::new(n, w)?;
    let (alpha, mu, regime) = (f.alpha(), f.mu(), f.regime());
    let (decelerating, p_c_prime_w) = if regime == Regime::Decelerating {
        let set = threshold_set(n, alpha, mu)?;
        let root_w = p_c_prime_w(n, w)?;
        (Some(set), Some(root_w))
    } else {
        (None, None)
    };
    Ok(FlrwThresholds {
        n,
        w,
        alpha,
        mu,
        regime,
        p_g: p_glassey(nf::<T>(n))?,
        p_damping: T::one() + T::one() / mu,
        decelerating,
        p_c_prime_w,
    })
}

/// Lower bound on `alpha` above which `p_0' > p_c' > p_F'` for `0 <= mu < mu_0`.
pub fn ordering_alpha_threshold<T: Real>(n: u32) -> T {
    let nn = nf::<T>(n);
    let k = nn * nn - c::<T>(2.0) * nn - T::one();
    let den = nn * nn - c::<T>(2.0) * nn - c(2.0);
    if k <= T::zero() || den == T::zero() {
        return T::zero();
    }
    ((k - k.sqrt()) / den).max(T::zero())
}
