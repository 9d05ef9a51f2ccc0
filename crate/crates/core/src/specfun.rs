//! Modified Bessel functions `K_nu` by direct quadrature of
//! `∫_0^∞ exp(-t cosh z) cosh(nu z) dz`, and the test functions built on them.
//!
//! Values are carried as `exp(log_scale) * mantissa` so that neither the
//! exponential decay of `K_nu` nor its growth at small arguments over- or
//! underflows in intermediate steps.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{lightcone_radius_unchecked, ModelParams};
use crate::quad;
use crate::scalar::{c, Real};

/// Integrand cut-off below the peak, in natural-log units (`e^{-46} ≈ 1e-20`).
const TAIL_DROP: f64 = 46.0;
const MIN_PANELS: usize = 64;
const MAX_PANELS: usize = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselContext<T> {
    pub nu: T,
    /// Relative change between successive refinements that counts as converged.
    pub tol: T,
}

/// `K`, `K'`, `K''` at one argument, each equal to `exp(log_scale) * field`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledK<T> {
    pub log_scale: T,
    pub k: T,
    pub dk: T,
    pub d2k: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals<T> {
    /// Relative residual of `t^2 K'' + t K' - (t^2 + nu^2) K = 0`.
    pub ode: T,
    /// Relative residual of `K_nu' = (nu/t) K_nu - K_{nu+1}`.
    pub recurrence: T,
    /// `K_nu(t) sqrt(2t/π) e^t - 1`.
    pub asymptotic: T,
}

impl<T: Real> BesselContext<T> {
    pub fn new(nu: T) -> Self {
        Self { nu, tol: c(1e-12) }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    /// `nu = (mu - 1)/(2(1 - alpha))`; needs `alpha < 1`.
    pub fn from_model(m: &ModelParams<T>) -> Result<Self> {
        if !(m.alpha < T::one()) {
            return domain(format!("Bessel order needs alpha < 1 (got {})", m.alpha));
        }
        Ok(Self::new((m.mu - T::one()) / (c::<T>(2.0) * (T::one() - m.alpha))))
    }

    /// `K_nu(t)`, `K_nu'(t)`, `K_nu''(t)` in scaled form.
    pub fn scaled(&self, t: T) -> Result<ScaledK<T>> {
        if !(t > T::zero()) || !t.is_finite() {
            return domain(format!("K_nu(t) needs t > 0 (got {t})"));
        }
        let nu = self.nu.abs();
        let expo = |z: T| -t * z.cosh() + nu * z;
        let z_peak = (nu / t).asinh();
        let e_peak = expo(z_peak);
        let drop = c::<T>(TAIL_DROP);
        let mut z_max = z_peak + T::one();
        while expo(z_max) + c::<T>(2.0) * z_max > e_peak - drop {
            z_max = z_max + (z_max * c(0.25)).max(T::one());
        }
        let term = |z: T| -> [T; 3] {
            let w = (expo(z) - e_peak).exp() * (T::one() + (-c::<T>(2.0) * nu * z).exp()) / c(2.0);
            let ch = z.cosh();
            [w, -ch * w, ch * ch * w]
        };
        let mut panels = MIN_PANELS / 2;
        let mut sums = {
            let a = term(T::zero());
            let b = term(z_max);
            [(a[0] + b[0]) / c(2.0), (a[1] + b[1]) / c(2.0), (a[2] + b[2]) / c(2.0)]
        };
        let add_nodes = |sums: &mut [T; 3], panels: usize, odd_only: bool| {
            let h = z_max / T::from_usize_lossy(panels);
            let (start, step) = if odd_only { (1, 2) } else { (1, 1) };
            let mut i = start;
            while i < panels {
                let v = term(h * T::from_usize_lossy(i));
                for k in 0..3 {
                    sums[k] = sums[k] + v[k];
                }
                i += step;
            }
        };
        add_nodes(&mut sums, panels, false);
        let mut prev = sums.map(|s| s * z_max / T::from_usize_lossy(panels));
        loop {
            panels *= 2;
            add_nodes(&mut sums, panels, true);
            let h = z_max / T::from_usize_lossy(panels);
            let est = sums.map(|s| s * h);
            let change = (0..3)
                .map(|k| ((est[k] - prev[k]) / est[k]).abs())
                .fold(T::zero(), |a, b| a.max(b));
            if panels >= MIN_PANELS && change <= self.tol {
                return Ok(ScaledK { log_scale: e_peak, k: est[0], dk: est[1], d2k: est[2] });
            }
            if panels >= MAX_PANELS {
                return Err(Error::Quadrature { achieved: change.as_f64() });
            }
            prev = est;
        }
    }

    pub fn bessel_k(&self, t: T) -> Result<T> {
        let s = self.scaled(t)?;
        Ok(s.log_scale.exp() * s.k)
    }

    pub fn log_bessel_k(&self, t: T) -> Result<T> {
        let s = self.scaled(t)?;
        Ok(s.log_scale + s.k.ln())
    }

    pub fn bessel_k_derivs(&self, t: T) -> Result<(T, T, T)> {
        let s = self.scaled(t)?;
        let f = s.log_scale.exp();
        Ok((f * s.k, f * s.dk, f * s.d2k))
    }

    /// `K_{nu+1}(s) / K_nu(s)`.
    pub fn ratio(&self, s: T) -> Result<T> {
        let num = BesselContext { nu: self.nu + T::one(), tol: self.tol }.scaled(s)?;
        let den = self.scaled(s)?;
        Ok((num.log_scale - den.log_scale).exp() * num.k / den.k)
    }

    pub fn identity_residuals(&self, t: T) -> Result<IdentityResiduals<T>> {
        let s = self.scaled(t)?;
        let nu = self.nu;
        let (k, dk, d2k) = (s.k, s.dk, s.d2k);
        let t2 = t * t;
        let ode_scale = t2 * d2k.abs() + t * dk.abs() + (t2 + nu * nu) * k.abs();
        let ode = (t2 * d2k + t * dk - (t2 + nu * nu) * k).abs() / ode_scale;
        let next = BesselContext { nu: nu + T::one(), tol: self.tol }.scaled(t)?;
        let k_next = (next.log_scale - s.log_scale).exp() * next.k;
        let rec_scale = dk.abs() + (nu / t * k).abs() + k_next.abs();
        let recurrence = (dk - nu / t * k + k_next).abs() / rec_scale;
        let log_ratio = s.log_scale + k.ln() + (c::<T>(2.0) * t / T::PI()).ln() / c(2.0) + t;
        Ok(IdentityResiduals { ode, recurrence, asymptotic: log_ratio.exp_m1() })
    }

    /// Certified upper bound on `K_{nu+1}(s)/K_nu(s)` over
    /// `s = t^{1-alpha}/(1-alpha)`, `t >= t_min`.
    ///
    /// The ratio tends to 1 as `s -> ∞` and is monotone on each side of
    /// `nu = -1/2`, so the supremum is either attained on the sampled range or
    /// is the limit 1. A relative pad of `1e-11` covers quadrature error.
    pub fn ratio_bound(&self, t_min: T, alpha: T) -> Result<T> {
        if !(t_min >= T::one()) {
            return domain(format!("ratio bound needs t_min >= 1 (got {t_min})"));
        }
        if !(alpha >= T::zero() && alpha < T::one()) {
            return domain(format!("ratio bound needs 0 <= alpha < 1 (got {alpha})"));
        }
        let om = T::one() - alpha;
        let s_min = t_min.powf(om) / om;
        let s_max = (s_min * c(1e3)).max(c(500.0));
        let samples = 400usize;
        let step = (s_max / s_min).ln() / T::from_usize_lossy(samples);
        let mut sup = T::one();
        for i in 0..=samples {
            let s = s_min * (step * T::from_usize_lossy(i)).exp();
            sup = sup.max(self.ratio(s)?);
        }
        Ok(sup * (T::one() + c::<T>(1e-11)))
    }
}

fn gamma_half_integer<T: Real>(twice: u32) -> T {
    // Γ(twice/2) for twice >= 1
    let (mut g, mut x) = if twice.is_multiple_of(2) { (T::one(), T::one()) } else { (T::PI().sqrt(), c::<T>(0.5)) };
    let target = T::from_u32(twice).unwrap() / c(2.0);
    while x < target {
        g = g * x;
        x = x + T::one();
    }
    g
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area<T: Real>(n: u32) -> T {
    c::<T>(2.0) * T::PI().powf(T::from_u32(n).unwrap() / c(2.0)) / gamma_half_integer::<T>(n)
}

/// `∫_{|ω|=1} exp(x·ω) dS_ω` for `|x| = r` in `R^n`.
pub fn sphere_integral<T: Real>(n: u32, r: T) -> Result<T> {
    if n < 2 {
        return domain(format!("sphere integral needs n >= 2 (got {n})"));
    }
    if !(r >= T::zero()) {
        return domain(format!("sphere integral needs r >= 0 (got {r})"));
    }
    if n == 3 {
        let four_pi = c::<T>(4.0) * T::PI();
        if r < c(1e-4) {
            let r2 = r * r;
            return Ok(four_pi * (T::one() + r2 / c(6.0) + r2 * r2 / c(120.0)));
        }
        return Ok(four_pi * r.sinh() / r);
    }
    let lower = unit_sphere_area::<T>(n - 1);
    if n.is_multiple_of(2) {
        // e^{r cos θ} sin^{n-2} θ extends to a smooth even 2π-periodic function.
        let k = (n - 2) as i32;
        let f = |th: T| (r * (th.cos() - T::one())).exp() * th.sin().powi(k);
        let mut panels = 16usize;
        let mut prev = quad::trapezoid(f, T::zero(), T::PI(), panels);
        loop {
            panels *= 2;
            let cur = quad::trapezoid(f, T::zero(), T::PI(), panels);
            if (cur - prev).abs() <= c::<T>(1e-15) * cur.abs() || panels >= 1 << 16 {
                return Ok(lower * cur * r.exp());
            }
            prev = cur;
        }
    }
    let k = ((n - 3) / 2) as i32;
    let f = |x: T| (r * (x - T::one())).exp() * (T::one() - x * x).powi(k);
    let v = quad::integrate(f, -T::one(), T::one(), c(1e-14), T::zero())?;
    Ok(lower * v * r.exp())
}

/// `λ(t) S(r)` with `λ(t) = t^{(1-mu)/2} K_nu(t^{1-alpha}/(1-alpha))`; solves
/// the adjoint linear equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi<T> {
    pub model: ModelParams<T>,
    ctx: BesselContext<T>,
}

/// `λ, λ', λ''` at one time, each times `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ScaledLambda<T> {
    log_scale: T,
    lam: T,
    dlam: T,
    d2lam: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhitCheck<T> {
    /// `φ_t / φ` from the derivative of `λ`.
    pub log_derivative: T,
    /// `-t^{-alpha} K_{nu+1}(s) / K_nu(s)`.
    pub ratio_form: T,
}

impl<T: Real> Phi<T> {
    pub fn new(model: &ModelParams<T>) -> Result<Self> {
        if model.n < 2 {
            return domain(format!("test function needs n >= 2 (got {})", model.n));
        }
        Ok(Self { model: *model, ctx: BesselContext::from_model(model)? })
    }

    pub fn nu(&self) -> T {
        self.ctx.nu
    }

    fn scaled_lambda(&self, t: T) -> Result<ScaledLambda<T>> {
        if !(t > T::zero()) {
            return domain(format!("λ(t) needs t > 0 (got {t})"));
        }
        let alpha = self.model.alpha;
        let om = T::one() - alpha;
        let a = (T::one() - self.model.mu) / c(2.0);
        let s = t.powf(om) / om;
        let ds = t.powf(-alpha);
        let d2s = -alpha * t.powf(-alpha - T::one());
        let kk = self.ctx.scaled(s)?;
        let ta = t.powf(a);
        let lam = ta * kk.k;
        let dlam = a * t.powf(a - T::one()) * kk.k + ta * kk.dk * ds;
        let d2lam = a * (a - T::one()) * t.powf(a - c(2.0)) * kk.k
            + c::<T>(2.0) * a * t.powf(a - T::one()) * kk.dk * ds
            + ta * (kk.d2k * ds * ds + kk.dk * d2s);
        Ok(ScaledLambda { log_scale: kk.log_scale, lam, dlam, d2lam })
    }

    pub fn lambda(&self, t: T) -> Result<T> {
        let l = self.scaled_lambda(t)?;
        Ok(l.log_scale.exp() * l.lam)
    }

    /// `λ'(t)`.
    pub fn lambda_t(&self, t: T) -> Result<T> {
        let l = self.scaled_lambda(t)?;
        Ok(l.log_scale.exp() * l.dlam)
    }

    pub fn phi(&self, t: T, r: T) -> Result<T> {
        Ok(self.lambda(t)? * sphere_integral(self.model.n, r)?)
    }

    pub fn phi_t(&self, t: T, r: T) -> Result<T> {
        Ok(self.lambda_t(t)? * sphere_integral(self.model.n, r)?)
    }

    /// Relative residual of `φ_tt - t^{-2 alpha} Δφ + (mu/t) φ_t = 0`, using
    /// `Δ S = S` for the sphere integral.
    pub fn pde_residual(&self, t: T, r: T) -> Result<T> {
        let l = self.scaled_lambda(t)?;
        let sv = sphere_integral(self.model.n, r)?;
        let speed = t.powf(-c::<T>(2.0) * self.model.alpha);
        let damp = self.model.mu / t;
        let terms = [l.d2lam * sv, -speed * l.lam * sv, damp * l.dlam * sv];
        let scale = terms.iter().fold(T::zero(), |a, x| a + x.abs());
        Ok((terms[0] + terms[1] + terms[2]).abs() / scale)
    }

    pub fn phit_check(&self, t: T) -> Result<PhitCheck<T>> {
        let l = self.scaled_lambda(t)?;
        let om = T::one() - self.model.alpha;
        let s = t.powf(om) / om;
        let ratio_form = -t.powf(-self.model.alpha) * self.ctx.ratio(s)?;
        Ok(PhitCheck { log_derivative: l.dlam / l.lam, ratio_form })
    }

    /// `∫_{|x| <= A(t)+R} φ(t,x) dx / (t+R)^{((1-alpha)(n-1) - (mu-alpha))/2}`.
    pub fn integral_ratio(&self, t: T, radius: T) -> Result<T> {
        if !(t >= T::one()) || !(radius > T::zero()) {
            return domain("integral ratio needs t >= 1 and R > 0");
        }
        let n = self.model.n;
        let alpha = self.model.alpha;
        let rho = lightcone_radius_unchecked(t, alpha) + radius;
        let nm1 = (n - 1) as i32;
        let radial = quad::integrate(
            |r: T| sphere_integral(n, r).unwrap_or(T::nan()) * r.powi(nm1),
            T::zero(),
            rho,
            c(1e-10),
            T::zero(),
        )?;
        let total = self.lambda(t)? * unit_sphere_area::<T>(n) * radial;
        let nf = T::from_u32(n).unwrap();
        let expo = ((T::one() - alpha) * (nf - T::one()) - (self.model.mu - alpha)) / c(2.0);
        Ok(total / (t + radius).powf(expo))
    }
}

/// Which asymptotic shape describes `φ_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeBranch {
    /// `-(mu+alpha)/2 < q < ((n-1)(1-alpha) - (mu+alpha))/2`.
    Inner,
    /// `q > ((n-1)(1-alpha) - (mu+alpha))/2`.
    Outer,
    /// `q` exactly on the dividing value; no envelope is stated there.
    Dividing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QAdmissibility {
    /// `q > -(mu+alpha)/2`.
    pub cd1: bool,
    /// `q + (mu-1)/2 - (1-alpha)|nu| > -1`.
    pub cd2: bool,
    pub branch: EnvelopeBranch,
    /// `q + 1 - alpha > ((n-1)(1-alpha) - (mu+alpha))/2`, the hypothesis of
    /// the two-sided estimate for `∂_t φ_q`.
    pub derivative_estimate: bool,
}

impl QAdmissibility {
    pub fn admissible(&self) -> bool {
        self.cd1 && self.cd2
    }
}

pub fn q_admissible<T: Real>(q: T, m: &ModelParams<T>) -> Result<QAdmissibility> {
    let ctx = BesselContext::from_model(m)?;
    let (alpha, mu) = (m.alpha, m.mu);
    let two = c::<T>(2.0);
    let om = T::one() - alpha;
    let split = (T::from_u32(m.n.saturating_sub(1)).unwrap() * om - (mu + alpha)) / two;
    let branch = if q < split {
        EnvelopeBranch::Inner
    } else if q > split {
        EnvelopeBranch::Outer
    } else {
        EnvelopeBranch::Dividing
    };
    Ok(QAdmissibility {
        cd1: q > -(mu + alpha) / two,
        cd2: q + (mu - T::one()) / two - om * ctx.nu.abs() > -T::one(),
        branch,
        derivative_estimate: q + om > split,
    })
}

/// `φ_q(t,x) = ∫_0^1 λ(ηt) S(η^{1-alpha}|x|) η^{q-1+mu} dη`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiQ<T> {
    phi: Phi<T>,
    pub q: T,
    pub flags: QAdmissibility,
    /// Exponent `E` with integrand `~ η^{E-1}` at the origin; the map
    /// `η = σ^{1/E}` removes the singularity.
    weight_power: T,
}

impl<T: Real> PhiQ<T> {
    pub fn new(model: &ModelParams<T>, q: T) -> Result<Self> {
        let flags = q_admissible(q, model)?;
        let two = c::<T>(2.0);
        if !flags.cd1 {
            return domain(format!("q = {q} violates q > -(mu+alpha)/2"));
        }
        if !flags.cd2 {
            return domain(format!("q = {q} violates q + (mu-1)/2 - (1-alpha)|nu| > -1"));
        }
        let phi = Phi::new(model)?;
        let om = T::one() - model.alpha;
        let weight_power = q + (model.mu + T::one()) / two - om * phi.nu().abs();
        Ok(Self { phi, q, flags, weight_power })
    }

    fn eta_integral<F: Fn(T) -> Result<T>>(&self, f: F) -> Result<T> {
        let e = self.weight_power;
        let q_mu = self.q + self.phi.model.mu;
        let mut failure = None;
        let v = quad::integrate(
            |sigma: T| {
                let eta = sigma.powf(T::one() / e);
                match f(eta) {
                    Ok(val) => val * eta.powf(q_mu - e) / e,
                    Err(err) => {
                        failure.get_or_insert(err);
                        T::zero()
                    }
                }
            },
            T::zero(),
            T::one(),
            c(1e-9),
            T::zero(),
        )?;
        match failure {
            Some(err) => Err(err),
            None => Ok(v),
        }
    }

    pub fn phi_q(&self, t: T, r: T) -> Result<T> {
        let n = self.phi.model.n;
        let om = T::one() - self.phi.model.alpha;
        self.eta_integral(|eta| Ok(self.phi.lambda(eta * t)? * sphere_integral(n, eta.powf(om) * r)?))
    }

    /// `∂_t φ_q(t, x)`.
    pub fn phi_q_t(&self, t: T, r: T) -> Result<T> {
        let n = self.phi.model.n;
        let om = T::one() - self.phi.model.alpha;
        self.eta_integral(|eta| Ok(eta * self.phi.lambda_t(eta * t)? * sphere_integral(n, eta.powf(om) * r)?))
    }

    /// The two-sided asymptotic shape of `φ_q` for its branch.
    pub fn envelope(&self, t: T, r: T) -> Result<T> {
        let m = &self.phi.model;
        let two = c::<T>(2.0);
        let om = T::one() - m.alpha;
        let lead = t.powf((m.alpha - m.mu) / two);
        let decay = (self.q + (m.mu + m.alpha) / two) / om;
        let tp = t.powf(om);
        let half_nm1 = T::from_u32(m.n - 1).unwrap() / two;
        match self.flags.branch {
            EnvelopeBranch::Inner => Ok(lead * (tp + r).powf(-decay)),
            EnvelopeBranch::Outer => {
                Ok(lead * (tp + r).powf(-half_nm1) * (tp - om * r).powf(half_nm1 - decay))
            }
            EnvelopeBranch::Dividing => domain("no envelope on the dividing value of q"),
        }
    }

    /// `φ_q / envelope` for `|x| <= A(t) + R`, `R <= 1/(2(1-alpha))`.
    pub fn envelope_ratio(&self, t: T, r: T) -> Result<T> {
        let m = &self.phi.model;
        let om = T::one() - m.alpha;
        if !(t >= T::one()) {
            return domain(format!("envelope needs t >= 1 (got {t})"));
        }
        let r_cap = lightcone_radius_unchecked(t, m.alpha) + T::one() / (c::<T>(2.0) * om);
        if !(r >= T::zero() && r <= r_cap) {
            return domain(format!("envelope needs 0 <= |x| <= A(t) + 1/(2(1-alpha)) = {r_cap} (got {r})"));
        }
        Ok(self.phi_q(t, r)? / self.envelope(t, r)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Nonlinearity;

    /// Ascending series of `K_0` and `K_1`, independent of the quadrature.
    fn k0_k1_series(x: f64) -> (f64, f64) {
        let euler = 0.577_215_664_901_532_9;
        let y = x * x / 4.0;
        let (mut i0, mut term, mut harm, mut sum) = (0.0, 1.0, 0.0, 0.0);
        let (mut i1, mut sum1) = (0.0, 0.0);
        for k in 0..60 {
            if k > 0 {
                term *= y / ((k * k) as f64);
                harm += 1.0 / k as f64;
            }
            i0 += term;
            sum += term * harm;
            // I_1 = (x/2) Σ y^k/(k!(k+1)!)
            let t1 = term / (k as f64 + 1.0);
            i1 += t1;
            sum1 += t1 * (2.0 * harm + 1.0 / (k as f64 + 1.0));
        }
        let k0 = -((x / 2.0).ln() + euler) * i0 + sum;
        let i1 = i1 * x / 2.0;
        let k1 = 1.0 / x + (x / 2.0).ln() * i1 + euler * i1 - x / 4.0 * sum1;
        (k0, k1)
    }

    #[test]
    fn series_oracle_matches_reference_values() {
        let (k0, k1) = k0_k1_series(1.0);
        assert!((k0 - 0.421_024_438_240_708_34).abs() < 1e-14);
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-14);
    }

    #[test]
    fn quadrature_matches_oracles() {
        for x in [0.1, 0.5, 1.0, 3.0] {
            let (k0, k1) = k0_k1_series(x);
            let q0 = BesselContext::new(0.0).bessel_k(x).unwrap();
            let q1 = BesselContext::new(1.0).bessel_k(x).unwrap();
            assert!((q0 / k0 - 1.0).abs() < 1e-11, "K0({x})");
            assert!((q1 / k1 - 1.0).abs() < 1e-11, "K1({x})");
        }
        let half = BesselContext::new(0.5).bessel_k(1.0).unwrap();
        assert!((half - (std::f64::consts::PI / 2.0).sqrt() * (-1.0f64).exp()).abs() < 1e-12);
        let a = BesselContext::new(0.37).bessel_k(1.0).unwrap();
        let b = BesselContext::new(-0.37).bessel_k(1.0).unwrap();
        assert_eq!(a, b);
        assert!(BesselContext::new(0.0).bessel_k(0.0).is_err());
    }

    #[test]
    fn derivatives_match_half_integer_closed_form() {
        // K_{1/2}(t) = sqrt(π/(2t)) e^{-t}
        let t: f64 = 1.7;
        let (k, dk, d2k) = BesselContext::new(0.5).bessel_k_derivs(t).unwrap();
        let f = (std::f64::consts::PI / (2.0 * t)).sqrt() * (-t).exp();
        let df = -f * (1.0 + 0.5 / t);
        let d2f = f * ((1.0 + 0.5 / t).powi(2) + 0.5 / (t * t));
        assert!((k / f - 1.0).abs() < 1e-12);
        assert!((dk / df - 1.0).abs() < 1e-12);
        assert!((d2k / d2f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_residual_examples() {
        let r = BesselContext::new(0.8).identity_residuals(2.0).unwrap();
        assert!(r.ode <= 1e-8);
        let r = BesselContext::new(0.5).identity_residuals(3.0).unwrap();
        assert!(r.recurrence <= 1e-10);
        let tails: Vec<f64> =
            [10.0, 20.0, 40.0].iter().map(|&t| BesselContext::new(0.0).identity_residuals(t).unwrap().asymptotic).collect();
        assert!(tails[2] < 0.0 && tails[2] > -0.01, "{tails:?}");
        assert!(tails[0].abs() > tails[1].abs() && tails[1].abs() > tails[2].abs());
    }

    #[test]
    fn ratio_examples() {
        let m = BesselContext::new(0.5f64).ratio_bound(1.0, 0.0).unwrap();
        assert!((m - 2.0).abs() < 1e-10, "{m}");
        let (k0, k1) = k0_k1_series(1.0);
        let r = BesselContext::new(0.0).ratio(1.0).unwrap();
        assert!((r - k1 / k0).abs() < 1e-11);
        assert!((r - 1.42963).abs() < 1e-5);
        let far = BesselContext::new(1.3f64).ratio(400.0).unwrap();
        assert!((far - 1.0).abs() < 0.01);
    }

    #[test]
    fn sphere_integral_examples() {
        use std::f64::consts::PI;
        assert!((sphere_integral(3, 0.0).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_integral(3, 1.0).unwrap() - 4.0 * PI * 1f64.sinh()).abs() < 1e-12);
        assert!((sphere_integral(2, 0.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_integral(5, 0.0).unwrap() - unit_sphere_area::<f64>(5)).abs() < 1e-12);
        // n = 4 at r = 0 is the area of S^3, 2π^2.
        assert!((sphere_integral(4, 0.0).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        assert!(sphere_integral(1, 1.0).is_err());
    }

    #[test]
    fn half_integer_test_function_has_closed_form() {
        // mu = 2, alpha = 0 gives nu = 1/2 and λ(t) = sqrt(π/2) e^{-t} / t.
        let m = ModelParams::new(3, 0.0, 2.0, 1.5, 1.0, 1.0, Nonlinearity::TimeDerivative);
        let phi = Phi::new(&m).unwrap();
        for t in [1.0f64, 2.5, 7.0] {
            let expect = (std::f64::consts::PI / 2.0).sqrt() * (-t).exp() / t;
            assert!((phi.lambda(t).unwrap() / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn admissibility_gates() {
        let m = ModelParams::new(3, 1.0 / 3.0, 1.0, 1.5, 1.0, 0.5, Nonlinearity::SpaceDerivative);
        let edge = -(1.0 + 1.0 / 3.0) / 2.0;
        assert!(!q_admissible(edge, &m).unwrap().cd1);
        assert!(PhiQ::new(&m, edge).is_err());
        let flags = q_admissible(-0.4, &m).unwrap();
        assert!(flags.admissible());
        assert_eq!(flags.branch, EnvelopeBranch::Inner);
        assert_eq!(q_admissible(0.5, &m).unwrap().branch, EnvelopeBranch::Outer);
    }
}
