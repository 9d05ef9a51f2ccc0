//! Executable Kato-type lemmas.
//!
//! A lemma takes a lower bound `F(t) >= A0 t^{-a} (ln t)^{-b} (t - T1)^c`
//! together with a differential inequality with power nonlinearity and
//! returns an upper bound for the existence time of `F`. Here each lemma
//! is represented by a [`KatoProblem`], its iteration sequences, its
//! exponent `M`, the resulting bound and a direct ODE oracle.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::regions::BoundKind;
use crate::scalar::{c, Real};

/// Largest iteration index accepted by [`KatoProblem::iterate`].
pub const MAX_ITERATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KatoOrder {
    /// `F' + (mu/t) F >= A1 (t+R)^{-q} (ln t)^{-r} |F|^p`.
    FirstOrder,
    /// `F'' + (mu/t) F' >= A1 (t+R)^{-q} |F|^p`, lower bound `A0 t^{-a} (t-T1)^b`.
    SecondOrder,
    /// `F'' + (mu/t) F' >= A1 (t+R)^{-2} |F|^p`, lower bound `A0 (ln(t/T1))^b`.
    SecondOrderLog,
    /// `F'' + (mu/t) F' >= A1 (ln t)^{-q} |F|^p`.
    SecondOrderLogQ,
}

impl KatoOrder {
    pub fn key(self) -> &'static str {
        match self {
            KatoOrder::FirstOrder => "first",
            KatoOrder::SecondOrder => "second",
            KatoOrder::SecondOrderLog => "second-log",
            KatoOrder::SecondOrderLogQ => "second-logq",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "1" | "firstorder" => Ok(KatoOrder::FirstOrder),
            "second" | "2" | "secondorder" => Ok(KatoOrder::SecondOrder),
            "second-log" | "secondorderlog" => Ok(KatoOrder::SecondOrderLog),
            "second-logq" | "secondorderlogq" => Ok(KatoOrder::SecondOrderLogQ),
            other => Err(Error::Config(format!(
                "unknown Kato order '{other}' (expected first, second, second-log, second-logq)"
            ))),
        }
    }

    pub fn is_second_order(self) -> bool {
        !matches!(self, KatoOrder::FirstOrder)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatoProblem<T> {
    pub p: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub q: T,
    pub r: T,
    pub mu: T,
    pub a0: T,
    pub a1: T,
    pub radius: T,
    pub t0: T,
    pub t1: T,
    pub order: KatoOrder,
    /// `F(T0)` for the ODE oracle.
    pub f0: T,
    /// `F'(T0)` for the second-order ODE oracle.
    pub df0: T,
}

/// One term of the iteration sequences, `D_j` kept as `ln D_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatoIteration<T> {
    pub j: usize,
    pub a_j: T,
    pub b_j: T,
    pub c_j: T,
    pub log_d_j: T,
}

impl<T: Real> KatoProblem<T> {
    /// A problem with unit constants, `T0 = 1`, `T1 = 2` and oracle data
    /// `F(T0) = A0`, `F'(T0) = A0`.
    pub fn new(order: KatoOrder, p: T) -> Self {
        let one = T::one();
        Self {
            p,
            a: T::zero(),
            b: T::zero(),
            c: one,
            q: T::zero(),
            r: T::zero(),
            mu: T::zero(),
            a0: one,
            a1: one,
            radius: one,
            t0: one,
            t1: c(2.0),
            order,
            f0: one,
            df0: one,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let z = T::zero();
        if !(self.p > T::one()) {
            errs.push(format!("p must be > 1 (got {})", self.p));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("q", self.q), ("r", self.r), ("mu", self.mu)] {
            if !(v >= z) {
                errs.push(format!("{name} must be >= 0 (got {v})"));
            }
        }
        if self.order != KatoOrder::SecondOrder && self.order != KatoOrder::SecondOrderLog && !(self.c > z) {
            errs.push(format!("c must be > 0 (got {})", self.c));
        }
        for (name, v) in [("A0", self.a0), ("A1", self.a1), ("R", self.radius)] {
            if !(v > z) {
                errs.push(format!("{name} must be > 0 (got {v})"));
            }
        }
        if !(self.t0 >= T::one() && self.t1 > self.t0) {
            errs.push(format!("need T1 > T0 >= 1 (got T0 = {}, T1 = {})", self.t0, self.t1));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// The lemma's exponent `M`. For [`KatoOrder::SecondOrderLog`] this is
    /// the denominator `b(p-1) + 2` (`mu <= 1`) or `b(p-1) + 1` (`mu > 1`).
    pub fn m_exponent(&self) -> T {
        let pm1 = self.p - T::one();
        match self.order {
            KatoOrder::FirstOrder => pm1 * (self.c - self.a) - self.q + T::one(),
            KatoOrder::SecondOrder => pm1 * (self.b - self.a) - self.q + c(2.0),
            KatoOrder::SecondOrderLog => {
                let add = if self.mu <= T::one() { c(2.0) } else { T::one() };
                self.b * pm1 + add
            }
            KatoOrder::SecondOrderLogQ => pm1 * (self.c - self.a) + c(2.0),
        }
    }

    fn require_positive_m(&self) -> Result<T> {
        let m = self.m_exponent();
        if m > T::zero() {
            return Ok(m);
        }
        let ineq = match self.order {
            KatoOrder::FirstOrder => "(p-1)(c-a) - q + 1 > 0",
            KatoOrder::SecondOrder => "(p-1)(b-a) - q + 2 > 0",
            KatoOrder::SecondOrderLog => "b(p-1) + 2 > 0",
            KatoOrder::SecondOrderLogQ => "(p-1)(c-a) + 2 > 0",
        };
        domain(format!("M = {m} violates {ineq}"))
    }

    fn shifts(&self) -> (T, T, T) {
        let pm1 = self.p - T::one();
        ((self.mu + self.q) / pm1, self.r / pm1, (self.mu + T::one()) / pm1)
    }

    fn log_gain(&self) -> T {
        // ln(A1 C_{R,q}), C_{R,q} = (1+R)^{-q}
        self.a1.ln() - self.q * (T::one() + self.radius).ln()
    }

    /// Sequences by direct recursion from `(a, b, c, A0)`.
    pub fn iterate(&self, j: usize) -> Result<KatoIteration<T>> {
        check_index(j)?;
        let (p, mu) = (self.p, self.mu);
        let gain = self.log_gain();
        let mut it = KatoIteration { j: 0, a_j: self.a, b_j: self.b, c_j: self.c, log_d_j: self.a0.ln() };
        for k in 0..j {
            let next_c = p * it.c_j + mu + T::one();
            it = KatoIteration {
                j: k + 1,
                a_j: p * it.a_j + mu + self.q,
                b_j: p * it.b_j + self.r,
                c_j: next_c,
                log_d_j: gain + p * it.log_d_j - next_c.ln(),
            };
        }
        Ok(it)
    }

    /// Sequences by their solved forms.
    pub fn closed_form(&self, j: usize) -> Result<KatoIteration<T>> {
        check_index(j)?;
        let p = self.p;
        let pj = p.powi(j as i32);
        let (sa, sb, sc) = self.shifts();
        let solved = |x0: T, s: T| pj * (x0 + s) - s;
        let c_at = |k: usize| p.powi(k as i32) * (self.c + sc) - sc;
        // ln D_j = p^j ln A0 + ln(A1 C) (p^j - 1)/(p - 1) - Σ_{k<j} p^{j-1-k} ln c_{k+1}
        let mut tail = T::zero();
        for k in 0..j {
            tail = tail + p.powi((j - 1 - k) as i32) * c_at(k + 1).ln();
        }
        let log_d_j = pj * self.a0.ln() + self.log_gain() * (pj - T::one()) / (p - T::one()) - tail;
        Ok(KatoIteration { j, a_j: solved(self.a, sa), b_j: solved(self.b, sb), c_j: solved(self.c, sc), log_d_j })
    }

    /// Growth constant `E` of the first-order iteration.
    pub fn growth_e(&self) -> T {
        let pm1 = self.p - T::one();
        let (_, _, sc) = self.shifts();
        let ln_b = self.log_gain() - (self.c + sc).ln();
        ln_b.min(T::zero()) / pm1 - self.p.ln() * self.p / (pm1 * pm1) + self.a0.ln()
    }

    /// Lifespan bound with `C = 1`, expressed in the small parameter
    /// `A0^{-1}` (so `PowerLaw { k }` means `T <= A0^{-k}`).
    pub fn lifespan_bound(&self) -> Result<BoundKind<T>> {
        self.validate()?;
        let m = self.require_positive_m()?;
        let pm1 = self.p - T::one();
        Ok(match self.order {
            KatoOrder::FirstOrder => implicit_or_power(m / pm1, self.b + self.r / pm1),
            KatoOrder::SecondOrder => BoundKind::PowerLaw { k: pm1 / m },
            KatoOrder::SecondOrderLog => BoundKind::Exponential { r: pm1 / m },
            KatoOrder::SecondOrderLogQ => implicit_or_power(m / pm1, self.b + self.q / pm1),
        })
    }

    /// The bracket whose positivity makes the iterated lower bound diverge:
    /// `E + (c + (mu+1)/(p-1)) ln(t - T1) - (a + (mu+q)/(p-1)) ln t - (b + r/(p-1)) ln ln t`.
    pub fn bracket(&self, t: T) -> T {
        let (sa, sb, sc) = self.shifts();
        self.growth_e() + (self.c + sc) * (t - self.t1).ln() - (self.a + sa) * t.ln() - (self.b + sb) * t.ln().ln()
    }

    /// Smallest `t` with `bracket(t) >= delta`, searched on a geometric grid
    /// above `T1 + 1` and refined by bisection.
    pub fn divergence_time(&self, delta: T, horizon: T) -> Result<T> {
        if self.order != KatoOrder::FirstOrder {
            return domain("divergence_time is defined for first-order problems");
        }
        self.validate()?;
        self.require_positive_m()?;
        let start = self.t1 + T::one();
        if self.bracket(start) >= delta {
            return Ok(start);
        }
        let mut lo_gap = T::one();
        let mut hi_gap = T::one();
        loop {
            hi_gap = hi_gap * c(2.0);
            let t = self.t1 + hi_gap;
            if t > horizon {
                return Err(Error::HorizonExceeded { horizon: horizon.as_f64() });
            }
            if self.bracket(t) >= delta {
                break;
            }
            lo_gap = hi_gap;
        }
        // Bisect on the gap t - T1 in log space.
        let (mut lo, mut hi) = (lo_gap.ln(), hi_gap.ln());
        for _ in 0..200 {
            let mid = (lo + hi) / c(2.0);
            if self.bracket(self.t1 + mid.exp()) >= delta {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= c::<T>(1e-14) * hi.abs().max(T::one()) {
                break;
            }
        }
        Ok(self.t1 + hi.exp())
    }

    /// Right-hand side coefficient of the saturated differential inequality.
    fn forcing(&self, t: T) -> T {
        match self.order {
            KatoOrder::FirstOrder => {
                let log_factor = if self.r == T::zero() { T::one() } else { t.ln().powf(-self.r) };
                self.a1 * (t + self.radius).powf(-self.q) * log_factor
            }
            KatoOrder::SecondOrder => self.a1 * (t + self.radius).powf(-self.q),
            KatoOrder::SecondOrderLog => self.a1 * (t + self.radius).powi(-2),
            KatoOrder::SecondOrderLogQ => {
                let log_factor = if self.q == T::zero() { T::one() } else { t.ln().powf(-self.q) };
                self.a1 * log_factor
            }
        }
    }

    /// Blow-up time of the equality case of the differential inequality,
    /// started from `F(T0) = f0` (and `F'(T0) = df0`), defined as the first
    /// time `|F|` exceeds `threshold`.
    pub fn ode_oracle(&self, threshold: T, horizon: T) -> Result<T> {
        self.validate()?;
        let logs_at_t0 = match self.order {
            KatoOrder::FirstOrder => self.r > T::zero(),
            KatoOrder::SecondOrderLogQ => self.q > T::zero(),
            _ => false,
        };
        if logs_at_t0 && self.t0 == T::one() {
            return domain("a logarithmic forcing needs T0 > 1 for the oracle");
        }
        if !(self.f0 > T::zero() || (self.order.is_second_order() && self.f0 == T::zero())) {
            return domain("oracle needs F(T0) > 0 (F(T0) >= 0 for second order)");
        }
        if self.order.is_second_order() && !(self.df0 > T::zero()) {
            return domain("second-order oracle needs F'(T0) > 0");
        }
        let second = self.order.is_second_order();
        let p = self.p;
        let mu = self.mu;
        let rhs = |t: T, y: [T; 2]| -> [T; 2] {
            let g = self.forcing(t) * y[0].abs().powf(p);
            if second {
                [y[1], -mu / t * y[1] + g]
            } else {
                [-mu / t * y[0] + g, T::zero()]
            }
        };
        let scale = c::<T>(1e-3) * self.f0.abs().max(self.df0.abs()).max(T::min_positive_value());
        let eta = c::<T>(0.02);
        let mut t = self.t0;
        let mut y = [self.f0, if second { self.df0 } else { T::zero() }];
        let mut steps = 0usize;
        while y[0].abs() <= threshold {
            if t > horizon {
                return Err(Error::HorizonExceeded { horizon: horizon.as_f64() });
            }
            steps += 1;
            if steps > 10_000_000 {
                return Err(Error::HorizonExceeded { horizon: t.as_f64() });
            }
            let d = rhs(t, y);
            let rate = (d[0].abs() / (y[0].abs() + scale)).max(d[1].abs() / (y[1].abs() + scale));
            let mut h = (c::<T>(0.01) * t).min(eta / rate.max(T::min_positive_value()));
            loop {
                let next = rk4_step(&rhs, t, y, h);
                let doubled = next[0].abs() > c::<T>(2.0) * y[0].abs() + scale;
                if (next[0].is_finite() && !doubled) || h < c::<T>(1e-300) {
                    if !next[0].is_finite() {
                        return Ok(t);
                    }
                    y = next;
                    t = t + h;
                    break;
                }
                h = h / c(2.0);
            }
        }
        Ok(t)
    }
}

fn implicit_or_power<T: Real>(s: T, l: T) -> BoundKind<T> {
    if l == T::zero() {
        BoundKind::PowerLaw { k: T::one() / s }
    } else {
        BoundKind::ImplicitPowerLog { s, l, m: T::one() }
    }
}

fn check_index(j: usize) -> Result<()> {
    if j > MAX_ITERATION {
        return domain(format!("iteration index {j} exceeds {MAX_ITERATION}"));
    }
    Ok(())
}

fn rk4_step<T: Real, F: Fn(T, [T; 2]) -> [T; 2]>(f: &F, t: T, y: [T; 2], h: T) -> [T; 2] {
    let two = c::<T>(2.0);
    let half = h / two;
    let add = |y: [T; 2], k: [T; 2], s: T| [y[0] + k[0] * s, y[1] + k[1] * s];
    let k1 = f(t, y);
    let k2 = f(t + half, add(y, k1, half));
    let k3 = f(t + half, add(y, k2, half));
    let k4 = f(t + h, add(y, k3, h));
    let six = c::<T>(6.0);
    [
        y[0] + h / six * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
        y[1] + h / six * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(p: f64) -> KatoProblem<f64> {
        KatoProblem::new(KatoOrder::FirstOrder, p)
    }

    #[test]
    fn sequences_small_cases() {
        let mut k = first(2.0);
        k.mu = 1.0;
        let a: Vec<f64> = (0..4).map(|j| k.iterate(j).unwrap().a_j).collect();
        assert_eq!(a, vec![0.0, 1.0, 3.0, 7.0]);
        assert!((0..6).all(|j| k.iterate(j).unwrap().b_j == 0.0));

        let mut k = first(2.0);
        k.mu = 0.0;
        let cs: Vec<f64> = (0..4).map(|j| k.closed_form(j).unwrap().c_j).collect();
        assert_eq!(cs, vec![1.0, 3.0, 7.0, 15.0]);
        assert!(k.iterate(MAX_ITERATION + 1).is_err());
    }

    #[test]
    fn growth_constant() {
        // B = A1 / (c + (mu+1)/(p-1)) = 1 with c = 1, mu = 0, p = 2, A1 = 2.
        let mut k = first(2.0);
        k.a1 = 2.0;
        assert!((k.growth_e() + 2.0 * 2f64.ln()).abs() < 1e-14);
        let e0 = k.growth_e();
        k.a0 = 10.0;
        assert!((k.growth_e() - e0 - 10f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn m_positivity_is_enforced() {
        let mut k = first(2.0);
        k.a = 3.0; // (p-1)(c-a) - q + 1 = -1
        assert!(k.lifespan_bound().is_err());
        assert!(k.divergence_time(0.1, 1e100).is_err());
    }

    #[test]
    fn first_order_without_logs_is_a_power_law() {
        let mut k = first(2.0);
        k.q = 0.5;
        // M = 1 - 0.5 + 1
        assert_eq!(k.lifespan_bound().unwrap(), BoundKind::PowerLaw { k: 1.0 / 1.5 });
        k.a = 1.0;
        assert_eq!(k.lifespan_bound().unwrap(), BoundKind::PowerLaw { k: 2.0 });
    }

    #[test]
    fn separable_oracle() {
        let mut k = first(2.0);
        k.radius = 1.0;
        let t = k.ode_oracle(1e12, 1e6).unwrap();
        assert!((t - 2.0).abs() < 1e-6, "{t}");
        k.f0 = 0.25;
        let t = k.ode_oracle(1e12, 1e6).unwrap();
        assert!((t - 5.0).abs() < 1e-6, "{t}");
    }

    #[test]
    fn second_order_oracle_is_monotone_in_initial_velocity() {
        let mut k = KatoProblem::new(KatoOrder::SecondOrder, 2.0);
        k.f0 = 0.0;
        let times: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&v| {
                k.df0 = v;
                k.ode_oracle(1e12, 1e6).unwrap()
            })
            .collect();
        assert!(times[0] > times[1] && times[1] > times[2], "{times:?}");
    }

    #[test]
    fn order_keys_round_trip() {
        for o in [KatoOrder::FirstOrder, KatoOrder::SecondOrder, KatoOrder::SecondOrderLog, KatoOrder::SecondOrderLogQ] {
            assert_eq!(KatoOrder::parse(o.key()).unwrap(), o);
        }
        assert!(KatoOrder::parse("third").is_err());
    }
}
