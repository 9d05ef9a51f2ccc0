//! One-dimensional quadrature: adaptive Gauss–Kronrod and the composite
//! trapezoid rule on uniformly spaced nodes.

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

// Tabulated to more digits than f64 holds.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod estimate and Gauss–Kronrod error estimate on `[a, b]`.
fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) / c(2.0);
    let mid = (a + b) / c(2.0);
    let fc = f(mid);
    let mut k = fc * c(WGK[7]);
    let mut g = fc * c(WG[3]);
    for i in 0..7 {
        let x = half * c(XGK[i]);
        let s = f(mid - x) + f(mid + x);
        k = k + s * c(WGK[i]);
        if i % 2 == 1 {
            g = g + s * c(WG[i / 2]);
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive Gauss–Kronrod 15 on `[a, b]` with global bisection of the worst
/// interval. Converged when the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: T = parts.iter().fold(T::zero(), |s, p| s + p.2);
        let err: T = parts.iter().fold(T::zero(), |s, p| s + p.3);
        if !total.is_finite() {
            return Err(Error::Quadrature { achieved: f64::NAN });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            let achieved = if total == T::zero() { err.as_f64() } else { (err / total.abs()).as_f64() };
            return Err(Error::Quadrature { achieved });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, -T::one()), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let m = (lo + hi) / c(2.0);
        let (v1, e1) = gk15(&mut f, lo, m);
        let (v2, e2) = gk15(&mut f, m, hi);
        parts.push((lo, m, v1, e1));
        parts.push((m, hi, v2, e2));
    }
}

/// Composite trapezoid rule with `n` panels on `[a, b]`.
pub fn trapezoid<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, n: usize) -> T {
    let n = n.max(1);
    let h = (b - a) / T::from_usize_lossy(n);
    let mut s = (f(a) + f(b)) / c(2.0);
    for i in 1..n {
        s = s + f(a + h * T::from_usize_lossy(i));
    }
    s * h
}
