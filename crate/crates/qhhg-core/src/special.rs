//! Special functions and closed-form oscillatory time integrals.
//!
//! Everything downstream (the analytic solution, the semiclassical baseline,
//! the quadrature-grid state) is built from two ingredients:
//!
//! - Bessel functions of the first kind `J_n(x)`, evaluated by backward
//!   recurrence with normalization (Miller's algorithm). A single downward
//!   sweep yields a whole row of orders at machine precision, which is how
//!   the Jacobi-Anger sums consume them.
//! - Windowed trigonometric integrals written in product form,
//!   `∫ cos(wτ) dτ = h cos(w t̄) sinc(wh/2)` with `t̄ = (t+t₀)/2`,
//!   `h = t−t₀`. The `sinc` form stays finite and fully accurate through
//!   `w → 0`, so the resonant (secular) branch of the mode integrals is the
//!   smooth limit of the generic one instead of a separately derived formula.
//!
//! Frequencies are measured in units of the drive frequency, times in units
//! of its inverse.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::{lit, Real};

/// Largest Bessel order the evaluator accepts.
pub const MAX_BESSEL_ORDER: u32 = 200;
/// Largest |argument| the evaluator accepts.
pub const MAX_BESSEL_ARGUMENT: f64 = 500.0;
/// Detunings below this (in drive-frequency units) are flagged resonant.
pub const RESONANT_THRESHOLD: f64 = 1e-8;
/// Relative magnitude below which Jacobi-Anger tail terms are dropped.
pub const TRUNCATION_TAIL: f64 = 1e-16;

/// Value of one oscillatory mode integral together with its resonance
/// bookkeeping.
///
/// `detuning` is `(ω_j − m ω_L)/ω_L`; the value itself is continuous across
/// `detuning = 0`, the flag only records that the secular branch dominates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantIntegral<T: Real> {
    pub value: Complex<T>,
    pub is_resonant: bool,
    pub detuning: T,
}

/// `sin(z)/z`, switching to its Taylor form for small `z`.
#[inline]
pub(crate) fn sinc<T: Real>(z: T) -> T {
    if z.abs() < lit(1e-4) {
        let z2 = z * z;
        T::one() - z2 / lit(6.0) + z2 * z2 / lit(120.0)
    } else {
        z.sin() / z
    }
}

/// `∫_{t0}^{t} cos(wτ) dτ`, finite for all `w` including zero.
pub fn cos_window_integral<T: Real>(w: T, t0: T, t: T) -> T {
    let h = t - t0;
    let mid = (t + t0) / lit(2.0);
    h * (w * mid).cos() * sinc(w * h / lit(2.0))
}

/// `∫_{t0}^{t} sin(wτ) dτ`, finite for all `w` including zero.
pub fn sin_window_integral<T: Real>(w: T, t0: T, t: T) -> T {
    let h = t - t0;
    let mid = (t + t0) / lit(2.0);
    h * (w * mid).sin() * sinc(w * h / lit(2.0))
}

/// `∫_{t0}^{t} e^{iwτ} dτ` in the same cancellation-free product form.
fn exp_window_integral<T: Real>(w: T, t0: T, t: T) -> Complex<T> {
    let h = t - t0;
    let mid = (t + t0) / lit(2.0);
    let s = h * sinc(w * h / lit(2.0));
    Complex::new((w * mid).cos() * s, (w * mid).sin() * s)
}

/// `∫_{t0}^{t} cos(m ω_L τ) e^{i ω_j τ} dτ` for a drive multiple `m` (odd in
/// the physical sums) and mode frequency `omega_j` in drive units.
///
/// Splitting the cosine gives half the sum of two complex window integrals at
/// `ω_j ± m`; at `ω_j = m` the lower one degenerates into the secular term
/// `(t−t0)/2`, reached here as the smooth `sinc` limit.
pub fn cos_exp_integral_freq<T: Real>(m: u32, omega_j: T, t0: T, t: T) -> ResonantIntegral<T> {
    let fm = lit::<T>(m as f64);
    let detuning = omega_j - fm;
    let value = (exp_window_integral(omega_j + fm, t0, t) + exp_window_integral(detuning, t0, t))
        / lit::<T>(2.0);
    ResonantIntegral {
        value,
        is_resonant: detuning.abs() < lit(RESONANT_THRESHOLD),
        detuning,
    }
}

/// [`cos_exp_integral_freq`] for an integer harmonic index `j` (mode frequency
/// `j ω_L`).
pub fn cos_exp_integral<T: Real>(m: u32, j: u32, t0: T, t: T) -> ResonantIntegral<T> {
    cos_exp_integral_freq(m, lit(j as f64), t0, t)
}

/// `∫∫_{t0}^{t} cos((2n−1)τ) cos((2m−1)τ') sin(ω_j(τ'−τ)) dτ dτ'` with the mode
/// frequency given as a real number in drive units.
///
/// Expanding `sin(ω_j(τ'−τ))` into products of single-time factors reduces the
/// double integral to four windowed trig integrals, each resonance-safe:
///
/// ```text
/// I = C(a)·S(b) − S(a)·C(b),   a = 2n−1,  b = 2m−1,
/// C(x) = ∫ cos(xτ) cos(ω_j τ) dτ,   S(x) = ∫ cos(xτ) sin(ω_j τ) dτ.
/// ```
pub fn double_time_integral_freq<T: Real>(n: u32, m: u32, omega_j: T, t0: T, t: T) -> T {
    let half = lit::<T>(0.5);
    let cos_cos = |x: T| {
        half * (cos_window_integral(x + omega_j, t0, t) + cos_window_integral(x - omega_j, t0, t))
    };
    let cos_sin = |x: T| {
        half * (sin_window_integral(omega_j + x, t0, t) + sin_window_integral(omega_j - x, t0, t))
    };
    let a = lit::<T>((2 * n - 1) as f64);
    let b = lit::<T>((2 * m - 1) as f64);
    cos_cos(a) * cos_sin(b) - cos_sin(a) * cos_cos(b)
}

/// [`double_time_integral_freq`] for an integer harmonic index `j`.
pub fn double_time_integral<T: Real>(n: u32, m: u32, j: u32, t0: T, t: T) -> T {
    double_time_integral_freq(n, m, lit(j as f64), t0, t)
}

/// Row of Bessel values `J_0(x) .. J_{max_order}(x)` from one normalized
/// backward-recurrence sweep.
///
/// The start order sits far enough above both `max_order` and `x` that the
/// arbitrary seed has decayed below 1e-18 relative by the time the requested
/// orders are reached; the row is then fixed by `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_row<T: Real>(max_order: u32, x: T) -> Result<Vec<T>> {
    if max_order > MAX_BESSEL_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {max_order} exceeds supported maximum {MAX_BESSEL_ORDER}"
        )));
    }
    if !x.is_finite() || x.abs() > lit(MAX_BESSEL_ARGUMENT) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside supported range |x| <= {MAX_BESSEL_ARGUMENT}"
        )));
    }
    let mut row = bessel_row_unchecked(max_order, x.abs());
    if x < T::zero() {
        // J_k(-x) = (-1)^k J_k(x)
        for (k, v) in row.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(row)
}

/// Bessel function of the first kind `J_order(x)`.
pub fn bessel_j<T: Real>(order: u32, x: T) -> Result<T> {
    Ok(bessel_j_row(order, x)?[order as usize])
}

/// Start-order margin so that the Miller seed error is below 1e-18 relative in
/// the transition (Airy) region around order ≈ x.
fn miller_margin(x: f64) -> u32 {
    40.max((16.0 * (x / 2.0).cbrt()).ceil() as u32)
}

fn bessel_row_unchecked<T: Real>(max_order: u32, x: T) -> Vec<T> {
    let n_out = max_order as usize + 1;
    if x == T::zero() {
        let mut row = vec![T::zero(); n_out];
        row[0] = T::one();
        return row;
    }
    let xf = x.to_f64().unwrap_or(0.0);
    let base = (max_order).max(xf.ceil() as u32);
    let mut start = base + miller_margin(xf);
    if start % 2 == 1 {
        start += 1;
    }
    let len = start as usize + 1;
    let mut all = vec![T::zero(); len];

    // Values can grow enormously before normalization; rescale on the fly.
    let big = T::max_value().sqrt() * lit(1e-4);
    let inv_big = big.recip();

    let mut jkp1 = T::zero();
    let mut jk = lit::<T>(1e-30);
    let two = lit::<T>(2.0);
    let mut k = start as usize;
    loop {
        all[k] = jk;
        if k == 0 {
            break;
        }
        let jkm1 = two * lit::<T>(k as f64) / x * jk - jkp1;
        jkp1 = jk;
        jk = jkm1;
        k -= 1;
        if jk.abs() > big {
            jk *= inv_big;
            jkp1 *= inv_big;
            for v in &mut all[k + 1..] {
                *v *= inv_big;
            }
        }
    }

    // J_0 + 2 (J_2 + J_4 + ...) = 1
    let mut norm = all[0];
    let mut idx = 2;
    while idx < len {
        norm += two * all[idx];
        idx += 2;
    }
    let inv_norm = norm.recip();
    all.truncate(n_out);
    for v in &mut all {
        *v *= inv_norm;
    }
    all
}

/// Smallest order beyond which every Bessel value at argument `x` is below
/// [`TRUNCATION_TAIL`] relative to the largest one — the truncation point for
/// the Jacobi-Anger sums. Guaranteed at least `ceil(x) + 30`.
pub fn truncation_order<T: Real>(x: T) -> u32 {
    let xa = x.abs().to_f64().unwrap_or(0.0).min(MAX_BESSEL_ARGUMENT);
    let floor_guarantee = xa.ceil() as u32 + 30;
    let cap = (xa.ceil() as u32 + miller_margin(xa) + 20).min(MAX_BESSEL_ORDER + 160);
    let row = bessel_row_unchecked(cap, lit::<T>(xa));
    let max_mag = row.iter().fold(
        T::zero(),
        |acc, v| if v.abs() > acc { v.abs() } else { acc },
    );
    let threshold = max_mag * lit(TRUNCATION_TAIL);
    let mut scan = 0u32;
    for (k, v) in row.iter().enumerate() {
        if v.abs() >= threshold {
            scan = k as u32;
        }
    }
    scan.max(floor_guarantee)
}
