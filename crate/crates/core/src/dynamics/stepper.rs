//! Adaptive Dormand–Prince 8(5,3) stepper over complex amplitudes packed as
//! `[re..., im...]`.

use super::tableau::{A, B, C, E3, E5, STAGES};
use crate::scalar::Real;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
/// Error estimate is 7th order, so steps scale with `err^(-1/8)`.
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

pub(crate) struct Tableau<T> {
    c: [T; STAGES],
    a: [[T; STAGES]; STAGES],
    b: [T; STAGES],
    e3: [T; STAGES],
    e5: [T; STAGES],
}

impl<T: Real> Tableau<T> {
    pub(crate) fn new() -> Self {
        Tableau {
            c: C.map(T::lit),
            a: A.map(|row| row.map(T::lit)),
            b: B.map(T::lit),
            e3: E3.map(T::lit),
            e5: E5.map(T::lit),
        }
    }
}

pub(crate) struct Step<T, const N: usize> {
    pub y: [T; N],
    pub f: [T; N],
    pub error_norm: T,
}

/// One trial step of size `h` from `(t, y)` with `f = rhs(t, y)` already
/// evaluated. Returns the 8th-order solution, its derivative and the scaled
/// error norm.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
pub(crate) fn try_step<T: Real, const N: usize>(
    tab: &Tableau<T>,
    rhs: &mut impl FnMut(T, &[T; N]) -> [T; N],
    t: T,
    y: &[T; N],
    f: &[T; N],
    h: T,
    rtol: T,
    atol: T,
) -> Step<T, N> {
    let mut k = [[T::zero(); N]; STAGES];
    k[0] = *f;
    for s in 1..STAGES {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = tab.a[s][j];
            if a != T::zero() {
                for i in 0..N {
                    ys[i] = ys[i] + h * a * kj[i];
                }
            }
        }
        k[s] = rhs(t + tab.c[s] * h, &ys);
    }
    let mut y_new = *y;
    for (s, ks) in k.iter().enumerate() {
        let b = tab.b[s];
        if b != T::zero() {
            for i in 0..N {
                y_new[i] = y_new[i] + h * b * ks[i];
            }
        }
    }
    let f_new = rhs(t + h, &y_new);

    // Components `i` and `i + N/2` are the real and imaginary parts of one
    // complex mode and share a modulus-based scale, so step control is
    // invariant under a global phase.
    let half = N / 2;
    let modulus = |v: &[T; N], i: usize| {
        let j = if i < half { i + half } else { i - half };
        v[i].hypot(v[j])
    };
    let (mut err5, mut err3) = (T::zero(), T::zero());
    for i in 0..N {
        let scale = atol + rtol * modulus(y, i).max(modulus(&y_new, i));
        let (mut e5, mut e3) = (T::zero(), T::zero());
        for s in 0..STAGES {
            e5 = e5 + tab.e5[s] * k[s][i];
            e3 = e3 + tab.e3[s] * k[s][i];
        }
        err5 = err5 + (e5 / scale).powi(2);
        err3 = err3 + (e3 / scale).powi(2);
    }
    let error_norm = if err5 == T::zero() && err3 == T::zero() {
        T::zero()
    } else {
        let denom = err5 + T::lit(0.01) * err3;
        h.abs() * err5 / (denom * T::from_usize_lossy(N)).sqrt()
    };
    Step {
        y: y_new,
        f: f_new,
        error_norm,
    }
}

/// Next step-size multiplier after a trial with `error_norm`.
pub(crate) fn step_factor<T: Real>(error_norm: T, accepted: bool, after_reject: bool) -> T {
    if accepted {
        let f = if error_norm == T::zero() {
            T::lit(MAX_FACTOR)
        } else {
            (T::lit(SAFETY) * error_norm.powf(T::lit(ERROR_EXPONENT))).min(T::lit(MAX_FACTOR))
        };
        if after_reject {
            f.min(T::one())
        } else {
            f
        }
    } else {
        (T::lit(SAFETY) * error_norm.powf(T::lit(ERROR_EXPONENT))).max(T::lit(MIN_FACTOR))
    }
}
