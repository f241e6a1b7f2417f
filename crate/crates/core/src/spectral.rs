//! Dark/bright and dark/dressed basis energies and couplings.
//!
//! All quantities are analytic functions of the mixing angle and the system
//! parameters evaluated on the successful-transport ansatz
//! `|a_L|^2 = cos^2 θ`, `|a_M|^2 = 0`, `|a_R|^2 = sin^2 θ`. They are never fed
//! with dynamical amplitudes.

use num_traits::Float;

use crate::error::{Result, SapError};
use crate::model::{mixing_angle, Couplings, ModeState, PulseSchedule, SystemParams};
use crate::scalar::Real;

/// Below this `J_BM` (h.o. units) the dressed basis is reported degenerate.
pub const J_BM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkBrightQuantities<T> {
    pub eps_d: T,
    pub eps_b: T,
    pub eps_m: T,
    pub j_db: T,
    /// Always zero: the mixing angle is defined so that it vanishes.
    pub j_dm: T,
    pub j_bm: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedQuantities<T> {
    pub zeta_plus: T,
    pub zeta_minus: T,
    pub n_plus: T,
    pub n_minus: T,
    pub eps_plus: T,
    pub eps_minus: T,
    pub j_d_plus: T,
    pub j_d_minus: T,
    /// `4 ε_B`, the auxiliary combination entering `ε±`.
    pub xi: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSnapshot<T> {
    pub t: T,
    pub theta: T,
    pub couplings: Couplings<T>,
    pub db: DarkBrightQuantities<T>,
    pub dd: DressedQuantities<T>,
    /// `|dθ/dt| · max(|ζ±| / N±)`: size of the dropped non-adiabatic terms.
    pub nonadiabatic_scale: T,
}

/// Per-well energies when the outer nonlinearities differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnequalGQuantities<T> {
    pub eps_d: T,
    pub eps_plus: T,
    pub eps_minus: T,
    pub xi_prime: T,
}

/// `|D> = cos θ |L> - sin θ |R>`.
pub fn dark_state<T: Real>(theta: T) -> ModeState<T> {
    ModeState::from_real(theta.cos(), T::zero(), -theta.sin())
}

/// `|B> = sin θ |L> + cos θ |R>`.
pub fn bright_state<T: Real>(theta: T) -> ModeState<T> {
    ModeState::from_real(theta.sin(), T::zero(), theta.cos())
}

fn require_outer_g<T: Real>(params: &SystemParams<T>) -> Result<T> {
    params.outer_g().ok_or(SapError::UnequalNonlinearity {
        g_l: params.g_l.to_f64_lossy(),
        g_r: params.g_r.to_f64_lossy(),
    })
}

/// Dark/bright basis quantities for `g_L = g_R = g`.
pub fn dark_bright_quantities<T: Real>(
    params: &SystemParams<T>,
    theta: T,
    couplings: Couplings<T>,
) -> Result<DarkBrightQuantities<T>> {
    let g = require_outer_g(params)?;
    let dr = params.delta_r;
    let two = T::lit(2.0);
    let (c2, c4) = ((two * theta).cos(), (T::lit(4.0) * theta).cos());
    Ok(DarkBrightQuantities {
        eps_d: (g * (T::lit(3.0) + c4) + two * dr * (T::one() - c2)) / T::lit(4.0),
        eps_b: theta.cos().powi(2) * (dr + two * g * theta.sin().powi(2)),
        eps_m: params.delta_m,
        j_db: (dr - g * c2) * (two * theta).sin(),
        j_dm: T::zero(),
        j_bm: couplings.j_bm(),
    })
}

/// Dark/bright quantities for arbitrary per-well nonlinearities.
pub fn per_well_dark_bright<T: Real>(
    params: &SystemParams<T>,
    theta: T,
    couplings: Couplings<T>,
) -> DarkBrightQuantities<T> {
    let (c, s) = (theta.cos().powi(2), theta.sin().powi(2));
    let dr = params.delta_r;
    DarkBrightQuantities {
        eps_d: dark_energy(params, theta),
        eps_b: c * (dr + (params.g_l + params.g_r) * s),
        eps_m: params.delta_m,
        j_db: (dr + params.g_r * s - params.g_l * c) * (T::lit(2.0) * theta).sin(),
        j_dm: T::zero(),
        j_bm: couplings.j_bm(),
    }
}

/// `J_LM cos θ - J_MR sin θ`, which the definition of θ makes vanish.
pub fn dark_middle_residual<T: Real>(theta: T, couplings: Couplings<T>) -> T {
    couplings.lm * theta.cos() - couplings.mr * theta.sin()
}

/// Roots of `J ζ^2 - 2 Δ ζ - J = 0` with `Δ = ε_M - ε_B`, returned as
/// `(ζ+, ζ-)` where `ζ± = (Δ ± sqrt(Δ^2 + J^2)) / J`. The larger-magnitude root
/// is evaluated directly and the other from the product `-1`.
fn zeta_roots<T: Real>(detuning: T, j_bm: T) -> (T, T) {
    let r = detuning.hypot(j_bm);
    if detuning >= T::zero() {
        let zp = (detuning + r) / j_bm;
        (zp, -T::one() / zp)
    } else {
        let zm = (detuning - r) / j_bm;
        (-T::one() / zm, zm)
    }
}

fn check_floor<T: Real>(j_bm: T) -> Result<()> {
    if !(j_bm > T::lit(J_BM_FLOOR)) {
        return Err(SapError::DegenerateDressedBasis {
            j_bm: j_bm.to_f64_lossy(),
            floor: J_BM_FLOOR,
        });
    }
    Ok(())
}

fn dressed_from_parts<T: Real>(
    db: &DarkBrightQuantities<T>,
    xi: T,
    eps_plus: T,
    eps_minus: T,
) -> DressedQuantities<T> {
    let (zeta_plus, zeta_minus) = zeta_roots(db.eps_m - db.eps_b, db.j_bm);
    let n_plus = zeta_plus.hypot(T::one());
    let n_minus = zeta_minus.hypot(T::one());
    DressedQuantities {
        zeta_plus,
        zeta_minus,
        n_plus,
        n_minus,
        eps_plus,
        eps_minus,
        j_d_plus: zeta_plus / n_plus * db.j_db,
        j_d_minus: zeta_minus / n_minus * db.j_db,
        xi,
    }
}

/// Dressed-state quantities for `g_L = g_R = g`.
pub fn dressed_quantities<T: Real>(
    params: &SystemParams<T>,
    theta: T,
    couplings: Couplings<T>,
) -> Result<DressedQuantities<T>> {
    let db = dark_bright_quantities(params, theta, couplings)?;
    check_floor(db.j_bm)?;
    let g = require_outer_g(params)?;
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let xi = g * (T::one() - (four * theta).cos())
        + two * params.delta_r * (T::one() + (two * theta).cos());
    let dm4 = four * params.delta_m;
    let root = ((xi - dm4).powi(2) + T::lit(16.0) * db.j_bm.powi(2)).sqrt();
    let eighth = T::lit(0.125);
    Ok(dressed_from_parts(
        &db,
        xi,
        eighth * (xi + dm4 + root),
        eighth * (xi + dm4 - root),
    ))
}

/// Dressed-state quantities from an arbitrary dark/bright decomposition.
pub fn dressed_from_dark_bright<T: Real>(
    db: &DarkBrightQuantities<T>,
) -> Result<DressedQuantities<T>> {
    check_floor(db.j_bm)?;
    let half = T::lit(0.5);
    let sum = db.eps_b + db.eps_m;
    let root = (db.eps_b - db.eps_m).hypot(db.j_bm);
    Ok(dressed_from_parts(
        db,
        T::lit(4.0) * db.eps_b,
        half * (sum + root),
        half * (sum - root),
    ))
}

/// `ε_D = g_L cos^4 θ + δ_R sin^2 θ + g_R sin^4 θ`.
pub fn dark_energy<T: Real>(params: &SystemParams<T>, theta: T) -> T {
    let (c, s) = (theta.cos().powi(2), theta.sin().powi(2));
    params.g_l * c * c + params.delta_r * s + params.g_r * s * s
}

/// `ξ' = (g_L + g_R)(1 - cos 4θ) + 4 δ_R (1 + cos 2θ)`.
pub fn xi_prime<T: Real>(params: &SystemParams<T>, theta: T) -> T {
    let g_sum = params.g_l + params.g_r;
    g_sum * (T::one() - (T::lit(4.0) * theta).cos())
        + T::lit(4.0) * params.delta_r * (T::one() + (T::lit(2.0) * theta).cos())
}

/// `(ε+, ε-)` for per-well nonlinearities at coupling `j_bm`. Accepts
/// `j_bm = 0`, where the two branches collapse onto `ξ'/8` and `δ_M`.
pub fn dressed_energies<T: Real>(params: &SystemParams<T>, theta: T, j_bm: T) -> (T, T) {
    let xp = xi_prime(params, theta);
    let dm8 = T::lit(8.0) * params.delta_m;
    let root = ((xp - dm8).powi(2) + T::lit(64.0) * j_bm * j_bm).sqrt();
    let k = T::lit(1.0 / 16.0);
    (k * (xp + dm8 + root), k * (xp + dm8 - root))
}

/// Dark and dressed energies for arbitrary `g_L`, `g_R`.
pub fn unequal_g_quantities<T: Real>(
    params: &SystemParams<T>,
    theta: T,
    couplings: Couplings<T>,
) -> Result<UnequalGQuantities<T>> {
    let j_bm = couplings.j_bm();
    check_floor(j_bm)?;
    let (eps_plus, eps_minus) = dressed_energies(params, theta, j_bm);
    Ok(UnequalGQuantities {
        eps_d: dark_energy(params, theta),
        eps_plus,
        eps_minus,
        xi_prime: xi_prime(params, theta),
    })
}

fn snapshot_quantities<T: Real>(
    params: &SystemParams<T>,
    theta: T,
    couplings: Couplings<T>,
) -> Result<(DarkBrightQuantities<T>, DressedQuantities<T>)> {
    if params.outer_g().is_some() {
        Ok((
            dark_bright_quantities(params, theta, couplings)?,
            dressed_quantities(params, theta, couplings)?,
        ))
    } else {
        let db = per_well_dark_bright(params, theta, couplings);
        Ok((db, dressed_from_dark_bright(&db)?))
    }
}

fn theta_at<T: Real>(schedule: &PulseSchedule<T>, t: T) -> Result<T> {
    let c = schedule.couplings(t);
    mixing_angle(c.lm, c.mr)
}

/// Analytic energies sampled on a uniform grid over `[t_i, t_f]`.
pub fn spectral_trajectory<T: Real>(
    params: &SystemParams<T>,
    schedule: &PulseSchedule<T>,
    n_samples: usize,
) -> Result<Vec<SpectralSnapshot<T>>> {
    if n_samples < 2 {
        return Err(SapError::invalid(
            "n_samples",
            format!("need at least 2, got {n_samples}"),
        ));
    }
    let dt = schedule.duration() / T::from_usize_lossy(n_samples - 1);
    let fd_step = schedule.sigma * T::lit(1e-4);
    (0..n_samples)
        .map(|k| {
            let t = if k + 1 == n_samples {
                schedule.t_f
            } else {
                schedule.t_i + dt * T::from_usize_lossy(k)
            };
            let couplings = schedule.couplings(t);
            let theta = mixing_angle(couplings.lm, couplings.mr)?;
            let (db, dd) = snapshot_quantities(params, theta, couplings)?;
            let theta_dot = (theta_at(schedule, t + fd_step)? - theta_at(schedule, t - fd_step)?)
                / (T::lit(2.0) * fd_step);
            let mixing = Float::max(
                (dd.zeta_plus / dd.n_plus).abs(),
                (dd.zeta_minus / dd.n_minus).abs(),
            );
            Ok(SpectralSnapshot {
                t,
                theta,
                couplings,
                db,
                dd,
                nonadiabatic_scale: theta_dot.abs() * mixing,
            })
        })
        .collect()
}
