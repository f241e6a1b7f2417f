//! Physical parameterization of the triple well: per-well nonlinearities and
//! biases, the Gaussian tunneling schedule, mode amplitudes and the bare-basis
//! Hamiltonian.
//!
//! Everything here is expressed in harmonic-oscillator units of the
//! longitudinal trap frequency; only [`g_from_physical`] touches SI values.

use num_complex::Complex;

use crate::error::{Result, SapError};
use crate::scalar::Real;

/// Nonlinear interaction strengths and on-site biases. The left well is the
/// energy reference, so its bias is always zero and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub g_l: T,
    pub g_m: T,
    pub g_r: T,
    pub delta_m: T,
    pub delta_r: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(g_l: T, g_m: T, g_r: T, delta_m: T, delta_r: T) -> Result<Self> {
        let p = SystemParams {
            g_l,
            g_m,
            g_r,
            delta_m,
            delta_r,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same nonlinearity `g` in all three wells.
    pub fn uniform(g: T, delta_m: T, delta_r: T) -> Result<Self> {
        Self::new(g, g, g, delta_m, delta_r)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g_l", self.g_l),
            ("g_m", self.g_m),
            ("g_r", self.g_r),
            ("delta_m", self.delta_m),
            ("delta_r", self.delta_r),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(SapError::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Common outer-well nonlinearity when `g_L == g_R`.
    ///
    /// Under the successful-transport ansatz the middle well stays empty, so
    /// `g_M` never enters the dark/dressed energies.
    pub fn outer_g(&self) -> Option<T> {
        (self.g_l == self.g_r).then_some(self.g_l)
    }

    pub fn is_uniform(&self) -> bool {
        self.g_l == self.g_m && self.g_m == self.g_r
    }

    pub fn with_delta_r(mut self, delta_r: T) -> Self {
        self.delta_r = delta_r;
        self
    }

    pub fn with_delta_m(mut self, delta_m: T) -> Self {
        self.delta_m = delta_m;
        self
    }
}

/// Instantaneous nearest-neighbour tunneling rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings<T> {
    pub lm: T,
    pub mr: T,
}

impl<T: Real> Couplings<T> {
    pub fn new(lm: T, mr: T) -> Self {
        Couplings { lm, mr }
    }

    /// Bright–middle coupling `sqrt(J_LM^2 + J_MR^2)`.
    pub fn j_bm(&self) -> T {
        self.lm.hypot(self.mr)
    }
}

/// Gaussian tunneling pulses `J_LM` centred at `t_p` and `J_MR` centred at
/// `t_s`, applied over `[t_i, t_f]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule<T> {
    pub j0: T,
    pub sigma: T,
    pub t_p: T,
    pub t_s: T,
    pub t_i: T,
    pub t_f: T,
}

impl<T: Real> PulseSchedule<T> {
    pub fn new(j0: T, sigma: T, t_p: T, t_s: T, t_i: T, t_f: T) -> Result<Self> {
        let s = PulseSchedule {
            j0,
            sigma,
            t_p,
            t_s,
            t_i,
            t_f,
        };
        s.validate()?;
        Ok(s)
    }

    /// Symmetric counterintuitive pair separated by `delay`: `t_p = delay/2`,
    /// `t_s = -delay/2`.
    pub fn symmetric(j0: T, sigma: T, delay: T, t_i: T, t_f: T) -> Result<Self> {
        let half = delay / T::lit(2.0);
        Self::new(j0, sigma, half, -half, t_i, t_f)
    }

    /// `J0 = 1`, `sigma = 150`, delay `1.5 sigma`, `t` in `[-600, 600]`.
    pub fn reference() -> Self {
        let sigma = T::lit(150.0);
        Self::symmetric(
            T::one(),
            sigma,
            T::lit(1.5) * sigma,
            T::lit(-600.0),
            T::lit(600.0),
        )
        .expect("reference schedule is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("j0", self.j0),
            ("sigma", self.sigma),
            ("t_p", self.t_p),
            ("t_s", self.t_s),
            ("t_i", self.t_i),
            ("t_f", self.t_f),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(SapError::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.j0 <= T::zero() {
            return Err(SapError::invalid(
                "j0",
                format!("must be > 0, got {}", self.j0),
            ));
        }
        if self.sigma <= T::zero() {
            return Err(SapError::invalid(
                "sigma",
                format!("must be > 0, got {}", self.sigma),
            ));
        }
        if self.t_i >= self.t_f {
            return Err(SapError::invalid(
                "t_i",
                format!("must precede t_f ({} >= {})", self.t_i, self.t_f),
            ));
        }
        Ok(())
    }

    /// The M–R pulse precedes the L–M pulse, as needed for L → R transport.
    pub fn is_counterintuitive(&self) -> bool {
        self.t_s < self.t_p
    }

    /// Swaps the two pulse centres.
    pub fn mirrored(&self) -> Self {
        PulseSchedule {
            t_p: self.t_s,
            t_s: self.t_p,
            ..*self
        }
    }

    pub fn with_j0(mut self, j0: T) -> Self {
        self.j0 = j0;
        self
    }

    pub fn couplings(&self, t: T) -> Couplings<T> {
        eval_couplings(self, t)
    }

    /// `J_MR(t_i)` and `J_LM(t_f)`: the residual tail couplings entering the
    /// initial and final resonance curves.
    pub fn tail_couplings(&self) -> (T, T) {
        (self.couplings(self.t_i).mr, self.couplings(self.t_f).lm)
    }

    pub fn duration(&self) -> T {
        self.t_f - self.t_i
    }
}

impl<T: Real> Default for PulseSchedule<T> {
    fn default() -> Self {
        Self::reference()
    }
}

fn gaussian<T: Real>(j0: T, center: T, sigma: T, t: T) -> T {
    let x = t - center;
    j0 * (-(x * x) / (T::lit(2.0) * sigma * sigma)).exp()
}

/// Gaussian tunneling rates at time `t`.
pub fn eval_couplings<T: Real>(schedule: &PulseSchedule<T>, t: T) -> Couplings<T> {
    Couplings {
        lm: gaussian(schedule.j0, schedule.t_p, schedule.sigma, t),
        mr: gaussian(schedule.j0, schedule.t_s, schedule.sigma, t),
    }
}

/// Mixing angle with `tan(theta) = J_LM / J_MR`, taken as the two-argument
/// arctangent so that it lands exactly on `0` and `pi/2` at the tails.
pub fn mixing_angle<T: Real>(j_lm: T, j_mr: T) -> Result<T> {
    if j_lm < T::zero() || j_mr < T::zero() || !j_lm.is_finite() || !j_mr.is_finite() {
        return Err(SapError::invalid(
            "couplings",
            format!("must be finite and non-negative, got ({j_lm}, {j_mr})"),
        ));
    }
    if j_lm == T::zero() && j_mr == T::zero() {
        return Err(SapError::UndefinedMixingAngle);
    }
    Ok(j_lm.atan2(j_mr))
}

/// Complex amplitudes of the condensate in the left, middle and right wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState<T> {
    pub amplitudes: [Complex<T>; 3],
}

impl<T: Real> ModeState<T> {
    pub fn new(a_l: Complex<T>, a_m: Complex<T>, a_r: Complex<T>) -> Self {
        ModeState {
            amplitudes: [a_l, a_m, a_r],
        }
    }

    pub fn from_real(a_l: T, a_m: T, a_r: T) -> Self {
        Self::new(
            Complex::new(a_l, T::zero()),
            Complex::new(a_m, T::zero()),
            Complex::new(a_r, T::zero()),
        )
    }

    /// All population in the left well.
    pub fn left() -> Self {
        Self::from_real(T::one(), T::zero(), T::zero())
    }

    pub fn middle() -> Self {
        Self::from_real(T::zero(), T::one(), T::zero())
    }

    pub fn right() -> Self {
        Self::from_real(T::zero(), T::zero(), T::one())
    }

    pub fn a_l(&self) -> Complex<T> {
        self.amplitudes[0]
    }

    pub fn a_m(&self) -> Complex<T> {
        self.amplitudes[1]
    }

    pub fn a_r(&self) -> Complex<T> {
        self.amplitudes[2]
    }

    pub fn populations(&self) -> [T; 3] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> T {
        self.populations()
            .into_iter()
            .fold(T::zero(), |acc, p| acc + p)
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn with_global_phase(&self, phase: T) -> Self {
        let u = Complex::from_polar(T::one(), phase);
        ModeState {
            amplitudes: self.amplitudes.map(|a| a * u),
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        ModeState {
            amplitudes: self.amplitudes.map(|a| a / n),
        }
    }
}

/// Real symmetric 3×3 matrix in the `{L, M, R}` basis.
pub type Matrix3<T> = [[T; 3]; 3];

/// Bare-basis mean-field Hamiltonian (units of ħ): on-site energies
/// `delta_i + g_i |a_i|^2` on the diagonal, `-J/2` between neighbours.
pub fn bare_hamiltonian<T: Real>(
    params: &SystemParams<T>,
    state: &ModeState<T>,
    couplings: Couplings<T>,
) -> Matrix3<T> {
    let [p_l, p_m, p_r] = state.populations();
    let half = T::lit(0.5);
    let z = T::zero();
    let (lm, mr) = (-half * couplings.lm, -half * couplings.mr);
    [
        [params.g_l * p_l, lm, z],
        [lm, params.delta_m + params.g_m * p_m, mr],
        [z, mr, params.delta_r + params.g_r * p_r],
    ]
}

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Inputs for estimating the dimensionless nonlinearity of a real condensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub n_atoms: T,
    /// s-wave scattering length in metres.
    pub a_s: T,
    /// Transverse trap angular frequency in rad/s.
    pub omega_perp: T,
    /// Longitudinal trap angular frequency in rad/s (the unit of energy).
    pub omega_x: T,
    /// Atomic mass in kg.
    pub atom_mass: T,
    /// Length `L` with `∫|φ|⁴ dx = 1/L` for the localized mode, in metres.
    pub ipr_length: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_atoms >= T::zero() && self.n_atoms.is_finite()) {
            return Err(SapError::invalid(
                "n_atoms",
                format!("must be >= 0, got {}", self.n_atoms),
            ));
        }
        let positive = [
            ("a_s", self.a_s),
            ("omega_perp", self.omega_perp),
            ("omega_x", self.omega_x),
            ("atom_mass", self.atom_mass),
            ("ipr_length", self.ipr_length),
        ];
        for (name, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(SapError::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Oscillator length `sqrt(ħ / (m omega_x))`.
    pub fn oscillator_length(&self) -> T {
        (T::lit(HBAR) / (self.atom_mass * self.omega_x)).sqrt()
    }

    /// `ipr_length` a Gaussian single-well ground state would give:
    /// `sqrt(2 pi)` oscillator lengths.
    pub fn gaussian_ipr_length(&self) -> T {
        (T::lit(2.0) * T::PI()).sqrt() * self.oscillator_length()
    }
}

/// Nonlinearity in units of `omega_x`: `2 omega_perp a_s N / (L omega_x)`
/// with `L` the supplied inverse-participation length.
pub fn g_from_physical<T: Real>(phys: &PhysicalParams<T>) -> Result<T> {
    phys.validate()?;
    Ok(T::lit(2.0) * phys.omega_perp * phys.a_s * phys.n_atoms / (phys.ipr_length * phys.omega_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn couplings_at_peaks_and_tails() {
        let s = PulseSchedule::<f64>::reference();
        assert_eq!(s.t_p, 112.5);
        assert_eq!(s.t_s, -112.5);
        assert_eq!(s.couplings(112.5).lm, 1.0);
        // exp(-487.5^2 / 45000) evaluated with 50-digit arithmetic (mpmath).
        let tail = 5.086_069_231_012_7e-3;
        assert_relative_eq!(s.couplings(-600.0).mr, tail, max_relative = 1e-14);
        let mid = s.couplings(0.0);
        assert_eq!(mid.lm, mid.mr);
        assert_relative_eq!(
            mid.lm,
            (-112.5f64 * 112.5 / 45000.0).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn mixing_angle_limits() {
        assert_eq!(mixing_angle(0.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(mixing_angle(1.0, 1.0).unwrap(), FRAC_PI_4);
        assert_eq!(mixing_angle(1.0, 0.0).unwrap(), FRAC_PI_2);
        assert_eq!(mixing_angle(0.0, 0.0), Err(SapError::UndefinedMixingAngle));
        assert!(mixing_angle(-1.0, 1.0).is_err());
    }

    #[test]
    fn zero_hamiltonian() {
        let p = SystemParams::uniform(0.0, 0.0, 0.0).unwrap();
        let h = bare_hamiltonian(&p, &ModeState::left(), Couplings::new(0.0, 0.0));
        assert!(h.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn hamiltonian_by_hand() {
        let p = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
        let h = bare_hamiltonian(&p, &ModeState::left(), Couplings::new(0.0, 1.0));
        assert_eq!([h[0][0], h[1][1], h[2][2]], [0.1, 0.15, 0.0]);
        assert_eq!(h[1][2], -0.5);
        assert_eq!(h[2][1], -0.5);
        assert_eq!(h[0][1], 0.0);
        assert_eq!(h[0][2], 0.0);
    }

    #[test]
    fn schedule_validation() {
        assert!(PulseSchedule::new(1.0, 0.0, 1.0, -1.0, -10.0, 10.0).is_err());
        assert!(PulseSchedule::new(0.0, 1.0, 1.0, -1.0, -10.0, 10.0).is_err());
        assert!(PulseSchedule::new(1.0, 1.0, 1.0, -1.0, 10.0, 10.0).is_err());
        let s = PulseSchedule::<f64>::reference();
        assert!(s.is_counterintuitive());
        assert!(!s.mirrored().is_counterintuitive());
        assert!(SystemParams::uniform(f64::NAN, 0.0, 0.0).is_err());
    }

    fn rb87(n_atoms: f64) -> PhysicalParams<f64> {
        let omega_perp = 2.0 * std::f64::consts::PI * 1000.0;
        let a_s = 5.3e-9;
        let omega_x = 2.0 * std::f64::consts::PI * 100.0;
        // Pick L so that the 10^4-atom estimate lands on g = 0.5.
        let ipr_length = 2.0 * omega_perp * a_s * 1e4 / (0.5 * omega_x);
        PhysicalParams {
            n_atoms,
            a_s,
            omega_perp,
            omega_x,
            atom_mass: 1.443e-25,
            ipr_length,
        }
    }

    #[test]
    fn g_estimate() {
        assert_relative_eq!(
            g_from_physical(&rb87(1e4)).unwrap(),
            0.5,
            max_relative = 1e-14
        );
        assert_eq!(g_from_physical(&rb87(0.0)).unwrap(), 0.0);
        let g1 = g_from_physical(&rb87(3e3)).unwrap();
        let g2 = g_from_physical(&rb87(6e3)).unwrap();
        assert_relative_eq!(g2, 2.0 * g1, max_relative = 1e-15);
        let mut bad = rb87(1e4);
        bad.ipr_length = 0.0;
        assert!(g_from_physical(&bad).is_err());
    }
}
