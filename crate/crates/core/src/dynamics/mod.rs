//! Time integration of the nonlinear three-mode equations of motion
//! `i d/dt a = H(|a|^2, t) a` and the transport efficiency.
//!
//! The nonlinearity enters explicitly through the instantaneous populations
//! in the right-hand side; there is no self-consistency loop.

mod stepper;
mod tableau;

use num_complex::Complex;

use crate::error::{Result, SapError};
use crate::model::{bare_hamiltonian, Couplings, ModeState, PulseSchedule, SystemParams};
use crate::scalar::Real;
use stepper::{step_factor, try_step, Tableau};

/// Time dependence of the right-well bias `δ_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasProtocol<T> {
    /// `δ_R` fixed at `SystemParams::delta_r`.
    Static,
    /// `δ_R(t) = m t + n` interpolating `initial` at `t_i` to `final_` at `t_f`.
    LinearRamp { initial: T, final_: T },
    /// `δ_R(t) = g cos 2θ(t)`, which cancels the dark–bright coupling.
    DarkBrightDecoupling,
}

impl<T: Real> BiasProtocol<T> {
    pub fn validate(&self, params: &SystemParams<T>) -> Result<()> {
        match *self {
            BiasProtocol::Static => Ok(()),
            BiasProtocol::LinearRamp { initial, final_ } => {
                if initial.is_finite() && final_.is_finite() {
                    Ok(())
                } else {
                    Err(SapError::invalid(
                        "protocol",
                        "ramp endpoints must be finite",
                    ))
                }
            }
            BiasProtocol::DarkBrightDecoupling => {
                if params.is_uniform() {
                    Ok(())
                } else {
                    Err(SapError::invalid(
                        "protocol",
                        "dark/bright decoupling needs g_L = g_M = g_R",
                    ))
                }
            }
        }
    }
}

/// Right-well bias prescribed by `protocol` at time `t` and mixing angle `theta`.
pub fn bias_at<T: Real>(
    protocol: &BiasProtocol<T>,
    params: &SystemParams<T>,
    t_i: T,
    t_f: T,
    t: T,
    theta: T,
) -> T {
    match *protocol {
        BiasProtocol::Static => params.delta_r,
        BiasProtocol::LinearRamp { initial, final_ } => {
            let m = (initial - final_) / (t_i - t_f);
            let n = final_ - m * t_f;
            m * t + n
        }
        BiasProtocol::DarkBrightDecoupling => params.g_l * (T::lit(2.0) * theta).cos(),
    }
}

/// Source of the time-dependent tunneling rates.
pub trait Drive<T> {
    fn couplings(&self, t: T) -> Couplings<T>;
}

impl<T: Real> Drive<T> for PulseSchedule<T> {
    fn couplings(&self, t: T) -> Couplings<T> {
        PulseSchedule::couplings(self, t)
    }
}

/// Both tunneling rates switched off.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTunneling;

impl<T: Real> Drive<T> for NoTunneling {
    fn couplings(&self, _t: T) -> Couplings<T> {
        Couplings::new(T::zero(), T::zero())
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    /// Size of the uniform output grid (including both ends).
    pub output_points: usize,
    pub initial_step: T,
    pub min_step: T,
    /// Upper bound on the step length. Explicit Runge-Kutta steps shrink
    /// amplitudes slightly on every step, so long steps erode the
    /// populations even when the local error estimate is tiny.
    pub max_step: T,
    pub max_steps: usize,
    /// Drift of `Σ|a_i|^2` above which the run is aborted.
    pub norm_limit: T,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        StepControl {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-10),
            output_points: 2000,
            initial_step: T::lit(0.05),
            min_step: T::lit(1e-10),
            max_step: T::lit(0.35),
            max_steps: 5_000_000,
            norm_limit: T::lit(1e-6),
        }
    }
}

impl<T: Real> StepControl<T> {
    /// Both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        StepControl {
            rtol: self.rtol * factor,
            atol: self.atol * factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > T::zero() && self.atol > T::zero()) {
            return Err(SapError::invalid("tolerance", "rtol and atol must be > 0"));
        }
        if self.output_points < 2 {
            return Err(SapError::invalid("output_points", "need at least 2"));
        }
        if !(self.initial_step > T::zero() && self.min_step > T::zero()) {
            return Err(SapError::invalid("initial_step", "steps must be > 0"));
        }
        if !(self.max_step > self.min_step) {
            return Err(SapError::invalid("max_step", "must exceed min_step"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<ModeState<T>>,
    pub delta_r_applied: Vec<T>,
    pub theta: Vec<T>,
    /// `max |Σ|a_i|^2 - 1|` over every accepted step.
    pub norm_drift: T,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &ModeState<T> {
        self.states.last().expect("trajectory is never empty")
    }
}

/// `|a_R(t_f)|^2`.
pub fn efficiency<T: Real>(traj: &Trajectory<T>) -> T {
    traj.final_state().populations()[2]
}

fn pack<T: Real>(s: &ModeState<T>) -> [T; 6] {
    let [l, m, r] = s.amplitudes;
    [l.re, m.re, r.re, l.im, m.im, r.im]
}

fn unpack<T: Real>(y: &[T; 6]) -> ModeState<T> {
    ModeState::new(
        Complex::new(y[0], y[3]),
        Complex::new(y[1], y[4]),
        Complex::new(y[2], y[5]),
    )
}

fn theta_of<T: Real>(c: Couplings<T>) -> T {
    c.lm.atan2(c.mr)
}

/// Integrates from `schedule.t_i` to `schedule.t_f` under the Gaussian pulses.
pub fn integrate<T: Real>(
    params: &SystemParams<T>,
    schedule: &PulseSchedule<T>,
    protocol: &BiasProtocol<T>,
    initial: &ModeState<T>,
    control: &StepControl<T>,
) -> Result<Trajectory<T>> {
    integrate_driven(
        params,
        schedule,
        schedule.t_i,
        schedule.t_f,
        protocol,
        initial,
        control,
    )
}

/// Integrates over `[t_i, t_f]` under an arbitrary coupling `drive`.
pub fn integrate_driven<T: Real, D: Drive<T>>(
    params: &SystemParams<T>,
    drive: &D,
    t_i: T,
    t_f: T,
    protocol: &BiasProtocol<T>,
    initial: &ModeState<T>,
    control: &StepControl<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    control.validate()?;
    protocol.validate(params)?;
    if !(t_i < t_f) {
        return Err(SapError::invalid("t_i", "must precede t_f"));
    }
    let initial_norm = initial.norm_sqr();
    if (initial_norm - T::one()).abs() > T::lit(1e-10) {
        return Err(SapError::invalid(
            "initial",
            format!("state not normalized (|a|^2 = {initial_norm})"),
        ));
    }

    let bias_and_theta = |t: T| {
        let c = drive.couplings(t);
        let theta = theta_of(c);
        (c, theta, bias_at(protocol, params, t_i, t_f, t, theta))
    };
    let mut rhs = |t: T, y: &[T; 6]| {
        let state = unpack(y);
        let (c, _, delta_r) = bias_and_theta(t);
        let h = bare_hamiltonian(&params.with_delta_r(delta_r), &state, c);
        let a = state.amplitudes;
        let mut out = [T::zero(); 6];
        for i in 0..3 {
            let ha = Complex::new(h[i][0], T::zero()) * a[0]
                + Complex::new(h[i][1], T::zero()) * a[1]
                + Complex::new(h[i][2], T::zero()) * a[2];
            // da/dt = -i H a
            out[i] = ha.im;
            out[i + 3] = -ha.re;
        }
        out
    };

    let tab = Tableau::new();
    let n_out = control.output_points;
    let span = t_f - t_i;
    let grid_time = |k: usize| {
        if k + 1 == n_out {
            t_f
        } else {
            t_i + span * T::from_usize_lossy(k) / T::from_usize_lossy(n_out - 1)
        }
    };

    let mut times = Vec::with_capacity(n_out);
    let mut states = Vec::with_capacity(n_out);
    let mut delta_r_applied = Vec::with_capacity(n_out);
    let mut thetas = Vec::with_capacity(n_out);
    let mut record = |t: T, s: ModeState<T>| {
        let (_, theta, dr) = bias_and_theta(t);
        times.push(t);
        states.push(s);
        delta_r_applied.push(dr);
        thetas.push(theta);
    };
    record(t_i, *initial);

    let mut t = t_i;
    let mut y = pack(initial);
    let mut f = rhs(t, &y);
    let mut h = control.initial_step.min(span).min(control.max_step);
    let mut norm_drift = T::zero();
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut after_reject = false;

    for k in 1..n_out {
        let stop = grid_time(k);
        while t < stop {
            if accepted + rejected >= control.max_steps {
                return Err(SapError::IntegrationFailed {
                    t: t.to_f64_lossy(),
                    reason: "step budget exhausted".into(),
                });
            }
            let remaining = stop - t;
            // Land exactly on the output point; absorb a sliver rather than
            // taking a vanishing step afterwards.
            let clipped = h >= remaining || remaining - h < control.min_step;
            let trial = if clipped { remaining } else { h };
            if trial < control.min_step && !clipped {
                return Err(SapError::IntegrationFailed {
                    t: t.to_f64_lossy(),
                    reason: "step size underflow".into(),
                });
            }
            let step = try_step(&tab, &mut rhs, t, &y, &f, trial, control.rtol, control.atol);
            if !step.error_norm.is_finite() {
                return Err(SapError::IntegrationFailed {
                    t: t.to_f64_lossy(),
                    reason: "non-finite error estimate".into(),
                });
            }
            if step.error_norm < T::one() {
                t = if clipped { stop } else { t + trial };
                y = step.y;
                f = step.f;
                accepted += 1;
                let drift = (unpack(&y).norm_sqr() - initial_norm).abs();
                norm_drift = norm_drift.max(drift);
                if drift > control.norm_limit {
                    return Err(SapError::NormDrift {
                        drift: drift.to_f64_lossy(),
                        limit: control.norm_limit.to_f64_lossy(),
                        t: t.to_f64_lossy(),
                    });
                }
                let grown = trial * step_factor(step.error_norm, true, after_reject);
                // A clipped step says nothing about the natural step size.
                h = if clipped { h.max(grown) } else { grown }.min(control.max_step);
                after_reject = false;
            } else {
                h = trial * step_factor(step.error_norm, false, false);
                rejected += 1;
                after_reject = true;
                if h < control.min_step {
                    return Err(SapError::IntegrationFailed {
                        t: t.to_f64_lossy(),
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        record(stop, unpack(&y));
    }

    Ok(Trajectory {
        times,
        states,
        delta_r_applied,
        theta: thetas,
        norm_drift,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}
