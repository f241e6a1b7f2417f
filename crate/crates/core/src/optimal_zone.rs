//! Optimal Zone: the region of `(δ_M, δ_R)` where the dark energy stays
//! strictly between the two dressed energies for the whole process.
//!
//! Membership is decided by closed inequality sets, one per sign regime of
//! the outer-well nonlinearities. A brute-force scan of the analytic energies
//! over the mixing angle (`crossing_oracle`) serves as an independent witness.

use crate::error::{Result, SapError};
use crate::model::{PulseSchedule, SystemParams};
use crate::scalar::Real;
use crate::spectral::{dark_energy, dressed_energies, xi_prime};

/// Dressed branch of a resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Tunneling rates left over at the ends of the process, which set the
/// finite-coupling shift of the boundary curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCouplings<T> {
    /// `J_MR(t_i)`.
    pub initial_mr: T,
    /// `J_LM(t_f)`.
    pub final_lm: T,
}

impl<T: Real> TailCouplings<T> {
    pub fn from_schedule(schedule: &PulseSchedule<T>) -> Self {
        let (initial_mr, final_lm) = schedule.tail_couplings();
        TailCouplings {
            initial_mr,
            final_lm,
        }
    }

    /// Couplings fully switched off at both ends.
    pub fn ideal() -> Self {
        TailCouplings {
            initial_mr: T::zero(),
            final_lm: T::zero(),
        }
    }

    /// Half-width of the `g = 0` sliver, taken as the larger squared tail.
    pub fn degenerate_tolerance(&self) -> T {
        self.initial_mr.powi(2).max(self.final_lm.powi(2))
    }
}

impl<T: Real> Default for TailCouplings<T> {
    fn default() -> Self {
        Self::from_schedule(&PulseSchedule::reference())
    }
}

/// Initial-time boundary: `δ_R = g_L + J_MR(t_i)^2 / (2 (δ_M - g_L))`.
pub fn ci_curve<T: Real>(g_l: T, delta_m: T, initial_mr: T) -> Result<T> {
    let gap = delta_m - g_l;
    if gap == T::zero() {
        return Err(SapError::CurvePole {
            g_l: g_l.to_f64_lossy(),
        });
    }
    Ok(g_l + initial_mr.powi(2) / (T::lit(2.0) * gap))
}

/// Final-time boundary: `δ_R = -g_R + (δ_M ± sqrt(J_LM(t_f)^2 + δ_M^2)) / 2`.
pub fn cf_curve<T: Real>(g_r: T, delta_m: T, final_lm: T, branch: Branch) -> T {
    let root = final_lm.hypot(delta_m);
    let signed = match branch {
        Branch::Plus => root,
        Branch::Minus => -root,
    };
    -g_r + T::lit(0.5) * (delta_m + signed)
}

/// Region enclosed by the boundary curves: `δ_R` on the inner side of Ci and
/// strictly between the two Cf branches.
pub fn inside_curves<T: Real>(
    g_l: T,
    g_r: T,
    delta_m: T,
    delta_r: T,
    tails: &TailCouplings<T>,
) -> bool {
    let ci_side = (g_l - delta_r) * (g_l - delta_m) < T::lit(0.5) * tails.initial_mr.powi(2);
    let lo = cf_curve(g_r, delta_m, tails.final_lm, Branch::Minus);
    let hi = cf_curve(g_r, delta_m, tails.final_lm, Branch::Plus);
    ci_side && lo < delta_r && delta_r < hi
}

/// Inequality regime used to decide membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OzCase {
    /// Equal nonlinearity, `g > 0`.
    PositiveG,
    /// Equal nonlinearity, `g < 0`.
    NegativeG,
    /// No nonlinearity in the outer wells.
    Degenerate,
    /// `g_L, g_R > 0`.
    I,
    /// `g_L, g_R < 0`.
    IReversed,
    /// `g_R < 0 < g_L < -g_R`, region with `δ_M < 0`.
    IIa,
    /// `g_R < 0 < g_L < -g_R`, region with `δ_M > 0`.
    IIb,
    /// `g_L < 0 < g_R`, `g_R > -g_L`, reverse of [`OzCase::IIa`].
    IIaReversed,
    /// `g_L < 0 < g_R`, `g_R > -g_L`, reverse of [`OzCase::IIb`].
    IIbReversed,
    /// `g_R < 0 < g_L`, `g_L >= -g_R`.
    III,
    /// `g_L < 0 < g_R`, `g_R <= -g_L`.
    IIIReversed,
}

impl OzCase {
    pub fn as_str(self) -> &'static str {
        match self {
            OzCase::PositiveG => "g-positive",
            OzCase::NegativeG => "g-negative",
            OzCase::Degenerate => "degenerate",
            OzCase::I => "i",
            OzCase::IReversed => "i-reversed",
            OzCase::IIa => "ii-a",
            OzCase::IIb => "ii-b",
            OzCase::IIaReversed => "ii-a-reversed",
            OzCase::IIbReversed => "ii-b-reversed",
            OzCase::III => "iii",
            OzCase::IIIReversed => "iii-reversed",
        }
    }

    /// Whether the verdict relies on literally reversing a stated set.
    pub fn is_reversed(self) -> bool {
        matches!(
            self,
            OzCase::IReversed | OzCase::IIaReversed | OzCase::IIbReversed | OzCase::IIIReversed
        )
    }
}

/// One strict inequality and whether it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition {
    pub id: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OzVerdict<T> {
    pub inside: bool,
    pub case_id: OzCase,
    /// Every condition of the selected region, in evaluation order.
    pub conditions: Vec<Condition>,
    pub violated: Vec<&'static str>,
    pub j0_min: Option<T>,
    pub j0_ok: bool,
}

/// Tail couplings and peak tunneling rate that a verdict is judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OzContext<T> {
    pub tails: TailCouplings<T>,
    pub j0: T,
}

impl<T: Real> OzContext<T> {
    pub fn from_schedule(schedule: &PulseSchedule<T>) -> Self {
        OzContext {
            tails: TailCouplings::from_schedule(schedule),
            j0: schedule.j0,
        }
    }
}

impl<T: Real> Default for OzContext<T> {
    fn default() -> Self {
        Self::from_schedule(&PulseSchedule::reference())
    }
}

fn cond(id: &'static str, holds: bool) -> Condition {
    Condition { id, holds }
}

fn region_verdict(case_id: OzCase, conditions: Vec<Condition>) -> (bool, OzCase, Vec<Condition>) {
    let inside = conditions.iter().all(|c| c.holds);
    (inside, case_id, conditions)
}

/// Picks the satisfied region or, failing that, the one with fewest violations.
fn best_region(regions: Vec<(OzCase, Vec<Condition>)>) -> (bool, OzCase, Vec<Condition>) {
    let violations = |c: &[Condition]| c.iter().filter(|c| !c.holds).count();
    let (case_id, conditions) = regions
        .into_iter()
        .min_by_key(|(_, c)| violations(c))
        .expect("at least one region");
    let inside = violations(&conditions) == 0;
    (inside, case_id, conditions)
}

fn finish<T: Real>(
    (inside, case_id, conditions): (bool, OzCase, Vec<Condition>),
    j0_min: Option<T>,
    ctx: &OzContext<T>,
) -> OzVerdict<T> {
    let violated = conditions
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.id)
        .collect();
    let j0_min = if inside { j0_min } else { None };
    let j0_ok = inside && j0_min.is_none_or(|m| ctx.j0 >= m);
    OzVerdict {
        inside,
        case_id,
        conditions,
        violated,
        j0_min,
        j0_ok,
    }
}

fn degenerate<T: Real>(delta_r: T, tails: &TailCouplings<T>) -> (bool, OzCase, Vec<Condition>) {
    let holds = delta_r.abs() < tails.degenerate_tolerance();
    (
        holds,
        OzCase::Degenerate,
        vec![cond("|delta_r| < tail^2", holds)],
    )
}

/// Membership for `g_L = g_R = g` against the reference schedule.
pub fn oz_membership_equal_g<T: Real>(g: T, delta_m: T, delta_r: T) -> OzVerdict<T> {
    classify_equal_g(&OzContext::default(), g, delta_m, delta_r)
}

/// Membership for `g_L = g_R = g`.
pub fn classify_equal_g<T: Real>(ctx: &OzContext<T>, g: T, delta_m: T, delta_r: T) -> OzVerdict<T> {
    let region = if g > T::zero() {
        region_verdict(
            OzCase::PositiveG,
            vec![
                cond("delta_m > g", delta_m > g),
                cond("-1 < delta_r/g < 1", (delta_r / g).abs() < T::one()),
                cond("delta_m > delta_r + g", delta_m > delta_r + g),
            ],
        )
    } else if g < T::zero() {
        region_verdict(
            OzCase::NegativeG,
            vec![
                cond("delta_m < g", delta_m < g),
                cond("-1 < delta_r/g < 1", (delta_r / g).abs() < T::one()),
                cond("delta_m < delta_r + g", delta_m < delta_r + g),
            ],
        )
    } else {
        degenerate(delta_r, &ctx.tails)
    };
    finish(region, j0_min_equal_g(g, delta_m, delta_r).ok(), ctx)
}

/// Membership for independent outer-well nonlinearities against the
/// reference schedule.
pub fn oz_membership_unequal_g<T: Real>(g_l: T, g_r: T, delta_m: T, delta_r: T) -> OzVerdict<T> {
    classify_unequal_g(&OzContext::default(), g_l, g_r, delta_m, delta_r)
}

/// Membership for independent outer-well nonlinearities. When exactly one of
/// `g_L`, `g_R` vanishes the same-sign set of the other applies.
pub fn classify_unequal_g<T: Real>(
    ctx: &OzContext<T>,
    g_l: T,
    g_r: T,
    delta_m: T,
    delta_r: T,
) -> OzVerdict<T> {
    let zero = T::zero();
    let upper = delta_m - g_r;
    let region = if g_l == zero && g_r == zero {
        degenerate(delta_r, &ctx.tails)
    } else if g_l >= zero && g_r >= zero {
        region_verdict(
            OzCase::I,
            vec![
                cond("delta_m > g_l", delta_m > g_l),
                cond("-g_r < delta_r < g_l", -g_r < delta_r && delta_r < g_l),
                cond("delta_r < delta_m - g_r", delta_r < upper),
            ],
        )
    } else if g_l <= zero && g_r <= zero {
        region_verdict(
            OzCase::IReversed,
            vec![
                cond("delta_m < g_l", delta_m < g_l),
                cond("-g_r > delta_r > g_l", -g_r > delta_r && delta_r > g_l),
                cond("delta_r > delta_m - g_r", delta_r > upper),
            ],
        )
    } else if g_r < zero {
        // g_L > 0 > g_R
        let all = cond("delta_m < g_l", delta_m < g_l);
        if g_l < -g_r {
            best_region(vec![
                (
                    OzCase::IIa,
                    vec![
                        all,
                        cond("delta_m < 0", delta_m < zero),
                        cond("g_l < delta_r < -g_r", g_l < delta_r && delta_r < -g_r),
                        cond("delta_r > delta_m - g_r", delta_r > upper),
                    ],
                ),
                (
                    OzCase::IIb,
                    vec![
                        all,
                        cond("delta_m > 0", delta_m > zero),
                        cond(
                            "-g_r < delta_r < g_l - g_r",
                            -g_r < delta_r && delta_r < g_l - g_r,
                        ),
                        cond("delta_r < delta_m - g_r", delta_r < upper),
                    ],
                ),
            ])
        } else {
            region_verdict(
                OzCase::III,
                vec![
                    all,
                    cond(
                        "g_l < delta_r < g_l - g_r",
                        g_l < delta_r && delta_r < g_l - g_r,
                    ),
                    cond("delta_r < delta_m - g_r", delta_r < upper),
                ],
            )
        }
    } else {
        // g_R > 0 > g_L
        let all = cond("delta_m > g_l", delta_m > g_l);
        if g_r > -g_l {
            best_region(vec![
                (
                    OzCase::IIaReversed,
                    vec![
                        all,
                        cond("delta_m > 0", delta_m > zero),
                        cond("g_l > delta_r > -g_r", g_l > delta_r && delta_r > -g_r),
                        cond("delta_r < delta_m - g_r", delta_r < upper),
                    ],
                ),
                (
                    OzCase::IIbReversed,
                    vec![
                        all,
                        cond("delta_m < 0", delta_m < zero),
                        cond(
                            "-g_r > delta_r > g_l - g_r",
                            -g_r > delta_r && delta_r > g_l - g_r,
                        ),
                        cond("delta_r > delta_m - g_r", delta_r > upper),
                    ],
                ),
            ])
        } else {
            region_verdict(
                OzCase::IIIReversed,
                vec![
                    all,
                    cond(
                        "g_l > delta_r > g_l - g_r",
                        g_l > delta_r && delta_r > g_l - g_r,
                    ),
                    cond("delta_r > delta_m - g_r", delta_r > upper),
                ],
            )
        }
    };
    finish(
        region,
        j0_min_unequal_g(g_l, g_r, delta_m, delta_r).ok(),
        ctx,
    )
}

/// Smallest peak tunneling rate avoiding the dark/dressed crossing for
/// `g_L = g_R = g`:
/// `J0_min = |δ_R/g|/2 · sqrt(δ_R^2/2 + 4gδ_M - 2gδ_R - 2g^2)`.
pub fn j0_min_equal_g<T: Real>(g: T, delta_m: T, delta_r: T) -> Result<T> {
    if g == T::zero() {
        return Err(SapError::UndefinedThreshold("g = 0"));
    }
    let two = T::lit(2.0);
    let radicand =
        delta_r * delta_r / two + T::lit(4.0) * g * delta_m - two * g * delta_r - two * g * g;
    if radicand < T::zero() {
        return Err(SapError::OutsideApplicability {
            radicand: radicand.to_f64_lossy(),
        });
    }
    Ok(T::lit(0.5) * (delta_r / g).abs() * radicand.sqrt())
}

/// Sufficient peak tunneling rate for independent outer nonlinearities,
/// `J0_min = sqrt(F1 F2) / (2|g_L + g_R|)` with
/// `F1 = (g_L - g_R - δ_R)^2 + δ_R^2` and
/// `F2 = 4 g_R δ_M + δ_R^2 - 4 g_L (g_R - δ_M + δ_R)`.
pub fn j0_min_unequal_g<T: Real>(g_l: T, g_r: T, delta_m: T, delta_r: T) -> Result<T> {
    let g_sum = g_l + g_r;
    if g_sum == T::zero() {
        return Err(SapError::UndefinedThreshold("g_L + g_R = 0"));
    }
    let four = T::lit(4.0);
    let f1 = (g_l - g_r - delta_r).powi(2) + delta_r * delta_r;
    let f2 = four * g_r * delta_m + delta_r * delta_r - four * g_l * (g_r - delta_m + delta_r);
    let product = f1 * f2;
    if product < T::zero() {
        return Err(SapError::OutsideApplicability {
            radicand: product.to_f64_lossy(),
        });
    }
    Ok(product.sqrt() / (T::lit(2.0) * g_sum.abs()))
}

/// Angle from `cos^2 θ = c`, if `c` is a valid squared cosine.
fn angle_from_cos_sqr<T: Real>(c: T) -> Option<T> {
    (c >= T::zero() && c <= T::one()).then(|| c.sqrt().acos())
}

/// Location and value of the maximum of `ξ = 4ε_B` for equal `g > 0`:
/// `θ₁ = arccos(sqrt(2g + δ_R) / (2 sqrt g))`, `ξ(θ₁) = (2g + δ_R)^2 / (2g)`.
pub fn xi_maximum<T: Real>(g: T, delta_r: T) -> Option<(T, T)> {
    if g == T::zero() {
        return None;
    }
    let s = T::lit(2.0) * g + delta_r;
    let theta = angle_from_cos_sqr(s / (T::lit(4.0) * g))?;
    Some((theta, s * s / (T::lit(2.0) * g)))
}

/// Location and value of the extremum of `ξ'` for `g̃ = g_L + g_R`:
/// `θ₄ = arccos sqrt((g̃ + δ_R) / 2g̃)`, `ξ'(θ₄) = 2 (g̃ + δ_R)^2 / g̃`.
pub fn xi_prime_extremum<T: Real>(g_l: T, g_r: T, delta_r: T) -> Option<(T, T)> {
    let g_sum = g_l + g_r;
    if g_sum == T::zero() {
        return None;
    }
    let s = g_sum + delta_r;
    let theta = angle_from_cos_sqr(s / (T::lit(2.0) * g_sum))?;
    Some((theta, T::lit(2.0) * s * s / g_sum))
}

/// Location and value of the interior extremum of `ε_D`:
/// `θ₅ = arccos sqrt((2g_R + δ_R) / 2g̃)`,
/// `ε_D(θ₅) = -(δ_R^2 - 4 g_L (g_R + δ_R)) / (4 g̃)`.
pub fn dark_energy_extremum<T: Real>(g_l: T, g_r: T, delta_r: T) -> Option<(T, T)> {
    let g_sum = g_l + g_r;
    if g_sum == T::zero() {
        return None;
    }
    let theta = angle_from_cos_sqr((T::lit(2.0) * g_r + delta_r) / (T::lit(2.0) * g_sum))?;
    let value = -(delta_r * delta_r - T::lit(4.0) * g_l * (g_r + delta_r)) / (T::lit(4.0) * g_sum);
    Some((theta, value))
}

/// Branch on which a sub-threshold crossing is expected: `ε-` for `g > 0`,
/// `ε+` for `g < 0`, keyed on `g_L + g_R`.
pub fn predicted_branch<T: Real>(g_l: T, g_r: T) -> Option<Branch> {
    let s = g_l + g_r;
    if s > T::zero() {
        Some(Branch::Minus)
    } else if s < T::zero() {
        Some(Branch::Plus)
    } else {
        None
    }
}

/// Dependence of `J_BM` on the mixing angle used by the crossing scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingProfile<T> {
    /// `J_BM(θ) = J0` for every angle.
    Constant,
    /// `J_BM(θ)` induced by this pulse pair: the time at which the pulses
    /// realise `θ` is `t = (t_p + t_s)/2 + σ^2 ln tan θ / (t_p - t_s)`.
    /// Only the pulse geometry is used; the amplitude is the scan's `J0`.
    Schedule(PulseSchedule<T>),
}

impl<T: Real> CouplingProfile<T> {
    pub fn reference_schedule() -> Self {
        CouplingProfile::Schedule(PulseSchedule::reference())
    }

    pub fn j_bm(&self, j0: T, theta: T) -> T {
        match self {
            CouplingProfile::Constant => j0,
            CouplingProfile::Schedule(s) => {
                let half = T::lit(0.5);
                let t =
                    half * (s.t_p + s.t_s) + s.sigma * s.sigma * theta.tan().ln() / (s.t_p - s.t_s);
                s.with_j0(j0).couplings(t).j_bm()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CouplingProfile::Constant => Ok(()),
            CouplingProfile::Schedule(s) => {
                s.validate()?;
                if s.t_p == s.t_s {
                    return Err(SapError::invalid(
                        "profile",
                        "coincident pulses do not sweep the mixing angle",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Direction in which `ε_D - ε_branch` changes sign as `θ` increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChange {
    Rising,
    Falling,
}

/// A resonance between the dark energy and one dressed energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<T> {
    pub theta_at: T,
    pub branch: Branch,
    pub sign_change: SignChange,
}

pub const DEFAULT_THETA_SAMPLES: usize = 4096;
const BISECTION_TOLERANCE: f64 = 1e-10;

fn branch_gap<T: Real>(
    params: &SystemParams<T>,
    j0: T,
    profile: &CouplingProfile<T>,
    theta: T,
    branch: Branch,
) -> T {
    let (plus, minus) = dressed_energies(params, theta, profile.j_bm(j0, theta));
    let eps = match branch {
        Branch::Plus => plus,
        Branch::Minus => minus,
    };
    dark_energy(params, theta) - eps
}

/// Scans `ε_D - ε±` on `θ_k = kπ / (2(n+1))`, `k = 1..n`, and refines each
/// sign change by bisection. An empty result means the dark energy stays
/// strictly inside the dressed gap on the grid.
pub fn crossing_oracle<T: Real>(
    params: &SystemParams<T>,
    j0: T,
    profile: &CouplingProfile<T>,
    n_theta: usize,
) -> Result<Vec<Crossing<T>>> {
    if n_theta < 100 {
        return Err(SapError::invalid(
            "n_theta",
            format!("need at least 100 samples, got {n_theta}"),
        ));
    }
    if !(j0 >= T::zero() && j0.is_finite()) {
        return Err(SapError::invalid("j0", "must be finite and >= 0"));
    }
    params.validate()?;
    profile.validate()?;
    let step = T::FRAC_PI_2() / T::from_usize_lossy(n_theta + 1);
    let tol = T::lit(BISECTION_TOLERANCE);
    let mut crossings = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        let f = |theta: T| branch_gap(params, j0, profile, theta, branch);
        let mut prev_theta = step;
        let mut prev = f(prev_theta);
        for k in 2..=n_theta {
            let theta = step * T::from_usize_lossy(k);
            let cur = f(theta);
            if (prev > T::zero()) != (cur > T::zero()) {
                let (mut lo, mut hi, lo_positive) = (prev_theta, theta, prev > T::zero());
                while hi - lo > tol {
                    let mid = T::lit(0.5) * (lo + hi);
                    if (f(mid) > T::zero()) == lo_positive {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let sign_change = if lo_positive {
                    SignChange::Falling
                } else {
                    SignChange::Rising
                };
                crossings.push(Crossing {
                    theta_at: T::lit(0.5) * (lo + hi),
                    branch,
                    sign_change,
                });
            }
            prev_theta = theta;
            prev = cur;
        }
    }
    crossings.sort_by(|a, b| a.theta_at.partial_cmp(&b.theta_at).expect("finite angles"));
    Ok(crossings)
}

/// Peak tunneling rate above which the crossing scan is empty, found by
/// bisection on `[lo, hi]` to `tol`. Assumes the scan is empty at `hi`.
pub fn crossing_threshold<T: Real>(
    params: &SystemParams<T>,
    profile: &CouplingProfile<T>,
    n_theta: usize,
    lo: T,
    hi: T,
    tol: T,
) -> Result<T> {
    if !(lo >= T::zero() && lo < hi && tol > T::zero()) {
        return Err(SapError::invalid(
            "bracket",
            "need 0 <= lo < hi and tol > 0",
        ));
    }
    if !crossing_oracle(params, hi, profile, n_theta)?.is_empty() {
        return Err(SapError::invalid(
            "bracket",
            "crossing persists at the upper bound",
        ));
    }
    let (mut lo, mut hi) = (lo, hi);
    if crossing_oracle(params, lo, profile, n_theta)?.is_empty() {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = T::lit(0.5) * (lo + hi);
        if crossing_oracle(params, mid, profile, n_theta)?.is_empty() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `ξ'/8 = cos^2 θ (δ_R + g̃ sin^2 θ)`, the bright-state energy.
pub fn bright_energy<T: Real>(params: &SystemParams<T>, theta: T) -> T {
    xi_prime(params, theta) / T::lit(8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TAIL: f64 = 5.086_069_231_012_7e-3;

    #[test]
    fn ci_examples() {
        assert_eq!(ci_curve(0.1, 0.5, 0.0).unwrap(), 0.1);
        assert_eq!(ci_curve(0.0, 0.4, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            ci_curve(-0.3, -0.9, 5.1e-3).unwrap(),
            -0.300_021_675,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ci_curve(-0.3, -0.9, TAIL).unwrap(),
            -0.300_021_556_750_185_54,
            epsilon = 1e-15
        );
        assert!(matches!(
            ci_curve(0.2, 0.2, TAIL),
            Err(SapError::CurvePole { .. })
        ));
    }

    #[test]
    fn cf_examples() {
        assert_eq!(cf_curve(0.1, 0.0, 0.0, Branch::Plus), -0.1);
        assert_abs_diff_eq!(
            cf_curve(-0.3, -0.9, 0.0, Branch::Minus),
            -0.6,
            epsilon = 1e-15
        );
        assert_eq!(cf_curve(0.0, 0.4, 0.0, Branch::Plus), 0.4);
        assert_eq!(cf_curve(0.0, 0.4, 0.0, Branch::Minus), 0.0);
    }

    #[test]
    fn tails_from_reference_schedule() {
        let t = TailCouplings::<f64>::default();
        assert_abs_diff_eq!(t.initial_mr, TAIL, epsilon = 1e-17);
        assert_abs_diff_eq!(t.final_lm, TAIL, epsilon = 1e-17);
        assert_eq!(TailCouplings::<f64>::ideal().degenerate_tolerance(), 0.0);
    }

    #[test]
    fn equal_g_examples() {
        let v = oz_membership_equal_g(-0.3, -0.7, 0.0);
        assert!(v.inside && v.violated.is_empty());
        assert_eq!(v.case_id, OzCase::NegativeG);
        assert_eq!(v.j0_min, Some(0.0));
        assert!(v.j0_ok);

        let v = oz_membership_equal_g(-0.3, 0.0, 0.0);
        assert!(!v.inside);
        assert_eq!(v.violated, vec!["delta_m < g", "delta_m < delta_r + g"]);

        let v = oz_membership_equal_g(0.1, 0.15, 0.0);
        assert!(v.inside);
        assert_eq!(v.case_id, OzCase::PositiveG);
    }

    #[test]
    fn boundaries_are_outside() {
        assert!(!oz_membership_equal_g(0.1, 0.1, 0.0).inside);
        assert!(!oz_membership_equal_g(0.1, 0.5, 0.1).inside);
        assert!(!oz_membership_equal_g(-0.3, -0.9, -0.3).inside);
        assert!(!oz_membership_unequal_g(0.1, 0.3, 0.4, 0.1).inside);
    }

    #[test]
    fn degenerate_verdicts() {
        let v = oz_membership_equal_g(0.0, 0.4, 0.0);
        assert_eq!(v.case_id, OzCase::Degenerate);
        assert!(v.inside);
        assert!(!oz_membership_equal_g(0.0, 0.4, 0.01).inside);
        let v = oz_membership_unequal_g(0.0, 0.0, 0.0, 0.2);
        assert!(!v.inside);
        assert_eq!(v.case_id, OzCase::Degenerate);
        let ideal = OzContext {
            tails: TailCouplings::ideal(),
            j0: 1.0,
        };
        assert!(!classify_equal_g(&ideal, 0.0, 0.4, 0.0).inside);
    }

    #[test]
    fn unequal_g_examples() {
        let v = oz_membership_unequal_g(0.1, 0.3, 0.4, 0.0);
        assert!(v.inside);
        assert_eq!(v.case_id, OzCase::I);

        let v = oz_membership_unequal_g(-0.1, 0.3, 0.4, 0.1);
        assert_eq!(v.case_id, OzCase::IIaReversed);
        assert!(!v.inside);
        assert!(oz_membership_unequal_g(-0.1, 0.3, 0.4, -0.2).inside);

        let v = oz_membership_unequal_g(0.0, 0.3, 0.4, -0.1);
        assert_eq!(v.case_id, OzCase::I);
        assert!(v.inside);
    }

    #[test]
    fn mixed_sign_regions() {
        // g_R < 0 < g_L < -g_R
        let v = oz_membership_unequal_g(0.1, -0.3, -0.2, 0.2);
        assert_eq!(v.case_id, OzCase::IIa);
        assert!(v.inside);
        let v = oz_membership_unequal_g(0.1, -0.3, 0.05, 0.32);
        assert_eq!(v.case_id, OzCase::IIb);
        assert!(v.inside);
        // g_L >= -g_R
        let v = oz_membership_unequal_g(0.3, -0.1, 0.28, 0.32);
        assert_eq!(v.case_id, OzCase::III);
        assert!(v.inside);
        let v = oz_membership_unequal_g(-0.3, 0.1, -0.28, -0.32);
        assert_eq!(v.case_id, OzCase::IIIReversed);
        assert!(v.inside);
        assert!(v.case_id.is_reversed());
    }

    #[test]
    fn j0_min_examples() {
        assert_eq!(j0_min_equal_g(0.2, 0.5, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            j0_min_equal_g(-0.3, -0.9, 0.2).unwrap(),
            0.339_934_634_239_519,
            epsilon = 1e-15
        );
        assert!(matches!(
            j0_min_equal_g(0.0, 0.5, 0.1),
            Err(SapError::UndefinedThreshold(_))
        ));
        assert!(matches!(
            j0_min_equal_g(0.1, -1.0, 0.0),
            Err(SapError::OutsideApplicability { .. })
        ));
        assert_eq!(j0_min_unequal_g(0.2, 0.2, 0.5, 0.0).unwrap(), 0.0);
        assert!(matches!(
            j0_min_unequal_g(0.2, -0.2, 0.5, 0.0),
            Err(SapError::UndefinedThreshold(_))
        ));
        for (g, dm, dr) in [(0.1, 0.3, 0.05), (-0.3, -0.9, 0.2), (0.25, 0.7, -0.2)] {
            assert_abs_diff_eq!(
                j0_min_unequal_g(g, g, dm, dr).unwrap(),
                j0_min_equal_g(g, dm, dr).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn extremum_helpers() {
        let (theta, value) = xi_maximum(0.2, 0.1).unwrap();
        let xi = |t: f64| 4.0 * t.cos().powi(2) * (0.1 + 0.4 * t.sin().powi(2));
        assert_abs_diff_eq!(xi(theta), value, epsilon = 1e-14);
        assert!(xi(theta + 1e-3) < value && xi(theta - 1e-3) < value);
        assert!(xi_maximum(0.1, 0.5).is_none());

        let p = SystemParams::new(0.1, 0.2, 0.3, 0.4, 0.05).unwrap();
        let (t4, x4) = xi_prime_extremum(0.1, 0.3, 0.05).unwrap();
        assert_abs_diff_eq!(xi_prime(&p, t4), x4, epsilon = 1e-14);
        let (t5, e5) = dark_energy_extremum(0.1, 0.3, 0.05).unwrap();
        assert_abs_diff_eq!(dark_energy(&p, t5), e5, epsilon = 1e-14);
        assert!(dark_energy(&p, t5 + 1e-3) > e5 && dark_energy(&p, t5 - 1e-3) > e5);
    }

    #[test]
    fn crossing_examples() {
        let n = DEFAULT_THETA_SAMPLES;
        for profile in [
            CouplingProfile::Constant,
            CouplingProfile::reference_schedule(),
        ] {
            let p = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
            assert!(crossing_oracle(&p, 1.0, &profile, n).unwrap().is_empty());

            let p = SystemParams::uniform(0.0, 0.0, 0.0).unwrap();
            for j0 in [1e-3, 0.5, 3.0] {
                assert!(crossing_oracle(&p, j0, &profile, n).unwrap().is_empty());
            }
        }
        // The end-of-process resonance needs J_BM to decay with the pulses.
        let p = SystemParams::uniform(0.1, 0.05, 0.3).unwrap();
        let c = crossing_oracle(&p, 1.0, &CouplingProfile::reference_schedule(), n).unwrap();
        assert!(c.iter().any(|c| c.branch == Branch::Plus), "{c:?}");
        for x in &c {
            assert!(x.theta_at > 0.0 && x.theta_at < std::f64::consts::FRAC_PI_2);
        }
        let p = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
        assert!(crossing_oracle(&p, 1.0, &CouplingProfile::Constant, 50).is_err());
    }

    #[test]
    fn crossing_brackets_equal_g_threshold() {
        let p = SystemParams::uniform(-0.3, -0.9, 0.2).unwrap();
        let j = j0_min_equal_g(-0.3, -0.9, 0.2).unwrap();
        let profile = CouplingProfile::Constant;
        let below = crossing_oracle(&p, 0.9 * j, &profile, DEFAULT_THETA_SAMPLES).unwrap();
        assert!(!below.is_empty());
        assert!(below.iter().all(|c| c.branch == Branch::Plus));
        assert!(
            crossing_oracle(&p, 1.1 * j, &profile, DEFAULT_THETA_SAMPLES)
                .unwrap()
                .is_empty()
        );
        let found =
            crossing_threshold(&p, &profile, DEFAULT_THETA_SAMPLES, 0.0, 1.0, 1e-9).unwrap();
        assert_abs_diff_eq!(found, j, epsilon = 1e-6);
    }

    #[test]
    fn schedule_profile_shape() {
        let profile = CouplingProfile::<f64>::reference_schedule();
        // Pulses cross at t = 0 where θ = π/4.
        let mid = profile.j_bm(1.0, std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(
            mid,
            2f64.sqrt() * (-(112.5f64.powi(2)) / 45000.0).exp(),
            epsilon = 1e-15
        );
        assert_eq!(CouplingProfile::Constant.j_bm(0.7, 0.3), 0.7);
    }

    #[test]
    fn curves_match_inequalities_away_from_tails() {
        let ideal = TailCouplings::ideal();
        for (gl, gr, dm, dr) in [
            (0.1, 0.3, 0.4, 0.0),
            (0.1, 0.1, 0.4, 0.15),
            (-0.3, -0.3, -0.9, 0.1),
        ] {
            assert_eq!(
                inside_curves(gl, gr, dm, dr, &ideal),
                oz_membership_unequal_g(gl, gr, dm, dr).inside
            );
        }
    }

    #[test]
    fn bright_energy_end_values() {
        let p = SystemParams::new(0.1, 0.2, 0.3, 0.4, 0.05).unwrap();
        assert_abs_diff_eq!(bright_energy(&p, 0.0), 0.05, epsilon = 1e-16);
        assert_abs_diff_eq!(
            bright_energy(&p, std::f64::consts::FRAC_PI_2),
            0.0,
            epsilon = 1e-16
        );
    }
}
