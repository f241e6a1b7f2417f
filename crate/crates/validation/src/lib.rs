//! Quantitative acceptance checks. Each check returns an [`Outcome`] with the
//! measured values, so a run reports every result instead of stopping at the
//! first failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sap_core::dynamics::{efficiency, integrate, BiasProtocol, StepControl};
use sap_core::model::{Couplings, ModeState, PulseSchedule, SystemParams};
use sap_core::optimal_zone::{
    classify_equal_g, crossing_oracle, crossing_threshold, j0_min_equal_g, j0_min_unequal_g,
    predicted_branch, CouplingProfile, OzContext, DEFAULT_THETA_SAMPLES,
};
use sap_core::selftest::{sample_equal_g_interior, sample_positive_unequal_interior};
use sap_core::spectral::{
    dark_bright_quantities, dressed_energies, dressed_quantities, per_well_dark_bright,
};
use sap_core::sweeps::{
    extract_plateau, oz_interval_on_grid, oz_raster, ramp_scan, sweep_delta_r, widest_plateau,
    SweepOptions,
};
use sap_core::{EfficiencyCurveF64, OzRasterF64, PlateauF64, SystemParamsF64};

pub const SEED: u64 = 2024;
pub const PLATEAU_THRESHOLD: f64 = 0.99;
/// Slack for comparing grid values built by repeated floating-point steps.
const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: &'static str, title: &'static str, passed: bool, detail: String) -> Self {
        Outcome {
            id,
            title,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        format!("{mark} {:<3} {}: {}", self.id, self.title, self.detail)
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol + GRID_SLACK
}

fn fmt_plateau(p: Option<&PlateauF64>) -> String {
    p.map_or_else(
        || "none".to_string(),
        |p| format!("[{:.2}, {:.2}]", p.lo, p.hi),
    )
}

fn reference() -> PulseSchedule<f64> {
    PulseSchedule::reference()
}

/// A bias sweep with its wall-clock time.
#[derive(Debug, Clone)]
pub struct TimedSweep {
    pub params: SystemParamsF64,
    pub curve: EfficiencyCurveF64,
    pub elapsed: Duration,
}

fn timed_sweep(params: SystemParamsF64, control: StepControl<f64>) -> TimedSweep {
    let opts = SweepOptions {
        control,
        ..SweepOptions::default()
    };
    let start = Instant::now();
    let curve = sweep_delta_r(
        &params,
        &reference(),
        (-0.6, 0.6),
        121,
        &BiasProtocol::Static,
        &opts,
    )
    .expect("sweep integrates");
    TimedSweep {
        params,
        curve,
        elapsed: start.elapsed(),
    }
}

/// The four `g = -0.3` sweeps over `δ_M ∈ {-0.9, -0.7, -0.5, 0}`.
pub fn negative_g_sweeps(control: StepControl<f64>) -> Vec<TimedSweep> {
    [-0.9, -0.7, -0.5, 0.0]
        .into_iter()
        .map(|dm| {
            timed_sweep(
                SystemParams::uniform(-0.3, dm, 0.0).expect("finite"),
                control,
            )
        })
        .collect()
}

/// The four `δ_M = 0.4` sweeps: equal 0.1, (0.1, 0.3), (0, 0.3) and linear.
pub fn positive_g_sweeps() -> Vec<TimedSweep> {
    [(0.1, 0.1), (0.1, 0.3), (0.0, 0.3), (0.0, 0.0)]
        .into_iter()
        .map(|(g_l, g_r)| {
            let p = SystemParams::new(g_l, 0.5 * (g_l + g_r), g_r, 0.4, 0.0).expect("finite");
            timed_sweep(p, StepControl::default())
        })
        .collect()
}

fn widest(curve: &EfficiencyCurveF64) -> Option<PlateauF64> {
    widest_plateau(curve, PLATEAU_THRESHOLD).expect("valid threshold")
}

pub fn linear_transfer() -> Outcome {
    let p = SystemParams::uniform(0.0, 0.0, 0.0).expect("finite");
    let run = || {
        integrate(
            &p,
            &reference(),
            &BiasProtocol::Static,
            &ModeState::left(),
            &StepControl::default(),
        )
        .expect("integrates")
    };
    let traj = run();
    let runs = 10;
    let start = Instant::now();
    for _ in 0..runs {
        std::hint::black_box(run());
    }
    let per_run = start.elapsed() / runs;
    let e = efficiency(&traj);
    let passed = e >= 0.999 && traj.norm_drift <= 1e-8 && per_run < Duration::from_millis(100);
    Outcome::new(
        "C1",
        "linear resonant transfer",
        passed,
        format!(
            "efficiency {e:.10} (>= 0.999), norm drift {:.2e} (<= 1e-8), {:.2} ms per run (< 100 ms)",
            traj.norm_drift,
            per_run.as_secs_f64() * 1e3
        ),
    )
}

pub fn negative_g_plateaus(sweeps: &[TimedSweep]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let plateaus = extract_plateau(&s.curve, PLATEAU_THRESHOLD).expect("valid threshold");
        let best = widest(&s.curve);
        let ok = match s.params.delta_m {
            0.0 => plateaus.iter().all(|p| p.width() < 0.05 - GRID_SLACK),
            dm => {
                let hi_target = 0.3;
                let lo_target = if dm == -0.5 { -0.2 } else { -0.3 };
                plateaus.len() == 1
                    && best.is_some_and(|p| {
                        within(p.lo, lo_target, 0.02) && within(p.hi, hi_target, 0.02)
                    })
            }
        };
        let fast = s.elapsed < Duration::from_secs(30);
        passed &= ok && fast;
        parts.push(format!(
            "dm={} {}{} {:.1}s",
            s.params.delta_m,
            fmt_plateau(best.as_ref()),
            if plateaus.len() > 1 {
                format!(" (+{} more)", plateaus.len() - 1)
            } else {
                String::new()
            },
            s.elapsed.as_secs_f64()
        ));
    }
    Outcome::new(
        "C2",
        "plateaus at g=-0.3",
        passed,
        format!(
            "{}; want [-0.30, 0.30], [-0.30, 0.30], [-0.20, 0.30] within 0.02, none >= 0.05, < 30 s each",
            parts.join(", ")
        ),
    )
}

pub fn zone_geometry() -> Outcome {
    let ctx = OzContext::default();
    let window = ((-1.5, 0.5), (-0.6, 0.6));
    let r: OzRasterF64 =
        oz_raster(-0.3, -0.3, window.0, window.1, 200, &ctx).expect("valid raster");
    let cell = r.delta_r[1] - r.delta_r[0];
    let mut worst = 0.0f64;
    let mut rows_ok = true;
    for (i, _) in r.delta_m.iter().enumerate().filter(|(_, &dm)| dm < -0.6) {
        match r.inside_span(i) {
            Some((lo, hi)) => worst = worst.max((lo + 0.3).abs()).max((hi - 0.3).abs()),
            None => rows_ok = false,
        }
    }
    let linear = oz_raster(0.0, 0.0, window.0, window.1, 200, &ctx).expect("valid raster");
    let ratio = linear.inside_area() / r.inside_area();
    let passed = rows_ok && worst <= cell + GRID_SLACK && ratio < 0.01;
    Outcome::new(
        "C3",
        "zone geometry",
        passed,
        format!(
            "band edges off (-0.3, 0.3) by at most {worst:.4} (<= one cell {cell:.4}), linear/nonlinear area ratio {ratio:.2e} (< 1e-2)"
        ),
    )
}

pub fn ramp_optimum() -> Outcome {
    let p = SystemParams::uniform(0.1, 0.0, 0.2).expect("finite");
    let curve = ramp_scan(
        &p,
        &reference(),
        0.2,
        (-0.4, 0.4),
        81,
        &SweepOptions::default(),
    )
    .expect("scan integrates");
    let (best, e) = curve.argmax().expect("non-empty curve");
    let at_target = curve
        .delta_r_values
        .iter()
        .zip(&curve.efficiencies)
        .find(|(x, _)| within(**x, -0.1, 0.0))
        .map_or(f64::NAN, |(_, e)| *e);
    Outcome::new(
        "C4",
        "ramp endpoint optimum",
        within(best, -0.1, 0.02),
        format!("argmax at {best:.2} (efficiency {e:.6}); want -0.10 +/- 0.02; efficiency at -0.10 is {at_target:.6}"),
    )
}

pub fn plateau_doubling(sweeps: &[TimedSweep]) -> Outcome {
    let width = |i: usize| widest(&sweeps[i].curve).map_or(0.0, |p| p.width());
    let ratio = width(1) / width(0);
    let half_linear = width(2);
    let linear = extract_plateau(&sweeps[3].curve, PLATEAU_THRESHOLD).expect("valid threshold");
    let linear_none = linear.iter().all(|p| p.width() < 0.05 - GRID_SLACK);
    let passed = within(ratio, 2.0, 0.25) && half_linear >= 0.2 - GRID_SLACK && linear_none;
    Outcome::new(
        "C5",
        "plateau doubling at dm=0.4",
        passed,
        format!(
            "equal {} vs unequal {}: ratio {ratio:.3} (2.0 +/- 0.25); g_l=0 width {half_linear:.2} (>= 0.2); linear {} (want none >= 0.05)",
            fmt_plateau(widest(&sweeps[0].curve).as_ref()),
            fmt_plateau(widest(&sweeps[1].curve).as_ref()),
            fmt_plateau(widest(&sweeps[3].curve).as_ref()),
        ),
    )
}

struct TheoremTally {
    above: usize,
    below: usize,
    total: usize,
}

fn theorem_tally(
    rng: &mut ChaCha8Rng,
    total: usize,
    sample: fn(&mut ChaCha8Rng) -> SystemParamsF64,
    threshold: fn(&SystemParamsF64) -> f64,
) -> TheoremTally {
    let profile = CouplingProfile::Constant;
    let scan = |p: &SystemParamsF64, j0: f64| {
        crossing_oracle(p, j0, &profile, DEFAULT_THETA_SAMPLES).expect("valid scan")
    };
    let mut tally = TheoremTally {
        above: 0,
        below: 0,
        total,
    };
    for _ in 0..total {
        let p = sample(rng);
        let j = threshold(&p);
        if !scan(&p, 1.05 * j).is_empty() {
            tally.above += 1;
        }
        let below = scan(&p, 0.95 * j);
        let branch = predicted_branch(p.g_l, p.g_r);
        if below.is_empty() || below.iter().any(|c| Some(c.branch) != branch) {
            tally.below += 1;
        }
    }
    tally
}

fn theorem_outcome(id: &'static str, title: &'static str, t: TheoremTally) -> Outcome {
    Outcome::new(
        id,
        title,
        t.above == 0 && t.below == 0,
        format!(
            "{} points: {} crossings at 1.05 J0min, {} without a predicted-branch crossing at 0.95 J0min (want 0 and 0)",
            t.total, t.above, t.below
        ),
    )
}

pub fn equal_g_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tally = theorem_tally(&mut rng, 1000, sample_equal_g_interior, |p| {
        j0_min_equal_g(p.g_l, p.delta_m, p.delta_r).expect("inside the zone")
    });
    theorem_outcome("C6a", "threshold theorem, equal g", tally)
}

pub fn unequal_g_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let tally = theorem_tally(&mut rng, 500, sample_positive_unequal_interior, |p| {
        j0_min_unequal_g(p.g_l, p.g_r, p.delta_m, p.delta_r).expect("inside the zone")
    });
    theorem_outcome("C6b", "threshold theorem, unequal g", tally)
}

pub fn algebraic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let draws = 10_000;
    let mut worst = [0.0f64; 6];
    let coupled = |rng: &mut ChaCha8Rng| {
        let theta = rng.gen_range::<f64, _>(0.01..1.56);
        let j = rng.gen_range::<f64, _>(0.01..2.0);
        (theta, j, Couplings::new(j * theta.sin(), j * theta.cos()))
    };
    for _ in 0..draws {
        let g = rng.gen_range::<f64, _>(-1.0..1.0);
        let (dm, dr) = (
            rng.gen_range::<f64, _>(-1.0..1.0),
            rng.gen_range::<f64, _>(-1.0..1.0),
        );
        let p =
            SystemParams::new(g, rng.gen_range::<f64, _>(-1.0..1.0), g, dm, dr).expect("finite");
        let (theta, j, c) = coupled(&mut rng);
        let db = dark_bright_quantities(&p, theta, c).expect("equal g");
        let dd = dressed_quantities(&p, theta, c).expect("above floor");
        let pw = per_well_dark_bright(&p, theta, c);
        let (plus, minus) = dressed_energies(&p, theta, j);
        let reduction = [
            db.eps_d - pw.eps_d,
            db.eps_b - pw.eps_b,
            db.j_db - pw.j_db,
            plus - dd.eps_plus,
            minus - dd.eps_minus,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        let devs = [
            (dd.zeta_plus * dd.zeta_minus + 1.0).abs(),
            (dd.eps_plus + dd.eps_minus - db.eps_b - db.eps_m).abs(),
            db.j_dm.abs(),
            (db.j_bm - c.lm.hypot(c.mr)).abs(),
            reduction,
        ];
        for (w, d) in worst.iter_mut().zip(devs) {
            *w = w.max(d);
        }
    }
    let mut threshold_pairs = 0;
    while threshold_pairs < draws {
        let g = rng.gen_range::<f64, _>(-1.0..1.0);
        let (dm, dr) = (
            rng.gen_range::<f64, _>(-1.0..1.0),
            rng.gen_range::<f64, _>(-1.0..1.0),
        );
        if let (Ok(a), Ok(b)) = (j0_min_unequal_g(g, g, dm, dr), j0_min_equal_g(g, dm, dr)) {
            worst[5] = worst[5].max((a - b).abs());
            threshold_pairs += 1;
        }
    }
    let names = [
        "zeta product",
        "energy sum",
        "J_DM",
        "J_BM norm",
        "equal-g reduction",
        "threshold reduction",
    ];
    let detail = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(
        "C7",
        "algebraic identities",
        worst.iter().all(|&w| w <= 1e-12),
        format!("worst over {draws} draws each: {detail} (all <= 1e-12)"),
    )
}

pub fn decoupling_protocol() -> Outcome {
    let p = SystemParams::uniform(0.1, 0.4, 0.0).expect("finite");
    let s = reference();
    let inside = classify_equal_g(&OzContext::default(), p.g_l, p.delta_m, p.delta_r).inside;
    let traj = integrate(
        &p,
        &s,
        &BiasProtocol::DarkBrightDecoupling,
        &ModeState::left(),
        &StepControl::default(),
    )
    .expect("integrates");
    let worst = traj
        .times
        .iter()
        .zip(&traj.theta)
        .zip(&traj.delta_r_applied)
        .map(|((&t, &theta), &dr)| {
            dark_bright_quantities(&p.with_delta_r(dr), theta, s.couplings(t))
                .map_or(f64::INFINITY, |q| q.j_db.abs())
        })
        .fold(0.0f64, f64::max);
    let e = efficiency(&traj);
    Outcome::new(
        "C8",
        "dark-bright decoupling",
        inside && worst <= 1e-12 && e >= 0.99,
        format!(
            "g=0.1 dm=0.4 (inside: {inside}): max |J_DB| {worst:.1e} over {} samples (<= 1e-12), efficiency {e:.6} (>= 0.99)",
            traj.times.len()
        ),
    )
}

pub fn tolerance_convergence(default: &[TimedSweep], halved: &[TimedSweep]) -> Outcome {
    let worst = default
        .iter()
        .zip(halved)
        .flat_map(|(a, b)| {
            a.curve
                .efficiencies
                .iter()
                .zip(&b.curve.efficiencies)
                .map(|(x, y)| (x - y).abs())
        })
        .fold(0.0f64, f64::max);
    Outcome::new(
        "C9",
        "tolerance convergence",
        worst < 1e-6,
        format!("max efficiency change over the g=-0.3 sweeps with halved tolerances {worst:.1e} (< 1e-6)"),
    )
}

/// Plateau ends against the zone interval on the same grid, for every sweep
/// configuration used above.
pub fn plateau_zone_agreement(sweeps: &[&TimedSweep]) -> Outcome {
    let ctx = OzContext::default();
    let mut passed = true;
    let mut parts = Vec::new();
    for s in sweeps {
        let cell = s.curve.spacing().expect("at least two points");
        let plateau = widest(&s.curve);
        let zone = oz_interval_on_grid(&ctx, &s.params, &s.curve.delta_r_values);
        let ok = match (plateau, zone) {
            (None, None) => true,
            (Some(p), Some((lo, hi))) => {
                within(p.lo, lo, 2.0 * cell) && within(p.hi, hi, 2.0 * cell)
            }
            _ => false,
        };
        passed &= ok;
        let p = s.params;
        parts.push(format!(
            "({}, {}, {}) plateau {} zone {}{}",
            p.g_l,
            p.g_r,
            p.delta_m,
            fmt_plateau(plateau.as_ref()),
            zone.map_or_else(
                || "none".to_string(),
                |(lo, hi)| format!("[{lo:.2}, {hi:.2}]")
            ),
            if ok { "" } else { " MISMATCH" }
        ));
    }
    Outcome::new(
        "S1",
        "plateau/zone agreement within 2 cells",
        passed,
        parts.join("; "),
    )
}

/// Unequal-g threshold formula against the bisected crossing threshold.
pub fn unequal_threshold_bisection() -> Outcome {
    let p = SystemParams::new(0.1, 0.2, 0.3, 0.4, 0.05).expect("finite");
    let formula: f64 = j0_min_unequal_g(0.1, 0.3, 0.4, 0.05).expect("inside the zone");
    let bisected = crossing_threshold(
        &p,
        &CouplingProfile::Constant,
        DEFAULT_THETA_SAMPLES,
        0.0,
        2.0,
        1e-7,
    )
    .expect("bracketed");
    Outcome::new(
        "S2",
        "unequal-g threshold vs crossing bisection",
        (formula - bisected).abs() <= 1e-3,
        format!(
            "(0.1, 0.3, 0.4, 0.05): formula {formula:.6}, bisection {bisected:.6} (agree to 1e-3)"
        ),
    )
}

/// Every check, in order.
pub fn run_all() -> Vec<Outcome> {
    let negative = negative_g_sweeps(StepControl::default());
    let halved = negative_g_sweeps(StepControl::default().scaled(0.5));
    let positive = positive_g_sweeps();
    let agreement: Vec<&TimedSweep> = negative.iter().take(3).chain(positive.iter()).collect();
    vec![
        linear_transfer(),
        negative_g_plateaus(&negative),
        zone_geometry(),
        ramp_optimum(),
        plateau_doubling(&positive),
        equal_g_theorem(),
        unequal_g_theorem(),
        algebraic_identities(),
        decoupling_protocol(),
        tolerance_convergence(&negative, &halved),
        plateau_zone_agreement(&agreement),
        unequal_threshold_bisection(),
    ]
}
