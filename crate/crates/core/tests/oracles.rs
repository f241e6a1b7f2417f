//! Reference values computed independently with 40-digit mpmath arithmetic
//! and frozen here, plus qualitative checks against the reference results.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use sap_core::dynamics::{efficiency, integrate, BiasProtocol, StepControl};
use sap_core::model::{bare_hamiltonian, Couplings, ModeState, PulseSchedule, SystemParams};
use sap_core::optimal_zone::{
    cf_curve, ci_curve, classify_unequal_g, crossing_oracle, crossing_threshold, j0_min_equal_g,
    j0_min_unequal_g, oz_membership_equal_g, oz_membership_unequal_g, Branch, CouplingProfile,
    OzCase, OzContext, TailCouplings, DEFAULT_THETA_SAMPLES,
};
use sap_core::selftest::endpoint_conditions;
use sap_core::spectral::{dark_energy, dressed_energies, spectral_trajectory};
use sap_core::sweeps::{extract_plateau, ramp_scan, SweepOptions};

const TAIL: f64 = 5.086_069_231_012_701e-3;

fn profiles() -> [CouplingProfile<f64>; 2] {
    [
        CouplingProfile::Constant,
        CouplingProfile::reference_schedule(),
    ]
}

#[test]
fn tail_couplings_of_reference_schedule() {
    let s = PulseSchedule::<f64>::reference();
    let (initial_mr, final_lm) = s.tail_couplings();
    assert_relative_eq!(initial_mr, TAIL, max_relative = 1e-14);
    assert_relative_eq!(final_lm, TAIL, max_relative = 1e-14);
    let tails = TailCouplings::from_schedule(&s);
    assert_eq!(
        tails,
        TailCouplings {
            initial_mr,
            final_lm
        }
    );
}

#[test]
fn hamiltonian_substitution() {
    let p = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
    let h = bare_hamiltonian(&p, &ModeState::left(), Couplings::new(0.0, 1.0));
    assert_eq!(h, [[0.1, 0.0, 0.0], [0.0, 0.15, -0.5], [0.0, -0.5, 0.0]]);
}

#[test]
fn boundary_curve_values() {
    assert_abs_diff_eq!(
        ci_curve(-0.3, -0.9, 5.1e-3).unwrap(),
        -0.300_021_675,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(
        ci_curve(-0.3, -0.9, TAIL).unwrap(),
        -0.300_021_556_750_185_55,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(
        cf_curve(-0.3, -0.9, 0.0, Branch::Minus),
        -0.6,
        epsilon = 1e-15
    );
    assert_abs_diff_eq!(
        cf_curve(0.0, 0.0, TAIL, Branch::Plus),
        2.543_034_615_506_350_2e-3,
        epsilon = 1e-17
    );
}

#[test]
fn equal_g_threshold_value_and_bracket() {
    let j = j0_min_equal_g(-0.3, -0.9, 0.2).unwrap();
    assert_abs_diff_eq!(j, 0.339_934_634_239_519, epsilon = 1e-15);
    let p = SystemParams::uniform(-0.3, -0.9, 0.2).unwrap();
    for profile in profiles() {
        assert!(
            !crossing_oracle(&p, 0.9 * j, &profile, DEFAULT_THETA_SAMPLES)
                .unwrap()
                .is_empty()
        );
        assert!(
            crossing_oracle(&p, 1.1 * j, &profile, DEFAULT_THETA_SAMPLES)
                .unwrap()
                .is_empty()
        );
    }
    let bisected = crossing_threshold(
        &p,
        &CouplingProfile::Constant,
        DEFAULT_THETA_SAMPLES,
        0.0,
        2.0,
        1e-7,
    )
    .unwrap();
    assert_abs_diff_eq!(bisected, j, epsilon = 1e-3);
}

#[test]
fn unequal_g_threshold_value_is_sufficient() {
    let j: f64 = j0_min_unequal_g(0.1, 0.3, 0.4, 0.05).unwrap();
    assert_abs_diff_eq!(j, 0.225_909_619_649_097_72, epsilon = 1e-15);
    let p = SystemParams::new(0.1, 0.2, 0.3, 0.4, 0.05).unwrap();
    for profile in profiles() {
        assert!(
            crossing_oracle(&p, 1.05 * j, &profile, DEFAULT_THETA_SAMPLES)
                .unwrap()
                .is_empty()
        );
    }
}

#[test]
fn membership_examples() {
    assert!(oz_membership_equal_g(-0.3, -0.7, 0.0).inside);
    let v = oz_membership_equal_g(-0.3, 0.0, 0.0);
    assert!(!v.inside);
    assert!(v.violated.contains(&"delta_m < g"));
    assert!(oz_membership_equal_g(0.1, 0.15, 0.0).inside);

    let v = oz_membership_unequal_g(0.1, 0.3, 0.4, 0.0);
    assert!(v.inside);
    assert_eq!(v.case_id, OzCase::I);
    assert!(!oz_membership_unequal_g(0.0, 0.0, 0.0, 0.2).inside);
}

fn ordered_at_ends(p: &SystemParams<f64>) -> bool {
    [(0.0, TAIL), (std::f64::consts::FRAC_PI_2, TAIL)]
        .iter()
        .all(|&(theta, j)| {
            let (plus, minus) = dressed_energies(p, theta, j);
            let d = dark_energy(p, theta);
            minus < d && d < plus
        })
}

#[test]
fn mixed_sign_membership_agrees_with_endpoint_energies() {
    let ctx = OzContext::default();
    let v = classify_unequal_g(&ctx, -0.1, 0.3, 0.4, 0.1);
    assert!(v.case_id.is_reversed());
    assert!(!v.inside);
    assert!(!endpoint_conditions(-0.1, 0.3, 0.4, 0.1));
    assert!(!ordered_at_ends(
        &SystemParams::new(-0.1, 0.1, 0.3, 0.4, 0.1).unwrap()
    ));
    let v = classify_unequal_g(&ctx, -0.1, 0.3, 0.4, -0.2);
    assert!(v.inside, "{v:?}");
    assert!(ordered_at_ends(
        &SystemParams::new(-0.1, 0.1, 0.3, 0.4, -0.2).unwrap()
    ));
}

#[test]
fn crossing_scan_examples() {
    let gap = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
    let linear = SystemParams::uniform(0.0, 0.0, 0.0).unwrap();
    for profile in profiles() {
        assert!(crossing_oracle(&gap, 1.0, &profile, DEFAULT_THETA_SAMPLES)
            .unwrap()
            .is_empty());
        for j0 in [0.01, 1.0, 5.0] {
            assert!(
                crossing_oracle(&linear, j0, &profile, DEFAULT_THETA_SAMPLES)
                    .unwrap()
                    .is_empty()
            );
        }
    }
    let crossing = SystemParams::uniform(0.1, 0.05, 0.3).unwrap();
    let found = crossing_oracle(
        &crossing,
        1.0,
        &CouplingProfile::reference_schedule(),
        DEFAULT_THETA_SAMPLES,
    )
    .unwrap();
    assert!(found.iter().any(|c| c.branch == Branch::Plus));
    assert!(found
        .iter()
        .all(|c| c.theta_at > 0.0 && c.theta_at < std::f64::consts::FRAC_PI_2));
}

#[test]
fn energy_ordering_along_schedule() {
    let s = PulseSchedule::reference();
    let inside =
        spectral_trajectory(&SystemParams::uniform(0.1, 0.15, 0.0).unwrap(), &s, 801).unwrap();
    assert!(inside
        .iter()
        .all(|x| x.dd.eps_minus < x.db.eps_d && x.db.eps_d < x.dd.eps_plus));
    let outside =
        spectral_trajectory(&SystemParams::uniform(0.1, 0.05, 0.3).unwrap(), &s, 801).unwrap();
    let signs: Vec<bool> = outside.iter().map(|x| x.db.eps_d > x.dd.eps_plus).collect();
    assert!(signs.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn plateau_point_transfers() {
    let p = SystemParams::uniform(-0.3, -0.9, 0.0).unwrap();
    let t = integrate(
        &p,
        &PulseSchedule::reference(),
        &BiasProtocol::Static,
        &ModeState::left(),
        &StepControl::default(),
    )
    .unwrap();
    assert!(efficiency(&t) >= 0.99);
}

#[test]
fn linear_ramp_scan_peaks_near_final_resonance() {
    let p = SystemParams::uniform(0.0, 0.0, 0.2).unwrap();
    let s = PulseSchedule::reference();
    let curve = ramp_scan(&p, &s, 0.2, (-0.4, 0.4), 81, &SweepOptions::default()).unwrap();
    let (best, _) = curve.argmax().unwrap();
    let targets = [Branch::Plus, Branch::Minus].map(|b| cf_curve(0.0, 0.0, TAIL, b));
    let plateaus = extract_plateau(&curve, 0.99).unwrap();
    let around = plateaus
        .iter()
        .find(|pl| pl.lo <= best && best <= pl.hi)
        .expect("argmax in a plateau");
    assert!(
        targets.iter().all(|&x| around.lo <= x && x <= around.hi),
        "{around:?} vs {targets:?}"
    );
}
