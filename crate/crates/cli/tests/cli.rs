use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use sap_cli::config::{parse_config_text, Overrides, ProtocolKind};
use sap_cli::output::{render_csv, snapshot_row, ENERGIES};
use sap_cli::{parse_config, Cli, CliError, RunConfig};
use sap_core::dynamics::BiasProtocol;
use sap_core::model::{PulseSchedule, SystemParams};
use sap_core::spectral::spectral_trajectory;

fn sap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(stdout: &[u8]) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_reader(stdout);
    r.records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|f| f.parse::<f64>().unwrap())
                .collect()
        })
        .collect()
}

fn parse(args: &[&str]) -> RunConfig {
    let cli = Cli::try_parse_from(std::iter::once("sap").chain(args.iter().copied())).unwrap();
    parse_config(&cli).unwrap()
}

#[test]
fn defaults_reproduce_linear_resonant_run() {
    let out = sap(&["simulate"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with(
        "t,re_a_l,im_a_l,re_a_m,im_a_m,re_a_r,im_a_r,pop_l,pop_m,pop_r,delta_r_applied,norm\n"
    ));
    assert!(!text.contains('\r'));
    let data = rows(&out.stdout);
    assert_eq!(data.len(), 2000);
    let last = data.last().unwrap();
    assert_eq!(last[0], 600.0);
    assert!(last[9] >= 0.999, "efficiency {}", last[9]);
    assert!((last[11] - 1.0).abs() < 1e-8);
}

#[test]
fn default_config_matches_reference_schedule() {
    let cfg = parse(&["simulate"]);
    let reference = PulseSchedule::<f64>::reference();
    assert_eq!(cfg.schedule, reference);
    assert_eq!(cfg.params, SystemParams::uniform(0.0, 0.0, 0.0).unwrap());
    assert_eq!(cfg.protocol, BiasProtocol::Static);
}

#[test]
fn negative_flags_select_sweep_configuration() {
    let cfg = parse(&["--g", "-0.3", "--delta-m", "-0.9", "sweep-bias"]);
    assert_eq!(cfg.params, SystemParams::uniform(-0.3, -0.9, 0.0).unwrap());
    assert_eq!(cfg.points, 121);
    assert_eq!(cfg.range, (-0.6, 0.6));
    assert_eq!(cfg.threshold, 0.99);
    let after = parse(&["sweep-bias", "--g", "-0.3", "--range", "-0.2,0.2"]);
    assert_eq!(after.range, (-0.2, 0.2));
}

#[test]
fn middle_well_defaults_to_outer_mean() {
    let cfg = parse(&["--g-l", "0.1", "--g-r", "0.3", "sweep-bias"]);
    assert!((cfg.params.g_m - 0.2).abs() < 1e-15);
    let cfg = parse(&["--g-l", "0.1", "--g-r", "0.3", "--g-m", "0.0", "sweep-bias"]);
    assert_eq!(cfg.params.g_m, 0.0);
}

#[test]
fn ramp_protocol_endpoints() {
    let cfg = parse(&[
        "--protocol",
        "ramp",
        "--delta-r-initial",
        "0.2",
        "--delta-r-final",
        "-0.1",
        "simulate",
    ]);
    assert_eq!(
        cfg.protocol,
        BiasProtocol::LinearRamp {
            initial: 0.2,
            final_: -0.1
        }
    );
}

#[test]
fn zero_sigma_is_rejected() {
    let out = sap(&["simulate", "--sigma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn invalid_values_name_the_key() {
    let out = sap(&["sweep-bias", "--threshold", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold"));
    let out = sap(&["sweep-bias", "--points", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sap(&["simulate", "--g-l", "0.1", "--protocol", "decouple"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sap(&["simulate", "--j0", "abc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_values_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# sweep setup\ng = -0.3\ndelta-m = -0.9 # trailing\n\nprotocol = static\npoints = 7\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let cfg = parse(&["--config", p, "sweep-bias"]);
    assert_eq!(cfg.params.g_l, -0.3);
    assert_eq!(cfg.params.delta_m, -0.9);
    assert_eq!(cfg.points, 7);
    let cfg = parse(&["--config", p, "--points", "9", "--g", "0.1", "sweep-bias"]);
    assert_eq!(cfg.points, 9);
    assert_eq!(cfg.params.g_r, 0.1);
    assert_eq!(cfg.params.delta_m, -0.9);
}

#[test]
fn config_file_errors() {
    let path = Path::new("x.cfg");
    assert!(matches!(
        parse_config_text("bogus = 1\n", path),
        Err(CliError::UnknownKey { line: 1, .. })
    ));
    assert!(matches!(
        parse_config_text("g 0.1\n", path),
        Err(CliError::Syntax { line: 1, .. })
    ));
    let err = parse_config_text("sigma = wide\n", path).unwrap_err();
    assert!(err.to_string().contains("sigma"));
    assert_eq!(err.exit_code(), 2);
    let o = parse_config_text("protocol = decouple\nrange = -0.1, 0.3\n", path).unwrap();
    assert_eq!(o.protocol, Some(ProtocolKind::Decouple));
    assert_eq!(o.range, Some((-0.1, 0.3)));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "points = 5\nbogus = 3\n").unwrap();
    let out = sap(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = sap(&["--config", "/nonexistent/sap.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn overrides_layering() {
    let top = Overrides {
        g: Some(0.1),
        ..Overrides::default()
    };
    let bottom = Overrides {
        g: Some(0.5),
        sigma: Some(100.0),
        ..Overrides::default()
    };
    let merged = top.over(bottom);
    assert_eq!(merged.g, Some(0.1));
    assert_eq!(merged.sigma, Some(100.0));
}

#[test]
fn output_is_byte_deterministic() {
    let args = [
        "--g",
        "-0.3",
        "--delta-m",
        "-0.9",
        "sweep-bias",
        "--points",
        "4",
        "--range",
        "-0.1,0.2",
    ];
    let a = sap(&args);
    let b = sap(&[&args[..], &["--workers", "1"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(rows(&a.stdout).len(), 4);
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sim.csv");
    let out = sap(&[
        "simulate",
        "--points",
        "11",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let content = std::fs::read(&file).unwrap();
    assert_eq!(rows(&content).len(), 11);
    let out = sap(&["simulate", "--out", "/nonexistent/dir/sim.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn energies_have_ten_columns() {
    let out = sap(&[
        "energies",
        "--g",
        "0.1",
        "--delta-m",
        "0.15",
        "--points",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let data = rows(&out.stdout);
    assert_eq!(data.len(), 5);
    assert!(data.iter().all(|r| r.len() == 10));

    let p = SystemParams::uniform(0.1, 0.15, 0.0).unwrap();
    let snaps = spectral_trajectory(&p, &PulseSchedule::reference(), 2).unwrap();
    let bytes = render_csv(&ENERGIES, &[snapshot_row(&snaps[0])]).unwrap();
    let back = rows(&bytes);
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].len(), 10);
    assert_eq!(back[0][2].to_bits(), snaps[0].db.eps_d.to_bits());
    assert_eq!(back[0][9].to_bits(), snaps[0].nonadiabatic_scale.to_bits());
}

#[test]
fn oz_map_writes_two_tables() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("zone");
    let out = sap(&[
        "--g",
        "-0.3",
        "oz-map",
        "--points",
        "10",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let boundaries = std::fs::read_to_string(dir.path().join("zone.boundaries.csv")).unwrap();
    let raster = std::fs::read_to_string(dir.path().join("zone.raster.csv")).unwrap();
    assert!(boundaries.starts_with("delta_m,delta_r_ci,delta_r_cf_plus,delta_r_cf_minus\n"));
    assert_eq!(boundaries.lines().count(), 11);
    assert!(raster.starts_with("delta_m,delta_r,inside,case_id,j0_min\n"));
    assert_eq!(raster.lines().count(), 101);
    assert!(raster.contains(",true,g-negative,"));
}

#[test]
fn ramp_scan_reports_curve() {
    let out = sap(&[
        "--g",
        "0.1",
        "--protocol",
        "ramp",
        "--delta-r-initial",
        "0.2",
        "ramp-scan",
        "--points",
        "3",
        "--range",
        "-0.2,0.0",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("delta_r_final,efficiency\n"));
    assert_eq!(rows(&out.stdout).len(), 3);
}

#[test]
fn selftest_passes() {
    let out = sap(&["selftest"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,passed,counted,detail\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn exit_codes_by_error_kind() {
    use sap_core::SapError;
    let numerical = CliError::Core(SapError::IntegrationFailed {
        t: 0.0,
        reason: "x".into(),
    });
    assert_eq!(numerical.exit_code(), 3);
    let swept = CliError::Core(SapError::SweepPoint {
        delta: 0.1,
        source: Box::new(SapError::NormDrift {
            drift: 1.0,
            limit: 1e-6,
            t: 0.0,
        }),
    });
    assert_eq!(swept.exit_code(), 3);
    assert_eq!(CliError::SelftestFailed { failed: 1 }.exit_code(), 4);
    let bad = CliError::Core(SapError::InvalidParameter {
        name: "sigma",
        reason: "x".into(),
    });
    assert_eq!(bad.exit_code(), 2);
}

#[test]
fn help_exits_cleanly() {
    let out = sap(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = sap(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
