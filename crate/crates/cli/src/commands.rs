use std::path::{Path, PathBuf};

use sap_core::dynamics::{efficiency, integrate};
use sap_core::model::ModeState;
use sap_core::optimal_zone::OzContext;
use sap_core::selftest::{run_selftest, SelftestSizes};
use sap_core::spectral::spectral_trajectory;
use sap_core::sweeps::{extract_plateau, oz_raster, ramp_scan, sweep_delta_r, SweepOptions};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{self, emit_csv, Sink};

fn sweep_options(cfg: &RunConfig) -> SweepOptions<f64> {
    SweepOptions {
        control: cfg.control,
        workers: cfg.workers,
        initial: ModeState::left(),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let sink = Sink::from_option(cfg.out.as_deref());
    match cfg.command {
        Command::Simulate => {
            let traj = integrate(
                &cfg.params,
                &cfg.schedule,
                &cfg.protocol,
                &ModeState::left(),
                &cfg.control,
            )?;
            emit_csv(&output::trajectory_rows(&traj), &output::SIMULATE, &sink)?;
            eprintln!(
                "efficiency {} norm_drift {:e}",
                output::fmt_float(efficiency(&traj)),
                traj.norm_drift
            );
        }
        Command::Energies => {
            let snaps = spectral_trajectory(&cfg.params, &cfg.schedule, cfg.points)?;
            let rows: Vec<_> = snaps.iter().map(output::snapshot_row).collect();
            emit_csv(&rows, &output::ENERGIES, &sink)?;
        }
        Command::OzMap => {
            let ctx = OzContext::from_schedule(&cfg.schedule);
            let raster = oz_raster(
                cfg.params.g_l,
                cfg.params.g_r,
                cfg.delta_m_range,
                cfg.range,
                cfg.points,
                &ctx,
            )?;
            let prefix = cfg.out.clone().unwrap_or_else(|| PathBuf::from("oz-map"));
            emit_csv(
                &output::boundary_rows(&raster.boundaries),
                &output::OZ_BOUNDARIES,
                &Sink::File(with_suffix(&prefix, ".boundaries.csv")),
            )?;
            emit_csv(
                &output::raster_rows(&raster),
                &output::OZ_RASTER,
                &Sink::File(with_suffix(&prefix, ".raster.csv")),
            )?;
        }
        Command::SweepBias => {
            let curve = sweep_delta_r(
                &cfg.params,
                &cfg.schedule,
                cfg.range,
                cfg.points,
                &cfg.protocol,
                &sweep_options(cfg),
            )?;
            emit_csv(&output::curve_rows(&curve), &output::SWEEP_BIAS, &sink)?;
            for p in extract_plateau(&curve, cfg.threshold)? {
                eprintln!("plateau {} {} width {}", p.lo, p.hi, p.width());
            }
        }
        Command::RampScan => {
            let initial = match cfg.protocol {
                sap_core::dynamics::BiasProtocol::LinearRamp { initial, .. } => initial,
                _ => cfg.params.delta_r,
            };
            let curve = ramp_scan(
                &cfg.params,
                &cfg.schedule,
                initial,
                cfg.range,
                cfg.points,
                &sweep_options(cfg),
            )?;
            emit_csv(&output::curve_rows(&curve), &output::RAMP_SCAN, &sink)?;
            if let Some((x, e)) = curve.argmax() {
                eprintln!("argmax delta_r_final {x} efficiency {e}");
            }
        }
        Command::Selftest => {
            let report = run_selftest(cfg.seed, &SelftestSizes::default());
            emit_csv(&output::selftest_rows(&report), &output::SELFTEST, &sink)?;
            let failed = report
                .checks
                .iter()
                .filter(|c| !c.passed && !c.informational)
                .count();
            if failed > 0 {
                return Err(CliError::SelftestFailed { failed });
            }
        }
    }
    Ok(())
}
