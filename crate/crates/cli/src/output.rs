//! Deterministic CSV emission: header row, LF line endings and floats with
//! 17 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use sap_core::dynamics::Trajectory;
use sap_core::optimal_zone::OzVerdict;
use sap_core::selftest::SelftestReport;
use sap_core::spectral::SpectralSnapshot;
use sap_core::sweeps::{BoundarySample, EfficiencyCurve, OzRaster};

use crate::error::CliError;

/// Column layout of one output table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const SIMULATE: Schema = Schema {
    name: "simulate",
    columns: &[
        "t",
        "re_a_l",
        "im_a_l",
        "re_a_m",
        "im_a_m",
        "re_a_r",
        "im_a_r",
        "pop_l",
        "pop_m",
        "pop_r",
        "delta_r_applied",
        "norm",
    ],
};

pub const ENERGIES: Schema = Schema {
    name: "energies",
    columns: &[
        "t",
        "theta",
        "eps_d",
        "eps_plus",
        "eps_minus",
        "j_lm",
        "j_mr",
        "j_bm",
        "j_db",
        "nonadiabatic_scale",
    ],
};

pub const SWEEP_BIAS: Schema = Schema {
    name: "sweep-bias",
    columns: &["delta_r", "efficiency"],
};

pub const RAMP_SCAN: Schema = Schema {
    name: "ramp-scan",
    columns: &["delta_r_final", "efficiency"],
};

pub const OZ_BOUNDARIES: Schema = Schema {
    name: "oz-boundaries",
    columns: &[
        "delta_m",
        "delta_r_ci",
        "delta_r_cf_plus",
        "delta_r_cf_minus",
    ],
};

pub const OZ_RASTER: Schema = Schema {
    name: "oz-raster",
    columns: &["delta_m", "delta_r", "inside", "case_id", "j0_min"],
};

pub const SELFTEST: Schema = Schema {
    name: "selftest",
    columns: &["check", "passed", "counted", "detail"],
};

/// Float with 17 significant digits, which round-trips exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Where a table goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_option(path: Option<&Path>) -> Sink {
        path.map_or(Sink::Stdout, |p| Sink::File(p.to_path_buf()))
    }

    fn label(&self) -> PathBuf {
        match self {
            Sink::Stdout => PathBuf::from("<stdout>"),
            Sink::File(p) => p.clone(),
        }
    }
}

/// Renders `rows` under `schema` into CSV bytes.
pub fn render_csv(schema: &Schema, rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let wrap = |source| CliError::Csv {
        path: PathBuf::from(schema.name),
        source,
    };
    w.write_record(schema.columns).map_err(wrap)?;
    for row in rows {
        if row.len() != schema.columns.len() {
            return Err(CliError::Schema {
                schema: schema.name,
                expected: schema.columns.len(),
                got: row.len(),
            });
        }
        w.write_record(row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from(schema.name),
        source: e.into_error(),
    })
}

/// Writes `rows` under `schema` to `sink`.
pub fn emit_csv(rows: &[Vec<String>], schema: &Schema, sink: &Sink) -> Result<(), CliError> {
    let bytes = render_csv(schema, rows)?;
    let io = |source| CliError::Io {
        path: sink.label(),
        source,
    };
    match sink {
        Sink::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).map_err(io)?;
            out.flush().map_err(io)
        }
        Sink::File(path) => std::fs::write(path, bytes).map_err(io),
    }
}

pub fn trajectory_rows(traj: &Trajectory<f64>) -> Vec<Vec<String>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .zip(&traj.delta_r_applied)
        .map(|((&t, s), &dr)| {
            let [l, m, r] = s.amplitudes;
            let pops = s.populations();
            [
                t,
                l.re,
                l.im,
                m.re,
                m.im,
                r.re,
                r.im,
                pops[0],
                pops[1],
                pops[2],
                dr,
                s.norm_sqr(),
            ]
            .into_iter()
            .map(fmt_float)
            .collect()
        })
        .collect()
}

pub fn snapshot_row(s: &SpectralSnapshot<f64>) -> Vec<String> {
    [
        s.t,
        s.theta,
        s.db.eps_d,
        s.dd.eps_plus,
        s.dd.eps_minus,
        s.couplings.lm,
        s.couplings.mr,
        s.db.j_bm,
        s.db.j_db,
        s.nonadiabatic_scale,
    ]
    .into_iter()
    .map(fmt_float)
    .collect()
}

pub fn curve_rows(curve: &EfficiencyCurve<f64>) -> Vec<Vec<String>> {
    curve
        .delta_r_values
        .iter()
        .zip(&curve.efficiencies)
        .map(|(&x, &e)| vec![fmt_float(x), fmt_float(e)])
        .collect()
}

pub fn boundary_rows(samples: &[BoundarySample<f64>]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|b| {
            vec![
                fmt_float(b.delta_m),
                fmt_opt(b.ci),
                fmt_float(b.cf_plus),
                fmt_float(b.cf_minus),
            ]
        })
        .collect()
}

fn verdict_row(dm: f64, dr: f64, v: &OzVerdict<f64>) -> Vec<String> {
    vec![
        fmt_float(dm),
        fmt_float(dr),
        v.inside.to_string(),
        v.case_id.as_str().to_string(),
        fmt_opt(v.j0_min),
    ]
}

pub fn raster_rows(raster: &OzRaster<f64>) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(raster.cells.len());
    for (i, &dm) in raster.delta_m.iter().enumerate() {
        for (j, &dr) in raster.delta_r.iter().enumerate() {
            rows.push(verdict_row(dm, dr, raster.cell(i, j)));
        }
    }
    rows
}

pub fn selftest_rows(report: &SelftestReport) -> Vec<Vec<String>> {
    report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_string(),
                c.passed.to_string(),
                (!c.informational).to_string(),
                c.detail.clone(),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_for_no_records() {
        let bytes = render_csv(&SWEEP_BIAS, &[]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "delta_r,efficiency\n");
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let err = render_csv(&SWEEP_BIAS, &[vec!["1".into()]]).unwrap_err();
        assert!(matches!(
            err,
            CliError::Schema {
                expected: 2,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn floats_round_trip() {
        for x in [
            0.1,
            -1.0 / 3.0,
            6.02214076e23,
            5e-324,
            0.0,
            -0.0,
            1.0 - f64::EPSILON,
        ] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
    }
}
