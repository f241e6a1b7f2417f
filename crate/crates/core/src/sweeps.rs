//! Parameter sweeps: efficiency against the right-well bias, plateau
//! extraction, final-bias scans under a linear ramp and verdict rasters over
//! the `(δ_M, δ_R)` plane.

use rayon::prelude::*;

use crate::dynamics::{efficiency, integrate, BiasProtocol, StepControl};
use crate::error::{Result, SapError};
use crate::model::{ModeState, PulseSchedule, SystemParams};
use crate::optimal_zone::{
    cf_curve, ci_curve, classify_equal_g, classify_unequal_g, Branch, OzContext, OzVerdict,
};
use crate::scalar::Real;

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)
                }
            })
            .collect(),
    }
}

/// `n` cell centres tiling `[lo, hi]`.
pub fn cell_centres<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let width = (hi - lo) / T::from_usize_lossy(n);
    (0..n)
        .map(|k| lo + width * (T::from_usize_lossy(k) + T::lit(0.5)))
        .collect()
}

/// What each point of a scan varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanKind<T> {
    /// The static bias `δ_R`, integrated under the given protocol.
    Bias(BiasProtocol<T>),
    /// The end value of a linear ramp starting at `initial`.
    RampFinal { initial: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCurve<T> {
    /// Scanned bias values, strictly increasing.
    pub delta_r_values: Vec<T>,
    pub efficiencies: Vec<T>,
    pub params_used: SystemParams<T>,
    pub kind: ScanKind<T>,
}

impl<T: Real> EfficiencyCurve<T> {
    pub fn len(&self) -> usize {
        self.delta_r_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_r_values.is_empty()
    }

    /// Bias value with the highest efficiency (first one on ties).
    pub fn argmax(&self) -> Option<(T, T)> {
        self.delta_r_values
            .iter()
            .zip(&self.efficiencies)
            .fold(None, |best, (&x, &e)| match best {
                Some((_, be)) if be >= e => best,
                _ => Some((x, e)),
            })
    }

    pub fn spacing(&self) -> Option<T> {
        (self.len() >= 2).then(|| self.delta_r_values[1] - self.delta_r_values[0])
    }
}

/// Closed bias interval on which the efficiency stays at or above `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau<T> {
    pub lo: T,
    pub hi: T,
    pub threshold: T,
}

impl<T: Real> Plateau<T> {
    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Execution settings shared by all scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions<T> {
    pub control: StepControl<T>,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub initial: ModeState<T>,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        SweepOptions {
            control: StepControl::default(),
            workers: None,
            initial: ModeState::left(),
        }
    }
}

fn check_points(n_points: usize) -> Result<()> {
    if n_points < 2 {
        return Err(SapError::invalid(
            "points",
            format!("need at least 2, got {n_points}"),
        ));
    }
    Ok(())
}

fn check_range<T: Real>(range: (T, T)) -> Result<()> {
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(SapError::invalid("range", "need finite lo < hi"));
    }
    Ok(())
}

/// Evaluates `job` on every value with a worker pool and returns results in
/// input order.
fn run_pool<T: Real, F>(values: &[T], workers: Option<usize>, job: F) -> Result<Vec<T>>
where
    F: Fn(T) -> Result<T> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(SapError::invalid("workers", "must be >= 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| SapError::invalid("workers", format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<T>> = pool.install(|| values.par_iter().map(|&v| job(v)).collect());
    values
        .iter()
        .zip(results)
        .map(|(&v, r)| {
            r.map_err(|e| SapError::SweepPoint {
                delta: v.to_f64_lossy(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Transfer efficiency on `n_points` bias values spanning `range`. The
/// template's own `δ_R` is replaced at every point; it only acts on the
/// Hamiltonian when `protocol` is static.
pub fn sweep_delta_r<T: Real>(
    params: &SystemParams<T>,
    schedule: &PulseSchedule<T>,
    range: (T, T),
    n_points: usize,
    protocol: &BiasProtocol<T>,
    options: &SweepOptions<T>,
) -> Result<EfficiencyCurve<T>> {
    check_points(n_points)?;
    check_range(range)?;
    params.validate()?;
    schedule.validate()?;
    let values = linspace(range.0, range.1, n_points);
    let efficiencies = run_pool(&values, options.workers, |dr| {
        integrate(
            &params.with_delta_r(dr),
            schedule,
            protocol,
            &options.initial,
            &options.control,
        )
        .map(|t| efficiency(&t))
    })?;
    Ok(EfficiencyCurve {
        delta_r_values: values,
        efficiencies,
        params_used: *params,
        kind: ScanKind::Bias(*protocol),
    })
}

/// Efficiency as a function of the final bias of a linear ramp from `initial`.
pub fn ramp_scan<T: Real>(
    params: &SystemParams<T>,
    schedule: &PulseSchedule<T>,
    initial: T,
    final_range: (T, T),
    n_points: usize,
    options: &SweepOptions<T>,
) -> Result<EfficiencyCurve<T>> {
    check_points(n_points)?;
    check_range(final_range)?;
    params.validate()?;
    schedule.validate()?;
    let values = linspace(final_range.0, final_range.1, n_points);
    let efficiencies = run_pool(&values, options.workers, |final_| {
        let protocol = BiasProtocol::LinearRamp { initial, final_ };
        integrate(
            &params.with_delta_r(initial),
            schedule,
            &protocol,
            &options.initial,
            &options.control,
        )
        .map(|t| efficiency(&t))
    })?;
    Ok(EfficiencyCurve {
        delta_r_values: values,
        efficiencies,
        params_used: params.with_delta_r(initial),
        kind: ScanKind::RampFinal { initial },
    })
}

/// Maximal runs of consecutive grid points meeting `threshold`. Isolated
/// points, which enclose no interval, are not reported.
pub fn extract_plateau<T: Real>(
    curve: &EfficiencyCurve<T>,
    threshold: T,
) -> Result<Vec<Plateau<T>>> {
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(SapError::invalid("threshold", "must lie in (0, 1)"));
    }
    let mut plateaus = Vec::new();
    let mut start: Option<usize> = None;
    let n = curve.len();
    for i in 0..=n {
        let ok = i < n && curve.efficiencies[i] >= threshold;
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - 1 > s {
                    plateaus.push(Plateau {
                        lo: curve.delta_r_values[s],
                        hi: curve.delta_r_values[i - 1],
                        threshold,
                    });
                }
                start = None;
            }
            _ => {}
        }
    }
    Ok(plateaus)
}

/// Widest plateau of a curve, if any.
pub fn widest_plateau<T: Real>(
    curve: &EfficiencyCurve<T>,
    threshold: T,
) -> Result<Option<Plateau<T>>> {
    Ok(extract_plateau(curve, threshold)?
        .into_iter()
        .fold(None, |best: Option<Plateau<T>>, p| match best {
            Some(b) if b.width() >= p.width() => Some(b),
            _ => Some(p),
        }))
}

/// Boundary curves sampled at one `δ_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample<T> {
    pub delta_m: T,
    /// `None` at the pole `δ_M = g_L`.
    pub ci: Option<T>,
    pub cf_plus: T,
    pub cf_minus: T,
}

/// Verdicts on a cell-centred `(δ_M, δ_R)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OzRaster<T> {
    pub g_l: T,
    pub g_r: T,
    pub delta_m: Vec<T>,
    pub delta_r: Vec<T>,
    /// Row-major: `cells[i * delta_r.len() + j]` is at `(delta_m[i], delta_r[j])`.
    pub cells: Vec<OzVerdict<T>>,
    pub boundaries: Vec<BoundarySample<T>>,
}

impl<T: Real> OzRaster<T> {
    pub fn cell(&self, i: usize, j: usize) -> &OzVerdict<T> {
        &self.cells[i * self.delta_r.len() + j]
    }

    pub fn cell_area(&self) -> T {
        let step = |v: &[T]| if v.len() >= 2 { v[1] - v[0] } else { T::zero() };
        step(&self.delta_m) * step(&self.delta_r)
    }

    pub fn inside_count(&self) -> usize {
        self.cells.iter().filter(|v| v.inside).count()
    }

    pub fn inside_area(&self) -> T {
        T::from_usize_lossy(self.inside_count()) * self.cell_area()
    }

    /// Smallest and largest inside `δ_R` in row `i`.
    pub fn inside_span(&self, i: usize) -> Option<(T, T)> {
        let row = (0..self.delta_r.len()).filter(|&j| self.cell(i, j).inside);
        let (mut lo, mut hi) = (None, None);
        for j in row {
            lo.get_or_insert(self.delta_r[j]);
            hi = Some(self.delta_r[j]);
        }
        lo.zip(hi)
    }
}

/// Verdict raster and boundary polylines. Equal outer nonlinearities use the
/// equal-g inequality set, everything else the per-well sets.
pub fn oz_raster<T: Real>(
    g_l: T,
    g_r: T,
    delta_m_range: (T, T),
    delta_r_range: (T, T),
    resolution: usize,
    ctx: &OzContext<T>,
) -> Result<OzRaster<T>> {
    if resolution == 0 {
        return Err(SapError::invalid("resolution", "must be >= 1"));
    }
    check_range(delta_m_range)?;
    check_range(delta_r_range)?;
    if !(g_l.is_finite() && g_r.is_finite()) {
        return Err(SapError::invalid("g", "must be finite"));
    }
    let delta_m = cell_centres(delta_m_range.0, delta_m_range.1, resolution);
    let delta_r = cell_centres(delta_r_range.0, delta_r_range.1, resolution);
    let mut cells = Vec::with_capacity(resolution * resolution);
    for &dm in &delta_m {
        for &dr in &delta_r {
            cells.push(if g_l == g_r {
                classify_equal_g(ctx, g_l, dm, dr)
            } else {
                classify_unequal_g(ctx, g_l, g_r, dm, dr)
            });
        }
    }
    let boundaries = delta_m
        .iter()
        .map(|&dm| BoundarySample {
            delta_m: dm,
            ci: ci_curve(g_l, dm, ctx.tails.initial_mr).ok(),
            cf_plus: cf_curve(g_r, dm, ctx.tails.final_lm, Branch::Plus),
            cf_minus: cf_curve(g_r, dm, ctx.tails.final_lm, Branch::Minus),
        })
        .collect();
    Ok(OzRaster {
        g_l,
        g_r,
        delta_m,
        delta_r,
        cells,
        boundaries,
    })
}

/// Ends of the inside interval along a bias grid at fixed `δ_M`, for
/// comparison with a plateau on the same grid.
pub fn oz_interval_on_grid<T: Real>(
    ctx: &OzContext<T>,
    params: &SystemParams<T>,
    grid: &[T],
) -> Option<(T, T)> {
    let inside = |dr: T| {
        if params.g_l == params.g_r {
            classify_equal_g(ctx, params.g_l, params.delta_m, dr).inside
        } else {
            classify_unequal_g(ctx, params.g_l, params.g_r, params.delta_m, dr).inside
        }
    };
    let mut hits = grid.iter().copied().filter(|&dr| inside(dr));
    let lo = hits.next()?;
    let hi = hits.last().unwrap_or(lo);
    Some((lo, hi))
}
