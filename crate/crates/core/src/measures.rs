//! Negativity, entangling power and entangling efficiency.
//!
//! Both gate measures are maxima over pure product inputs: a uniform grid over
//! `(theta1, phi1, theta2, phi2)` followed by a coordinate-wise golden-section
//! refinement from the best grid point.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gates::GateModel;
use crate::qmath::{trace_norm_hermitian, DensityMatrix, ProductStateParams, Subsystem};

/// Grid values within this of the maximum are ties; the lowest index wins.
pub const TIE_TOL: f64 = 1e-12;

const NEGATIVITY_CLAMP: f64 = 1e-10;
const MAX_REFINE_PASSES: usize = 500;
const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// `(||rho^{T_A}||_1 - 1) / 2` for a two-qubit density matrix.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = rho.partial_transpose(Subsystem::A)?;
    let n = (trace_norm_hermitian(&pt)? - 1.0) / 2.0;
    if (-NEGATIVITY_CLAMP..0.0).contains(&n) {
        return Ok(0.0);
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Output negativity (entangling power).
    Negativity,
    /// Success probability times output negativity (entangling efficiency).
    Product,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub grid_points_per_angle: usize,
    pub refine: bool,
    pub refine_tolerance: f64,
    /// Hold `phi1 = phi2 = 0`; valid for gates whose measures ignore the phases.
    pub reduced_phase_search: bool,
    /// Hold the first qubit at `|0>` (`theta1 = phi1 = 0`).
    pub fix_first_qubit: bool,
    /// Evaluate grid points on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points_per_angle: 15,
            refine: true,
            refine_tolerance: 1e-8,
            reduced_phase_search: false,
            fix_first_qubit: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Theta1,
    Phi1,
    Theta2,
    Phi2,
}

impl Axis {
    const ALL: [Axis; 4] = [Axis::Theta1, Axis::Phi1, Axis::Theta2, Axis::Phi2];

    fn index(self) -> usize {
        self as usize
    }

    fn is_phase(self) -> bool {
        matches!(self, Axis::Phi1 | Axis::Phi2)
    }

    /// Grid values: `theta` includes both endpoints of `[0, pi/2]`, `phi`
    /// samples `[0, 2 pi)` without the duplicate endpoint.
    fn grid(self, n: usize) -> Vec<f64> {
        if self.is_phase() {
            (0..n).map(|k| k as f64 * TAU / n as f64).collect()
        } else {
            (0..n).map(|k| k as f64 * FRAC_PI_2 / (n - 1) as f64).collect()
        }
    }

    fn spacing(self, n: usize) -> f64 {
        if self.is_phase() {
            TAU / n as f64
        } else {
            FRAC_PI_2 / (n - 1) as f64
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_angle < 2 {
            return Err(Error::ParameterRange {
                name: "grid_points_per_angle",
                value: self.grid_points_per_angle as f64,
                range: ">= 2",
            });
        }
        if !(self.refine_tolerance > 0.0) {
            return Err(Error::ParameterRange {
                name: "refine_tolerance",
                value: self.refine_tolerance,
                range: "> 0",
            });
        }
        Ok(())
    }

    fn active(&self, axis: Axis) -> bool {
        match axis {
            Axis::Theta1 => !self.fix_first_qubit,
            Axis::Phi1 => !self.fix_first_qubit && !self.reduced_phase_search,
            Axis::Theta2 => true,
            Axis::Phi2 => !self.reduced_phase_search,
        }
    }

    fn active_axes(&self) -> Vec<Axis> {
        Axis::ALL.into_iter().filter(|&a| self.active(a)).collect()
    }

    /// Number of grid records a scan will produce.
    pub fn grid_size(&self) -> usize {
        self.grid_points_per_angle
            .pow(self.active_axes().len() as u32)
    }

    /// Grid points in enumeration order, `theta1` outermost and `phi2` innermost.
    pub fn grid(&self) -> Vec<ProductStateParams> {
        let axes: Vec<Vec<f64>> = Axis::ALL
            .iter()
            .map(|&a| {
                if self.active(a) {
                    a.grid(self.grid_points_per_angle)
                } else {
                    vec![0.0]
                }
            })
            .collect();
        let mut out = Vec::with_capacity(self.grid_size());
        for &t1 in &axes[0] {
            for &p1 in &axes[1] {
                for &t2 in &axes[2] {
                    for &p2 in &axes[3] {
                        out.push(ProductStateParams {
                            theta1: t1,
                            phi1: p1,
                            theta2: t2,
                            phi2: p2,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One evaluated input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRecord {
    pub index: usize,
    pub params: ProductStateParams,
    pub success_probability: f64,
    pub negativity: f64,
    pub product: f64,
}

impl GridRecord {
    pub fn value(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Negativity => self.negativity,
            Objective::Product => self.product,
        }
    }
}

/// Success probability and output negativity; a failed run counts as zero
/// entanglement.
fn evaluate_point<G: GateModel + ?Sized>(gate: &G, params: &ProductStateParams) -> Result<(f64, f64)> {
    let eval = gate.evaluate(params)?;
    let n = match &eval.output_density {
        Some(rho) => negativity(rho).map_err(|e| e.at(*params))?,
        None => 0.0,
    };
    Ok((eval.success_probability, n))
}

fn record<G: GateModel + ?Sized>(gate: &G, index: usize, params: ProductStateParams) -> Result<GridRecord> {
    let (p, n) = evaluate_point(gate, &params)?;
    Ok(GridRecord {
        index,
        params,
        success_probability: p,
        negativity: n,
        product: if n == 0.0 { 0.0 } else { p * n },
    })
}

/// Evaluates the gate on every grid point, in enumeration order.
pub fn scan_objective<G: GateModel + ?Sized>(gate: &G, cfg: &SearchConfig) -> Result<Vec<GridRecord>> {
    cfg.validate()?;
    let grid = cfg.grid();
    if cfg.parallel {
        grid.into_par_iter()
            .enumerate()
            .map(|(i, p)| record(gate, i, p))
            .collect()
    } else {
        grid.into_iter()
            .enumerate()
            .map(|(i, p)| record(gate, i, p))
            .collect()
    }
}

/// Lowest-index record whose value is within [`TIE_TOL`] of the maximum.
pub fn best_record(records: &[GridRecord], objective: Objective) -> Option<&GridRecord> {
    let max = records
        .iter()
        .map(|r| r.value(objective))
        .fold(f64::NEG_INFINITY, f64::max);
    records.iter().find(|r| r.value(objective) >= max - TIE_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub params: ProductStateParams,
    pub value: f64,
    pub evaluations: usize,
}

struct Counted<'a, G: ?Sized> {
    gate: &'a G,
    objective: Objective,
    evaluations: usize,
}

impl<G: GateModel + ?Sized> Counted<'_, G> {
    fn eval(&mut self, x: [f64; 4]) -> Result<f64> {
        self.evaluations += 1;
        let (p, n) = evaluate_point(self.gate, &ProductStateParams::from_array(x))?;
        Ok(match self.objective {
            Objective::Negativity => n,
            Objective::Product if n == 0.0 => 0.0,
            Objective::Product => p * n,
        })
    }
}

fn place(axis: Axis, value: f64) -> f64 {
    if axis.is_phase() {
        let w = value.rem_euclid(TAU);
        if w >= TAU {
            0.0
        } else {
            w
        }
    } else {
        value.clamp(0.0, FRAC_PI_2)
    }
}

/// Coordinate-wise golden-section ascent from `start`.
///
/// Each pass searches a window of half-width `h` around every active
/// coordinate and only accepts strict improvements. Windows start at the grid
/// spacing and shrink until all are below `cfg.refine_tolerance`. Angles
/// `theta` are clamped to `[0, pi/2]`, phases wrap modulo `2 pi`.
pub fn refine_local<G: GateModel + ?Sized>(
    gate: &G,
    objective: Objective,
    start: ProductStateParams,
    cfg: &SearchConfig,
) -> Result<Refinement> {
    cfg.validate()?;
    let tol = cfg.refine_tolerance;
    let axes = cfg.active_axes();
    let mut f = Counted {
        gate,
        objective,
        evaluations: 0,
    };
    let mut x = start.to_array();
    let mut fx = f.eval(x)?;
    let initial: Vec<f64> = axes
        .iter()
        .map(|a| a.spacing(cfg.grid_points_per_angle))
        .collect();
    let mut steps = initial.clone();

    let mut passes = 0;
    while passes < MAX_REFINE_PASSES && steps.iter().any(|&h| h >= tol) {
        passes += 1;
        for (k, &axis) in axes.iter().enumerate() {
            let h = steps[k];
            if h < tol {
                continue;
            }
            let i = axis.index();
            let centre = x[i];
            let (mut lo, mut hi) = (centre - h, centre + h);
            if !axis.is_phase() {
                lo = lo.max(0.0);
                hi = hi.min(FRAC_PI_2);
            }
            let mut probe = x;
            let mut at = |f: &mut Counted<G>, t: f64| -> Result<f64> {
                probe[i] = place(axis, t);
                f.eval(probe)
            };
            let mut c = hi - INV_GOLDEN * (hi - lo);
            let mut d = lo + INV_GOLDEN * (hi - lo);
            let mut fc = at(&mut f, c)?;
            let mut fd = at(&mut f, d)?;
            while hi - lo > tol {
                if fc >= fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - INV_GOLDEN * (hi - lo);
                    fc = at(&mut f, c)?;
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + INV_GOLDEN * (hi - lo);
                    fd = at(&mut f, d)?;
                }
            }
            let (mut best_t, mut best_f) = if fc >= fd { (c, fc) } else { (d, fd) };
            // The optimum may sit on a clamped boundary.
            for edge in [lo, hi] {
                let fe = at(&mut f, edge)?;
                if fe > best_f {
                    best_t = edge;
                    best_f = fe;
                }
            }
            let moved = if best_f > fx + 1e-15 * fx.abs().max(1.0) {
                let step = (place(axis, best_t) - centre).abs();
                x[i] = place(axis, best_t);
                fx = best_f;
                step
            } else {
                0.0
            };
            steps[k] = (h / 2.0).max(2.0 * moved).min(initial[k]);
            if moved == 0.0 {
                steps[k] = h / 2.0;
            }
        }
    }

    Ok(Refinement {
        params: ProductStateParams::from_array(x),
        value: fx,
        evaluations: f.evaluations,
    })
}

/// Value of a gate measure with the maximizing input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub value: f64,
    pub argmax: ProductStateParams,
    pub success_at_argmax: f64,
    pub negativity_at_argmax: f64,
    pub evaluations: usize,
}

/// Entangling power and efficiency from a single shared grid scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAnalysis {
    pub entangling_power: MeasureReport,
    pub entangling_efficiency: MeasureReport,
}

impl GateAnalysis {
    /// Success probability at the negativity maximizer times the entangling power.
    pub fn ps_maxn_times_ep(&self) -> f64 {
        self.entangling_power.success_at_argmax * self.entangling_power.value
    }
}

fn report_from<G: GateModel + ?Sized>(
    gate: &G,
    objective: Objective,
    records: &[GridRecord],
    cfg: &SearchConfig,
) -> Result<MeasureReport> {
    let seed = best_record(records, objective).expect("grid is never empty");
    let mut evaluations = records.len();
    let argmax = if cfg.refine {
        let r = refine_local(gate, objective, seed.params, cfg)?;
        evaluations += r.evaluations;
        r.params
    } else {
        seed.params
    };
    let (p, n) = evaluate_point(gate, &argmax)?;
    evaluations += 1;
    let value = match objective {
        Objective::Negativity => n,
        Objective::Product if n == 0.0 => 0.0,
        Objective::Product => p * n,
    };
    Ok(MeasureReport {
        value,
        argmax,
        success_at_argmax: p,
        negativity_at_argmax: n,
        evaluations,
    })
}

pub fn maximize<G: GateModel + ?Sized>(gate: &G, objective: Objective, cfg: &SearchConfig) -> Result<MeasureReport> {
    let records = scan_objective(gate, cfg)?;
    report_from(gate, objective, &records, cfg)
}

/// Maximum output negativity over product inputs.
pub fn entangling_power<G: GateModel + ?Sized>(gate: &G, cfg: &SearchConfig) -> Result<MeasureReport> {
    maximize(gate, Objective::Negativity, cfg)
}

/// Maximum of success probability times output negativity over product inputs.
pub fn entangling_efficiency<G: GateModel + ?Sized>(gate: &G, cfg: &SearchConfig) -> Result<MeasureReport> {
    maximize(gate, Objective::Product, cfg)
}

pub fn analyze<G: GateModel + ?Sized>(gate: &G, cfg: &SearchConfig) -> Result<GateAnalysis> {
    let records = scan_objective(gate, cfg)?;
    Ok(GateAnalysis {
        entangling_power: report_from(gate, Objective::Negativity, &records, cfg)?,
        entangling_efficiency: report_from(gate, Objective::Product, &records, cfg)?,
    })
}
