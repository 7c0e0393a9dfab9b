//! Parameter sweeps that emit CSV tables of gate measures.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::Write;

use rayon::prelude::*;

use crate::choi::ChoiGate;
use crate::error::{Error, Result};
use crate::fock::BeamSplitterSpec;
use crate::gates::{beam_splitter_gate, cphase_gate, generalized_cphase_gate, GateModel, PhaseShift};
use crate::measures::{analyze, negativity, GateAnalysis, SearchConfig};
use crate::qmath::ProductStateParams;

#[derive(Debug, Clone)]
pub enum GateKind {
    BeamSplitter,
    CPhase,
    Generalized,
    Choi(ChoiGate),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::BeamSplitter => "bs",
            GateKind::CPhase => "cphase",
            GateKind::Generalized => "generalized",
            GateKind::Choi(_) => "choi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Transmittance,
    Phase,
    Theta1,
}

impl SweepVariable {
    fn column(self) -> &'static str {
        match self {
            SweepVariable::Transmittance => "transmittance",
            SweepVariable::Phase => "phase_rad",
            SweepVariable::Theta1 => "theta1_rad",
        }
    }
}

/// Inclusive, evenly spaced sweep points.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidRequest(msg.into())
}

fn check_range(lo: f64, hi: f64, steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(invalid(format!("steps must be >= 2, got {steps}")));
    }
    if !(lo < hi) {
        return Err(invalid(format!("range must satisfy lo < hi, got {lo}:{hi}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub gate: GateKind,
    pub variable: SweepVariable,
    pub range: (f64, f64),
    pub steps: usize,
    pub search: SearchConfig,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        check_range(lo, hi, self.steps)?;
        self.search.validate()?;
        match (&self.gate, self.variable) {
            (GateKind::BeamSplitter, SweepVariable::Transmittance) => {
                let bad = if lo < 0.0 { Some(lo) } else { (hi > 1.0).then_some(hi) };
                if let Some(value) = bad {
                    return Err(Error::ParameterRange {
                        name: "transmittance",
                        value,
                        range: "[0, 1]",
                    });
                }
            }
            (GateKind::CPhase | GateKind::Generalized, SweepVariable::Phase) => {
                let bad = if lo < 0.0 { Some(lo) } else { (hi >= TAU).then_some(hi) };
                if let Some(value) = bad {
                    return Err(Error::ParameterRange {
                        name: "phase",
                        value,
                        range: "[0, 2 pi)",
                    });
                }
            }
            (_, SweepVariable::Theta1) => {
                return Err(invalid(
                    "theta1 is an input-state parameter; use state-sweep for it",
                ))
            }
            (GateKind::Choi(_), _) => {
                return Err(invalid("a Choi process has no tunable parameter; use choi-analyze"))
            }
            (g, v) => {
                return Err(invalid(format!(
                    "gate {} cannot be swept over {}",
                    g.name(),
                    v.column()
                )))
            }
        }
        Ok(())
    }

    fn gate_at(&self, x: f64) -> Result<Box<dyn GateModel>> {
        Ok(match self.gate {
            GateKind::BeamSplitter => Box::new(beam_splitter_gate(BeamSplitterSpec::new(x)?)),
            GateKind::CPhase => Box::new(cphase_gate(PhaseShift::new(x)?)),
            GateKind::Generalized => Box::new(generalized_cphase_gate(PhaseShift::new(x)?)),
            GateKind::Choi(ref g) => Box::new(g.clone()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub analysis: GateAnalysis,
}

/// Runs the sweep; rows come back in sweep order whether or not the points
/// are computed concurrently.
pub fn run_sweep(req: &SweepRequest) -> Result<Vec<SweepRow>> {
    req.validate()?;
    let xs = linspace(req.range.0, req.range.1, req.steps);
    let point = |x: f64| -> Result<SweepRow> {
        let gate = req.gate_at(x)?;
        Ok(SweepRow {
            x,
            analysis: analyze(&gate, &req.search)?,
        })
    };
    if req.search.parallel {
        xs.into_par_iter().map(point).collect()
    } else {
        xs.into_iter().map(point).collect()
    }
}

/// 17 significant digits; parsing restores the exact value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn angles(p: &ProductStateParams) -> [String; 4] {
    p.to_array().map(fmt_f64)
}

pub fn write_sweep_csv<W: Write>(req: &SweepRequest, rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "{},ps_maxn,e_p,e_eff,ps_maxn_times_e_p,\
         ep_theta1_rad,ep_phi1_rad,ep_theta2_rad,ep_phi2_rad,\
         eeff_success,eeff_theta1_rad,eeff_phi1_rad,eeff_theta2_rad,eeff_phi2_rad",
        req.variable.column()
    )?;
    for row in rows {
        let ep = &row.analysis.entangling_power;
        let ee = &row.analysis.entangling_efficiency;
        let mut fields = vec![
            fmt_f64(row.x),
            fmt_f64(ep.success_at_argmax),
            fmt_f64(ep.value),
            fmt_f64(ee.value),
            fmt_f64(row.analysis.ps_maxn_times_ep()),
        ];
        fields.extend(angles(&ep.argmax));
        fields.push(fmt_f64(ee.success_at_argmax));
        fields.extend(angles(&ee.argmax));
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Output of a single fixed gate as the first qubit's `theta1` varies.
#[derive(Debug, Clone)]
pub struct StateSweepRequest {
    pub gate: GateKind,
    /// Gate phase for `cphase` / `generalized`.
    pub phase: f64,
    /// Transmittance for `bs`.
    pub transmittance: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub range: (f64, f64),
    pub steps: usize,
}

impl StateSweepRequest {
    pub fn new(gate: GateKind) -> Self {
        Self {
            gate,
            phase: std::f64::consts::PI,
            transmittance: 0.5,
            theta2: std::f64::consts::FRAC_PI_4,
            phi1: 0.0,
            phi2: 0.0,
            range: (0.0, FRAC_PI_2),
            steps: 91,
        }
    }

    fn gate(&self) -> Result<Box<dyn GateModel>> {
        Ok(match self.gate {
            GateKind::BeamSplitter => Box::new(beam_splitter_gate(BeamSplitterSpec::new(self.transmittance)?)),
            GateKind::CPhase => Box::new(cphase_gate(PhaseShift::new(self.phase)?)),
            GateKind::Generalized => Box::new(generalized_cphase_gate(PhaseShift::new(self.phase)?)),
            GateKind::Choi(ref g) => Box::new(g.clone()),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        check_range(lo, hi, self.steps)?;
        let bad = if lo < 0.0 { Some(lo) } else { (hi > FRAC_PI_2).then_some(hi) };
        if let Some(value) = bad {
            return Err(Error::ParameterRange {
                name: "theta1",
                value,
                range: "[0, pi/2]",
            });
        }
        ProductStateParams::new(lo, self.phi1, self.theta2, self.phi2)?;
        self.gate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRow {
    pub theta1: f64,
    pub success_probability: f64,
    pub negativity: f64,
    pub product: f64,
}

pub fn run_state_sweep(req: &StateSweepRequest) -> Result<Vec<StateRow>> {
    req.validate()?;
    let gate = req.gate()?;
    linspace(req.range.0, req.range.1, req.steps)
        .into_iter()
        .map(|theta1| {
            let params = ProductStateParams {
                theta1,
                phi1: req.phi1,
                theta2: req.theta2,
                phi2: req.phi2,
            };
            let eval = gate.evaluate(&params)?;
            let n = match &eval.output_density {
                Some(rho) => negativity(rho)?,
                None => 0.0,
            };
            Ok(StateRow {
                theta1,
                success_probability: eval.success_probability,
                negativity: n,
                product: if n == 0.0 { 0.0 } else { n * eval.success_probability },
            })
        })
        .collect()
}

pub fn write_state_csv<W: Write>(rows: &[StateRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "theta1_rad,success_probability,negativity,product")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(r.theta1),
            fmt_f64(r.success_probability),
            fmt_f64(r.negativity),
            fmt_f64(r.product)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn linspace_hits_endpoints() {
        let xs = linspace(0.0, PI, 101);
        assert_eq!(xs.len(), 101);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[100], PI);
        assert_eq!(xs[50], PI / 2.0);
    }

    #[test]
    fn invalid_requests() {
        let base = SweepRequest {
            gate: GateKind::CPhase,
            variable: SweepVariable::Phase,
            range: (0.0, PI),
            steps: 11,
            search: SearchConfig::default(),
        };
        assert!(base.validate().is_ok());
        let bad = [
            SweepRequest { steps: 1, ..base.clone() },
            SweepRequest { range: (1.0, 1.0), ..base.clone() },
            SweepRequest { range: (0.0, 7.0), ..base.clone() },
            SweepRequest { variable: SweepVariable::Transmittance, ..base.clone() },
            SweepRequest { variable: SweepVariable::Theta1, ..base.clone() },
            SweepRequest {
                gate: GateKind::BeamSplitter,
                variable: SweepVariable::Transmittance,
                range: (0.0, 1.5),
                ..base.clone()
            },
        ];
        for r in bad {
            assert!(
                matches!(r.validate(), Err(Error::InvalidRequest(_) | Error::ParameterRange { .. })),
                "{r:?}"
            );
        }
    }

    #[test]
    fn generalized_state_sweep_peaks() {
        let mut req = StateSweepRequest::new(GateKind::Generalized);
        req.steps = 91; // 1 degree spacing
        let rows = run_state_sweep(&req).unwrap();
        let argmax = |f: fn(&StateRow) -> f64| {
            rows.iter()
                .max_by(|a, b| f(a).total_cmp(&f(b)))
                .unwrap()
                .theta1
        };
        assert!((argmax(|r| r.negativity) - FRAC_PI_3).abs() < 1e-9);
        assert!((argmax(|r| r.product) - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn cphase_state_sweep_has_constant_success() {
        let rows = run_state_sweep(&StateSweepRequest::new(GateKind::CPhase)).unwrap();
        assert!(rows.iter().all(|r| (r.success_probability - 1.0 / 9.0).abs() < 1e-15));
        let best = rows.iter().max_by(|a, b| a.negativity.total_cmp(&b.negativity)).unwrap();
        assert!((best.theta1 - FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn balanced_bs_state_sweep_formulas() {
        let mut req = StateSweepRequest::new(GateKind::BeamSplitter);
        req.theta2 = 0.0;
        req.steps = 31;
        for r in run_state_sweep(&req).unwrap() {
            let s2 = r.theta1.sin().powi(2);
            assert!((r.success_probability - s2 / 2.0).abs() < 1e-12);
            assert!((r.product - s2 / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fmt_round_trips() {
        for x in [0.1, 1.0 / 3.0, PI, 1e-300, 0.0, -2.5e17] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
