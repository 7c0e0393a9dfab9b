//! Probabilistic two-qubit gates acting on pure product inputs.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{apply_beam_splitter, encode_product_input, postselect_coincidence, BeamSplitterSpec};
use crate::qmath::{density_from_vector, product_state_vector, ComplexMatrix, DensityMatrix, ProductStateParams};

/// Success probabilities below this are treated as a failed (zero-weight) run.
pub const ZERO_SUCCESS: f64 = 1e-14;

/// Normalized output state and the heralding probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GateEvaluation {
    /// `None` when the success probability is below [`ZERO_SUCCESS`].
    pub output_density: Option<DensityMatrix>,
    pub success_probability: f64,
}

impl GateEvaluation {
    pub fn failed(success_probability: f64) -> Self {
        Self {
            output_density: None,
            success_probability,
        }
    }

    /// Normalizes an unnormalized post-selected output vector.
    pub fn from_unnormalized(v: &[C64]) -> Result<Self> {
        let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if weight < ZERO_SUCCESS {
            return Ok(Self::failed(weight));
        }
        let (rho, weight) = density_from_vector(v, true)?;
        Ok(Self {
            output_density: Some(rho),
            success_probability: weight,
        })
    }

    pub fn is_success(&self) -> bool {
        self.output_density.is_some()
    }
}

/// A (possibly probabilistic) map from product inputs to heralded outputs.
pub trait GateModel: Send + Sync {
    fn label(&self) -> String;

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation>;
}

impl<G: GateModel + ?Sized> GateModel for Box<G> {
    fn label(&self) -> String {
        (**self).label()
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        (**self).evaluate(params)
    }
}

impl<G: GateModel + ?Sized> GateModel for &G {
    fn label(&self) -> String {
        (**self).label()
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        (**self).evaluate(params)
    }
}

/// Conditional phase in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseShift(f64);

impl PhaseShift {
    pub fn new(phi: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::ParameterRange {
                name: "phase",
                value: phi,
                range: "[0, 2 pi)",
            });
        }
        Ok(Self(phi))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// `diag(1, 1, 1, e^{i phi})`.
pub fn cphase_operator(phi: PhaseShift) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&cphase_diagonal(phi))
}

fn cphase_diagonal(phi: PhaseShift) -> [C64; 4] {
    let one = C64::new(1.0, 0.0);
    [one, one, one, C64::from_polar(1.0, phi.0)]
}

/// Highest success probability of a post-selected linear-optical c-phase gate
/// without ancilla photons.
///
/// The closed form holds on `[0, pi]`. Phases in `(pi, 2 pi)` use
/// `p(2 pi - phi)`: the conjugate gate has the same optimum, and the raw
/// expression exceeds 1 as `phi -> 2 pi`.
pub fn cphase_success_probability(phi: PhaseShift) -> f64 {
    let phi = if phi.0 > PI { TAU - phi.0 } else { phi.0 };
    let s = (phi / 2.0).sin().abs();
    let denom = 1.0 + 2.0 * s + 2f64.powf(1.5) * ((PI - phi) / 4.0).sin() * s.sqrt();
    denom.powi(-2)
}

pub fn cphase_negativity_closed_form(phi: PhaseShift, theta1: f64, theta2: f64) -> f64 {
    (2.0 * theta1).sin() / 2.0 * (2.0 * theta2).sin() / 2.0 * (2.0 * (1.0 - phi.0.cos())).sqrt()
}

pub fn cphase_entangling_power_closed_form(phi: PhaseShift) -> f64 {
    SQRT_2 / 4.0 * (1.0 - phi.0.cos()).sqrt()
}

/// Optimal post-selected c-phase gate: unitary action, heralded with a
/// state-independent probability.
#[derive(Debug, Clone, Copy)]
pub struct CPhaseGate {
    phi: PhaseShift,
    success: f64,
}

pub fn cphase_gate(phi: PhaseShift) -> CPhaseGate {
    CPhaseGate {
        phi,
        success: cphase_success_probability(phi),
    }
}

impl CPhaseGate {
    pub fn phase(&self) -> PhaseShift {
        self.phi
    }

    /// Kraus operator `sqrt(p_s) U` of the heralded channel.
    pub fn kraus_operator(&self) -> ComplexMatrix {
        cphase_operator(self.phi).scale(C64::new(self.success.sqrt(), 0.0))
    }
}

impl GateModel for CPhaseGate {
    fn label(&self) -> String {
        format!("cphase(phi={})", self.phi.0)
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        let diag = cphase_diagonal(self.phi);
        let v = product_state_vector(params);
        let out: Vec<C64> = v.iter().zip(diag).map(|(a, d)| a * d).collect();
        if self.success < ZERO_SUCCESS {
            return Ok(GateEvaluation::failed(self.success));
        }
        let (rho, _) = density_from_vector(&out, true).map_err(|e| e.at(*params))?;
        Ok(GateEvaluation {
            output_density: Some(rho),
            success_probability: self.success,
        })
    }
}

fn generalized_diagonal(phi: PhaseShift) -> [C64; 4] {
    let p = cphase_success_probability(phi);
    let q = C64::new(p.powf(0.25), 0.0);
    [C64::new(1.0, 0.0), q, q, C64::from_polar(p.sqrt(), phi.0)]
}

/// `diag(1, p^{1/4}, p^{1/4}, p^{1/2} e^{i phi})` with `p` the c-phase success
/// probability. Non-unitary; the largest singular value is 1.
pub fn generalized_cphase_operator(phi: PhaseShift) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&generalized_diagonal(phi))
}

pub fn generalized_success_probability(phi: PhaseShift, theta1: f64, theta2: f64) -> f64 {
    let p = cphase_success_probability(phi);
    let (c1, s1) = (theta1.cos().powi(2), theta1.sin().powi(2));
    let (c2, s2) = (theta2.cos().powi(2), theta2.sin().powi(2));
    c1 * c2 + p.sqrt() * (c1 * s2 + s1 * c2) + p * s1 * s2
}

pub fn generalized_negativity_closed_form(phi: PhaseShift, theta1: f64, theta2: f64) -> Result<f64> {
    let big_p = generalized_success_probability(phi, theta1, theta2);
    if big_p <= 0.0 {
        return Err(Error::DegenerateState);
    }
    let p = cphase_success_probability(phi);
    Ok((2.0 * theta1).sin() * (2.0 * theta2).sin() / (2.0 * SQRT_2) * p.sqrt()
        * (1.0 - phi.0.cos()).sqrt()
        / big_p)
}

/// The c-phase interferometer without its compensating attenuator; applies a
/// non-unitary diagonal map and heralds with a state-dependent probability.
#[derive(Debug, Clone, Copy)]
pub struct GeneralizedCPhaseGate {
    phi: PhaseShift,
    diag: [C64; 4],
}

pub fn generalized_cphase_gate(phi: PhaseShift) -> GeneralizedCPhaseGate {
    GeneralizedCPhaseGate {
        phi,
        diag: generalized_diagonal(phi),
    }
}

impl GeneralizedCPhaseGate {
    pub fn phase(&self) -> PhaseShift {
        self.phi
    }

    /// Transmissivity `p^{1/4}` of the omitted attenuator: inserting it turns
    /// this device back into the state-independent c-phase gate.
    pub fn filter_transmissivity(&self) -> f64 {
        cphase_success_probability(self.phi).powf(0.25)
    }

    pub fn operator(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.diag)
    }
}

impl GateModel for GeneralizedCPhaseGate {
    fn label(&self) -> String {
        format!("generalized(phi={})", self.phi.0)
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        let v = product_state_vector(params);
        let out: Vec<C64> = v.iter().zip(self.diag).map(|(a, d)| a * d).collect();
        GateEvaluation::from_unnormalized(&out).map_err(|e| e.at(*params))
    }
}

/// Two polarization qubits meeting on a beam splitter, post-selected on one
/// photon per output port.
#[derive(Debug, Clone, Copy)]
pub struct BeamSplitterGate {
    spec: BeamSplitterSpec,
}

pub fn beam_splitter_gate(spec: BeamSplitterSpec) -> BeamSplitterGate {
    BeamSplitterGate { spec }
}

impl BeamSplitterGate {
    pub fn spec(&self) -> BeamSplitterSpec {
        self.spec
    }
}

impl GateModel for BeamSplitterGate {
    fn label(&self) -> String {
        format!("bs(T={})", self.spec.transmittance())
    }

    fn evaluate(&self, params: &ProductStateParams) -> Result<GateEvaluation> {
        let input = encode_product_input(params);
        let output = apply_beam_splitter(&input, &self.spec);
        let (v, _) = postselect_coincidence(&output);
        GateEvaluation::from_unnormalized(&v).map_err(|e| e.at(*params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::negativity;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn phase(x: f64) -> PhaseShift {
        PhaseShift::new(x).unwrap()
    }

    #[test]
    fn cphase_operator_examples() {
        assert_eq!(cphase_operator(phase(0.0)), ComplexMatrix::identity(4));
        let z = cphase_operator(phase(PI));
        assert!((z[(3, 3)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let s = cphase_operator(phase(FRAC_PI_2));
        assert!((s[(3, 3)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn cphase_success_examples() {
        assert!((cphase_success_probability(phase(0.0)) - 1.0).abs() < 1e-15);
        assert!((cphase_success_probability(phase(PI)) - 1.0 / 9.0).abs() < 1e-15);
        // 30-digit evaluation: 0.0904847118248456132419...
        let got = cphase_success_probability(phase(FRAC_PI_2));
        assert!((got - 0.090_484_711_824_845_6).abs() < 1e-15, "{got}");
    }

    #[test]
    fn cphase_gate_examples() {
        let g = cphase_gate(phase(PI));
        let e = g.evaluate(&ProductStateParams::real(FRAC_PI_4, FRAC_PI_4)).unwrap();
        assert!((negativity(e.output_density.as_ref().unwrap()).unwrap() - 0.5).abs() < 1e-12);
        assert!((e.success_probability - 1.0 / 9.0).abs() < 1e-15);

        let e = cphase_gate(phase(1.3))
            .evaluate(&ProductStateParams::new(0.0, 0.0, 0.7, 2.0).unwrap())
            .unwrap();
        assert!(negativity(e.output_density.as_ref().unwrap()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cphase_closed_forms() {
        assert!((cphase_negativity_closed_form(phase(PI), FRAC_PI_4, FRAC_PI_4) - 0.5).abs() < 1e-15);
        assert_eq!(cphase_negativity_closed_form(phase(1.0), 0.0, 0.3), 0.0);
        let v = cphase_negativity_closed_form(phase(FRAC_PI_2), FRAC_PI_4, FRAC_PI_4);
        assert!((v - SQRT_2 / 4.0).abs() < 1e-15);

        assert!((cphase_entangling_power_closed_form(phase(PI)) - 0.5).abs() < 1e-15);
        assert_eq!(cphase_entangling_power_closed_form(phase(0.0)), 0.0);
        let v = cphase_entangling_power_closed_form(phase(FRAC_PI_2));
        assert!((v - SQRT_2 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_operator_examples() {
        assert!(generalized_cphase_operator(phase(0.0)).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let g = generalized_cphase_operator(phase(PI));
        let q = (1.0f64 / 9.0).powf(0.25);
        assert!((g[(1, 1)].re - q).abs() < 1e-15);
        assert!((g[(2, 2)].re - q).abs() < 1e-15);
        assert!((g[(3, 3)] - C64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        for phi in [0.3, 1.0, 2.0, PI, 4.0] {
            let g = generalized_cphase_operator(phase(phi));
            let largest = (0..4).map(|i| g[(i, i)].norm()).fold(0.0, f64::max);
            assert_eq!(largest, 1.0);
        }
    }

    #[test]
    fn generalized_success_examples() {
        let p = generalized_success_probability(phase(PI), FRAC_PI_4, FRAC_PI_4);
        assert!((p - 4.0 / 9.0).abs() < 1e-15);
        assert!((generalized_success_probability(phase(2.0), 0.0, 0.0) - 1.0).abs() < 1e-15);
        let p = generalized_success_probability(phase(PI), FRAC_PI_3, FRAC_PI_4);
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn generalized_negativity_examples() {
        let n = generalized_negativity_closed_form(phase(PI), FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!((n - 3.0 / 8.0).abs() < 1e-15);
        let n = generalized_negativity_closed_form(phase(PI), FRAC_PI_3, FRAC_PI_3).unwrap();
        assert!((n - 0.5).abs() < 1e-15);
        assert_eq!(generalized_negativity_closed_form(phase(1.0), 0.0, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn generalized_gate_matches_closed_forms() {
        let g = generalized_cphase_gate(phase(PI));
        let e = g.evaluate(&ProductStateParams::real(FRAC_PI_4, FRAC_PI_4)).unwrap();
        assert!((e.success_probability - 4.0 / 9.0).abs() < 1e-12);
        let n = negativity(e.output_density.as_ref().unwrap()).unwrap();
        assert!((n - 0.375).abs() < 1e-12);
        assert!((n * e.success_probability - 1.0 / 6.0).abs() < 1e-12);

        let e = g.evaluate(&ProductStateParams::real(FRAC_PI_3, FRAC_PI_4)).unwrap();
        let n = negativity(e.output_density.as_ref().unwrap()).unwrap();
        assert!((n - 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert!(n * e.success_probability < 1.0 / 6.0);
        assert!((n * e.success_probability - 3f64.sqrt() / 12.0).abs() < 1e-12);
    }

    #[test]
    fn filter_restores_standard_gate() {
        let g = generalized_cphase_gate(phase(2.0));
        let gamma = g.filter_transmissivity();
        assert!((gamma.powi(4) - cphase_success_probability(phase(2.0))).abs() < 1e-15);
    }

    #[test]
    fn beam_splitter_gate_examples() {
        let g = beam_splitter_gate(BeamSplitterSpec::balanced());
        let e = g.evaluate(&ProductStateParams::real(0.0, FRAC_PI_2)).unwrap();
        assert!((e.success_probability - 0.5).abs() < 1e-12);
        assert!((negativity(e.output_density.as_ref().unwrap()).unwrap() - 0.5).abs() < 1e-12);

        let g = beam_splitter_gate(BeamSplitterSpec::new(1.0).unwrap());
        for p in [ProductStateParams::real(0.0, FRAC_PI_2), ProductStateParams::new(0.4, 1.0, 1.1, 3.0).unwrap()] {
            let e = g.evaluate(&p).unwrap();
            assert!((e.success_probability - 1.0).abs() < 1e-12);
            assert!(negativity(e.output_density.as_ref().unwrap()).unwrap() < 1e-12);
        }

        let g = beam_splitter_gate(BeamSplitterSpec::new(0.3).unwrap());
        let e = g.evaluate(&ProductStateParams::real(0.0, FRAC_PI_2)).unwrap();
        assert!((e.success_probability - 0.58).abs() < 1e-12);
        let n = negativity(e.output_density.as_ref().unwrap()).unwrap();
        assert!((n - 0.21 / 0.58).abs() < 1e-12);
    }

    #[test]
    fn hom_input_reports_failed_evaluation() {
        let g = beam_splitter_gate(BeamSplitterSpec::balanced());
        let e = g.evaluate(&ProductStateParams::real(0.0, 0.0)).unwrap();
        assert!(!e.is_success());
        assert!(e.success_probability < ZERO_SUCCESS);
    }
}
