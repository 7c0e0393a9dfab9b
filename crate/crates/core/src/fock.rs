//! Two-photon Fock-space model of a lossless, polarization-independent beam
//! splitter followed by coincidence post-selection.
//!
//! Four modes: spatial port (0 or 1) times polarization (H = 0, V = 1), with
//! mode index `2 * port + polarization`. Input ports are `a`, `b`; output ports
//! are `c`, `d`. Amplitudes are taken in the normalized occupation basis.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qmath::ProductStateParams;

pub const MODES: usize = 4;

/// Occupation numbers for `[port0_H, port0_V, port1_H, port1_V]`.
pub type Occupation = [u8; MODES];

pub fn mode(port: usize, polarization: usize) -> usize {
    2 * port + polarization
}

/// Sparse two-photon state in the occupation-number basis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockAmplitudes {
    terms: BTreeMap<Occupation, C64>,
}

impl FockAmplitudes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, occupation: Occupation, amplitude: C64) {
        *self.terms.entry(occupation).or_default() += amplitude;
    }

    pub fn amplitude(&self, occupation: &Occupation) -> C64 {
        self.terms.get(occupation).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn photon_number(occupation: &Occupation) -> u32 {
        occupation.iter().map(|&n| n as u32).sum()
    }
}

/// Lossless beam splitter with transmittance `T`; reflectance is always `1 - T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    transmittance: f64,
}

impl BeamSplitterSpec {
    pub fn new(transmittance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::ParameterRange {
                name: "transmittance",
                value: transmittance,
                range: "[0, 1]",
            });
        }
        Ok(Self { transmittance })
    }

    pub fn balanced() -> Self {
        Self { transmittance: 0.5 }
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.transmittance
    }

    /// Output amplitudes `(port c, port d)` for a photon entering `port`.
    ///
    /// Convention: `a -> sqrt(T) c + sqrt(R) d`, `b -> sqrt(R) c - sqrt(T) d`.
    fn port_map(&self, port: usize) -> [f64; 2] {
        let t = self.transmittance.sqrt();
        let r = self.reflectance().sqrt();
        match port {
            0 => [t, r],
            _ => [r, -t],
        }
    }
}

/// Qubit 1 on port `a`, qubit 2 on port `b`, polarization-encoded.
pub fn encode_product_input(p: &ProductStateParams) -> FockAmplitudes {
    let q1 = p.first_qubit();
    let q2 = p.second_qubit();
    let mut state = FockAmplitudes::new();
    for (pol1, &amp1) in q1.iter().enumerate() {
        for (pol2, &amp2) in q2.iter().enumerate() {
            let amp = amp1 * amp2;
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut occ = [0u8; MODES];
            occ[mode(0, pol1)] += 1;
            occ[mode(1, pol2)] += 1;
            state.add(occ, amp);
        }
    }
    state
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

fn occupation_factorials(occ: &Occupation) -> f64 {
    occ.iter().map(|&n| factorial(n)).product()
}

/// Substitutes every input creation operator by its output combination and
/// re-collects the expanded monomials in the normalized occupation basis.
pub fn apply_beam_splitter(state: &FockAmplitudes, bs: &BeamSplitterSpec) -> FockAmplitudes {
    let mut out = FockAmplitudes::new();
    for (occ, &amp) in state.terms() {
        // |n> = prod (a_k^dag)^{n_k} / sqrt(n_k!) |vac>
        let prefactor = amp / occupation_factorials(occ).sqrt();

        // Polynomial in output creation operators, keyed by monomial exponents.
        let mut poly: BTreeMap<Occupation, C64> = BTreeMap::new();
        poly.insert([0; MODES], C64::new(1.0, 0.0));
        for (in_mode, &count) in occ.iter().enumerate() {
            let (port, pol) = (in_mode / 2, in_mode % 2);
            let coeffs = bs.port_map(port);
            for _ in 0..count {
                let mut next = BTreeMap::new();
                for (mono, &c) in &poly {
                    for (out_port, &k) in coeffs.iter().enumerate() {
                        if k == 0.0 {
                            continue;
                        }
                        let mut m = *mono;
                        m[mode(out_port, pol)] += 1;
                        *next.entry(m).or_insert(C64::new(0.0, 0.0)) += c * k;
                    }
                }
                poly = next;
            }
        }
        // prod (c_k^dag)^{m_k} |vac> = sqrt(prod m_k!) |m>
        for (mono, c) in poly {
            out.add(mono, prefactor * c * occupation_factorials(&mono).sqrt());
        }
    }
    out
}

/// Keeps the one-photon-per-output-port component as a two-qubit vector
/// (qubit 1 = polarization in port `c`, qubit 2 = polarization in port `d`)
/// together with its probability.
pub fn postselect_coincidence(state: &FockAmplitudes) -> ([C64; 4], f64) {
    let mut v = [C64::new(0.0, 0.0); 4];
    for (occ, &amp) in state.terms() {
        let in_c = occ[mode(0, 0)] + occ[mode(0, 1)];
        let in_d = occ[mode(1, 0)] + occ[mode(1, 1)];
        if in_c != 1 || in_d != 1 {
            continue;
        }
        let pol_c = usize::from(occ[mode(0, 1)] == 1);
        let pol_d = usize::from(occ[mode(1, 1)] == 1);
        v[2 * pol_c + pol_d] += amp;
    }
    let p = v.iter().map(|z| z.norm_sqr()).sum();
    (v, p)
}
