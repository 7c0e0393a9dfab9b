//! The Fock-space expansion checked against a first-quantized two-photon
//! calculation: each photon independently picks an output port with amplitude
//! given by the single-photon transfer matrix, symmetrized over which photon
//! lands where.

mod common;

use common::*;
use enteff_core::fock::*;
use enteff_core::gates::{beam_splitter_gate, GateModel};
use enteff_core::measures::negativity;
use enteff_core::qmath::ProductStateParams;
use num_complex::Complex64 as C64;
use rand::Rng;
use std::f64::consts::FRAC_PI_2;

/// Coincidence vector `-T psi1 (x) psi2 + R psi2 (x) psi1`, port c first.
fn coincidence_oracle(t: f64, p: &ProductStateParams) -> [C64; 4] {
    let r = 1.0 - t;
    // transfer[out_port][in_port]
    let transfer = [[t.sqrt(), r.sqrt()], [r.sqrt(), -t.sqrt()]];
    let a = p.first_qubit();
    let b = p.second_qubit();
    let mut v = [C64::new(0.0, 0.0); 4];
    for x in 0..2 {
        for y in 0..2 {
            // photon from a -> c, from b -> d
            let direct = transfer[0][0] * transfer[1][1] * a[x] * b[y];
            // photon from a -> d, from b -> c
            let crossed = transfer[1][0] * transfer[0][1] * a[y] * b[x];
            v[2 * x + y] = direct + crossed;
        }
    }
    v
}

fn simulate(t: f64, p: &ProductStateParams) -> (FockAmplitudes, [C64; 4], f64) {
    let out = apply_beam_splitter(&encode_product_input(p), &BeamSplitterSpec::new(t).unwrap());
    let (v, ps) = postselect_coincidence(&out);
    (out, v, ps)
}

#[test]
fn unitarity_before_postselection() {
    let mut r = rng(1);
    for _ in 0..200 {
        let t = r.gen_range(0.0..=1.0);
        let p = random_params(&mut r);
        let (out, _, ps) = simulate(t, &p);
        assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
        assert!(ps <= 1.0 + 1e-12);
        for (occ, _) in out.terms() {
            assert_eq!(FockAmplitudes::photon_number(occ), 2);
        }
    }
}

#[test]
fn hom_dip_is_exact() {
    let mut r = rng(2);
    for _ in 0..100 {
        let theta = r.gen_range(0.0..=FRAC_PI_2);
        let phi = r.gen_range(0.0..std::f64::consts::TAU);
        let p = ProductStateParams::new(theta, phi, theta, phi).unwrap();
        let (_, _, ps) = simulate(0.5, &p);
        assert!(ps <= 1e-12, "coincidence {ps}");
    }
}

#[test]
fn simulator_matches_first_quantized_oracle() {
    let mut r = rng(3);
    for _ in 0..200 {
        let t = r.gen_range(0.0..=1.0);
        let p = random_params(&mut r);
        let (_, v, _) = simulate(t, &p);
        let expected = coincidence_oracle(t, &p);
        for k in 0..4 {
            assert!((v[k] - expected[k]).norm() <= 1e-12);
        }
    }
}

#[test]
fn simulator_matches_closed_forms() {
    let mut r = rng(4);
    for _ in 0..100 {
        let t: f64 = r.gen_range(0.0..=1.0);
        let rr = 1.0 - t;
        let theta: f64 = r.gen_range(0.0..=FRAC_PI_2);
        let phi = r.gen_range(0.0..std::f64::consts::TAU);
        let p = ProductStateParams::new(0.0, 0.0, theta, phi).unwrap();
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        let ps_expected = c2 * (rr - t).powi(2) + s2 * (t * t + rr * rr);

        let eval = beam_splitter_gate(BeamSplitterSpec::new(t).unwrap()).evaluate(&p).unwrap();
        assert!((eval.success_probability - ps_expected).abs() <= 1e-10);
        if let Some(rho) = eval.output_density {
            let n_expected = t * rr * s2 / ps_expected;
            assert!((negativity(&rho).unwrap() - n_expected).abs() <= 1e-9);
        }
    }
}

#[test]
fn general_transmittance_example() {
    let theta: f64 = 0.6;
    let p = ProductStateParams::new(0.0, 0.0, theta, 1.1).unwrap();
    let (t, rr) = (0.3, 0.7);
    let (_, v, ps) = simulate(t, &p);
    assert!((v[0] - C64::new(theta.cos() * (rr - t), 0.0)).norm() <= 1e-12);
    assert!((v[1] - C64::from_polar(theta.sin(), 1.1) * -t).norm() <= 1e-12);
    assert!((v[2] - C64::from_polar(theta.sin(), 1.1) * rr).norm() <= 1e-12);
    let expected = theta.cos().powi(2) * 0.16 + theta.sin().powi(2) * 0.58;
    assert!((ps - expected).abs() <= 1e-12);
}

#[test]
fn exchange_symmetry_of_ports() {
    let mut r = rng(5);
    for _ in 0..100 {
        let t = r.gen_range(0.0..=1.0);
        let theta = r.gen_range(0.0..=FRAC_PI_2);
        let phi = r.gen_range(0.0..std::f64::consts::TAU);
        let gate = beam_splitter_gate(BeamSplitterSpec::new(t).unwrap());
        let e1 = gate.evaluate(&ProductStateParams::new(0.0, 0.0, theta, phi).unwrap()).unwrap();
        let e2 = gate.evaluate(&ProductStateParams::new(theta, phi, 0.0, 0.0).unwrap()).unwrap();
        assert!((e1.success_probability - e2.success_probability).abs() <= 1e-12);
        match (e1.output_density, e2.output_density) {
            (Some(a), Some(b)) => {
                assert!((negativity(&a).unwrap() - negativity(&b).unwrap()).abs() <= 1e-9)
            }
            (None, None) => {}
            _ => panic!("success flags differ"),
        }
    }
}

#[test]
fn balanced_splitter_values() {
    for k in 1..=20 {
        let theta = k as f64 * FRAC_PI_2 / 20.0;
        let eval = beam_splitter_gate(BeamSplitterSpec::balanced())
            .evaluate(&ProductStateParams::real(0.0, theta))
            .unwrap();
        assert!((eval.success_probability - theta.sin().powi(2) / 2.0).abs() <= 1e-12);
        let n = negativity(eval.output_density.as_ref().unwrap()).unwrap();
        assert!((n - 0.5).abs() <= 1e-9);
    }
}
