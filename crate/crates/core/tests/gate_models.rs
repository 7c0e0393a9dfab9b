mod common;

use common::*;
use enteff_core::gates::*;
use enteff_core::measures::negativity;
use enteff_core::qmath::{product_state_vector, ProductStateParams};
use rand::Rng;
use std::f64::consts::{PI, TAU};

fn phase(x: f64) -> PhaseShift {
    PhaseShift::new(x).unwrap()
}

fn output_negativity<G: GateModel>(g: &G, p: &ProductStateParams) -> (f64, f64) {
    let e = g.evaluate(p).unwrap();
    let n = e.output_density.as_ref().map(|r| negativity(r).unwrap()).unwrap_or(0.0);
    (e.success_probability, n)
}

#[test]
fn cphase_numeric_negativity_matches_closed_form() {
    let mut r = rng(10);
    for k in 0..=100 {
        let phi = phase(k as f64 * PI / 100.0);
        let g = cphase_gate(phi);
        for _ in 0..200 {
            let p = random_params(&mut r);
            let (_, n) = output_negativity(&g, &p);
            let expected = cphase_negativity_closed_form(phi, p.theta1, p.theta2);
            assert!((n - expected).abs() <= 1e-9, "phi={phi:?} {p:?}: {n} vs {expected}");
        }
    }
}

#[test]
fn cphase_success_is_state_independent() {
    let mut r = rng(11);
    for phi in [0.3, 1.0, PI, 4.0] {
        let g = cphase_gate(phase(phi));
        let ps: Vec<f64> = (0..100)
            .map(|_| g.evaluate(&random_params(&mut r)).unwrap().success_probability)
            .collect();
        let spread = ps.iter().cloned().fold(f64::MIN, f64::max) - ps.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-12);
    }
}

#[test]
fn cphase_success_is_not_monotone() {
    let at_pi = cphase_success_probability(phase(PI));
    let min = (0..=100)
        .map(|k| cphase_success_probability(phase(k as f64 * PI / 100.0)))
        .fold(f64::MAX, f64::min);
    assert!(min < at_pi - 1e-4, "min {min}");
}

#[test]
fn generalized_output_norm_matches_success_formula() {
    let mut r = rng(12);
    for _ in 0..200 {
        let phi = phase(r.gen_range(0.0..TAU));
        let p = random_params(&mut r);
        let v = product_state_vector(&p);
        let out = generalized_cphase_operator(phi).mul_vec(&v).unwrap();
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        let expected = generalized_success_probability(phi, p.theta1, p.theta2);
        assert!((norm - expected).abs() <= 1e-12);
        let e = generalized_cphase_gate(phi).evaluate(&p).unwrap();
        assert!((e.success_probability - expected).abs() <= 1e-12);
    }
}

#[test]
fn generalized_numeric_negativity_matches_closed_form() {
    let mut r = rng(13);
    for _ in 0..500 {
        let phi = phase(r.gen_range(0.0..TAU));
        let p = random_params(&mut r);
        let (_, n) = output_negativity(&generalized_cphase_gate(phi), &p);
        let expected = generalized_negativity_closed_form(phi, p.theta1, p.theta2).unwrap();
        assert!((n - expected).abs() <= 1e-9);
    }
}

#[test]
fn relative_phases_do_not_matter() {
    let mut r = rng(14);
    for _ in 0..100 {
        let phi = phase(r.gen_range(0.0..PI));
        let p = random_params(&mut r);
        let q = ProductStateParams::new(p.theta1, r.gen_range(0.0..TAU), p.theta2, r.gen_range(0.0..TAU)).unwrap();
        for g in [
            Box::new(cphase_gate(phi)) as Box<dyn GateModel>,
            Box::new(generalized_cphase_gate(phi)),
        ] {
            let (pa, na) = output_negativity(&g, &p);
            let (pb, nb) = output_negativity(&g, &q);
            assert!((na - nb).abs() <= 1e-10);
            assert!((pa - pb).abs() <= 1e-12);
        }
        assert_eq!(
            cphase_negativity_closed_form(phi, p.theta1, p.theta2),
            cphase_negativity_closed_form(phi, q.theta1, q.theta2)
        );
    }
}

#[test]
fn exchanging_qubits_is_symmetric() {
    let mut r = rng(15);
    for _ in 0..100 {
        let phi = phase(r.gen_range(0.0..PI));
        let p = random_params(&mut r);
        let swapped = ProductStateParams::new(p.theta2, p.phi2, p.theta1, p.phi1).unwrap();
        let g = generalized_cphase_gate(phi);
        let (pa, na) = output_negativity(&g, &p);
        let (pb, nb) = output_negativity(&g, &swapped);
        assert!((pa - pb).abs() <= 1e-12);
        assert!((na - nb).abs() <= 1e-10);
        let forward = generalized_success_probability(phi, p.theta1, p.theta2);
        let backward = generalized_success_probability(phi, p.theta2, p.theta1);
        assert!((forward - backward).abs() <= 1e-15);
    }
}

#[test]
fn gate_evaluation_is_deterministic() {
    let p = ProductStateParams::new(0.4, 1.0, 1.3, 2.0).unwrap();
    let g = generalized_cphase_gate(phase(1.7));
    assert_eq!(g.evaluate(&p).unwrap(), g.evaluate(&p).unwrap());
}

#[test]
fn success_probability_is_mirror_symmetric_about_pi() {
    for k in 1..100 {
        let d = k as f64 * PI / 100.0;
        let below = cphase_success_probability(phase(PI - d));
        let above = cphase_success_probability(phase(PI + d));
        assert!((below - above).abs() <= 1e-12);
        assert!(above <= 1.0);
    }
}
