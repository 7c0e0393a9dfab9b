#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use enteff_core::qmath::{ComplexMatrix, DensityMatrix, ProductStateParams};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_params(rng: &mut StdRng) -> ProductStateParams {
    ProductStateParams::new(
        rng.gen_range(0.0..=FRAC_PI_2),
        rng.gen_range(0.0..TAU),
        rng.gen_range(0.0..=FRAC_PI_2),
        rng.gen_range(0.0..TAU),
    )
    .unwrap()
}

pub fn random_complex(rng: &mut StdRng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, n, (0..n * n).map(|_| random_complex(rng)).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut StdRng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n);
    a.mix(&a.adjoint(), 0.5).unwrap()
}

/// `G G^dagger / tr`, full rank almost surely.
pub fn random_density(rng: &mut StdRng) -> DensityMatrix {
    let g = random_matrix(rng, 4);
    let m = g.matmul(&g.adjoint()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(C64::new(1.0 / tr, 0.0))).unwrap()
}

/// Random SU(2) element from Euler angles.
pub fn random_unitary_2(rng: &mut StdRng) -> ComplexMatrix {
    let t: f64 = rng.gen_range(0.0..FRAC_PI_2);
    let b: f64 = rng.gen_range(0.0..TAU);
    let g: f64 = rng.gen_range(0.0..TAU);
    ComplexMatrix::new(
        2,
        2,
        vec![
            C64::from_polar(t.cos(), b),
            C64::from_polar(t.sin(), g),
            -C64::from_polar(t.sin(), -g),
            C64::from_polar(t.cos(), -b),
        ],
    )
    .unwrap()
}

/// Negativity of a pure two-qubit state `a|00> + b|01> + c|10> + d|11>`
/// equals `|ad - bc|` (product of its Schmidt coefficients).
pub fn pure_state_negativity(v: &[C64]) -> f64 {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (v[0] * v[3] - v[1] * v[2]).norm() / n
}
