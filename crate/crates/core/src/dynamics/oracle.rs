//! Dense reference propagator: builds the full `4n x 4n` grid Hamiltonian in
//! position space and exponentiates it through its eigen-decomposition.

use nalgebra::{DMatrix, DVector};

use super::field::SpinorField;
use crate::algebra::Complex;
use crate::error::{Error, Result};
use crate::pairsim::PotentialSpec;
use crate::planewave::PhysConsts;

pub const MAX_ORACLE_POINTS: usize = 128;

/// Spectral momentum matrix `P_jl = (1/n) sum_m p_m exp(2 pi i m (j - l) / n)`.
fn momentum_matrix(field: &SpinorField, k: &PhysConsts) -> DMatrix<Complex> {
    let grid = field.grid;
    let n = grid.n();
    let p = grid.momenta(k);
    let kernel: Vec<Complex> = (0..n)
        .map(|d| {
            p.iter()
                .enumerate()
                .map(|(m, pm)| {
                    let theta = 2.0 * std::f64::consts::PI * (m * d % n) as f64 / n as f64;
                    Complex::from_polar(*pm, theta)
                })
                .sum::<Complex>()
                / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |j, l| kernel[(j + n - l) % n])
}

/// Position-space Dirac Hamiltonian, basis index `component * n + j`.
pub fn grid_hamiltonian(
    field: &SpinorField,
    potential: &[f64],
    k: &PhysConsts,
) -> DMatrix<Complex> {
    let n = field.grid.n();
    let pmat = momentum_matrix(field, k);
    let mc2 = k.rest_energy();
    let mut h = DMatrix::<Complex>::zeros(4 * n, 4 * n);
    // alpha_x couples components (0,3) and (1,2)
    for (a, b) in [(0usize, 3usize), (3, 0), (1, 2), (2, 1)] {
        for j in 0..n {
            for l in 0..n {
                h[(a * n + j, b * n + l)] = pmat[(j, l)] * k.c;
            }
        }
    }
    for a in 0..4 {
        let mass = if a < 2 { mc2 } else { -mc2 };
        for j in 0..n {
            h[(a * n + j, a * n + j)] += Complex::new(mass + potential[j], 0.0);
        }
    }
    h
}

/// Applies `exp(-i H dt n_steps / hbar)` to `field` using a dense eigen-decomposition.
pub fn dense_evolve_oracle(
    field: &SpinorField,
    dt: f64,
    n_steps: usize,
    potential: &PotentialSpec,
    k: &PhysConsts,
) -> Result<SpinorField> {
    let n = field.grid.n();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::TooLarge { n });
    }
    let v = potential.sample(&field.grid)?;
    let h = grid_hamiltonian(field, &v, k);
    let eig = h.symmetric_eigen();
    let t = dt * n_steps as f64;

    let psi = DVector::from_iterator(4 * n, field.comps.iter().flatten().copied());
    let mut coeff = eig.eigenvectors.adjoint() * psi;
    for (c, lambda) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= Complex::from_polar(1.0, -lambda * t / k.hbar);
    }
    let out = &eig.eigenvectors * coeff;

    let mut result = field.clone();
    for a in 0..4 {
        for j in 0..n {
            result.comps[a][j] = out[a * n + j];
        }
    }
    result.time = field.time + t;
    Ok(result)
}
