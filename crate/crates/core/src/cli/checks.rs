use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    anticommutator, dirac_matrices, eigen_hermitian, hermiticity_defect, Complex, Mat4, Spinor,
};
use crate::error::Result;
use crate::planewave::{
    energy_content, velocity_eigenstate, velocity_expectation, Axis, MomentumPoint, PhysConsts,
    VelocityEigenstateSpec, VelocitySign,
};

pub const ALGEBRA_TOL: f64 = 1e-12;

/// One row of the algebra report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    fn new(name: &str, max_error: f64, tolerance: f64) -> Self {
        CheckRow {
            name: name.into(),
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

/// Random `(a, b)` with `|a|^2 + |b|^2 = 1/2`.
pub fn random_ab(rng: &mut impl Rng) -> (Complex, Complex) {
    let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let (p1, p2) = (
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (
        Complex::from_polar(r * theta.cos(), p1),
        Complex::from_polar(r * theta.sin(), p2),
    )
}

pub fn random_spinor(rng: &mut impl Rng) -> Spinor {
    Spinor(std::array::from_fn(|_| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
    .normalized()
}

fn max_dev(m: &Mat4, want: &Mat4) -> f64 {
    m.max_diff(want)
}

/// Anticommutation, trace, hermiticity and spectrum checks of the Dirac
/// matrices, plus randomized sweeps over velocity eigenstates and spinors.
pub fn algebra_report(
    seed: u64,
    eigenstate_samples: usize,
    spinor_samples: usize,
    k: &PhysConsts,
) -> Result<Vec<CheckRow>> {
    let (alphas, beta) = dirac_matrices();
    let id = Mat4::identity();
    let zero = Mat4::zero();
    let mut rows = Vec::new();

    let mut e = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { id.scale_re(2.0) } else { zero };
            e = e.max(max_dev(&anticommutator(&alphas[i], &alphas[j]), &want));
        }
    }
    rows.push(CheckRow::new("alpha_anticommutators", e, ALGEBRA_TOL));
    let e = alphas
        .iter()
        .map(|a| max_dev(&anticommutator(a, &beta), &zero))
        .fold(0.0, f64::max);
    rows.push(CheckRow::new("alpha_beta_anticommutators", e, ALGEBRA_TOL));
    rows.push(CheckRow::new(
        "beta_squared",
        max_dev(&(beta * beta), &id),
        ALGEBRA_TOL,
    ));
    let all: Vec<Mat4> = alphas.iter().copied().chain([beta]).collect();
    let e = all.iter().map(|m| m.trace().norm()).fold(0.0, f64::max);
    rows.push(CheckRow::new("traceless", e, ALGEBRA_TOL));
    let e = all.iter().map(hermiticity_defect).fold(0.0, f64::max);
    rows.push(CheckRow::new("hermitian", e, ALGEBRA_TOL));
    let mut e = 0.0f64;
    for m in &all {
        let eig = eigen_hermitian(m)?;
        for (v, want) in eig.values.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            e = e.max((v - want).abs());
        }
    }
    rows.push(CheckRow::new("spectrum_pm1", e, ALGEBRA_TOL));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut eig_err, mut content_err) = (0.0f64, 0.0f64);
    for _ in 0..eigenstate_samples {
        let (a, b) = random_ab(&mut rng);
        for (axis, sign) in [Axis::X, Axis::Y, Axis::Z]
            .into_iter()
            .flat_map(|ax| [(ax, VelocitySign::Plus), (ax, VelocitySign::Minus)])
        {
            let psi = velocity_eigenstate(&VelocityEigenstateSpec { axis, a, b, sign })?;
            let s = if sign == VelocitySign::Plus {
                1.0
            } else {
                -1.0
            };
            let lhs = alphas[axis.index()].scale_re(k.c).apply(&psi);
            eig_err = eig_err.max(lhs.max_diff(&psi.scale(Complex::new(s * k.c, 0.0))));
            let (fp, fm) = energy_content(&psi.normalized(), MomentumPoint(0.0), k);
            content_err = content_err.max((fp - 0.5).abs()).max((fm - 0.5).abs());
        }
    }
    rows.push(CheckRow::new("velocity_eigenstates", eig_err, ALGEBRA_TOL));
    rows.push(CheckRow::new(
        "eigenstate_energy_content",
        content_err,
        ALGEBRA_TOL,
    ));

    let (mut excess, mut band_err) = (0.0f64, 0.0f64);
    for i in 0..spinor_samples {
        let psi = if i % 100 == 0 {
            let (a, b) = random_ab(&mut rng);
            velocity_eigenstate(&VelocityEigenstateSpec {
                axis: Axis::X,
                a,
                b,
                sign: VelocitySign::Plus,
            })?
            .normalized()
        } else {
            random_spinor(&mut rng)
        };
        let v = velocity_expectation(&psi, Axis::X, k).abs();
        excess = excess.max((v - k.c) / k.c);
        if v >= k.c - 1e-9 {
            let (fp, fm) = energy_content(&psi, MomentumPoint(0.0), k);
            band_err = band_err.max((fp - 0.5).abs()).max((fm - 0.5).abs());
        }
    }
    rows.push(CheckRow::new(
        "velocity_bound_excess",
        excess.max(0.0),
        ALGEBRA_TOL,
    ));
    rows.push(CheckRow::new("velocity_band_energy_split", band_err, 1e-6));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_passes_and_is_reproducible() {
        let k = PhysConsts::atomic();
        let a = algebra_report(3, 20, 500, &k).unwrap();
        assert!(a.iter().all(|r| r.passed), "{a:?}");
        assert_eq!(a, algebra_report(3, 20, 500, &k).unwrap());
    }
}
