//! Negativity, PPT tests and the gauge-fixed pure input states.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{
    self, partial_transpose_mask, projector, r, ComplexMatrix, Complex64, HERMITIAN_TOL,
};

/// Density-matrix tolerance used when validating inputs to [`report`].
pub const DENSITY_TOL: f64 = 1e-10;

/// Pure two-qubit input with smaller squared Schmidt coefficient `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureInputState {
    pub c: f64,
    pub s1: f64,
    pub s2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateForm {
    /// `√c |0⟩|s⟩ + √(1−c) |1⟩|s⊥⟩`
    SchmidtS1,
    /// `√c |s⟩|v⟩ + √(1−c) |s⊥⟩|v⊥⟩`
    TwoSided,
}

impl PureInputState {
    pub fn new(c: f64, s1: f64, s2: f64) -> Result<Self> {
        check_range("c", c, 0.0, 0.5, "[0, 1/2]")?;
        check_range("s1", s1, 0.0, 1.0, "[0, 1]")?;
        check_range("s2", s2, 0.0, 1.0, "[0, 1]")?;
        Ok(Self { c, s1, s2 })
    }
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if !(lo..=hi).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value, range });
    }
    Ok(())
}

/// `(|s⟩, |s⊥⟩)` with `|s⟩ = √s|0⟩ + √(1−s)|1⟩`.
fn gauge_pair(s: f64) -> ([f64; 2], [f64; 2]) {
    let (a, b) = (s.sqrt(), (1.0 - s).sqrt());
    ([a, b], [-b, a])
}

fn outer(x: [f64; 2], y: [f64; 2]) -> [f64; 4] {
    [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
}

/// Real amplitudes of the input state (basis order `|00⟩, |01⟩, |10⟩, |11⟩`).
/// Parameters are assumed in range.
pub fn amplitudes(p: &PureInputState, form: StateForm) -> [f64; 4] {
    let (wa, wb) = (p.c.sqrt(), (1.0 - p.c).sqrt());
    let (s, s_perp) = gauge_pair(p.s1);
    let (first, second) = match form {
        StateForm::SchmidtS1 => (outer([1.0, 0.0], s), outer([0.0, 1.0], s_perp)),
        StateForm::TwoSided => {
            let (v, v_perp) = gauge_pair(p.s2);
            (outer(s, v), outer(s_perp, v_perp))
        }
    };
    std::array::from_fn(|k| wa * first[k] + wb * second[k])
}

pub fn build_state(p: &PureInputState, form: StateForm) -> Result<Vec<Complex64>> {
    let p = PureInputState::new(p.c, p.s1, p.s2)?;
    Ok(amplitudes(&p, form).iter().map(|&a| r(a)).collect())
}

/// `(|01⟩ − |10⟩)/√2`
pub fn singlet() -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![r(0.0), r(h), r(-h), r(0.0)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub negativity: f64,
    pub lambda_min_pt: f64,
    pub pt_determinant: f64,
    pub is_entangled: bool,
}

/// Partial transpose on the second qubit of a two-qubit operator.
pub fn pt_second(rho: &ComplexMatrix) -> ComplexMatrix {
    partial_transpose_mask(rho, 1)
}

pub fn report(rho: &ComplexMatrix) -> Result<EntanglementReport> {
    if rho.shape() != (4, 4) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.nrows().max(rho.ncols()),
        });
    }
    linalg::check_density_matrix(rho, DENSITY_TOL)?;
    let vals = linalg::hermitian_eigenvalues(&pt_second(rho))?;
    let negativity: f64 = vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let lambda_min_pt = vals[0];
    let pt_determinant = vals.iter().product();
    // the PT of a two-qubit state has at most one negative eigenvalue
    let is_entangled = lambda_min_pt < -HERMITIAN_TOL;
    Ok(EntanglementReport {
        negativity: if is_entangled { negativity } else { 0.0 },
        lambda_min_pt,
        pt_determinant,
        is_entangled,
    })
}

pub fn negativity(rho: &ComplexMatrix) -> Result<f64> {
    Ok(report(rho)?.negativity)
}

/// Pure state density matrix `|ψ⟩⟨ψ|`.
pub fn density(psi: &[Complex64]) -> ComplexMatrix {
    projector(psi)
}

/// Smallest eigenvalue of a 4×4 Hermitian matrix given by its upper triangle.
pub fn min_eigenvalue4(m: &Matrix4<Complex64>) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.min()
}

/// Smallest eigenvalue of a 4×4 real symmetric matrix.
pub fn min_eigenvalue4_real(m: &Matrix4<f64>) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.min()
}
