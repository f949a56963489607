//! Exhaustive grid search over the gauge-fixed input families.

use nalgebra::{Cholesky, Matrix4};

use crate::channels::{apply_product, ChannelFamily, QubitChannel};
use crate::entanglement::{amplitudes, pt_second, PureInputState, StateForm};
use crate::error::{Error, Result};
use crate::linalg::{r, ComplexMatrix, Complex64, ZERO};

/// A new grid point replaces the incumbent only if it is lower by more than this.
pub const IMPROVEMENT_TOL: f64 = 1e-12;

/// `(a, b)` index pairs of the quadratic form, diagonal first.
const PAIRS: [(usize, usize); 10] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (3, 3),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
];

#[derive(Debug, Clone)]
enum Blocks {
    Real([Matrix4<f64>; 10]),
    Complex([Matrix4<Complex64>; 10]),
}

/// `ψ ↦ ((Λ1 ⊗ Λ2)(|ψ⟩⟨ψ|))^{T_B}` for real amplitude vectors `ψ`,
/// precomputed as the quadratic form `Σ_ab ψ_a ψ_b M_ab`.
#[derive(Debug, Clone)]
pub struct OutputPt {
    blocks: Blocks,
}

fn to_matrix4(m: &ComplexMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

impl OutputPt {
    pub fn new(ch1: &QubitChannel, ch2: &QubitChannel) -> Self {
        let image = |a: usize, b: usize| {
            let mut e = ComplexMatrix::zeros(4, 4);
            e[(a, b)] = r(1.0);
            let out = apply_product(ch1, ch2, &e).expect("4x4 input");
            to_matrix4(&pt_second(&out))
        };
        let complex: [Matrix4<Complex64>; 10] = std::array::from_fn(|k| {
            let (a, b) = PAIRS[k];
            if a == b {
                image(a, a)
            } else {
                image(a, b) + image(b, a)
            }
        });
        let imag = complex
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        let blocks = if imag == 0.0 {
            Blocks::Real(std::array::from_fn(|k| complex[k].map(|z| z.re)))
        } else {
            Blocks::Complex(complex)
        };
        Self { blocks }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.blocks, Blocks::Real(_))
    }

    pub fn matrix(&self, psi: &[f64; 4]) -> Matrix4<Complex64> {
        match &self.blocks {
            Blocks::Real(m) => real_sum(m, psi).map(r),
            Blocks::Complex(m) => complex_sum(m, psi),
        }
    }

    pub fn min_eigenvalue(&self, psi: &[f64; 4]) -> f64 {
        match &self.blocks {
            Blocks::Real(m) => real_sum(m, psi).symmetric_eigenvalues().min(),
            Blocks::Complex(m) => complex_sum(m, psi).symmetric_eigenvalues().min(),
        }
    }

    /// Product of the eigenvalues, via LU.
    pub fn determinant(&self, psi: &[f64; 4]) -> f64 {
        match &self.blocks {
            Blocks::Real(m) => real_sum(m, psi).determinant(),
            Blocks::Complex(m) => complex_sum(m, psi).determinant().re,
        }
    }

    /// `λ_min < level`, decided by a Cholesky attempt on `PT − level·I` and
    /// confirmed with an eigensolve; returns the eigenvalue when it is below.
    fn below(&self, psi: &[f64; 4], level: f64) -> Option<f64> {
        let positive = match &self.blocks {
            Blocks::Real(m) => {
                Cholesky::new(real_sum(m, psi) - Matrix4::identity() * level).is_some()
            }
            Blocks::Complex(m) => {
                Cholesky::new(complex_sum(m, psi) - Matrix4::identity() * r(level)).is_some()
            }
        };
        if positive {
            return None;
        }
        let lmin = self.min_eigenvalue(psi);
        (lmin < level).then_some(lmin)
    }
}

fn weight(psi: &[f64; 4], k: usize) -> f64 {
    let (a, b) = PAIRS[k];
    psi[a] * psi[b]
}

fn real_sum(m: &[Matrix4<f64>; 10], psi: &[f64; 4]) -> Matrix4<f64> {
    let mut acc = Matrix4::zeros();
    for (k, mk) in m.iter().enumerate() {
        let w = weight(psi, k);
        if w != 0.0 {
            acc += mk * w;
        }
    }
    acc
}

fn complex_sum(m: &[Matrix4<Complex64>; 10], psi: &[f64; 4]) -> Matrix4<Complex64> {
    let mut acc = Matrix4::from_element(ZERO);
    for (k, mk) in m.iter().enumerate() {
        let w = weight(psi, k);
        if w != 0.0 {
            acc += mk * r(w);
        }
    }
    acc
}

/// `lo, lo + step, …` up to `hi`, with `hi` always included.
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite() && lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::GridSpec(format!("{lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    let last = *pts.last().expect("n >= 0");
    if hi - last > 1e-9 * step {
        pts.push(hi);
    } else {
        *pts.last_mut().expect("non-empty") = hi;
    }
    Ok(pts)
}

/// Parses `lo:hi:step` (or a single value).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::GridSpec(spec.to_string());
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [v] if v.is_finite() => Ok(vec![v]),
        [lo, hi, step] => grid(lo, hi, step).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// Input family that is complete for a channel pair: the one-sided form
/// when the first channel is unitarily covariant and the second commutes
/// with diagonal unitaries, the two-sided form otherwise.
pub fn default_form(family1: ChannelFamily, family2: ChannelFamily) -> StateForm {
    use ChannelFamily::*;
    let covariant = matches!(family1, Identity | Depolarizing);
    let diagonal = matches!(
        family2,
        Identity | Depolarizing | AmplitudeDamping | GeneralizedAmplitudeDamping | PhaseFlip
    );
    if covariant && diagonal {
        StateForm::SchmidtS1
    } else {
        StateForm::TwoSided
    }
}

/// Minimizes `λ_min` of the output PT over the grid `c ∈ [0, 1/2]`,
/// `s1, s2 ∈ [0, 1]` (endpoints included). `s2` is held at 0 for the
/// one-sided form. Loop order is `s1`, then `c`, then `s2`, all ascending.
pub fn optimal_input_search(
    ch1: &QubitChannel,
    ch2: &QubitChannel,
    grid_step: f64,
    form: StateForm,
) -> Result<(PureInputState, f64)> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::ParameterOutOfRange {
            name: "grid_step",
            value: grid_step,
            range: "(0, 1/2]",
        });
    }
    let eval = OutputPt::new(ch1, ch2);
    Ok(search_with(&eval, grid_step, form))
}

pub(crate) fn search_with(
    eval: &OutputPt,
    grid_step: f64,
    form: StateForm,
) -> (PureInputState, f64) {
    let cs = grid(0.0, 0.5, grid_step).expect("valid step");
    let ss = grid(0.0, 1.0, grid_step).expect("valid step");
    let s2s = match form {
        StateForm::SchmidtS1 => vec![0.0],
        StateForm::TwoSided => ss.clone(),
    };
    let mut best = PureInputState {
        c: 0.0,
        s1: 0.0,
        s2: 0.0,
    };
    let mut value = eval.min_eigenvalue(&amplitudes(&best, form));
    for &s1 in &ss {
        for &c in &cs {
            for &s2 in &s2s {
                let p = PureInputState { c, s1, s2 };
                if let Some(v) = eval.below(&amplitudes(&p, form), value - IMPROVEMENT_TOL) {
                    best = p;
                    value = v;
                }
            }
        }
    }
    (best, value)
}
