//! Closed-form thresholds and determinant expressions for the depolarizing,
//! amplitude-damping, phase-flip and GAD families.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c as cplx, Complex64};

/// Parameters this close to an EB point count as that point.
pub const EB_PARAM_TOL: f64 = 1e-12;

const DEPOL_EB_ONSET: f64 = 2.0 / 3.0;

fn unit(name: &'static str, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::ParameterOutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        });
    }
    Ok(v)
}

/// Largest `c` (exclusive) for which depol(p_s) ⊗ AD(γ) can output an
/// entangled state: `(2 − 3p_s)/(γp_s − 3p_s + 2)`.
///
/// The raw value can exceed 1/2; see [`clamp_threshold`].
pub fn depol_ad_threshold(p_s: f64, gamma: f64) -> Result<f64> {
    unit("p_s", p_s)?;
    unit("gamma", gamma)?;
    if p_s >= DEPOL_EB_ONSET {
        return Err(Error::ParameterOutOfRange {
            name: "p_s",
            value: p_s,
            range: "[0, 2/3)",
        });
    }
    Ok((2.0 - 3.0 * p_s) / (gamma * p_s - 3.0 * p_s + 2.0))
}

/// Clamps a threshold onto the admissible range of `c`.
pub fn clamp_threshold(t: f64) -> f64 {
    t.clamp(0.0, 0.5)
}

/// A stationary point of the PT determinant in `s1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S1Candidate {
    pub value: Complex64,
    /// Real and inside `[0, 1]`.
    pub valid: bool,
}

impl S1Candidate {
    fn new(value: Complex64) -> Self {
        let valid = value.re.is_finite()
            && value.im.is_finite()
            && value.im.abs() <= EB_PARAM_TOL
            && (0.0..=1.0).contains(&value.re);
        Self { value, valid }
    }
}

/// The three roots of `d/ds1 det(ρ^{T_B}) = 0` for depol ⊗ AD (independent
/// of `p_s`).
pub fn depol_ad_determinant_solutions(c: f64, gamma: f64) -> [S1Candidate; 3] {
    let first = cplx(c / (2.0 * c - 1.0), 0.0);
    let disc = (1.0 - 2.0 * c).powi(2) * (c - 1.0) * c * gamma;
    let root = cplx(disc, 0.0).sqrt();
    let num = cplx(2.0 * c * c * gamma - c * gamma, 0.0);
    let den = 4.0 * c * c * gamma - 4.0 * c * gamma + gamma;
    [
        S1Candidate::new(first),
        S1Candidate::new((num - root) / den),
        S1Candidate::new((num + root) / den),
    ]
}

/// `det(ρ^{T_B})|_{s1=0} − det(ρ^{T_B})|_{s1=1}` for depol(p_s) ⊗ AD(γ).
pub fn depol_ad_det_difference(c: f64, gamma: f64, p_s: f64) -> f64 {
    (2.0 * c - 1.0)
        * (gamma - 1.0).powi(2)
        * gamma
        * (2.0 * (c - 1.0) * c * (gamma - 1.0) + gamma)
        * (p_s - 2.0).powi(2)
        * p_s.powi(2)
        / 16.0
}

/// `det(ρ^{T_B})` at `s1 = 0` for depol(p_s) ⊗ AD(γ).
pub fn depol_ad_det_s1_zero(c: f64, gamma: f64, p_s: f64) -> f64 {
    c * c
        * (gamma - 1.0).powi(2)
        * (p_s - 2.0).powi(2)
        * (c * ((gamma - 3.0) * p_s + 2.0) + 3.0 * p_s - 2.0)
        * (c * (gamma * p_s + p_s - 2.0) - p_s + 2.0)
        / 16.0
}

/// Stationary points in `s1` for depol ⊗ PF(r): `1/2` and `(1 ± F(c))/2`.
pub fn depol_pf_stationary_points(c: f64, r: f64) -> [f64; 3] {
    let f = ((1.0 - r) * r * ((1.0 - c) * c * (1.0 - 2.0 * r).powi(2) + (1.0 - r) * r)).sqrt()
        / ((1.0 - 2.0 * c) * (1.0 - r) * r);
    [0.5, 0.5 * (1.0 + f), 0.5 * (1.0 - f)]
}

/// `det|_{s1=1} − det|_{s1=1/2}` for depol(p_s) ⊗ PF(r).
pub fn depol_pf_det_difference(c: f64, r: f64, p_s: f64) -> f64 {
    let a = (1.0 - 2.0 * c).powi(2);
    -a * (1.0 - r) * r * (a * (1.0 - r) * r + 2.0 * (1.0 - c) * c) * (p_s - 2.0).powi(2)
        * p_s.powi(2)
        / 16.0
}

/// `det(ρ^{T_B})` at `s1 = 1` (equal to the value at `s1 = 0`) for
/// depol(p_s) ⊗ PF(r).
pub fn depol_pf_det_s1_one(c: f64, r: f64, p_s: f64) -> f64 {
    -(c - 1.0).powi(2)
        * c
        * c
        * (p_s - 2.0).powi(2)
        * (4.0 * r * (p_s - 1.0) - 3.0 * p_s + 2.0)
        * (4.0 * r * (p_s - 1.0) - p_s + 2.0)
        / 16.0
}

/// The two lines in the `(r, p_s)` plane between which depol(p_s) ⊗ PF(r)
/// outputs only separable states, as `(low, high)`.
pub fn depol_pf_boundary(p_s: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&p_s) {
        return Err(Error::ParameterOutOfRange {
            name: "p_s",
            value: p_s,
            range: "[0, 1)",
        });
    }
    let den = 4.0 * (p_s - 1.0);
    let a = (3.0 * p_s - 2.0) / den;
    let b = (p_s - 2.0) / den;
    Ok((a.min(b), a.max(b)))
}

/// AD(γ) ⊗ PF(r) is EA exactly when one side is EB: `γ = 1` or `r = 1/2`.
pub fn ad_pf_ea_check(gamma: f64, r: f64) -> bool {
    (gamma - 1.0).abs() <= EB_PARAM_TOL || (r - 0.5).abs() <= EB_PARAM_TOL
}

/// `det(ρ^{T_B})` at `s1 = s2 = 0` for AD(γ) ⊗ PF(r).
pub fn ad_pf_det_s1s2_zero(c: f64, gamma: f64, r: f64) -> f64 {
    (1.0 - c).powi(2) * c * c * (1.0 - gamma) * (gamma - 1.0) * (2.0 * r - 1.0).powi(2)
}

/// Damping `γ(n)` at which `(Λ ⊗ Λ)(|Ψ⁻⟩⟨Ψ⁻|)` of two identical GAD(γ, n)
/// channels stops being NPT.
///
/// Evaluated as `2(√2−1)/(√q + √2 − 1)` with
/// `q = 3 − 2√2 + 8(√2−1)n(1−n)`, which avoids the `0/0` of the direct
/// expression near the ends.
pub fn gad_boundary_gamma(n: f64) -> Result<f64> {
    if !(n > 0.0 && n < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n,
            range: "(0, 1)",
        });
    }
    let k = SQRT_2 - 1.0;
    let q = 3.0 - 2.0 * SQRT_2 + 8.0 * k * n * (1.0 - n);
    Ok(2.0 * k / (q.sqrt() + k))
}
