use crate::error::{Error, Result};
use crate::linalg::{
    self, kron, partial_trace, partial_transpose, r, ComplexMatrix, SystemLayout, ONE, ZERO,
};

use super::KrausMap;

/// λ_min of the partially transposed Choi matrix accepted as PPT.
pub const EB_TOL: f64 = 1e-10;

/// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` on layout `[in, out]`;
/// trace equals the input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub layout: SystemLayout,
}

impl ChoiMatrix {
    fn qubit(matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            layout: SystemLayout::new(&["in", "out"]).expect("distinct labels"),
        }
    }

    /// Wraps a 4×4 matrix already in `[in, out]` order.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (4, 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self::qubit(matrix))
    }

    /// Recovers `Λ(ρ) = Tr_in((ρᵀ ⊗ I) C)`.
    pub fn reconstruct(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let lifted = kron(&rho.transpose(), &linalg::identity(2)) * &self.matrix;
        Ok(partial_trace(&lifted, &self.layout, &["in"])?.0)
    }

    pub fn partial_transpose_output(&self) -> ComplexMatrix {
        partial_transpose(&self.matrix, &self.layout, &["out"]).expect("layout has `out`")
    }
}

fn basis_op(i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(i, j)] = ONE;
    m
}

pub fn choi<M: KrausMap>(ch: &M) -> ChoiMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let img = ch.apply_unchecked(&basis_op(i, j));
            out.view_mut((2 * i, 2 * j), (2, 2)).copy_from(&img);
        }
    }
    ChoiMatrix::qubit(out)
}

/// Choi matrix of `Λ2 ∘ Λ1` from the Choi matrices of `Λ1` (on `A A'`) and
/// `Λ2` (on `B B'`): `Tr_{A'B}((I_A ⊗ 2φ⁺_{A'B} ⊗ I_{B'}) (C1 ⊗ C2))`.
pub fn choi_of_composition(c1: &ChoiMatrix, c2: &ChoiMatrix) -> Result<ChoiMatrix> {
    for c in [c1, c2] {
        if c.matrix.shape() != (4, 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: c.matrix.nrows().max(c.matrix.ncols()),
            });
        }
    }
    let layout = SystemLayout::new(&["A", "A'", "B", "B'"])?;
    // 2φ⁺ = |Γ⟩⟨Γ| with |Γ⟩ = |00⟩ + |11⟩
    let gamma = linalg::projector(&[ONE, ZERO, ZERO, ONE]);
    let link = kron(&kron(&linalg::identity(2), &gamma), &linalg::identity(2));
    let joint = link * kron(&c1.matrix, &c2.matrix);
    let (reduced, _) = partial_trace(&joint, &layout, &["A'", "B"])?;
    Ok(ChoiMatrix::qubit(reduced))
}

/// PPT test on the Choi matrix: `(λ_min(C^{T_out}) ≥ −EB_TOL, λ_min)`.
///
/// The eigenvalue is on the unnormalized scale (trace 2).
pub fn is_eb(c: &ChoiMatrix) -> Result<(bool, f64)> {
    let lmin = linalg::min_eigenvalue(&c.partial_transpose_output())?;
    Ok((lmin >= -EB_TOL, lmin))
}

/// Numerical rank of the Choi matrix.
pub(crate) fn kraus_rank(c: &ChoiMatrix) -> usize {
    let (vals, _) = linalg::sorted_eigen(linalg::symmetrize(&c.matrix));
    vals.iter().filter(|&&v| v > 1e-9).count()
}

/// Minimal Kraus set from the Choi eigendecomposition.
pub(crate) fn kraus_from_choi(c: &ChoiMatrix) -> Vec<ComplexMatrix> {
    let (vals, vecs) = linalg::sorted_eigen(linalg::symmetrize(&c.matrix));
    vals.iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > 1e-14)
        .map(|(k, &v)| {
            let s = v.sqrt();
            // vector index = 2·in + out; K[out, in]
            ComplexMatrix::from_fn(2, 2, |o, i| vecs[(2 * i + o, k)] * r(s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        compose, make_channel, transpose_channel, ChannelFamily, QubitChannel,
    };
    use crate::linalg::max_abs_diff;

    fn depol(p: f64) -> QubitChannel {
        make_channel(ChannelFamily::Depolarizing, &[p]).unwrap()
    }

    #[test]
    fn identity_choi_is_twice_bell_projector() {
        let c = choi(&QubitChannel::identity());
        let expected = linalg::projector(&[ONE, ZERO, ZERO, ONE]);
        assert_eq!(c.matrix, expected);
        assert!((c.matrix.trace().re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_choi_pt_minimum() {
        for p in [0.0, 0.1, 0.5, 2.0 / 3.0, 0.9, 1.0] {
            let c = choi(&depol(p));
            let normalized = c.partial_transpose_output() * r(0.5);
            let lmin = linalg::min_eigenvalue(&normalized).unwrap();
            assert!((lmin - (-0.5 + 0.75 * p)).abs() < 1e-12, "p={p} lmin={lmin}");
        }
    }

    #[test]
    fn choi_trace_preservation_marginal() {
        let ch = make_channel(ChannelFamily::GeneralizedAmplitudeDamping, &[0.3, 0.2]).unwrap();
        let c = choi(&ch);
        let (marg, _) = partial_trace(&c.matrix, &c.layout, &["out"]).unwrap();
        assert!(max_abs_diff(&marg, &linalg::identity(2)) < 1e-14);
    }

    #[test]
    fn composition_trivial_cases() {
        let id = choi(&QubitChannel::identity());
        let out = choi_of_composition(&id, &id).unwrap();
        assert!(max_abs_diff(&out.matrix, &id.matrix) < 1e-15);
        let d = choi(&depol(0.4));
        let out = choi_of_composition(&d, &id).unwrap();
        assert!(max_abs_diff(&out.matrix, &d.matrix) < 1e-15);
    }

    #[test]
    fn composition_matches_kraus_level() {
        let ad1 = make_channel(ChannelFamily::AmplitudeDamping, &[0.2]).unwrap();
        let ad2 = make_channel(ChannelFamily::AmplitudeDamping, &[0.5]).unwrap();
        let via_choi = choi_of_composition(&choi(&ad1), &choi(&ad2)).unwrap();
        let via_kraus = choi(&compose(&ad2, &ad1));
        assert!(max_abs_diff(&via_choi.matrix, &via_kraus.matrix) < 1e-12);
        // AD(γ1) then AD(γ2) is AD(γ1 + γ2 − γ1γ2)
        let merged = make_channel(ChannelFamily::AmplitudeDamping, &[0.2 + 0.5 - 0.1]).unwrap();
        assert!(max_abs_diff(&via_kraus.matrix, &choi(&merged).matrix) < 1e-12);
    }

    #[test]
    fn composition_rejects_wrong_dims() {
        let bad = ChoiMatrix {
            matrix: linalg::identity(8),
            layout: SystemLayout::new(&["a", "b", "c"]).unwrap(),
        };
        let id = choi(&QubitChannel::identity());
        assert!(matches!(
            choi_of_composition(&bad, &id),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eb_examples() {
        let (eb, lmin) = is_eb(&choi(&depol(2.0 / 3.0))).unwrap();
        assert!(eb);
        assert!(lmin.abs() < 1e-10);
        assert!(!is_eb(&choi(&depol(0.6))).unwrap().0);
        let ad1 = make_channel(ChannelFamily::AmplitudeDamping, &[1.0]).unwrap();
        assert!(is_eb(&choi(&ad1)).unwrap().0);
        let pf = make_channel(ChannelFamily::PhaseFlip, &[0.5]).unwrap();
        assert!(is_eb(&choi(&pf)).unwrap().0);
        assert!(!is_eb(&choi(&QubitChannel::identity())).unwrap().0);
    }

    #[test]
    fn pauli_choi_is_transpose_invariant() {
        let p = make_channel(ChannelFamily::Pauli, &[0.4, 0.3, 0.2, 0.1]).unwrap();
        let t = choi(&transpose_channel(&p));
        assert!(max_abs_diff(&t.matrix, &choi(&p).matrix) < 1e-15);
    }

    #[test]
    fn transpose_is_involution_on_choi() {
        let ch = make_channel(ChannelFamily::GeneralizedAmplitudeDamping, &[0.3, 0.7]).unwrap();
        let twice = transpose_channel(&transpose_channel(&ch));
        assert!(max_abs_diff(&choi(&twice).matrix, &choi(&ch).matrix) < 1e-15);
    }

    #[test]
    fn kraus_rank_of_catalog() {
        assert_eq!(QubitChannel::identity().kraus_rank(), 1);
        assert_eq!(depol(0.3).kraus_rank(), 4);
        assert_eq!(depol(0.0).kraus_rank(), 1);
        let ad = make_channel(ChannelFamily::AmplitudeDamping, &[0.3]).unwrap();
        assert_eq!(ad.kraus_rank(), 2);
    }

    #[test]
    fn kraus_from_choi_reproduces_channel() {
        let ch = make_channel(ChannelFamily::GeneralizedAmplitudeDamping, &[0.4, 0.3]).unwrap();
        let c = choi(&ch);
        let rebuilt = crate::channels::CpMap::new(kraus_from_choi(&c));
        assert!(max_abs_diff(&choi(&rebuilt).matrix, &c.matrix) < 1e-13);
    }
}
