use rand::Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};

use crate::linalg::{c, ComplexMatrix, Complex64};

use super::{make_channel, ChannelFamily, QubitChannel};

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re * s, im * s)
}

/// Gram–Schmidt on the columns of `m` (full column rank almost surely).
fn orthonormalize_columns(mut m: ComplexMatrix) -> ComplexMatrix {
    for j in 0..m.ncols() {
        for k in 0..j {
            let proj: Complex64 = m.column(k).dotc(&m.column(j));
            let qk = m.column(k).clone_owned();
            let mut col = m.column_mut(j);
            col -= qk * proj;
        }
        let norm = m.column(j).norm();
        m.column_mut(j).unscale_mut(norm);
    }
    m
}

/// Random CPTP qubit channel from a Gaussian isometry `V: ℂ² → ℂ² ⊗ ℂ^env`,
/// with `K_i = (I ⊗ ⟨i|) V`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, env_dim: usize) -> QubitChannel {
    assert!((1..=4).contains(&env_dim), "environment dimension must be 1..=4");
    let g = ComplexMatrix::from_fn(2 * env_dim, 2, |_, _| complex_gaussian(rng));
    let v = orthonormalize_columns(g);
    let kraus = (0..env_dim)
        .map(|i| ComplexMatrix::from_fn(2, 2, |s, col| v[(s * env_dim + i, col)]))
        .collect();
    QubitChannel::from_kraus(kraus, "random", Vec::new())
        .expect("isometry gives a trace-preserving Kraus set")
}

/// Haar-random 2×2 unitary (QR of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(2, 2, |_, _| complex_gaussian(rng));
    orthonormalize_columns(g)
}

/// Normalized complex Gaussian vector of length `dim`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Pauli channel with probabilities drawn uniformly from the simplex.
pub fn random_pauli_channel<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    let p: [f64; 4] = Dirichlet::new([1.0; 4]).expect("valid alpha").sample(rng);
    // absorb rounding so the probabilities sum to one
    let p = [p[0], p[1], p[2], 1.0 - p[0] - p[1] - p[2]];
    let p = p.map(|x| x.clamp(0.0, 1.0));
    make_channel(ChannelFamily::Pauli, &p).expect("simplex point")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausMap;
    use crate::linalg::{dagger, identity, max_abs_diff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_channels_are_cptp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for env in 1..=4 {
            for _ in 0..50 {
                let ch = random_channel(&mut rng, env);
                assert_eq!(ch.kraus().len(), env);
                assert!(ch.trace_preservation_error() < 1e-12);
            }
        }
    }

    #[test]
    fn random_rank_matches_environment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(random_channel(&mut rng, 3).kraus_rank(), 3);
        assert_eq!(random_channel(&mut rng, 4).kraus_rank(), 4);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng);
        assert!(max_abs_diff(&(dagger(&u) * &u), &identity(2)) < 1e-14);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let a = random_channel(&mut ChaCha8Rng::seed_from_u64(42), 4);
        let b = random_channel(&mut ChaCha8Rng::seed_from_u64(42), 4);
        assert_eq!(a, b);
    }
}
