//! Two-sided simulation of channel transposition: matrices `A`, `B` with
//! `A K_i B = K_iᵀ` for every Kraus operator of a Kraus-rank ≤ 3 channel.
//!
//! Row-major vectorization is used throughout, so `vec(A K B) = (A ⊗ Bᵀ) vec(K)`
//! and a Kronecker-structured solution has a rank-one realignment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, pauli_y, realign, ComplexMatrix, Complex64, ONE};

use super::{sampling, KrausMap, QubitChannel};

/// Residual at or below which a simulator counts as found.
pub const SIMULATOR_TOL: f64 = 1e-6;

const SEARCH_RESTARTS: usize = 50;
const SEARCH_ITERS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulatorMethod {
    /// `A = B = I` already works.
    Trivial,
    /// Closed form from the annihilator of the Kraus span.
    Annihilator,
    /// Alternating rank-one projection of the realigned solution space.
    RankOneSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransposeSimulator {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// `max_i ‖A K_i B − K_iᵀ‖_max`
    pub residual: f64,
    pub method: SimulatorMethod,
}

impl TransposeSimulator {
    pub fn is_success(&self) -> bool {
        self.residual <= SIMULATOR_TOL
    }
}

pub fn residual(kraus: &[ComplexMatrix], a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    kraus
        .iter()
        .map(|k| linalg::max_abs_diff(&(a * k * b), &k.transpose()))
        .fold(0.0, f64::max)
}

fn vec_row_major(k: &ComplexMatrix) -> [Complex64; 4] {
    [k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]]
}

fn unvec_row_major(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, v)
}

/// Basis of `{x : Σ_ab x_ab K_ab = 0 for all K in the Kraus span}`.
fn bilinear_annihilator(kraus: &[ComplexMatrix]) -> Vec<[Complex64; 4]> {
    let v = ComplexMatrix::from_fn(4, kraus.len(), |row, col| vec_row_major(&kraus[col])[row]);
    // null(Vᵀ) = kernel of the Hermitian PSD matrix conj(V) Vᵀ
    let gram = v.conjugate() * v.transpose();
    let (vals, vecs) = linalg::sorted_eigen(linalg::symmetrize(&gram));
    let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
    vals.iter()
        .enumerate()
        .filter(|(_, &l)| l <= 1e-10 * scale)
        .map(|(k, _)| [vecs[(0, k)], vecs[(1, k)], vecs[(2, k)], vecs[(3, k)]])
        .collect()
}

fn det2(m: &ComplexMatrix) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Picks the best-conditioned `W` (with `Tr(W K) = 0` on the span) among
/// fixed combinations of the annihilator basis.
fn pick_annihilator(basis: &[[Complex64; 4]]) -> Option<ComplexMatrix> {
    let as_w = |x: &[Complex64; 4]| unvec_row_major(x).transpose();
    let mut candidates: Vec<ComplexMatrix> = basis.iter().map(as_w).collect();
    if basis.len() > 1 {
        let phases = [ONE, c(0.0, 1.0), -ONE, c(0.0, -1.0)];
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                for ph in phases {
                    candidates.push(as_w(&basis[i]) + as_w(&basis[j]) * ph);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..16 {
            let mut w = ComplexMatrix::zeros(2, 2);
            for x in basis {
                let z = sampling::random_pure_state(&mut rng, 1)[0];
                w += as_w(x) * z;
            }
            candidates.push(w);
        }
    }
    candidates
        .into_iter()
        .filter(|w| w.norm() > 0.0)
        .map(|w| {
            let w = w.unscale(w.norm());
            (det2(&w).norm(), w)
        })
        .filter(|(d, _)| *d > 1e-8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, w)| w)
}

/// For `K` in `{K : Tr(W K) = 0}`: `Kᵀ = −W⁻ᵀ σ_y K W σ_y`.
fn annihilator_route(kraus: &[ComplexMatrix]) -> Option<(ComplexMatrix, ComplexMatrix)> {
    let w = pick_annihilator(&bilinear_annihilator(kraus))?;
    let w_inv_t = w.clone().try_inverse()?.transpose();
    let sy = pauli_y();
    Some((-(w_inv_t * &sy), w * sy))
}

/// Finds `A`, `B` with `A K_i B = K_iᵀ`.
///
/// Tries the identity pair, then the closed-form annihilator construction,
/// then the rank-one realignment search. A residual above
/// [`SIMULATOR_TOL`] is reported through the result, not as an error.
pub fn find_transpose_simulator(ch: &QubitChannel) -> Result<TransposeSimulator> {
    let rank = ch.kraus_rank();
    if rank > 3 {
        return Err(Error::KrausRank(rank));
    }
    let kraus = ch.kraus();
    let id = linalg::identity(2);
    let trivial = TransposeSimulator {
        residual: residual(kraus, &id, &id),
        a: id.clone(),
        b: id,
        method: SimulatorMethod::Trivial,
    };
    if trivial.is_success() {
        return Ok(trivial);
    }
    let mut best = trivial;
    if let Some((a, b)) = annihilator_route(kraus) {
        let res = residual(kraus, &a, &b);
        if res < best.residual {
            best = TransposeSimulator {
                a,
                b,
                residual: res,
                method: SimulatorMethod::Annihilator,
            };
        }
    }
    if best.is_success() {
        return Ok(best);
    }
    let searched = search_transpose_simulator(ch, 0)?;
    Ok(if searched.residual < best.residual {
        searched
    } else {
        best
    })
}

/// Rank-one search only: the solution set of `M vec(K_i) = vec(K_iᵀ)` is
/// affine; alternate between the best rank-one approximation of its
/// realignment and the least-squares point of the affine set.
pub fn search_transpose_simulator(ch: &QubitChannel, seed: u64) -> Result<TransposeSimulator> {
    let rank = ch.kraus_rank();
    if rank > 3 {
        return Err(Error::KrausRank(rank));
    }
    let kraus = ch.kraus();
    let m = kraus.len();
    let v = ComplexMatrix::from_fn(4, m, |row, col| vec_row_major(&kraus[col])[row]);
    let vt = ComplexMatrix::from_fn(4, m, |row, col| vec_row_major(&kraus[col].transpose())[row]);
    let v_pinv = v
        .clone()
        .pseudo_inverse(1e-10)
        .map_err(|e| Error::InvalidChannel(e.to_string()))?;
    let m0 = &vt * v_pinv;
    let null = bilinear_annihilator(kraus);

    // directions e_r uᵀ, realigned and flattened into the columns of `g`
    let mut dirs = Vec::new();
    for row in 0..4 {
        for u in &null {
            let mut d = ComplexMatrix::zeros(4, 4);
            for col in 0..4 {
                d[(row, col)] = u[col];
            }
            dirs.push(d);
        }
    }
    let flat = |x: &ComplexMatrix| -> Vec<Complex64> { realign(x, 2, 2).iter().copied().collect() };
    let r0 = ComplexMatrix::from_vec(16, 1, flat(&m0));
    let g = ComplexMatrix::from_fn(16, dirs.len(), |i, j| flat(&dirs[j])[i]);
    let g_pinv = if dirs.is_empty() {
        ComplexMatrix::zeros(0, 16)
    } else {
        g.clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InvalidChannel(e.to_string()))?
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<TransposeSimulator> = None;
    for _ in 0..SEARCH_RESTARTS {
        let mut beta = ComplexMatrix::from_vec(
            dirs.len(),
            1,
            sampling::random_pure_state(&mut rng, dirs.len().max(1))[..dirs.len()].to_vec(),
        ) * c(2.0, 0.0);
        let mut rank_one = ComplexMatrix::zeros(4, 4);
        for _ in 0..SEARCH_ITERS {
            let current = &r0 + &g * &beta;
            let realigned = ComplexMatrix::from_column_slice(4, 4, current.as_slice());
            let svd = realigned.svd(true, true);
            let (u, vt_) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
            let k = svd.singular_values.imax();
            rank_one = u.column(k) * vt_.row(k) * c(svd.singular_values[k], 0.0);
            let target = ComplexMatrix::from_column_slice(16, 1, rank_one.as_slice());
            let next = &g_pinv * (target - &r0);
            let step = (&next - &beta).norm();
            beta = next;
            if step < 1e-14 {
                break;
            }
        }
        // rank_one[(i,j),(k,l)] = A_ij (Bᵀ)_kl
        let (a, b) = factor_rank_one(&rank_one);
        let res = residual(kraus, &a, &b);
        if best.as_ref().map_or(true, |s| res < s.residual) {
            best = Some(TransposeSimulator {
                a,
                b,
                residual: res,
                method: SimulatorMethod::RankOneSearch,
            });
        }
        if best.as_ref().is_some_and(|s| s.residual <= SIMULATOR_TOL * 1e-3) {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

fn factor_rank_one(rank_one: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let svd = rank_one.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let k = svd.singular_values.imax();
    let s = svd.singular_values[k].sqrt();
    let a_vec: Vec<Complex64> = u.column(k).iter().map(|z| z * s).collect();
    let bt_vec: Vec<Complex64> = v_t.row(k).iter().map(|z| z * s).collect();
    let a = unvec_row_major(&a_vec);
    let b = unvec_row_major(&bt_vec).transpose();
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_channel, random_channel, ChannelFamily};
    use rand::SeedableRng;

    #[test]
    fn identity_uses_trivial_pair() {
        let sim = find_transpose_simulator(&QubitChannel::identity()).unwrap();
        assert_eq!(sim.method, SimulatorMethod::Trivial);
        assert_eq!(sim.a, linalg::identity(2));
        assert_eq!(sim.b, linalg::identity(2));
        assert_eq!(sim.residual, 0.0);
    }

    #[test]
    fn rank_four_is_rejected() {
        let d = make_channel(ChannelFamily::Depolarizing, &[0.4]).unwrap();
        assert_eq!(find_transpose_simulator(&d), Err(Error::KrausRank(4)));
    }

    #[test]
    fn pauli_without_y_is_trivial() {
        let p = make_channel(ChannelFamily::Pauli, &[0.5, 0.3, 0.0, 0.2]).unwrap();
        let sim = find_transpose_simulator(&p).unwrap();
        assert_eq!(sim.method, SimulatorMethod::Trivial);
        assert!(sim.is_success());
    }

    #[test]
    fn pauli_with_y_needs_search() {
        // σ_yᵀ = −σ_y, so the identity pair fails
        let p = make_channel(ChannelFamily::Pauli, &[0.5, 0.0, 0.3, 0.2]).unwrap();
        let sim = find_transpose_simulator(&p).unwrap();
        assert_ne!(sim.method, SimulatorMethod::Trivial);
        assert!(sim.is_success(), "residual {}", sim.residual);
        assert!(residual(p.kraus(), &sim.a, &sim.b) <= SIMULATOR_TOL);
    }

    #[test]
    fn amplitude_damping_found() {
        let ch = make_channel(ChannelFamily::AmplitudeDamping, &[0.35]).unwrap();
        let sim = find_transpose_simulator(&ch).unwrap();
        assert!(sim.is_success());
    }

    #[test]
    fn random_rank_three_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let ch = random_channel(&mut rng, 3);
            let sim = find_transpose_simulator(&ch).unwrap();
            assert!(sim.is_success());
            assert!(residual(ch.kraus(), &sim.a, &sim.b) == sim.residual);
        }
    }

    #[test]
    fn search_route_agrees_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ok = 0;
        for _ in 0..10 {
            let ch = random_channel(&mut rng, 3);
            let sim = search_transpose_simulator(&ch, 1).unwrap();
            assert_eq!(sim.method, SimulatorMethod::RankOneSearch);
            if sim.is_success() {
                ok += 1;
            }
        }
        assert!(ok >= 8, "search route found {ok}/10");
    }
}
