//! Parameter sweeps, the two conjecture testers and the source-placement
//! comparison.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::formulas::gad_boundary_gamma;
use super::search::{default_form, grid, search_with, OutputPt};
use crate::channels::{
    apply_product, choi, choi_of_composition, is_eb, make_channel, random_channel, ChannelFamily,
    QubitChannel,
};
use crate::entanglement::{density, pt_second, singlet, PureInputState, StateForm};
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue;
use crate::sdp::{sdp_bound, SdpStatus, SOLVER_TOL};

/// `|grid − bound|` at or below this counts as tight.
pub const TIGHT_TOL: f64 = 1e-4;

/// Environment dimension of the random channels in the Conjecture-1 test.
pub const CONJECTURE_ENV_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub params: Vec<(String, f64)>,
    pub grid_min_pt_eig: f64,
    pub sdp_bound: f64,
    pub sdp_status: SdpStatus,
    pub optimal_input: PureInputState,
    pub tight: bool,
    pub is_ea: bool,
}

impl SweepRecord {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// `grid_min_pt_eig − sdp_bound`
    pub fn gap(&self) -> f64 {
        self.grid_min_pt_eig - self.sdp_bound
    }
}

/// A channel pair family indexed by two real parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFamily {
    /// One-parameter families on each side: `(family1(x), family2(y))`.
    Product(ChannelFamily, ChannelFamily),
    /// Two identical GAD(γ = x, n = y) copies.
    GadPair,
}

impl PairFamily {
    pub fn new(family1: ChannelFamily, family2: ChannelFamily) -> Result<Self> {
        use ChannelFamily::GeneralizedAmplitudeDamping as Gad;
        if family1 == Gad && family2 == Gad {
            return Ok(Self::GadPair);
        }
        for f in [family1, family2] {
            if f.param_names().len() != 1 {
                return Err(Error::InvalidChannel(format!(
                    "`{f}` is not a one-parameter family and cannot be swept"
                )));
            }
        }
        Ok(Self::Product(family1, family2))
    }

    pub fn param_names(&self) -> (String, String) {
        match self {
            Self::GadPair => ("gamma".into(), "n".into()),
            Self::Product(f1, f2) => {
                let (a, b) = (f1.param_names()[0], f2.param_names()[0]);
                if a == b {
                    (format!("{a}_1"), format!("{b}_2"))
                } else {
                    (a.into(), b.into())
                }
            }
        }
    }

    pub fn channels(&self, x: f64, y: f64) -> Result<(QubitChannel, QubitChannel)> {
        match *self {
            Self::GadPair => {
                let ch = make_channel(ChannelFamily::GeneralizedAmplitudeDamping, &[x, y])?;
                Ok((ch.clone(), ch))
            }
            Self::Product(f1, f2) => Ok((make_channel(f1, &[x])?, make_channel(f2, &[y])?)),
        }
    }

    pub fn default_form(&self) -> StateForm {
        match *self {
            Self::GadPair => StateForm::TwoSided,
            Self::Product(f1, f2) => default_form(f1, f2),
        }
    }
}

/// Grid search plus SDP bound at one channel pair.
pub fn sweep_point(
    ch1: &QubitChannel,
    ch2: &QubitChannel,
    grid_step: f64,
    form: StateForm,
) -> Result<(PureInputState, f64, f64, SdpStatus)> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::ParameterOutOfRange {
            name: "grid_step",
            value: grid_step,
            range: "(0, 1/2]",
        });
    }
    let (best, value) = search_with(&OutputPt::new(ch1, ch2), grid_step, form);
    let res = sdp_bound(ch1, ch2);
    Ok((best, value, res.bound, res.status))
}

/// One record per `(x, y)` in `param1 × param2` (row-major in `param1`),
/// computed on the current rayon pool; output order is the grid order.
pub fn sweep(
    pair: PairFamily,
    param1: &[f64],
    param2: &[f64],
    grid_step: f64,
    form: StateForm,
) -> Result<Vec<SweepRecord>> {
    if param1.is_empty() || param2.is_empty() {
        return Err(Error::GridSpec("empty parameter grid".into()));
    }
    let (n1, n2) = pair.param_names();
    let points: Vec<(f64, f64)> = param1
        .iter()
        .flat_map(|&x| param2.iter().map(move |&y| (x, y)))
        .collect();
    points
        .par_iter()
        .map(|&(x, y)| {
            let (ch1, ch2) = pair.channels(x, y)?;
            let (best, value, bound, status) = sweep_point(&ch1, &ch2, grid_step, form)?;
            Ok(SweepRecord {
                params: vec![(n1.clone(), x), (n2.clone(), y)],
                grid_min_pt_eig: value,
                sdp_bound: bound,
                sdp_status: status,
                optimal_input: best,
                tight: (value - bound).abs() <= TIGHT_TOL,
                is_ea: bound >= -SOLVER_TOL,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureTrial {
    pub seed: u64,
    /// `λ_min` of the PT of the normalized composition Choi state.
    pub lhs: f64,
    /// SDP bound for the product channel.
    pub rhs: f64,
    pub holds: bool,
    pub status: SdpStatus,
}

impl ConjectureTrial {
    /// Solver failed; the trial does not count either way.
    pub fn inconclusive(&self) -> bool {
        self.status == SdpStatus::Failed
    }

    pub fn violated(&self) -> bool {
        !self.holds && !self.inconclusive()
    }
}

/// Half the minimal eigenvalue of the PT of the Choi matrix of `later ∘ earlier`.
pub fn edge_lambda(earlier: &QubitChannel, later: &QubitChannel) -> Result<f64> {
    let composed = choi_of_composition(&choi(earlier), &choi(later))?;
    Ok(min_eigenvalue(&composed.partial_transpose_output())? / 2.0)
}

fn conjecture_pair(ch1: &QubitChannel, ch2: &QubitChannel, seed: u64) -> Result<ConjectureTrial> {
    let lhs = edge_lambda(ch1, ch2)?;
    let res = sdp_bound(ch1, ch2);
    Ok(ConjectureTrial {
        seed,
        lhs,
        rhs: res.bound,
        holds: lhs >= res.bound - SOLVER_TOL,
        status: res.status,
    })
}

/// Draws `Λ1, Λ2` from the Stinespring sampler seeded with `seed` and
/// compares the edge-source value with the midway SDP bound.
pub fn conjecture1_trial(seed: u64) -> Result<ConjectureTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ch1 = random_channel(&mut rng, CONJECTURE_ENV_DIM);
    let ch2 = random_channel(&mut rng, CONJECTURE_ENV_DIM);
    conjecture_pair(&ch1, &ch2, seed)
}

/// Trials with seeds `seed, seed + 1, …`, in seed order.
pub fn conjecture1_batch(seed: u64, trials: usize) -> Result<Vec<ConjectureTrial>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|k| conjecture1_trial(seed.wrapping_add(k)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjecture2Point {
    pub n: f64,
    pub gamma: f64,
    pub sdp_bound: f64,
    pub status: SdpStatus,
    /// `λ_min` of the PT of `(Λ ⊗ Λ)(|Ψ⁻⟩⟨Ψ⁻|)`.
    pub singlet_lambda: f64,
}

/// `λ_min` of the PT of `(Λ1 ⊗ Λ2)(|Ψ⁻⟩⟨Ψ⁻|)`.
pub fn singlet_output_lambda(ch1: &QubitChannel, ch2: &QubitChannel) -> Result<f64> {
    let out = apply_product(ch1, ch2, &density(&singlet()))?;
    min_eigenvalue(&pt_second(&out))
}

fn gad_pair(gamma: f64, n: f64) -> Result<QubitChannel> {
    make_channel(ChannelFamily::GeneralizedAmplitudeDamping, &[gamma, n])
}

/// SDP bound along the GAD boundary curve for `n = k·n_step` strictly
/// inside `(0, 1)`.
pub fn conjecture2_scan(n_step: f64) -> Result<Vec<Conjecture2Point>> {
    if !(n_step > 0.0 && n_step <= 0.1) {
        return Err(Error::ParameterOutOfRange {
            name: "n_step",
            value: n_step,
            range: "(0, 0.1]",
        });
    }
    let ns: Vec<f64> = grid(0.0, 1.0, n_step)?
        .into_iter()
        .filter(|&n| n > 0.5 * n_step && n < 1.0 - 0.5 * n_step)
        .collect();
    ns.par_iter()
        .map(|&n| {
            let gamma = gad_boundary_gamma(n)?;
            let ch = gad_pair(gamma, n)?;
            let res = sdp_bound(&ch, &ch);
            Ok(Conjecture2Point {
                n,
                gamma,
                sdp_bound: res.bound,
                status: res.status,
                singlet_lambda: singlet_output_lambda(&ch, &ch)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyComparison {
    /// `Λ2 ∘ Λ1` is entanglement breaking.
    pub edge_eb: bool,
    pub edge_lambda: f64,
    pub midway_bound: f64,
    pub midway_status: SdpStatus,
    /// The edge value is not below the midway bound.
    pub midway_ea_consistent: bool,
}

/// Source at one end (`Λ2 ∘ Λ1` on half of `|φ⁺⟩`) versus source in the
/// middle (`Λ1 ⊗ Λ2`, SDP bound).
pub fn strategy_compare(ch1: &QubitChannel, ch2: &QubitChannel) -> Result<StrategyComparison> {
    let composed = choi_of_composition(&choi(ch1), &choi(ch2))?;
    let (edge_eb, _) = is_eb(&composed)?;
    let t = conjecture_pair(ch1, ch2, 0)?;
    Ok(StrategyComparison {
        edge_eb,
        edge_lambda: t.lhs,
        midway_bound: t.rhs,
        midway_status: t.status,
        midway_ea_consistent: t.holds,
    })
}
