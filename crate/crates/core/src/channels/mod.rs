//! Qubit channel catalog and Kraus-level channel algebra.

mod choi;
mod sampling;
mod transpose_sim;

pub use choi::{choi, choi_of_composition, is_eb, ChoiMatrix, EB_TOL};
pub use sampling::{random_channel, random_pauli_channel, random_pure_state, random_unitary};
pub use transpose_sim::{
    find_transpose_simulator, search_transpose_simulator, SimulatorMethod, TransposeSimulator,
    SIMULATOR_TOL,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, dagger, kron, pauli_x, pauli_y, pauli_z, r, ComplexMatrix};

/// Tolerance on `Σ K†K = I`.
pub const CPTP_TOL: f64 = 1e-10;
/// Kraus operators below this max-abs entry are dropped after composition.
pub const KRAUS_PRUNE_TOL: f64 = 1e-12;

/// Anything described by a list of 2×2 Kraus operators.
pub trait KrausMap {
    fn kraus(&self) -> &[ComplexMatrix];

    fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus()
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| acc + k * rho * dagger(k))
    }

    /// `max |Σ K†K − I|`
    fn trace_preservation_error(&self) -> f64 {
        let sum = self
            .kraus()
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| acc + dagger(k) * k);
        linalg::max_abs_diff(&sum, &linalg::identity(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelFamily {
    Identity,
    Depolarizing,
    AmplitudeDamping,
    GeneralizedAmplitudeDamping,
    PhaseFlip,
    BitFlip,
    Pauli,
    /// `U3(θ, φ, λ)` Euler angles.
    Unitary,
}

impl ChannelFamily {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Identity => "id",
            Self::Depolarizing => "depol",
            Self::AmplitudeDamping => "ad",
            Self::GeneralizedAmplitudeDamping => "gad",
            Self::PhaseFlip => "pf",
            Self::BitFlip => "bf",
            Self::Pauli => "pauli",
            Self::Unitary => "u3",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Identity => &[],
            Self::Depolarizing => &["p_s"],
            Self::AmplitudeDamping => &["gamma"],
            Self::GeneralizedAmplitudeDamping => &["gamma", "n"],
            Self::PhaseFlip | Self::BitFlip => &["r"],
            Self::Pauli => &["p0", "p1", "p2", "p3"],
            Self::Unitary => &["theta", "phi", "lambda"],
        }
    }
}

impl FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "id" | "identity" => Self::Identity,
            "depol" => Self::Depolarizing,
            "ad" => Self::AmplitudeDamping,
            "gad" => Self::GeneralizedAmplitudeDamping,
            "pf" => Self::PhaseFlip,
            "bf" => Self::BitFlip,
            "pauli" => Self::Pauli,
            "u3" => Self::Unitary,
            _ => return Err(Error::ChannelSpec(s.to_string())),
        })
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A CPTP map on one qubit stored as 1 to 4 Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitChannel {
    kraus: Vec<ComplexMatrix>,
    name: String,
    params: Vec<(String, f64)>,
}

impl KrausMap for QubitChannel {
    fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }
}

impl QubitChannel {
    /// Validates shapes, Kraus count and trace preservation.
    pub fn from_kraus(
        kraus: Vec<ComplexMatrix>,
        name: impl Into<String>,
        params: Vec<(String, f64)>,
    ) -> Result<Self> {
        if kraus.is_empty() || kraus.len() > 4 {
            return Err(Error::KrausRank(kraus.len()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (2, 2)) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: k.nrows().max(k.ncols()),
            });
        }
        let ch = Self {
            kraus,
            name: name.into(),
            params,
        };
        let err = ch.trace_preservation_error();
        if err > CPTP_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from identity by {err:.3e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self {
            kraus: vec![linalg::identity(2)],
            name: "id".into(),
            params: Vec::new(),
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u], "unitary", Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    pub fn kraus_rank(&self) -> usize {
        choi::kraus_rank(&choi(self))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Display for QubitChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (_, v)) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { ":" } else { "," })?;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn unit_param(name: &'static str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::ParameterOutOfRange {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(value)
}

fn expect_params(family: ChannelFamily, params: &[f64]) -> Result<()> {
    let want = family.param_names().len();
    if params.len() != want {
        return Err(Error::InvalidChannel(format!(
            "{family} takes {want} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn diag(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[r(a), r(0.0), r(0.0), r(b)])
}

fn entry(row: usize, col: usize, v: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(row, col)] = r(v);
    m
}

/// Builds a catalog channel with the Kraus operators in their standard printed form.
pub fn make_channel(family: ChannelFamily, params: &[f64]) -> Result<QubitChannel> {
    expect_params(family, params)?;
    let named = |vals: &[f64]| -> Vec<(String, f64)> {
        family
            .param_names()
            .iter()
            .zip(vals)
            .map(|(n, v)| (n.to_string(), *v))
            .collect()
    };
    let kraus = match family {
        ChannelFamily::Identity => vec![linalg::identity(2)],
        ChannelFamily::Depolarizing => {
            let p = unit_param("p_s", params[0])?;
            let w = (p / 4.0).sqrt();
            vec![
                linalg::identity(2) * r((1.0 - 0.75 * p).sqrt()),
                pauli_x() * r(w),
                pauli_y() * r(w),
                pauli_z() * r(w),
            ]
        }
        ChannelFamily::AmplitudeDamping => {
            let g = unit_param("gamma", params[0])?;
            vec![diag(1.0, (1.0 - g).sqrt()), entry(0, 1, g.sqrt())]
        }
        ChannelFamily::GeneralizedAmplitudeDamping => {
            let g = unit_param("gamma", params[0])?;
            let n = unit_param("n", params[1])?;
            let (lo, hi) = ((1.0 - n).sqrt(), n.sqrt());
            vec![
                diag(1.0, (1.0 - g).sqrt()) * r(lo),
                entry(0, 1, g.sqrt()) * r(lo),
                diag((1.0 - g).sqrt(), 1.0) * r(hi),
                entry(1, 0, g.sqrt()) * r(hi),
            ]
        }
        ChannelFamily::PhaseFlip => {
            let p = unit_param("r", params[0])?;
            vec![linalg::identity(2) * r(p.sqrt()), pauli_z() * r((1.0 - p).sqrt())]
        }
        ChannelFamily::BitFlip => {
            let p = unit_param("r", params[0])?;
            vec![linalg::identity(2) * r(p.sqrt()), pauli_x() * r((1.0 - p).sqrt())]
        }
        ChannelFamily::Pauli => {
            let names = ["p0", "p1", "p2", "p3"];
            for (n, v) in names.iter().zip(params) {
                unit_param(n, *v)?;
            }
            let total: f64 = params.iter().sum();
            if (total - 1.0).abs() > CPTP_TOL {
                return Err(Error::ParameterOutOfRange {
                    name: "p0+p1+p2+p3",
                    value: total,
                    range: "{1}",
                });
            }
            vec![
                linalg::identity(2) * r(params[0].sqrt()),
                pauli_x() * r(params[1].sqrt()),
                pauli_y() * r(params[2].sqrt()),
                pauli_z() * r(params[3].sqrt()),
            ]
        }
        ChannelFamily::Unitary => vec![u3(params[0], params[1], params[2])],
    };
    QubitChannel::from_kraus(kraus, family.tag(), named(params))
}

/// Euler-angle single-qubit unitary.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let e = |a: f64| linalg::c(a.cos(), a.sin());
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[r(co), -e(lambda) * s, e(phi) * s, e(phi + lambda) * co],
    )
}

/// Parses `<family>[:<p1>[,<p2>...]]`, e.g. `depol:0.65` or `gad:0.3,0.1`.
pub fn parse_channel(spec: &str) -> Result<QubitChannel> {
    let spec = spec.trim();
    let (family, rest) = match spec.split_once(':') {
        Some((f, rest)) => (f, Some(rest)),
        None => (spec, None),
    };
    let family: ChannelFamily = family.parse().map_err(|_| Error::ChannelSpec(spec.into()))?;
    let params: Vec<f64> = match rest {
        None => Vec::new(),
        Some(rest) => rest
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ChannelSpec(spec.into()))?,
    };
    make_channel(family, &params)
}

fn check_dim(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho.nrows().max(rho.ncols()),
        });
    }
    Ok(())
}

/// `Σ K ρ K†`
pub fn apply(ch: &QubitChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(rho, 2)?;
    Ok(ch.apply_unchecked(rho))
}

/// `(Λ1 ⊗ Λ2)(ρ)` through the product Kraus set `{K_i ⊗ L_j}`.
pub fn apply_product(
    ch1: &QubitChannel,
    ch2: &QubitChannel,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_dim(rho, 4)?;
    let mut out = ComplexMatrix::zeros(4, 4);
    for k in ch1.kraus() {
        for l in ch2.kraus() {
            let kl = kron(k, l);
            out += &kl * rho * dagger(&kl);
        }
    }
    Ok(out)
}

/// `later ∘ earlier` with Kraus set `{L_j K_i}`, pruned to at most four
/// operators.
pub fn compose(later: &QubitChannel, earlier: &QubitChannel) -> QubitChannel {
    let mut kraus: Vec<ComplexMatrix> = later
        .kraus()
        .iter()
        .flat_map(|l| earlier.kraus().iter().map(move |k| l * k))
        .filter(|m| linalg::max_abs(m) >= KRAUS_PRUNE_TOL)
        .collect();
    let name = format!("{}∘{}", later.name(), earlier.name());
    if kraus.len() > 4 {
        let product = CpMap { kraus };
        kraus = choi::kraus_from_choi(&choi(&product));
    }
    QubitChannel {
        kraus,
        name,
        params: Vec::new(),
    }
}

/// A completely positive map that need not preserve the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CpMap {
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap for CpMap {
    fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }
}

impl CpMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Self {
        Self { kraus }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(rho, 2)?;
        Ok(self.apply_unchecked(rho))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_error() <= tol
    }
}

/// Kraus operators `{K_iᵀ}` in the computational basis.
pub fn transpose_channel<M: KrausMap>(ch: &M) -> CpMap {
    CpMap {
        kraus: ch.kraus().iter().map(|k| k.transpose()).collect(),
    }
}
