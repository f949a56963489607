//! PPT relaxation of the minimal output partial-transpose eigenvalue:
//!
//! ```text
//! min ⟨C^{T_B'}, X⟩  s.t.  X ⪰ 0,  X^{T_{A'B'}} ⪰ 0,  Tr X = 1
//! ```
//!
//! on layout `[A, B, A', B']`, solved with a primal-dual interior-point
//! method (Nesterov–Todd scaling, Mehrotra predictor-corrector). The dual
//!
//! ```text
//! max t  s.t.  C^{T_B'} − t I = Z1 + Z2^{T_{A'B'}},  Z1, Z2 ⪰ 0
//! ```
//!
//! supplies the reported bound: for any `Z2 ⪰ 0`, `λ_min(C − Z2^{T_{A'B'}})`
//! is a valid lower bound.

use nalgebra::{DMatrix, DVector};

use crate::channels::{choi, KrausMap, QubitChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    self, kron, partial_transpose_mask, permute_qubits, r, realign, trace_norm, ComplexMatrix,
    Complex64, SystemLayout, ZERO,
};

/// Default absolute accuracy; overridden by `ENTDIST_SOLVER_TOL`.
pub const SOLVER_TOL: f64 = 1e-7;
/// Gap below which a solve is reported as [`SdpStatus::Optimal`].
pub const OPTIMAL_GAP: f64 = 1e-9;
/// Realignment trace norm above `1 + REALIGNMENT_TOL` certifies entanglement.
pub const REALIGNMENT_TOL: f64 = 1e-8;

const DIM: usize = 16;
/// Bits of A' and B' in a `[A, B, A', B']` index.
const MASK_PRIMED: usize = 0b0011;
const MASK_B_PRIME: usize = 0b0001;
const STEP_FRACTION_BASE: f64 = 0.9;
const STEP_FRACTION_GAIN: f64 = 0.09;
const TARGET_GAP: f64 = 1e-11;
/// Iterations without halving the gap before giving up.
const STALL_LIMIT: usize = 4;
/// Both step lengths below this end the run.
const MIN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    /// `C^{T_B'}` on `[A, B, A', B']`.
    pub cost: ComplexMatrix,
    pub layout: SystemLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    NearOptimal,
    Failed,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "OPTIMAL",
            SdpStatus::NearOptimal => "NEAR_OPTIMAL",
            SdpStatus::Failed => "FAILED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpResult {
    /// Certified lower bound (dual objective).
    pub bound: f64,
    /// Primal optimizer; PSD, PPT across `AB|A'B'` and unit trace.
    pub x_opt: ComplexMatrix,
    pub status: SdpStatus,
    /// `⟨cost, x_opt⟩ − bound`
    pub solver_gap: f64,
    pub iterations: usize,
}

impl SdpResult {
    pub fn primal_value(&self) -> f64 {
        self.bound + self.solver_gap
    }

    pub fn is_usable(&self) -> bool {
        self.status != SdpStatus::Failed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: SOLVER_TOL,
            max_iter: 100,
        }
    }
}

impl SolverOptions {
    /// Defaults with the tolerance taken from `ENTDIST_SOLVER_TOL` if set.
    pub fn from_env() -> Self {
        let mut opts = Self::default();
        if let Some(tol) = std::env::var("ENTDIST_SOLVER_TOL")
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
        {
            opts.tol = tol;
        }
        opts
    }
}

pub fn layout() -> SystemLayout {
    SystemLayout::new(&["A", "B", "A'", "B'"]).expect("distinct labels")
}

/// Unnormalized Choi matrix of `Λ1 ⊗ Λ2` on `[A, B, A', B']`, so that
/// `(Λ1 ⊗ Λ2)(ρ) = Tr_AB((ρᵀ ⊗ I) C)`.
pub fn product_choi<M1: KrausMap, M2: KrausMap>(ch1: &M1, ch2: &M2) -> ComplexMatrix {
    let joint = kron(&choi(ch1).matrix, &choi(ch2).matrix);
    let natural = SystemLayout::new(&["A", "A'", "B", "B'"]).expect("distinct labels");
    permute_qubits(&joint, &natural, &layout()).expect("same label set")
}

pub fn build_problem(ch1: &QubitChannel, ch2: &QubitChannel) -> SdpProblem {
    let c = product_choi(ch1, ch2);
    SdpProblem {
        cost: linalg::symmetrize(&partial_transpose_mask(&c, MASK_B_PRIME)),
        layout: layout(),
    }
}

impl SdpProblem {
    pub fn from_cost(cost: ComplexMatrix) -> Result<Self> {
        if cost.shape() != (DIM, DIM) {
            return Err(Error::DimensionMismatch {
                expected: DIM,
                actual: cost.nrows().max(cost.ncols()),
            });
        }
        let dev = linalg::hermitian_deviation(&cost);
        if dev > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            cost: linalg::symmetrize(&cost),
            layout: layout(),
        })
    }

    fn is_real(&self) -> bool {
        self.cost.iter().all(|z| z.im.abs() <= 1e-15)
    }
}

fn phi(m: &ComplexMatrix) -> ComplexMatrix {
    partial_transpose_mask(m, MASK_PRIMED)
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn hermitian_part(m: &ComplexMatrix, real: bool) -> ComplexMatrix {
    let mut s = linalg::symmetrize(m);
    if real {
        s.iter_mut().for_each(|z| z.im = 0.0);
    }
    s
}

fn min_eig(m: &ComplexMatrix) -> f64 {
    linalg::symmetrize(m).symmetric_eigenvalues().min()
}

fn diag_scale_cols(m: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let mut out = m.clone();
    for (j, &s) in d.iter().enumerate() {
        out.column_mut(j).scale_mut(s);
    }
    out
}

/// Orthonormal basis of the Hermitian (or real symmetric) 16×16 matrices.
struct HermitianBasis {
    /// `(i, j, kind)`: 0 diagonal, 1 real off-diagonal, 2 imaginary off-diagonal.
    elems: Vec<(usize, usize, u8)>,
}

impl HermitianBasis {
    fn new(real: bool) -> Self {
        let mut elems: Vec<(usize, usize, u8)> = (0..DIM).map(|i| (i, i, 0)).collect();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                elems.push((i, j, 1));
                if !real {
                    elems.push((i, j, 2));
                }
            }
        }
        Self { elems }
    }

    fn len(&self) -> usize {
        self.elems.len()
    }

    /// Nonzero entries `(row, col, value)` of basis element `k`.
    fn entries(&self, k: usize) -> ([(usize, usize, Complex64); 2], usize) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (i, j, kind) = self.elems[k];
        match kind {
            0 => ([(i, i, r(1.0)), (i, i, ZERO)], 1),
            1 => ([(i, j, r(h)), (j, i, r(h))], 2),
            _ => ([(i, j, Complex64::new(0.0, h)), (j, i, Complex64::new(0.0, -h))], 2),
        }
    }

    fn coords(&self, m: &ComplexMatrix) -> DVector<f64> {
        let s2 = std::f64::consts::SQRT_2;
        DVector::from_iterator(
            self.len(),
            self.elems.iter().map(|&(i, j, kind)| match kind {
                0 => m[(i, i)].re,
                1 => s2 * m[(i, j)].re,
                _ => s2 * m[(i, j)].im,
            }),
        )
    }

    fn matrix(&self, v: &DVector<f64>) -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = ComplexMatrix::zeros(DIM, DIM);
        for (k, &(i, j, kind)) in self.elems.iter().enumerate() {
            match kind {
                0 => m[(i, i)].re = v[k],
                1 => {
                    m[(i, j)].re = h * v[k];
                    m[(j, i)].re = h * v[k];
                }
                _ => {
                    m[(i, j)].im = h * v[k];
                    m[(j, i)].im = -h * v[k];
                }
            }
        }
        m
    }
}

/// Index pair reached by the partial transpose on the primed qubits.
fn phi_index(i: usize, j: usize) -> (usize, usize) {
    let keep = !MASK_PRIMED;
    ((i & keep) | (j & MASK_PRIMED), (j & keep) | (i & MASK_PRIMED))
}

/// Real matrix of `D ↦ P1 D P1 + Φ(P2 Φ(D) P2)` in the orthonormal basis.
fn schur_matrix(basis: &HermitianBasis, p1: &ComplexMatrix, p2: &ComplexMatrix) -> DMatrix<f64> {
    let n = basis.len();
    let l = |i: usize, j: usize, a: usize, b: usize| -> Complex64 {
        let (ip, jp) = phi_index(i, j);
        let (ap, bp) = phi_index(a, b);
        p1[(i, a)] * p1[(b, j)] + p2[(ip, ap)] * p2[(bp, jp)]
    };
    let entries: Vec<_> = (0..n).map(|k| basis.entries(k)).collect();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let (ek, nk) = &entries[k];
        for m in k..n {
            let (em, nm) = &entries[m];
            let mut acc = ZERO;
            for &(p, q, beta) in &ek[..*nk] {
                for &(a, b, gamma) in &em[..*nm] {
                    // ⟨B_k, M⟩ = Σ β_pq M_qp
                    acc += beta * gamma * l(q, p, a, b);
                }
            }
            h[(k, m)] = acc.re;
            h[(m, k)] = acc.re;
        }
    }
    h
}

/// NT scaling of one cone block: `W = T Tᴴ`, `W Z W = S`,
/// `T⁻¹ S T⁻ᴴ = Tᴴ Z T = diag(λ)`.
struct Scaling {
    t: ComplexMatrix,
    t_inv: ComplexMatrix,
    w_inv: ComplexMatrix,
    lambda: Vec<f64>,
}

impl Scaling {
    /// With `S = Ls Lsᴴ`, `Z = Lz Lzᴴ` and `Lzᴴ Ls = U Σ Vᴴ`:
    /// `T = Ls V Σ^{-1/2}`, `T⁻¹ = Σ^{-1/2} Uᴴ Lzᴴ`, `λ = Σ`.
    fn new(s: &ComplexMatrix, z: &ComplexMatrix) -> Option<Self> {
        let ls = linalg::symmetrize(s).cholesky()?.unpack();
        let lz = linalg::symmetrize(z).cholesky()?.unpack();
        let svd = (lz.adjoint() * &ls).svd(true, true);
        let (u, v_t) = (svd.u?, svd.v_t?);
        let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
        if sigma.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let isq: Vec<f64> = sigma.iter().map(|x| 1.0 / x.sqrt()).collect();
        let t = diag_scale_cols(&(&ls * v_t.adjoint()), &isq);
        let t_inv = diag_scale_cols(&(&lz * &u), &isq).adjoint();
        let w_inv = t_inv.adjoint() * &t_inv;
        Some(Self {
            t,
            t_inv,
            w_inv,
            lambda: sigma,
        })
    }

    /// `T Q Tᴴ` with `Q_ij = 2 R_ij / (λ_i + λ_j)`.
    fn lift(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let q = ComplexMatrix::from_fn(DIM, DIM, |i, j| {
            rhs[(i, j)] * (2.0 / (self.lambda[i] + self.lambda[j]))
        });
        &self.t * q * self.t.adjoint()
    }

    fn scaled_primal(&self, ds: &ComplexMatrix) -> ComplexMatrix {
        &self.t_inv * ds * self.t_inv.adjoint()
    }

    fn scaled_dual(&self, dz: &ComplexMatrix) -> ComplexMatrix {
        self.t.adjoint() * dz * &self.t
    }

    /// Largest `α` with `diag(λ) + α d ⪰ 0`.
    fn max_step(&self, d: &ComplexMatrix) -> f64 {
        let m = ComplexMatrix::from_fn(DIM, DIM, |i, j| {
            d[(i, j)] / (self.lambda[i] * self.lambda[j]).sqrt()
        });
        let e = min_eig(&m);
        if e >= 0.0 {
            f64::INFINITY
        } else {
            -1.0 / e
        }
    }

    fn lambda_diag(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(
            DIM,
            self.lambda.iter().map(|&l| r(l)),
        ))
    }
}

enum Factor {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factor {
    fn new(h: DMatrix<f64>) -> Self {
        match h.clone().cholesky() {
            Some(ch) => Factor::Cholesky(ch),
            None => Factor::Lu(h.lu()),
        }
    }

    fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        let x = match self {
            Factor::Cholesky(ch) => ch.solve(b),
            Factor::Lu(lu) => lu.solve(b)?,
        };
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

fn schur_solve(basis: &HermitianBasis, factor: &Factor, rhs: &ComplexMatrix) -> Option<ComplexMatrix> {
    Some(basis.matrix(&factor.solve(&basis.coords(rhs))?))
}

struct Direction {
    dx: ComplexMatrix,
    dt: f64,
    dz: [ComplexMatrix; 2],
}

struct Iterate {
    x: ComplexMatrix,
    t: f64,
    z: [ComplexMatrix; 2],
}

struct Newton<'a> {
    basis: &'a HermitianBasis,
    factor: Factor,
    h_inv_id: ComplexMatrix,
    scal: [Scaling; 2],
    rd: ComplexMatrix,
    rp: f64,
    real: bool,
}

impl Newton<'_> {
    fn solve(&self, rc: [ComplexMatrix; 2]) -> Option<Direction> {
        let [w1, w2] = [&self.scal[0].w_inv, &self.scal[1].w_inv];
        let f = w1 * &rc[0] * w1 + phi(&(w2 * &rc[1] * w2)) - &self.rd;
        let h_inv_f = schur_solve(self.basis, &self.factor, &f)?;
        let tr_id = linalg::trace(&self.h_inv_id).re;
        let dt = (self.rp - linalg::trace(&h_inv_f).re) / tr_id;
        let dx = hermitian_part(&(h_inv_f + &self.h_inv_id * r(dt)), self.real);
        let ds = [dx.clone(), phi(&dx)];
        let w2 = &self.scal[1].w_inv;
        let dz2 = hermitian_part(&(w2 * (&rc[1] - &ds[1]) * w2), self.real);
        // the dual equality is linear: recover ΔZ1 from it exactly
        let dz1 = hermitian_part(
            &(&self.rd - phi(&dz2) - linalg::identity(DIM) * r(dt)),
            self.real,
        );
        let dz = [dz1, dz2];
        Some(Direction { dx, dt, dz })
    }

    fn scaled(&self, d: &Direction) -> ([ComplexMatrix; 2], [ComplexMatrix; 2]) {
        let ds = [d.dx.clone(), phi(&d.dx)];
        (
            [0, 1].map(|k| self.scal[k].scaled_primal(&ds[k])),
            [0, 1].map(|k| self.scal[k].scaled_dual(&d.dz[k])),
        )
    }

    fn step_lengths(&self, dxs: &[ComplexMatrix; 2], dzs: &[ComplexMatrix; 2]) -> (f64, f64) {
        let ap = (0..2).map(|k| self.scal[k].max_step(&dxs[k])).fold(f64::INFINITY, f64::min);
        let ad = (0..2).map(|k| self.scal[k].max_step(&dzs[k])).fold(f64::INFINITY, f64::min);
        (ap, ad)
    }
}

fn certified_bound(cost: &ComplexMatrix, z2: &ComplexMatrix) -> f64 {
    min_eig(&(cost - phi(z2)))
}

fn primal_value(cost: &ComplexMatrix, x: &ComplexMatrix) -> Option<(f64, ComplexMatrix)> {
    let tr = linalg::trace(x).re;
    if !(tr > 0.0) {
        return None;
    }
    let xn = x.unscale(tr);
    Some((inner(cost, &xn), xn))
}

pub fn solve(p: &SdpProblem) -> SdpResult {
    solve_with(p, &SolverOptions::from_env())
}

pub fn solve_with(p: &SdpProblem, opts: &SolverOptions) -> SdpResult {
    let real = p.is_real();
    let cost = hermitian_part(&p.cost, real);
    let basis = HermitianBasis::new(real);
    let id = linalg::identity(DIM);
    let scale = 1.0 + linalg::max_abs(&cost);

    let mut it = Iterate {
        x: &id * r(1.0 / DIM as f64),
        t: 0.0,
        z: [&id * r(scale), &id * r(scale)],
    };
    let mut best_dual = f64::NEG_INFINITY;
    let mut best_primal: Option<(f64, ComplexMatrix)> = None;
    let mut iterations = 0;
    let mut best_gap = f64::INFINITY;
    let mut stalled = 0;

    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        let dual = certified_bound(&cost, &it.z[1]);
        if dual.is_finite() && dual > best_dual {
            best_dual = dual;
        }
        if let Some((val, xn)) = primal_value(&cost, &it.x) {
            if best_primal.as_ref().map_or(true, |(b, _)| val < *b) {
                best_primal = Some((val, xn));
            }
        }
        if let Some((pv, _)) = &best_primal {
            let gap = pv - best_dual;
            if gap <= TARGET_GAP {
                break;
            }
            if gap < 0.5 * best_gap {
                best_gap = gap;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    break;
                }
            }
        }

        let s = [it.x.clone(), phi(&it.x)];
        let Some(s0) = Scaling::new(&s[0], &it.z[0]) else { break };
        let Some(s1) = Scaling::new(&s[1], &it.z[1]) else { break };
        let scal = [s0, s1];
        let mu = (inner(&s[0], &it.z[0]) + inner(&s[1], &it.z[1])) / (2 * DIM) as f64;
        if !(mu > 1e-16) {
            break;
        }
        let rd = &cost - &id * r(it.t) - &it.z[0] - phi(&it.z[1]);
        let rp = 1.0 - linalg::trace(&it.x).re;

        let factor = Factor::new(schur_matrix(&basis, &scal[0].w_inv, &scal[1].w_inv));
        let Some(h_inv_id) = schur_solve(&basis, &factor, &id) else { break };
        let newton = Newton {
            basis: &basis,
            factor,
            h_inv_id,
            scal,
            rd,
            rp,
            real,
        };

        // predictor: R = −λ∘λ, whose lift is −S
        let Some(aff) = newton.solve([-&s[0], -&s[1]]) else { break };
        let (ax, az) = newton.scaled(&aff);
        let (ap, ad) = newton.step_lengths(&ax, &az);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = (0..2)
            .map(|k| {
                let l = newton.scal[k].lambda_diag();
                inner(&(&l + &ax[k] * r(ap)), &(&l + &az[k] * r(ad)))
            })
            .sum::<f64>()
            / (2 * DIM) as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector: R = σμI − λ∘λ − (dx̃ dz̃ + dz̃ dx̃)/2
        let rc = [0, 1].map(|k| {
            let sc = &newton.scal[k];
            let l2 = ComplexMatrix::from_diagonal(&DVector::from_iterator(
                DIM,
                sc.lambda.iter().map(|&l| r(sigma * mu - l * l)),
            ));
            let cross = (&ax[k] * &az[k] + &az[k] * &ax[k]) * r(0.5);
            sc.lift(&(l2 - cross))
        });
        let Some(dir) = newton.solve(rc) else { break };
        let (dxs, dzs) = newton.scaled(&dir);
        let (ap, ad) = newton.step_lengths(&dxs, &dzs);
        let frac = STEP_FRACTION_BASE + STEP_FRACTION_GAIN * ap.min(ad).min(1.0);
        let ap = (frac * ap).min(1.0);
        let ad = (frac * ad).min(1.0);

        if ap.max(ad) < MIN_STEP {
            break;
        }
        it.x = hermitian_part(&(&it.x + &dir.dx * r(ap)), real);
        it.t += ad * dir.dt;
        for k in 0..2 {
            it.z[k] = hermitian_part(&(&it.z[k] + &dir.dz[k] * r(ad)), real);
        }
    }

    let (primal, x_opt) = best_primal.unwrap_or((f64::INFINITY, &id * r(1.0 / DIM as f64)));
    let gap = primal - best_dual;
    let status = if !gap.is_finite() {
        SdpStatus::Failed
    } else if gap <= OPTIMAL_GAP {
        SdpStatus::Optimal
    } else if gap <= opts.tol {
        SdpStatus::NearOptimal
    } else {
        SdpStatus::Failed
    };
    SdpResult {
        bound: best_dual,
        x_opt,
        status,
        solver_gap: gap,
        iterations,
    }
}

/// Convenience: build and solve for a channel pair.
pub fn sdp_bound(ch1: &QubitChannel, ch2: &QubitChannel) -> SdpResult {
    solve(&build_problem(ch1, ch2))
}

/// Realignment witness across `AB|A'B'` on the optimizer:
/// `(trace norm > 1 + REALIGNMENT_TOL, trace norm)`.
pub fn certify_gap(res: &SdpResult) -> Result<(bool, f64)> {
    if res.status == SdpStatus::Failed {
        return Err(Error::SolverFailed(format!(
            "no optimizer to certify (gap {:.3e})",
            res.solver_gap
        )));
    }
    let norm = trace_norm(&realign(&res.x_opt, 4, 4));
    Ok((norm > 1.0 + REALIGNMENT_TOL, norm))
}
