//! Dense complex matrix kernel.
//!
//! Multi-qubit operators are plain `DMatrix<Complex64>` values paired with a
//! [`SystemLayout`] naming each qubit. Index bits are ordered
//! most-significant-first in layout order: label 0 is the highest bit of the
//! row/column index. Every partial operation in the crate is derived from this
//! one convention.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type Complex64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Max-abs tolerance on `m - m†` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex::new(0.0, 0.0);
pub const ONE: Complex64 = Complex::new(1.0, 0.0);
pub const I: Complex64 = Complex::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Ordered qubit labels for a multi-qubit operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    labels: Vec<String>,
}

impl SystemLayout {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut out: Vec<String> = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            if out.iter().any(|x| x == l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            out.push(l.to_string());
        }
        Ok(Self { labels: out })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bit shift of `label` inside a row/column index.
    fn shift(&self, label: &str) -> Result<usize> {
        Ok(self.num_qubits() - 1 - self.position(label)?)
    }

    fn mask<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels
            .iter()
            .try_fold(0usize, |acc, l| Ok(acc | (1 << self.shift(l.as_ref())?)))
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * r(0.5)
}

fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Transposes the index bits of the named qubits only.
pub fn partial_transpose<S: AsRef<str>>(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    subsystems: &[S],
) -> Result<ComplexMatrix> {
    layout.check(m)?;
    let mask = layout.mask(subsystems)?;
    Ok(partial_transpose_mask(m, mask))
}

/// Partial transpose on the qubits whose bits are set in `mask`.
pub fn partial_transpose_mask(m: &ComplexMatrix, mask: usize) -> ComplexMatrix {
    let n = m.nrows();
    let keep = !mask;
    ComplexMatrix::from_fn(n, n, |row, col| {
        let src_row = (row & keep) | (col & mask);
        let src_col = (col & keep) | (row & mask);
        m[(src_row, src_col)]
    })
}

/// Traces out `traced`; the result lives on the remaining labels in their
/// original relative order.
pub fn partial_trace<S: AsRef<str>>(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    traced: &[S],
) -> Result<(ComplexMatrix, SystemLayout)> {
    layout.check(m)?;
    let mask = layout.mask(traced)?;
    let n = layout.num_qubits();
    let kept_shifts: Vec<usize> = (0..n)
        .map(|k| n - 1 - k)
        .filter(|s| mask & (1 << s) == 0)
        .collect();
    let traced_shifts: Vec<usize> = (0..n)
        .map(|k| n - 1 - k)
        .filter(|s| mask & (1 << s) != 0)
        .collect();

    let scatter = |idx: usize, shifts: &[usize]| -> usize {
        shifts
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &s)| {
                let bit = (idx >> (shifts.len() - 1 - k)) & 1;
                acc | (bit << s)
            })
    };

    let out_dim = 1 << kept_shifts.len();
    let env_dim = 1 << traced_shifts.len();
    let env: Vec<usize> = (0..env_dim).map(|e| scatter(e, &traced_shifts)).collect();
    let out = ComplexMatrix::from_fn(out_dim, out_dim, |i, j| {
        let bi = scatter(i, &kept_shifts);
        let bj = scatter(j, &kept_shifts);
        env.iter().map(|&e| m[(bi | e, bj | e)]).sum()
    });

    let remaining: Vec<&str> = layout
        .labels()
        .iter()
        .enumerate()
        .filter(|(k, _)| mask & (1 << (n - 1 - k)) == 0)
        .map(|(_, l)| l.as_str())
        .collect();
    Ok((out, SystemLayout::new(&remaining)?))
}

/// Reorders the qubits of `m` from `layout` into `target` (same label set).
pub fn permute_qubits(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    target: &SystemLayout,
) -> Result<ComplexMatrix> {
    layout.check(m)?;
    if target.num_qubits() != layout.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: layout.num_qubits(),
            actual: target.num_qubits(),
        });
    }
    let n = layout.num_qubits();
    // source bit shift for every target position
    let src_shift: Vec<usize> = target
        .labels()
        .iter()
        .map(|l| layout.shift(l))
        .collect::<Result<_>>()?;
    let map = |idx: usize| -> usize {
        (0..n).fold(0, |acc, k| {
            let bit = (idx >> (n - 1 - k)) & 1;
            acc | (bit << src_shift[k])
        })
    };
    let dim = layout.dim();
    let idx: Vec<usize> = (0..dim).map(map).collect();
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| m[(idx[i], idx[j])]))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(m)?;
    let mut vals: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Ascending eigenvalues with the matching eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    require_hermitian(m)?;
    Ok(sorted_eigen(symmetrize(m)))
}

pub(crate) fn sorted_eigen(m: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// The real symmetric image `[[Re m, -Im m], [Im m, Re m]]` of a Hermitian `m`.
pub fn real_embedding(m: &ComplexMatrix) -> Result<RealMatrix> {
    require_hermitian(m)?;
    let n = m.nrows();
    Ok(RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

pub fn real_symmetric_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Realignment across a `left ⊗ right` cut:
/// `R[(i,j),(k,l)] = M[(i,k),(j,l)]` with `i,j` left and `k,l` right indices.
pub fn realign(m: &ComplexMatrix, left_dim: usize, right_dim: usize) -> ComplexMatrix {
    assert_eq!(m.nrows(), left_dim * right_dim);
    assert_eq!(m.ncols(), left_dim * right_dim);
    ComplexMatrix::from_fn(left_dim * left_dim, right_dim * right_dim, |row, col| {
        let (i, j) = (row / left_dim, row % left_dim);
        let (k, l) = (col / right_dim, col % right_dim);
        m[(i * right_dim + k, j * right_dim + l)]
    })
}

/// `|v⟩⟨v|`
pub fn projector(v: &[Complex64]) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// Checks trace one and `λ_min ≥ -tol`.
pub fn check_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    let tr = trace(rho);
    if (tr - ONE).norm() > tol {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let dev = hermitian_deviation(rho);
    if dev > HERMITIAN_TOL.max(tol) {
        return Err(Error::NotHermitian(dev));
    }
    let lmin = symmetrize(rho).symmetric_eigenvalues().min();
    if lmin < -tol {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {lmin:.3e}")));
    }
    Ok(())
}
