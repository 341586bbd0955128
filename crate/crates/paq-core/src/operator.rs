//! Dense Hermitian linear algebra: validated operator types, spectral
//! calculus, tensor products and partial traces, Schatten-1 norms, and the
//! noncommutative quotient `B^{-1/2} A B^{-1/2}`.
//!
//! Everything here is small and dense (dimensions up to a few hundred);
//! eigendecompositions back all matrix functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Row-major matrix JSON schema: `{"re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut re = vec![vec![0.0; cols]; rows];
        let mut im = vec![vec![0.0; cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                re[i][j] = m[(i, j)].re;
                im[i][j] = m[(i, j)].im;
            }
        }
        MatrixJson { re, im }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let rows = self.re.len();
        if rows == 0 {
            return Err(Error::validation("matrix schema: empty real part"));
        }
        let cols = self.re[0].len();
        if self.im.len() != rows {
            return Err(Error::validation(format!(
                "matrix schema: re has {rows} rows but im has {}",
                self.im.len()
            )));
        }
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            if self.re[i].len() != cols || self.im[i].len() != cols {
                return Err(Error::validation(format!(
                    "matrix schema: ragged row {i} (expected {cols} columns)"
                )));
            }
            for j in 0..cols {
                m[(i, j)] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        Ok(m)
    }
}

/// A validated Hermitian operator on a `dim`-dimensional space.
///
/// Construction checks `A = A†` entrywise within [`tolerances::HERMITICITY`]
/// relative to the largest absolute entry, then stores the symmetrized
/// `(A + A†)/2` so downstream spectral calls see an exactly Hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianOperator {
    mat: CMat,
}

impl TryFrom<MatrixJson> for HermitianOperator {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        HermitianOperator::new(j.to_matrix()?)
    }
}

impl From<HermitianOperator> for MatrixJson {
    fn from(h: HermitianOperator) -> MatrixJson {
        MatrixJson::from_matrix(h.matrix())
    }
}

impl HermitianOperator {
    /// Validates Hermiticity and wraps the matrix.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::validation(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let scale = mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let tol = tolerances::HERMITICITY * scale;
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                let diff = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if diff > tol {
                    return Err(Error::validation(format!(
                        "matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {diff:.3e} \
                         exceeds {tol:.3e}"
                    )));
                }
            }
        }
        let sym = (&mat + mat.adjoint()) * c(0.5);
        Ok(HermitianOperator { mat: sym })
    }

    /// Wraps a matrix that is Hermitian by construction (skips validation,
    /// still symmetrizes to scrub rounding).
    pub(crate) fn from_hermitian_parts(mat: CMat) -> Self {
        let sym = (&mat + mat.adjoint()) * c(0.5);
        HermitianOperator { mat: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            mat: CMat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            mat: CMat::identity(dim, dim),
        }
    }

    /// Real diagonal operator.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = CMat::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d);
        }
        HermitianOperator { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Trace (real for Hermitian operators).
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter().all(|z| z.norm() == 0.0)
    }
}

/// A density operator: Hermitian, positive semi-definite within
/// [`tolerances::PSD_FLOOR`], unit trace within [`tolerances::UNIT_TRACE`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityOperator {
    base: HermitianOperator,
}

impl TryFrom<MatrixJson> for DensityOperator {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        DensityOperator::new(HermitianOperator::new(j.to_matrix()?)?)
    }
}

impl From<DensityOperator> for MatrixJson {
    fn from(d: DensityOperator) -> MatrixJson {
        MatrixJson::from_matrix(d.matrix())
    }
}

impl DensityOperator {
    pub fn new(base: HermitianOperator) -> Result<Self> {
        let tr = base.trace();
        if (tr - 1.0).abs() > tolerances::UNIT_TRACE {
            return Err(Error::validation(format!(
                "density operator trace is {tr}, not 1"
            )));
        }
        let eigs = spectral(&base).eigenvalues;
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < tolerances::PSD_FLOOR {
            return Err(Error::validation(format!(
                "density operator has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityOperator { base })
    }

    pub fn from_matrix(mat: CMat) -> Result<Self> {
        DensityOperator::new(HermitianOperator::new(mat)?)
    }

    /// Maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            base: HermitianOperator::from_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    /// Pure state `|k⟩⟨k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        DensityOperator {
            base: HermitianOperator::from_diagonal(&d),
        }
    }

    /// Classical distribution as a diagonal density operator.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        DensityOperator::new(HermitianOperator::from_diagonal(p))
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.base.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn into_hermitian(self) -> HermitianOperator {
        self.base
    }
}

/// Eigendecomposition of a Hermitian operator: eigenvalues sorted descending,
/// eigenvector columns orthonormal.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    /// `U f(Λ) U†` for a scalar function applied to the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.eigenvalues.len();
        let mut lam = CMat::zeros(n, n);
        for i in 0..n {
            lam[(i, i)] = c(f(self.eigenvalues[i]));
        }
        let rec = &self.eigenvectors * lam * self.eigenvectors.adjoint();
        HermitianOperator::from_hermitian_parts(rec)
    }

    /// Cutoff below which an eigenvalue counts as zero, relative to the
    /// largest-magnitude eigenvalue.
    pub fn support_cutoff(&self) -> f64 {
        let max_abs = self
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0f64, f64::max);
        tolerances::SUPPORT_CUTOFF * max_abs.max(1.0)
    }

    /// Projector onto the span of eigenvectors with eigenvalue above the
    /// support cutoff.
    pub fn support_projector(&self) -> HermitianOperator {
        let cut = self.support_cutoff();
        self.map_eigenvalues(|l| if l > cut { 1.0 } else { 0.0 })
    }

    pub fn rank(&self) -> usize {
        let cut = self.support_cutoff();
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }
}

/// Eigendecomposition with eigenvalues sorted descending.
pub fn spectral(a: &HermitianOperator) -> SpectralDecomposition {
    let eig = a.matrix().clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap());
    let mut values = DVector::zeros(n);
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

fn check_psd(spec: &SpectralDecomposition) -> Result<()> {
    let scale = spec
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(1.0f64, f64::max);
    let min = spec.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < tolerances::PSD_FLOOR * scale {
        return Err(Error::validation(format!(
            "operator has negative eigenvalue {min:.3e} beyond tolerance"
        )));
    }
    Ok(())
}

/// Matrix power `A^p` of a PSD operator via spectral calculus.
///
/// Eigenvalues below the support cutoff map to exactly 0, so negative and
/// zero powers act on the support only (`0^0 := 0`, `0^{-1} := 0`).
pub fn mat_power(a: &HermitianOperator, p: f64) -> Result<HermitianOperator> {
    let spec = spectral(a);
    check_psd(&spec)?;
    let cut = spec.support_cutoff();
    Ok(spec.map_eigenvalues(|l| if l > cut { l.powf(p) } else { 0.0 }))
}

/// Same as [`mat_power`] but starting from an existing decomposition.
pub fn mat_power_spec(spec: &SpectralDecomposition, p: f64) -> HermitianOperator {
    let cut = spec.support_cutoff();
    spec.map_eigenvalues(|l| if l > cut { l.powf(p) } else { 0.0 })
}

/// Matrix logarithm restricted to the support: zero eigenvalues contribute 0.
pub fn mat_log_support(a: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = spectral(a);
    check_psd(&spec)?;
    let cut = spec.support_cutoff();
    Ok(spec.map_eigenvalues(|l| if l > cut { l.ln() } else { 0.0 }))
}

/// Kronecker (tensor) product, first factor most significant.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        mat: a.matrix().kronecker(b.matrix()),
    }
}

/// Partial trace of a multipartite operator.
///
/// `dims` are the tensor factor dimensions in most-significant-first order
/// (matching [`tensor`]); `keep` lists the factor indices to retain, in
/// ascending order. All other factors are traced out.
pub fn partial_trace(
    a: &HermitianOperator,
    dims: &[usize],
    keep: &[usize],
) -> Result<HermitianOperator> {
    let total: usize = dims.iter().product();
    if total != a.dim() {
        return Err(Error::validation(format!(
            "partial_trace: factor dims {dims:?} give total {total}, operator has dim {}",
            a.dim()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::validation(format!(
            "partial_trace: keep set {keep:?} invalid for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let trace_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Decompose a flat index into the factor tuple, then recompose the full
    // index from (kept tuple, traced tuple).
    let unrank = |mut idx: usize, factors: &[usize]| -> Vec<usize> {
        let mut tuple = vec![0; factors.len()];
        for (slot, &fi) in factors.iter().enumerate().rev() {
            tuple[slot] = idx % dims[fi];
            idx /= dims[fi];
        }
        tuple
    };
    let full_index = |keep_tuple: &[usize], trace_tuple: &[usize]| -> usize {
        let mut idx = 0;
        let mut ki = 0;
        let mut ti = 0;
        for (f, &dim) in dims.iter().enumerate() {
            let digit = if keep.contains(&f) {
                ki += 1;
                keep_tuple[ki - 1]
            } else {
                ti += 1;
                trace_tuple[ti - 1]
            };
            idx = idx * dim + digit;
        }
        idx
    };

    let m = a.matrix();
    let mut out = CMat::zeros(keep_dim, keep_dim);
    for r in 0..keep_dim {
        let rt = unrank(r, keep);
        for col in 0..keep_dim {
            let ct = unrank(col, keep);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..trace_dim {
                let tt = unrank(t, &traced);
                acc += m[(full_index(&rt, &tt), full_index(&ct, &tt))];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(HermitianOperator::from_hermitian_parts(out))
}

/// Schatten-1 norm: sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianOperator) -> f64 {
    spectral(a).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Trace norm of a raw Hermitian matrix (no wrapping/validation).
pub(crate) fn trace_norm_raw(m: &CMat) -> f64 {
    let sym = (m + m.adjoint()) * c(0.5);
    sym.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum()
}

/// `½‖A − B‖₁`, in `[0, 1]` when both arguments are density operators.
pub fn trace_distance(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "trace_distance: dimension mismatch {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * trace_norm_raw(&diff))
}

/// Checks `supp(A) ⊆ supp(B)` by comparing support projectors.
pub fn support_contained(a: &HermitianOperator, b: &HermitianOperator) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::validation("support check: dimension mismatch"));
    }
    let pa = spectral(a).support_projector();
    let pb = spectral(b).support_projector();
    // ‖(1 − P_B) P_A‖_F² = Tr[P_A] − Tr[P_A P_B P_A]
    let leak = (pa.matrix() - pb.matrix() * pa.matrix()).norm();
    Ok(leak <= tolerances::SUPPORT_CHECK)
}

/// Noncommutative quotient `A/B := B^{-1/2} A B^{-1/2}` with support-restricted
/// inverse root. Requires `supp(A) ⊆ supp(B)`.
pub fn nc_quotient(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    if !support_contained(a, b)? {
        return Err(Error::domain(
            "nc_quotient: support of A is not contained in support of B",
        ));
    }
    let spec_a = spectral(a);
    check_psd(&spec_a)?;
    let inv_root = mat_power(b, -0.5)?;
    let q = inv_root.matrix() * a.matrix() * inv_root.matrix();
    Ok(HermitianOperator::from_hermitian_parts(q))
}

/// Spectral clipping at zero: `A₊ = U max(Λ, 0) U†`.
pub fn positive_part(a: &HermitianOperator) -> HermitianOperator {
    spectral(a).map_eigenvalues(|l| l.max(0.0))
}

/// Operator absolute value `|A| = U |Λ| U†`.
pub fn abs_op(a: &HermitianOperator) -> HermitianOperator {
    spectral(a).map_eigenvalues(f64::abs)
}

/// Order-independent pairwise summation; bit-stable regardless of how the
/// addends were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
