//! Small dense linear-algebra helpers shared by the estimation, receiver and
//! asymptotic modules. Covariances here are real symmetric; channel vectors
//! are complex.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::Complex64;

pub type RMat = DMatrix<f64>;
pub type CVec = DVector<Complex64>;

/// Eigenvalue floor used before taking inverse square roots.
pub const EIG_FLOOR: f64 = 1e-12;

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-6;

/// Toeplitz matrix from its first column and first row (`col[0]` must equal `row[0]`).
pub fn toeplitz(col: &[f64], row: &[f64]) -> RMat {
    debug_assert_eq!(col.first(), row.first());
    RMat::from_fn(col.len(), row.len(), |i, j| if i >= j { col[i - j] } else { row[j - i] })
}

/// Cholesky factorization with diagonal jitter escalation
/// (1e-12, 1e-11, ... up to 1e-6). Returns the factor and the jitter applied.
pub fn cholesky_jittered(m: &RMat) -> Result<(Cholesky<f64, Dyn>, f64)> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok((c, 0.0));
    }
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut shifted = m.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(shifted) {
            return Ok((c, jitter));
        }
        jitter *= 10.0;
    }
    Err(Error::numerical(format!(
        "covariance factorization failed with jitter up to {JITTER_MAX:e} (dimension {})",
        m.nrows()
    )))
}

/// Cholesky of a matrix expected to be positive definite.
pub fn cholesky(m: &RMat, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone()).ok_or_else(|| Error::numerical(format!("{what} is not positive definite")))
}

fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigendecomposition with eigenvalues mapped through `f`.
fn sym_fn(m: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let eig = SymmetricEigen::new(symmetrize(m));
    let mapped = eig.eigenvalues.map(f);
    let v = &eig.eigenvectors;
    v * RMat::from_diagonal(&mapped) * v.transpose()
}

/// Principal square root of a symmetric PSD matrix (negative eigenvalues clamped to 0).
pub fn sym_sqrt(m: &RMat) -> RMat {
    sym_fn(m, |l| l.max(0.0).sqrt())
}

/// Inverse principal square root, clamping eigenvalues below [`EIG_FLOOR`].
pub fn sym_inv_sqrt(m: &RMat) -> Result<RMat> {
    let out = sym_fn(m, |l| 1.0 / l.max(EIG_FLOOR).sqrt());
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::numerical("inverse square root produced non-finite entries"))
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of `a * b^{-1}` for symmetric PSD `a` and SPD `b`, via the
/// congruent symmetric matrix `L^{-1} a L^{-T}` with `b = L L^T`. Ascending.
pub fn generalized_eigenvalues(a: &RMat, b: &RMat) -> Result<Vec<f64>> {
    let chol = cholesky(b, "generalized eigenproblem metric")?;
    let l = chol.l();
    let la = l.solve_lower_triangular(a).ok_or_else(|| Error::numerical("singular triangular factor"))?;
    let sym =
        l.solve_lower_triangular(&la.transpose()).ok_or_else(|| Error::numerical("singular triangular factor"))?;
    Ok(sym_eigenvalues(&sym))
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &RMat, b: &RMat) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// Real matrix times complex vector.
pub fn real_mul(m: &RMat, v: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(m.ncols(), v.len());
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj.re == 0.0 && vj.im == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += vj * m[(i, j)];
        }
    }
    out
}

/// `a^H b`.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `I_reps ⊗ block`, the receive-antenna-replicated covariance structure.
///
/// Vectors acted on are stacked per receive antenna: rows `r*n .. (r+1)*n`
/// belong to receive antenna `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct KronBlock {
    pub block: RMat,
    pub reps: usize,
}

impl KronBlock {
    pub fn new(block: RMat, reps: usize) -> Self {
        assert!(block.is_square());
        Self { block, reps }
    }

    pub fn block_size(&self) -> usize {
        self.block.nrows()
    }

    pub fn dim(&self) -> usize {
        self.block.nrows() * self.reps
    }

    /// `(I ⊗ B) v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.block_size();
        assert_eq!(v.len(), self.dim());
        let mut out = Vec::with_capacity(v.len());
        for chunk in v.chunks(n) {
            out.extend(real_mul(&self.block, chunk));
        }
        out
    }

    /// `v^H (I ⊗ B) v` for symmetric `B`.
    pub fn quad_form(&self, v: &[Complex64]) -> f64 {
        cdot(v, &self.apply(v)).re
    }

    pub fn trace(&self) -> f64 {
        self.reps as f64 * self.block.trace()
    }

    /// Materialized `(n·reps) × (n·reps)` matrix. Test and oracle use only.
    pub fn to_dense(&self) -> RMat {
        let n = self.block_size();
        let mut m = RMat::zeros(self.dim(), self.dim());
        for r in 0..self.reps {
            m.view_mut((r * n, r * n), (n, n)).copy_from(&self.block);
        }
        m
    }
}
