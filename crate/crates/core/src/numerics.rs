//! Dense complex linear algebra for the fixed small sizes used throughout
//! this crate (2x2, 3x3, 4x4, 8x8): Hermitian eigendecomposition by cyclic
//! Jacobi rotations, PSD matrix square roots, products, adjoints, traces
//! and tensor products.
//!
//! Everything here is plain `f64` arithmetic on row-major `Vec<Complex64>`
//! storage. The sizes are tiny, so simplicity and accuracy win over
//! asymptotics.

use num_complex::Complex64;

use crate::error::Error;

/// Matrix dimensions supported by this module.
pub const SUPPORTED_DIMS: [usize; 4] = [2, 3, 4, 8];

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Off-diagonal convergence threshold, relative to the Frobenius norm.
/// Effectively machine precision: small eigenvalues feed square roots
/// downstream (concurrence), which amplifies any leftover off-diagonal
/// mass, so iteration continues until the off-diagonal is at round-off.
pub const JACOBI_OFF_TOL: f64 = 1e-15;

/// Default tolerance for the negative-eigenvalue clamp in [`psd_sqrt`].
pub const PSD_CLAMP_TOL: f64 = 1e-10;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix, row-major, dim in {2, 3, 4, 8}.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Panics if `dim` is unsupported or the
    /// entry count does not match; callers at an untrusted boundary must
    /// validate first.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Self {
        assert!(
            SUPPORTED_DIMS.contains(&dim),
            "unsupported matrix dimension {dim} (supported: {SUPPORTED_DIMS:?})"
        );
        assert_eq!(entries.len(), dim * dim, "entry count must equal dim^2");
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(dim, vec![C_ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    /// Build from a row-major table of real entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Self {
        Self::new(dim, rows.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.dim, entries)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.dim, entries)
    }

    pub fn scale(&self, s: f64) -> Self {
        let entries = self.entries.iter().map(|a| a * s).collect();
        Self::new(self.dim, entries)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        let entries = self.entries.iter().map(|a| a.conj()).collect();
        Self::new(self.dim, entries)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; the product of the two dims must itself be a
    /// supported dimension.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max_ij |H_ij - conj(H_ji)|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    /// A v for a column vector v.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// v† A w (sesquilinear form).
    pub fn form(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        let aw = self.apply(w);
        v.iter().zip(&aw).map(|(a, b)| a.conj() * b).sum()
    }
}

/// |v><v| for a column vector v.
pub fn outer(v: &[Complex64]) -> ComplexMatrix {
    let n = v.len();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, v[i] * v[j].conj());
        }
    }
    m
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![C_ZERO, C_ONE, C_ONE, C_ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![C_ZERO, -C_I, C_I, C_ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![C_ONE, C_ZERO, C_ZERO, -C_ONE])
}

/// sigma_1, sigma_2, sigma_3 for n in 1..=3.
pub fn pauli(n: usize) -> ComplexMatrix {
    match n {
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => panic!("pauli index must be 1, 2 or 3, got {n}"),
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Real eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as matrix columns, ordered like
    /// `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Column `i` of the eigenvector matrix.
    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        let n = self.eigenvectors.dim();
        (0..n).map(|r| self.eigenvectors.get(r, i)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// `tol` bounds the allowed hermiticity residual of the input. Iteration
/// stops once every off-diagonal magnitude falls below
/// `JACOBI_OFF_TOL * ||H||_F`, and fails with `NoConvergence` after
/// `MAX_JACOBI_SWEEPS` sweeps (never observed for these dimensions).
pub fn herm_eigen(h: &ComplexMatrix, tol: f64) -> Result<Spectrum, Error> {
    let residual = h.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let n = h.dim();

    // Work on the Hermitian average so the residual cannot bias one
    // triangle over the other.
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            a.set(i, j, v);
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let off_threshold = JACOBI_OFF_TOL * h.frobenius_norm();

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= off_threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, col, v.get(r, src));
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// One complex Jacobi rotation annihilating A[p][q].
///
/// With alpha = A_pp, beta = A_qq (real) and A_pq = r e^{i phi}, the
/// unitary U (identity outside rows/cols p,q) with
///   U_pp = c, U_pq = -s e^{i phi}, U_qp = s e^{-i phi}, U_qq = c
/// zeroes (U† A U)_pq when t = s/c solves t^2 - 2 tau t - 1 = 0,
/// tau = (beta - alpha) / (2 r). The smaller root keeps the rotation
/// angle below pi/4, which is what makes cyclic Jacobi converge.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    // A <- U† A U, column update then row update.
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c + aiq * s * phase.conj());
        a.set(i, q, aiq * c - aip * s * phase);
    }
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c + aqj * s * phase);
        a.set(q, j, aqj * c - apj * s * phase.conj());
    }
    // Keep the diagonal exactly real; round-off may leave ~1e-17 imaginary
    // dust there.
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    a.set(p, p, Complex64::new(app.re, 0.0));
    a.set(q, q, Complex64::new(aqq.re, 0.0));

    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c + viq * s * phase.conj());
        v.set(i, q, viq * c - vip * s * phase);
    }
}

/// Hermitian PSD square root via the eigendecomposition.
///
/// Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol is a
/// genuine PSD violation and fails with `NotPSD`.
pub fn psd_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, Error> {
    let spec = herm_eigen(h, tol)?;
    let min = spec.min_eigenvalue();
    if min < -tol {
        return Err(Error::NotPSD { min_eigenvalue: min, tol });
    }
    let n = h.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let vk = spec.eigenvector(k);
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + vk[i] * vk[j].conj() * root;
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}
