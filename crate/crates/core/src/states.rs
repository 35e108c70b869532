//! Construction and validation of two-qubit density matrices: the four
//! state families under study, the three-qubit GHZ/W sources with partial
//! trace over the third qubit, and arbitrary user-supplied matrices.
//!
//! Basis order is fixed as |00>, |01>, |10>, |11> with the first factor
//! being the sender's channel qubit; every explicit matrix below is written
//! in that basis.

use num_complex::Complex64;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{herm_eigen, outer, ComplexMatrix, Spectrum, C_ZERO};

/// Validation tolerance for density-matrix invariants (hermiticity residual,
/// trace residual, eigenvalue floor).
pub const DENSITY_TOL: f64 = 1e-10;

/// A validated two-qubit density matrix: Hermitian, unit trace, positive
/// semidefinite (all within [`DENSITY_TOL`]).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    /// Eigendecomposition; cannot fail for a validated density matrix.
    pub fn spectrum(&self) -> Spectrum {
        herm_eigen(&self.mat, DENSITY_TOL).expect("validated density matrix is Hermitian")
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }

    pub fn to_json(&self) -> String {
        let raw = MatrixJson {
            dim: 4,
            entries: self.mat.entries().iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string(&raw).expect("matrix serialization cannot fail")
    }

    /// Parse the `{dim, entries: [[re, im], ...]}` row-major format and
    /// validate the result.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.dim != 4 {
            return Err(Error::InvalidDimension {
                expected: 4,
                got: raw.dim,
            });
        }
        if raw.entries.len() != 16 {
            return Err(Error::Parse(format!(
                "expected 16 entries for a 4x4 matrix, got {}",
                raw.entries.len()
            )));
        }
        let entries = raw
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        validate_density(ComplexMatrix::new(4, entries))
    }
}

/// On-disk JSON schema for matrices, shared with the CLI.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

/// Check the density-matrix invariants and wrap the matrix on success.
pub fn validate_density(raw: ComplexMatrix) -> Result<DensityMatrix, Error> {
    if raw.dim() != 4 {
        return Err(Error::InvalidDimension {
            expected: 4,
            got: raw.dim(),
        });
    }
    let herm = raw.hermiticity_residual();
    if herm > DENSITY_TOL {
        return Err(Error::NotHermitian {
            residual: herm,
            tol: DENSITY_TOL,
        });
    }
    let trace = raw.trace();
    let trace_residual = ((trace.re - 1.0).powi(2) + trace.im.powi(2)).sqrt();
    if trace_residual > DENSITY_TOL {
        return Err(Error::TraceNotOne {
            residual: trace_residual,
            tol: DENSITY_TOL,
        });
    }
    let spec = herm_eigen(&raw, DENSITY_TOL)?;
    if spec.min_eigenvalue() < -DENSITY_TOL {
        return Err(Error::NotPSD {
            min_eigenvalue: spec.min_eigenvalue(),
            tol: DENSITY_TOL,
        });
    }
    Ok(DensityMatrix { mat: raw })
}

/// Tagged parameter record for the four state families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Werner state, parameterized by its singlet fraction F_w in [0, 1].
    Werner { f_w: f64 },
    /// Munro-James-White-Kwiat maximally entangled mixed state,
    /// parameterized by its concurrence C in [0, 1].
    Mems { c: f64 },
    /// Werner derivative: the Werner state rotated by a nonlocal unitary
    /// taking the singlet to sqrt(a)|00> + sqrt(1-a)|11>.
    /// Requires 1/2 < F_w <= 1 and 1/2 <= a <= 1.
    WernerDerivative { f_w: f64, a: f64 },
    /// Convex mixture p * Tr_3|GHZ><GHZ| + (1-p) * Tr_3|W><W|, p in [0, 1].
    NmemsNew { p: f64 },
}

impl FamilySpec {
    /// Check the parameter ranges (closed intervals as stated, except
    /// F_w = 1/2 which is excluded for the Werner derivative).
    pub fn validate(&self) -> Result<(), Error> {
        let check = |name: &'static str, value: f64, lo: f64, hi: f64, interval: &'static str| {
            if !(value >= lo && value <= hi) {
                return Err(Error::ParamOutOfRange {
                    name,
                    value,
                    interval,
                });
            }
            Ok(())
        };
        match *self {
            FamilySpec::Werner { f_w } => check("F_w", f_w, 0.0, 1.0, "[0, 1]"),
            FamilySpec::Mems { c } => check("C", c, 0.0, 1.0, "[0, 1]"),
            FamilySpec::WernerDerivative { f_w, a } => {
                if !(f_w > 0.5 && f_w <= 1.0) {
                    return Err(Error::ParamOutOfRange {
                        name: "F_w",
                        value: f_w,
                        interval: "(1/2, 1]",
                    });
                }
                check("a", a, 0.5, 1.0, "[1/2, 1]")
            }
            FamilySpec::NmemsNew { p } => check("p", p, 0.0, 1.0, "[0, 1]"),
        }
    }

    /// Short lower-case tag used by the CLI.
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::Werner { .. } => "werner",
            FamilySpec::Mems { .. } => "mems",
            FamilySpec::WernerDerivative { .. } => "wd",
            FamilySpec::NmemsNew { .. } => "new",
        }
    }
}

/// h(C) branch function of the MEMS family: C/2 for C >= 2/3, else 1/3.
pub fn mems_h(c: f64) -> f64 {
    if c >= 2.0 / 3.0 {
        c / 2.0
    } else {
        1.0 / 3.0
    }
}

/// Build the explicit matrix of a family member.
pub fn make_state(spec: FamilySpec) -> Result<DensityMatrix, Error> {
    spec.validate()?;
    let mut m = ComplexMatrix::zeros(4);
    let re = |x: f64| Complex64::new(x, 0.0);
    match spec {
        FamilySpec::Werner { f_w } => {
            m.set(0, 0, re((1.0 - f_w) / 3.0));
            m.set(3, 3, re((1.0 - f_w) / 3.0));
            m.set(1, 1, re((1.0 + 2.0 * f_w) / 6.0));
            m.set(2, 2, re((1.0 + 2.0 * f_w) / 6.0));
            m.set(1, 2, re((1.0 - 4.0 * f_w) / 6.0));
            m.set(2, 1, re((1.0 - 4.0 * f_w) / 6.0));
        }
        FamilySpec::Mems { c } => {
            let h = mems_h(c);
            m.set(0, 0, re(h));
            m.set(3, 3, re(h));
            m.set(1, 1, re(1.0 - 2.0 * h));
            m.set(0, 3, re(c / 2.0));
            m.set(3, 0, re(c / 2.0));
        }
        FamilySpec::WernerDerivative { f_w, a } => {
            let iso = (1.0 - f_w) / 3.0;
            let w = (4.0 * f_w - 1.0) / 3.0;
            let corner = w * (a * (1.0 - a)).sqrt();
            m.set(0, 0, re(iso + w * a));
            m.set(3, 3, re(iso + w * (1.0 - a)));
            m.set(1, 1, re(iso));
            m.set(2, 2, re(iso));
            m.set(0, 3, re(corner));
            m.set(3, 0, re(corner));
        }
        FamilySpec::NmemsNew { p } => {
            m.set(0, 0, re((p + 2.0) / 6.0));
            m.set(1, 1, re((1.0 - p) / 3.0));
            m.set(2, 2, re((1.0 - p) / 3.0));
            m.set(1, 2, re((1.0 - p) / 3.0));
            m.set(2, 1, re((1.0 - p) / 3.0));
            m.set(3, 3, re(p / 2.0));
        }
    }
    validate_density(m)
}

/// A validated three-qubit state (8x8), basis |000> .. |111>.
#[derive(Clone, Debug)]
pub struct ThreeQubitState {
    mat: ComplexMatrix,
}

impl ThreeQubitState {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    fn from_pure(amplitudes: &[Complex64; 8]) -> Self {
        let mat = outer(amplitudes);
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-12);
        Self { mat }
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }
}

/// Projector of (|000> + |111>) / sqrt(2).
pub fn ghz3() -> ThreeQubitState {
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let mut amp = [C_ZERO; 8];
    amp[0b000] = s;
    amp[0b111] = s;
    ThreeQubitState::from_pure(&amp)
}

/// Projector of (|001> + |010> + |100>) / sqrt(3).
pub fn w3() -> ThreeQubitState {
    let s = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amp = [C_ZERO; 8];
    amp[0b001] = s;
    amp[0b010] = s;
    amp[0b100] = s;
    ThreeQubitState::from_pure(&amp)
}

/// Trace out the third qubit: (rho_12)_{ij,kl} = sum_m rho_{ijm,klm}.
pub fn partial_trace_third(s: &ThreeQubitState) -> DensityMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for r in 0..4 {
        for c in 0..4 {
            let v = s.mat.get(2 * r, 2 * c) + s.mat.get(2 * r + 1, 2 * c + 1);
            out.set(r, c, v);
        }
    }
    validate_density(out).expect("partial trace of a valid state is a valid state")
}

/// Convex mixture p*A + (1-p)*B.
pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix, Error> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange {
            name: "p",
            value: p,
            interval: "[0, 1]",
        });
    }
    let m = a.mat.scale(p).add(&b.mat.scale(1.0 - p));
    validate_density(m)
}

/// Random mixed two-qubit state: a convex mixture of up to four Haar-random
/// pure states. Used by the verification suites and tests.
pub fn random_mixed<R: Rng>(rng: &mut R) -> DensityMatrix {
    let n_terms = rng.random_range(1..=4usize);
    let mut weights: Vec<f64> = (0..n_terms)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = ComplexMatrix::zeros(4);
    for w in weights {
        let v = random_pure_vector(rng);
        m = m.add(&outer(&v).scale(w));
    }
    validate_density(m).expect("convex mixture of pure states is valid")
}

/// Haar-random pure two-qubit state vector.
pub fn random_pure_vector<R: Rng>(rng: &mut R) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(4);
    for _ in 0..4 {
        let (x, y) = gaussian_pair(rng);
        v.push(Complex64::new(x, y));
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Two independent standard normals by Box-Muller.
pub(crate) fn gaussian_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}
