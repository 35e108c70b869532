//! Family-agnostic metric pipeline: linear entropy, concurrence, fully
//! entangled fraction, Pauli correlation matrix, the teleportation witness
//! N and the CHSH witness M, optimal teleportation fidelity, and the
//! brute-force oracles that keep the closed-form layer honest.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{herm_eigen, pauli, psd_sqrt, ComplexMatrix, C_I, C_ZERO, PSD_CLAMP_TOL};
use crate::states::{gaussian_pair, DensityMatrix, DENSITY_TOL};

/// Imaginary parts of Pauli-Pauli expectation values above this signal an
/// invalid input.
pub const CORRELATION_IM_TOL: f64 = 1e-10;

/// Guard band for the N > 1 and M > 1 verdicts. The GHZ/W mixture sits
/// exactly on N = 1 for a quarter of its parameter range, so a bare float
/// comparison would flip verdicts on round-off; anything within 1e-12 of
/// the threshold counts as not exceeding it. Physically meaningful margins
/// in this problem are never below ~1e-6.
pub const VERDICT_EPS: f64 = 1e-12;

/// Real 3x3 correlation matrix t_nm = Tr(rho sigma_n x sigma_m) together
/// with the eigenvalues of T^T T, descending and clamped to >= 0.
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    t: [[f64; 3]; 3],
    u: [f64; 3],
}

impl CorrelationMatrix {
    pub fn t(&self) -> &[[f64; 3]; 3] {
        &self.t
    }

    /// Eigenvalues of T^T T, descending.
    pub fn u(&self) -> [f64; 3] {
        self.u
    }

    /// T v for a real 3-vector.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (n, row) in self.t.iter().enumerate() {
            out[n] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }
}

/// Full per-state metric bundle. Serializes with exactly these field names.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MetricsReport {
    pub s_lin: f64,
    pub concurrence: f64,
    pub fef: f64,
    pub n_value: f64,
    pub m_value: f64,
    pub f_opt: f64,
    pub f_opt_raw: f64,
    pub useful: bool,
    pub chsh_violated: bool,
}

/// Linear entropy (4/3)(1 - Tr rho^2): 0 for pure states, 1 for I/4.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    4.0 / 3.0 * (1.0 - rho.purity())
}

/// Spin-flipped matrix (sigma_y x sigma_y) rho* (sigma_y x sigma_y).
pub fn spin_flip(rho: &DensityMatrix) -> ComplexMatrix {
    let yy = pauli(2).kron(&pauli(2));
    yy.mul(&rho.matrix().conjugate()).mul(&yy)
}

/// Eigenvalues at round-off scale relative to the matrix norm are treated
/// as exact zeros before square-rooting. Without this, rank-deficient
/// states (pure family endpoints) pick up sqrt(1e-16)-sized noise in their
/// spin-flip singular values.
const LAMBDA_CLAMP: f64 = 1e-13;

/// The four spin-flip singular values: square roots of the eigenvalues of
/// sqrt(rho) * rho_tilde * sqrt(rho), descending. This Hermitian product has
/// the same spectrum as rho * rho_tilde, so no non-Hermitian eigenproblem is
/// ever needed.
pub fn concurrence_lambdas(rho: &DensityMatrix) -> Result<[f64; 4], Error> {
    let root = psd_sqrt(rho.matrix(), PSD_CLAMP_TOL)?;
    let k = root.mul(&spin_flip(rho)).mul(&root);
    let spec = herm_eigen(&k, 1e-9)?;
    let floor = LAMBDA_CLAMP * k.frobenius_norm();
    let mut lambdas = [0.0; 4];
    for (slot, &ev) in lambdas.iter_mut().zip(spec.eigenvalues.iter().rev()) {
        if ev < -DENSITY_TOL {
            return Err(Error::NotPSD {
                min_eigenvalue: ev,
                tol: DENSITY_TOL,
            });
        }
        *slot = if ev <= floor { 0.0 } else { ev.sqrt() };
    }
    Ok(lambdas)
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, Error> {
    let l = concurrence_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Pauli correlation matrix of a valid state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix, Error> {
    let mut t = [[0.0; 3]; 3];
    let mut worst_im: f64 = 0.0;
    for n in 1..=3 {
        for m in 1..=3 {
            let op = pauli(n).kron(&pauli(m));
            let val = rho.matrix().mul(&op).trace();
            worst_im = worst_im.max(val.im.abs());
            t[n - 1][m - 1] = val.re;
        }
    }
    if worst_im > CORRELATION_IM_TOL {
        return Err(Error::NonRealCorrelation {
            residual: worst_im,
            tol: CORRELATION_IM_TOL,
        });
    }

    // Eigenvalues of the real symmetric T^T T.
    let mut tt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tt[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let flat: Vec<f64> = tt.iter().flatten().copied().collect();
    let spec = herm_eigen(&ComplexMatrix::from_real(3, &flat), 1e-12)?;
    let mut u = [
        spec.eigenvalues[2].max(0.0),
        spec.eigenvalues[1].max(0.0),
        spec.eigenvalues[0].max(0.0),
    ];
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(CorrelationMatrix { t, u })
}

/// N(rho) = sum of the singular values of T. The state is useful for
/// standard teleportation iff N > 1.
pub fn n_value(t: &CorrelationMatrix) -> f64 {
    t.u.iter().map(|&x| x.sqrt()).sum()
}

/// M(rho) = sum of the two largest eigenvalues of T^T T. The state violates
/// the Bell-CHSH inequality iff M > 1; the maximal CHSH value is 2 sqrt(M).
pub fn m_value(t: &CorrelationMatrix) -> f64 {
    t.u[0] + t.u[1]
}

/// Reported optimal teleportation fidelity (1/2)(1 + max(N, 1)/3): clamped
/// at the classical bound 2/3 for channels that are not useful.
pub fn fidelity_from_n(n: f64) -> f64 {
    0.5 * (1.0 + n.max(1.0) / 3.0)
}

/// Unclamped (1/2)(1 + N/3).
pub fn fidelity_from_n_raw(n: f64) -> f64 {
    0.5 * (1.0 + n / 3.0)
}

/// The magic basis: four phase-adjusted Bell states in which maximally
/// entangled states are exactly the real unit coordinate vectors.
pub fn magic_basis() -> [[Complex64; 4]; 4] {
    let s = 1.0 / 2f64.sqrt();
    let r = Complex64::new(s, 0.0);
    let i = C_I * s;
    [
        [r, C_ZERO, C_ZERO, r],
        [i, C_ZERO, C_ZERO, -i],
        [C_ZERO, i, i, C_ZERO],
        [C_ZERO, r, -r, C_ZERO],
    ]
}

/// Fully entangled fraction: max over maximally entangled |Psi> of
/// <Psi|rho|Psi>, computed as the largest eigenvalue of Re(G) where
/// G_ij = <e_i|rho|e_j> in the magic basis. Always in [1/4, 1].
pub fn fully_entangled_fraction(rho: &DensityMatrix) -> f64 {
    let basis = magic_basis();
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = rho.matrix().form(&basis[i], &basis[j]).re;
        }
    }
    let flat: Vec<f64> = g.iter().flatten().copied().collect();
    let spec = herm_eigen(&ComplexMatrix::from_real(4, &flat), 1e-12)
        .expect("real symmetric Gram matrix");
    spec.max_eigenvalue()
}

/// Haar-random element of SU(2) (uniform unit quaternion).
fn su2_haar<R: Rng>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let (x0, x1) = gaussian_pair(rng);
    let (x2, x3) = gaussian_pair(rng);
    let norm = (x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3).sqrt();
    let a = Complex64::new(x0 / norm, x1 / norm);
    let b = Complex64::new(x2 / norm, x3 / norm);
    [[a, b], [-b.conj(), a.conj()]]
}

/// Sampling lower bound for the fully entangled fraction: the best overlap
/// with `samples` random maximally entangled states (U_A x U_B)|Phi+>.
/// Deterministic for a given seed; never exceeds the exact value.
pub fn fef_sampling_oracle(rho: &DensityMatrix, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "need at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = 1.0 / 2f64.sqrt();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let ua = su2_haar(&mut rng);
        let ub = su2_haar(&mut rng);
        // (U_A x U_B)|Phi+> has amplitudes sum_k U_A[i][k] U_B[j][k] / sqrt(2).
        let mut psi = [C_ZERO; 4];
        for i in 0..2 {
            for j in 0..2 {
                psi[2 * i + j] = (ua[i][0] * ub[j][0] + ua[i][1] * ub[j][1]) * s;
            }
        }
        let overlap = rho.matrix().form(&psi, &psi).re;
        best = best.max(overlap);
    }
    best
}

/// Unit vector on S^2 from polar angles.
fn unit_vec(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

fn vec3_norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn vec3_angles(v: [f64; 3]) -> (f64, f64) {
    let n = vec3_norm(v);
    if n == 0.0 {
        return (0.0, 0.0);
    }
    ((v[2] / n).clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

/// CHSH expectation a.T(b+b') + a'.T(b-b') for unit vectors encoded as
/// polar-angle pairs [a, a', b, b'].
fn chsh_objective(t: &CorrelationMatrix, angles: &[f64; 8]) -> f64 {
    let a = unit_vec(angles[0], angles[1]);
    let ap = unit_vec(angles[2], angles[3]);
    let b = unit_vec(angles[4], angles[5]);
    let bp = unit_vec(angles[6], angles[7]);
    let plus = t.apply([b[0] + bp[0], b[1] + bp[1], b[2] + bp[2]]);
    let minus = t.apply([b[0] - bp[0], b[1] - bp[1], b[2] - bp[2]]);
    (0..3).map(|k| a[k] * plus[k] + ap[k] * minus[k]).sum()
}

/// Operational CHSH maximum: maximize |Tr(rho B)| over CHSH operators
/// B = a.s x (b+b').s + a'.s x (b-b').s with unit measurement vectors.
///
/// The four measurement directions are searched on a spherical grid over
/// (b, b') with (a, a') seeded from the analytic optimum for each candidate
/// pair, then all eight angles are polished by 200 coordinate-wise
/// golden-section steps. Returns the best value found, a lower bound on
/// the analytic maximum 2 sqrt(M).
pub fn chsh_max_oracle(rho: &DensityMatrix, grid: usize) -> Result<f64, Error> {
    assert!(grid >= 8, "need at least 8 subdivisions per angle");
    let t = correlation_matrix(rho)?;

    let n_phi = grid;
    let n_theta = (grid / 2).max(4);
    let mut best_val = 0.0_f64;
    let mut best_angles = [0.0_f64; 8];

    let thetas: Vec<f64> = (0..=n_theta)
        .map(|i| std::f64::consts::PI * i as f64 / n_theta as f64)
        .collect();
    let phis: Vec<f64> = (0..n_phi)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n_phi as f64)
        .collect();

    for &tb in &thetas {
        for &pb in &phis {
            let b = unit_vec(tb, pb);
            for &tbp in &thetas {
                for &pbp in &phis {
                    let bp = unit_vec(tbp, pbp);
                    let plus = t.apply([b[0] + bp[0], b[1] + bp[1], b[2] + bp[2]]);
                    let minus = t.apply([b[0] - bp[0], b[1] - bp[1], b[2] - bp[2]]);
                    let val = vec3_norm(plus) + vec3_norm(minus);
                    if val > best_val {
                        let (ta, pa) = vec3_angles(plus);
                        let (tap, pap) = vec3_angles(minus);
                        best_val = val;
                        best_angles = [ta, pa, tap, pap, tb, pb, tbp, pbp];
                    }
                }
            }
        }
    }
    if best_val == 0.0 {
        // T = 0: every CHSH expectation vanishes.
        return Ok(0.0);
    }

    // Coordinate-wise golden-section polish over all eight angles.
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut width = std::f64::consts::PI / grid as f64;
    let mut angles = best_angles;
    let mut value = chsh_objective(&t, &angles);
    for step in 0..200 {
        let k = step % 8;
        let (mut lo, mut hi) = (angles[k] - width, angles[k] + width);
        let mut x1 = hi - golden * (hi - lo);
        let mut x2 = lo + golden * (hi - lo);
        let mut probe = angles;
        probe[k] = x1;
        let mut f1 = chsh_objective(&t, &probe);
        probe[k] = x2;
        let mut f2 = chsh_objective(&t, &probe);
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + golden * (hi - lo);
                probe[k] = x2;
                f2 = chsh_objective(&t, &probe);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - golden * (hi - lo);
                probe[k] = x1;
                f1 = chsh_objective(&t, &probe);
            }
        }
        let candidate = 0.5 * (lo + hi);
        probe = angles;
        probe[k] = candidate;
        let f = chsh_objective(&t, &probe);
        if f > value {
            value = f;
            angles = probe;
        }
        if k == 7 {
            width *= 0.7;
        }
    }
    Ok(value.abs().max(best_val))
}

/// Run the whole definitional pipeline on one state.
pub fn analyze(rho: &DensityMatrix) -> Result<MetricsReport, Error> {
    let t = correlation_matrix(rho)?;
    let n = n_value(&t);
    let m = m_value(&t);
    Ok(MetricsReport {
        s_lin: linear_entropy(rho),
        concurrence: concurrence(rho)?,
        fef: fully_entangled_fraction(rho),
        n_value: n,
        m_value: m,
        f_opt: fidelity_from_n(n),
        f_opt_raw: fidelity_from_n_raw(n),
        useful: n > 1.0 + VERDICT_EPS,
        chsh_violated: m > 1.0 + VERDICT_EPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C_ONE as ONE;
    use crate::states::{make_state, validate_density, FamilySpec};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn maximally_mixed() -> DensityMatrix {
        validate_density(ComplexMatrix::identity(4).scale(0.25)).unwrap()
    }

    #[test]
    fn linear_entropy_extremes() {
        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        assert_close(linear_entropy(&singlet), 0.0, 1e-12);
        assert_close(linear_entropy(&maximally_mixed()), 1.0, 1e-12);
        let mems = make_state(FamilySpec::Mems { c: 2.0 / 3.0 }).unwrap();
        assert_close(linear_entropy(&mems), 16.0 / 27.0, 1e-13);
    }

    #[test]
    fn spin_flip_cases() {
        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        assert!(spin_flip(&singlet).max_abs_diff(singlet.matrix()) <= 1e-14);

        // |00><00| flips to |11><11|.
        let mut m = ComplexMatrix::zeros(4);
        m.set(0, 0, ONE);
        let zz = validate_density(m).unwrap();
        let flipped = spin_flip(&zz);
        assert_close(flipped.get(3, 3).re, 1.0, 1e-15);
        assert_close(flipped.get(0, 0).re, 0.0, 1e-15);

        let mm = maximally_mixed();
        assert!(spin_flip(&mm).max_abs_diff(mm.matrix()) <= 1e-15);
    }

    #[test]
    fn concurrence_reference_points() {
        let w_half = make_state(FamilySpec::Werner { f_w: 0.5 }).unwrap();
        assert_close(concurrence(&w_half).unwrap(), 0.0, 1e-10);
        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        assert_close(concurrence(&singlet).unwrap(), 1.0, 1e-10);
        let new0 = make_state(FamilySpec::NmemsNew { p: 0.0 }).unwrap();
        assert_close(concurrence(&new0).unwrap(), 2.0 / 3.0, 1e-10);
    }

    #[test]
    fn correlation_matrix_families() {
        // Werner: T = -((4F-1)/3) I.
        let f_w = 0.7;
        let t = correlation_matrix(&make_state(FamilySpec::Werner { f_w }).unwrap()).unwrap();
        let expect = (4.0 * f_w - 1.0) / 3.0;
        for n in 0..3 {
            for m in 0..3 {
                let want = if n == m { -expect } else { 0.0 };
                assert_close(t.t()[n][m], want, 1e-12);
            }
            assert_close(t.u()[n], expect * expect, 1e-12);
        }

        // New family: T = diag(2(1-p)/3, 2(1-p)/3, (4p-1)/3).
        let p = 0.3;
        let t = correlation_matrix(&make_state(FamilySpec::NmemsNew { p }).unwrap()).unwrap();
        assert_close(t.t()[0][0], 2.0 * (1.0 - p) / 3.0, 1e-12);
        assert_close(t.t()[1][1], 2.0 * (1.0 - p) / 3.0, 1e-12);
        assert_close(t.t()[2][2], (4.0 * p - 1.0) / 3.0, 1e-12);

        // Werner derivative: diag(2s(4F-1)/3, -2s(4F-1)/3, (4F-1)/3).
        let (f_w, a) = (0.85, 0.8);
        let t = correlation_matrix(
            &make_state(FamilySpec::WernerDerivative { f_w, a }).unwrap(),
        )
        .unwrap();
        let s = (a * (1.0 - a)).sqrt();
        let k = 4.0 * f_w - 1.0;
        assert_close(t.t()[0][0], 2.0 * s * k / 3.0, 1e-12);
        assert_close(t.t()[1][1], -2.0 * s * k / 3.0, 1e-12);
        assert_close(t.t()[2][2], k / 3.0, 1e-12);
    }

    #[test]
    fn n_and_m_reference_points() {
        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        let t = correlation_matrix(&singlet).unwrap();
        assert_close(n_value(&t), 3.0, 1e-12);
        assert_close(m_value(&t), 2.0, 1e-12);

        let new0 = make_state(FamilySpec::NmemsNew { p: 0.0 }).unwrap();
        let t = correlation_matrix(&new0).unwrap();
        assert_close(n_value(&t), 5.0 / 3.0, 1e-12);
        assert_close(m_value(&t), 8.0 / 9.0, 1e-12);

        let new_half = make_state(FamilySpec::NmemsNew { p: 0.5 }).unwrap();
        assert_close(n_value(&correlation_matrix(&new_half).unwrap()), 1.0, 1e-12);

        assert_close(m_value(&correlation_matrix(&maximally_mixed()).unwrap()), 0.0, 1e-15);
    }

    #[test]
    fn fidelity_from_n_clamps() {
        assert_close(fidelity_from_n(3.0), 1.0, 1e-15);
        assert_close(fidelity_from_n(1.0), 2.0 / 3.0, 1e-15);
        assert_close(fidelity_from_n(5.0 / 3.0), 7.0 / 9.0, 1e-15);
        assert_close(fidelity_from_n(0.4), 2.0 / 3.0, 1e-15);
        assert_close(fidelity_from_n_raw(0.4), 0.5 * (1.0 + 0.4 / 3.0), 1e-15);
    }

    #[test]
    fn fef_reference_points() {
        for f_w in [0.25, 0.4, 0.6, 0.9, 1.0] {
            let rho = make_state(FamilySpec::Werner { f_w }).unwrap();
            assert_close(fully_entangled_fraction(&rho), f_w, 1e-12);
        }
        for c in [0.0, 0.3, 2.0 / 3.0, 0.9, 1.0] {
            let rho = make_state(FamilySpec::Mems { c }).unwrap();
            let h = crate::states::mems_h(c);
            assert_close(fully_entangled_fraction(&rho), h + c / 2.0, 1e-12);
        }
        assert_close(fully_entangled_fraction(&maximally_mixed()), 0.25, 1e-12);
        // Below F_w = 1/4 the best overlap comes from states orthogonal to
        // the singlet, so the FEF floors at (1 - F_w)/3 instead of F_w.
        let rho = make_state(FamilySpec::Werner { f_w: 0.1 }).unwrap();
        assert_close(fully_entangled_fraction(&rho), 0.3, 1e-12);
    }

    #[test]
    fn fef_oracle_on_degenerate_state() {
        let mm = maximally_mixed();
        let sampled = fef_sampling_oracle(&mm, 64, 11);
        assert_close(sampled, 0.25, 1e-12);
    }

    #[test]
    fn fef_oracle_approaches_exact_from_below() {
        let w09 = make_state(FamilySpec::Werner { f_w: 0.9 }).unwrap();
        let sampled = fef_sampling_oracle(&w09, 20_000, 6);
        assert!(sampled <= 0.9 + 1e-9);
        assert!(0.9 - sampled <= 2e-3, "gap {}", 0.9 - sampled);

        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        let sampled = fef_sampling_oracle(&singlet, 20_000, 6);
        assert!(sampled <= 1.0 + 1e-9);
        assert!(1.0 - sampled <= 1e-3, "gap {}", 1.0 - sampled);
    }

    #[test]
    fn chsh_oracle_reference_points() {
        let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
        let reached = chsh_max_oracle(&singlet, 12).unwrap();
        assert_close(reached, 2.0 * 2f64.sqrt(), 1e-3);
        // T = 0 for the maximally mixed state: every CHSH value vanishes.
        assert_close(chsh_max_oracle(&maximally_mixed(), 12).unwrap(), 0.0, 1e-6);
    }

    #[test]
    fn analyze_werner_09() {
        let rho = make_state(FamilySpec::Werner { f_w: 0.9 }).unwrap();
        let rep = analyze(&rho).unwrap();
        assert_close(rep.concurrence, 0.8, 1e-10);
        assert_close(rep.fef, 0.9, 1e-12);
        assert_close(rep.n_value, 2.6, 1e-12);
        assert_close(rep.f_opt, (2.0 * 0.9 + 1.0) / 3.0, 1e-12);
        assert!(rep.chsh_violated);
        assert!(rep.useful);
    }

    #[test]
    fn analyze_werner_075_no_chsh() {
        let rho = make_state(FamilySpec::Werner { f_w: 0.75 }).unwrap();
        let rep = analyze(&rho).unwrap();
        assert_close(rep.f_opt, 2.5 / 3.0, 1e-12);
        assert!(!rep.chsh_violated);
        assert!(rep.useful);
    }

    #[test]
    fn analyze_new_027_entangled_but_useless() {
        let rho = make_state(FamilySpec::NmemsNew { p: 0.27 }).unwrap();
        let rep = analyze(&rho).unwrap();
        assert!(!rep.useful);
        assert!(rep.concurrence > 0.0);
        assert_close(rep.f_opt, 2.0 / 3.0, 1e-12);
    }

    #[test]
    fn report_serializes_with_pinned_field_names() {
        let rho = make_state(FamilySpec::Werner { f_w: 0.9 }).unwrap();
        let rep = analyze(&rho).unwrap();
        let json = serde_json::to_value(rep).unwrap();
        for key in [
            "s_lin",
            "concurrence",
            "fef",
            "n_value",
            "m_value",
            "f_opt",
            "f_opt_raw",
            "useful",
            "chsh_violated",
        ] {
            assert!(json.get(key).is_some(), "missing field {key}");
        }
    }
}
