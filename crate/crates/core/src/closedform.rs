//! Per-family analytic formulas, parameter-range classifiers and comparison
//! conditions, implemented independently of the definitional matrix pipeline
//! in [`crate::metrics`] so the two can be cross-validated.
//!
//! The MEMS family carries a documented discrepancy: evaluating the
//! correlation-matrix definition on the MEMS matrix gives
//! T = diag(C, -C, 4h-1), which reproduces the family's teleportation
//! fidelities exactly, while the printed reference T-matrix has first entry
//! h(C)+C and does not. The definitional values are authoritative here; the
//! printed-variant numbers are still computed into a `paper_variant` side
//! channel so the disagreement stays visible and machine-checkable.

use serde::Serialize;

use crate::error::Error;
use crate::metrics::{fidelity_from_n, fidelity_from_n_raw};
use crate::states::{mems_h, FamilySpec};

/// Maximal linear entropy of a two-qubit state that is not I/4-adjacent
/// degenerate for these families: the Werner/MEMS formulas live on [0, 8/9].
pub const SL_MAX: f64 = 8.0 / 9.0;

/// MEMS branch point in concurrence.
pub const MEMS_BRANCH_C: f64 = 2.0 / 3.0;

/// MEMS branch point in linear entropy (image of C = 2/3 under both
/// branches).
pub const MEMS_BRANCH_SL: f64 = 16.0 / 27.0;

/// The MEMS family is a useful teleportation channel iff S_L < 22/27.
pub const MEMS_USEFUL_SL_MAX: f64 = 22.0 / 27.0;

/// Lower end of the S_L domain of the GHZ/W-mixture fidelity curve
/// (equals 16/27).
pub const NEW_SL_MIN: f64 = 208.0 / 351.0;

/// Upper end (exclusive) of that domain (equals 19/24, the image of
/// p = 1/4).
pub const NEW_SL_MAX: f64 = 2223.0 / 2808.0;

/// Classical (measure-and-prepare) fidelity bound.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Werner singlet fraction above which the Bell-CHSH inequality is
/// violated: (3 + sqrt(2)) / (4 sqrt(2)).
pub fn werner_chsh_fw_boundary() -> f64 {
    (3.0 + 2f64.sqrt()) / (4.0 * 2f64.sqrt())
}

/// Entanglement threshold of the GHZ/W mixture: 7 - 3 sqrt(5), the positive
/// root of 4(1-p)^2 = 3p(p+2).
pub fn new_entangled_p_max() -> f64 {
    7.0 - 3.0 * 5f64.sqrt()
}

/// Definitional MEMS CHSH threshold: violation iff 2C^2 > 1, i.e.
/// C > 1/sqrt(2).
pub fn mems_chsh_c_threshold() -> f64 {
    1.0 / 2f64.sqrt()
}

/// MEMS CHSH threshold implied by the printed-variant T-matrix,
/// (sqrt(153) - 3) / 18. Kept for the discrepancy record only.
pub fn mems_chsh_c_threshold_paper_variant() -> f64 {
    (153f64.sqrt() - 3.0) / 18.0
}

/// One named constant for the exported constants table.
#[derive(Clone, Debug, Serialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub value: f64,
    pub description: &'static str,
}

/// Every interval endpoint and threshold used by the formulas, in one place.
pub fn named_constants() -> Vec<NamedConstant> {
    vec![
        NamedConstant {
            name: "classical_fidelity",
            value: CLASSICAL_FIDELITY,
            description: "best average fidelity of any measure-and-prepare strategy",
        },
        NamedConstant {
            name: "sl_max",
            value: SL_MAX,
            description: "upper end of the Werner/MEMS linear-entropy domain",
        },
        NamedConstant {
            name: "werner_chsh_fw_boundary",
            value: werner_chsh_fw_boundary(),
            description: "Werner singlet fraction at which M = 1: (3+sqrt(2))/(4 sqrt(2))",
        },
        NamedConstant {
            name: "mems_branch_c",
            value: MEMS_BRANCH_C,
            description: "MEMS h(C) branch point in concurrence",
        },
        NamedConstant {
            name: "mems_branch_sl",
            value: MEMS_BRANCH_SL,
            description: "MEMS branch point in linear entropy",
        },
        NamedConstant {
            name: "mems_useful_sl_max",
            value: MEMS_USEFUL_SL_MAX,
            description: "MEMS is a useful channel iff S_L < 22/27",
        },
        NamedConstant {
            name: "mems_chsh_c_threshold",
            value: mems_chsh_c_threshold(),
            description: "definitional MEMS CHSH threshold 1/sqrt(2) (violation iff 2C^2 > 1)",
        },
        NamedConstant {
            name: "mems_chsh_c_threshold_paper_variant",
            value: mems_chsh_c_threshold_paper_variant(),
            description: "CHSH threshold (sqrt(153)-3)/18 implied by the printed-variant MEMS T",
        },
        NamedConstant {
            name: "new_entangled_p_max",
            value: new_entangled_p_max(),
            description: "GHZ/W mixture is entangled iff p < 7 - 3 sqrt(5)",
        },
        NamedConstant {
            name: "new_useful_p_max",
            value: 0.25,
            description: "GHZ/W mixture is a useful channel iff p < 1/4",
        },
        NamedConstant {
            name: "new_sl_min",
            value: NEW_SL_MIN,
            description: "lower end of the GHZ/W-mixture S_L domain (= 16/27)",
        },
        NamedConstant {
            name: "new_sl_max",
            value: NEW_SL_MAX,
            description: "upper end (exclusive) of the GHZ/W-mixture S_L domain (= 19/24)",
        },
    ]
}

/// Closed-form metric bundle for one family member. All numeric fields are
/// evaluated from the printed per-family expressions, never from matrix
/// algebra.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyClosedForm {
    pub family: FamilySpec,
    pub s_lin: f64,
    pub concurrence: f64,
    pub fef: f64,
    pub n_value: f64,
    pub m_value: f64,
    pub f_opt: f64,
    pub f_opt_raw: f64,
    pub entangled: bool,
    pub useful: bool,
    pub chsh_violated: bool,
    /// MEMS only: the printed-variant T-matrix numbers (see module docs).
    pub paper_variant: Option<MemsPaperVariant>,
}

/// Quantities derived from the printed-variant MEMS T-matrix
/// diag(h(C)+C, -C, 4h(C)-1).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MemsPaperVariant {
    pub t_diag: [f64; 3],
    pub n_value: f64,
    pub m_value: f64,
    pub f_opt: f64,
    pub chsh_violated: bool,
}

fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    interval: &'static str,
) -> Result<(), Error> {
    if !(value >= lo && value <= hi) {
        return Err(Error::ParamOutOfRange {
            name,
            value,
            interval,
        });
    }
    Ok(())
}

/// Werner state closed forms as functions of the singlet fraction.
pub fn werner_cf(f_w: f64) -> Result<FamilyClosedForm, Error> {
    check_range("F_w", f_w, 0.0, 1.0, "[0, 1]")?;
    let k = 4.0 * f_w - 1.0;
    let n = k.abs();
    let m = 2.0 * k * k / 9.0;
    Ok(FamilyClosedForm {
        family: FamilySpec::Werner { f_w },
        s_lin: 1.0 - (k / 3.0) * (k / 3.0),
        concurrence: (2.0 * f_w - 1.0).max(0.0),
        // Below F_w = 1/4 the best maximally entangled overlap comes from
        // the triplet sector, so the fully entangled fraction floors at
        // (1 - F_w)/3 rather than following the label F_w.
        fef: f_w.max((1.0 - f_w) / 3.0),
        n_value: n,
        m_value: m,
        f_opt: if f_w > 0.5 {
            (2.0 * f_w + 1.0) / 3.0
        } else {
            CLASSICAL_FIDELITY
        },
        f_opt_raw: fidelity_from_n_raw(n),
        entangled: f_w > 0.5,
        useful: f_w > 0.5,
        chsh_violated: m > 1.0,
        paper_variant: None,
    })
}

/// MEMS closed forms as functions of the concurrence.
pub fn mems_cf(c: f64) -> Result<FamilyClosedForm, Error> {
    check_range("C", c, 0.0, 1.0, "[0, 1]")?;
    let h = mems_h(c);
    let s_lin = if c >= MEMS_BRANCH_C {
        8.0 / 3.0 * (c - c * c)
    } else {
        2.0 / 3.0 * (4.0 / 3.0 - c * c)
    };
    // The printed branch fidelity (5+3C)/9 drops below the classical bound
    // for C < 1/3 (where N <= 1); the reported optimum clamps there like
    // every other family.
    let f_printed = if c >= MEMS_BRANCH_C {
        (2.0 * c + 1.0) / 3.0
    } else {
        (5.0 + 3.0 * c) / 9.0
    };
    let f_opt = f_printed.max(CLASSICAL_FIDELITY);
    let z = 4.0 * h - 1.0;
    let n = 2.0 * c + z.abs();
    let m = (2.0 * c * c).max(c * c + z * z);

    let t_diag = [h + c, -c, z];
    let mut u: Vec<f64> = t_diag.iter().map(|x| x * x).collect();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let n_paper = t_diag.iter().map(|x| x.abs()).sum::<f64>();
    let m_paper = u[0] + u[1];

    Ok(FamilyClosedForm {
        family: FamilySpec::Mems { c },
        s_lin,
        concurrence: c,
        fef: h + c / 2.0,
        n_value: n,
        m_value: m,
        f_opt,
        f_opt_raw: fidelity_from_n_raw(n),
        entangled: c > 0.0,
        useful: s_lin < MEMS_USEFUL_SL_MAX,
        chsh_violated: m > 1.0,
        paper_variant: Some(MemsPaperVariant {
            t_diag,
            n_value: n_paper,
            m_value: m_paper,
            f_opt: fidelity_from_n(n_paper),
            chsh_violated: m_paper > 1.0,
        }),
    })
}

/// The printed MEMS fidelity branches (2C+1)/3 for C >= 2/3 and (5+3C)/9
/// below, without the classical clamp. Equals (1/2)(1 + N/3) for the
/// definitional N = 2C + |4h(C)-1| on the whole range.
pub fn mems_printed_fidelity(c: f64) -> f64 {
    if c >= MEMS_BRANCH_C {
        (2.0 * c + 1.0) / 3.0
    } else {
        (5.0 + 3.0 * c) / 9.0
    }
}

/// Upper end of the entangled/useful window of the Werner derivative:
/// a < (1/2)(1 + sqrt(3(4 F_w^2 - 1)) / (4 F_w - 1)).
pub fn wd_entangled_a_bound(f_w: f64) -> f64 {
    let k = 4.0 * f_w - 1.0;
    0.5 * (1.0 + (3.0 * (4.0 * f_w * f_w - 1.0)).sqrt() / k)
}

fn wd_check(f_w: f64, a: f64) -> Result<(), Error> {
    if !(f_w > 0.5 && f_w <= 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "F_w",
            value: f_w,
            interval: "(1/2, 1]",
        });
    }
    check_range("a", a, 0.5, 1.0, "[1/2, 1]")
}

/// Werner-derivative closed forms.
pub fn wd_cf(f_w: f64, a: f64) -> Result<FamilyClosedForm, Error> {
    wd_check(f_w, a)?;
    let k = 4.0 * f_w - 1.0;
    let s = (a * (1.0 - a)).sqrt();
    let n = k * (1.0 + 4.0 * s) / 3.0;
    let m = (1.0 + 4.0 * a - 4.0 * a * a) * k * k / 9.0;
    let bound = wd_entangled_a_bound(f_w);
    let in_window = a < bound;
    Ok(FamilyClosedForm {
        family: FamilySpec::WernerDerivative { f_w, a },
        // The mixedness does not depend on a: the spectrum is the Werner
        // one for every a.
        s_lin: 1.0 - (k / 3.0) * (k / 3.0),
        concurrence: (2.0 / 3.0) * (k * s - (1.0 - f_w)).max(0.0),
        fef: (1.0 + 2.0 * f_w + 2.0 * k * s) / 6.0,
        n_value: n,
        m_value: m,
        f_opt: fidelity_from_n(n),
        f_opt_raw: fidelity_from_n_raw(n),
        entangled: in_window,
        useful: in_window,
        chsh_violated: m > 1.0,
        paper_variant: None,
    })
}

/// Closed forms for the GHZ/W mixture.
pub fn new_cf(p: f64) -> Result<FamilyClosedForm, Error> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    let n = if p < 0.25 { (5.0 - 8.0 * p) / 3.0 } else { 1.0 };
    let m = if p < 0.5 {
        (8.0 + 8.0 * p * p - 16.0 * p) / 9.0
    } else {
        (20.0 * p * p - 16.0 * p + 5.0) / 9.0
    };
    Ok(FamilyClosedForm {
        family: FamilySpec::NmemsNew { p },
        s_lin: 2.0 * (8.0 + 14.0 * p - 13.0 * p * p) / 27.0,
        concurrence: 2.0 * ((1.0 - p) / 3.0 - (p * (p + 2.0) / 12.0).sqrt()).max(0.0),
        fef: if p <= 0.5 {
            2.0 * (1.0 - p) / 3.0
        } else {
            (2.0 * p + 1.0) / 6.0
        },
        n_value: n,
        m_value: m,
        f_opt: if p < 0.25 {
            (7.0 - 4.0 * p) / 9.0
        } else {
            CLASSICAL_FIDELITY
        },
        f_opt_raw: fidelity_from_n_raw(n),
        entangled: p < new_entangled_p_max(),
        useful: p < 0.25,
        chsh_violated: false,
        paper_variant: None,
    })
}

/// Evaluate the closed forms for a tagged family spec.
pub fn family_cf(spec: FamilySpec) -> Result<FamilyClosedForm, Error> {
    match spec {
        FamilySpec::Werner { f_w } => werner_cf(f_w),
        FamilySpec::Mems { c } => mems_cf(c),
        FamilySpec::WernerDerivative { f_w, a } => wd_cf(f_w, a),
        FamilySpec::NmemsNew { p } => new_cf(p),
    }
}

/// Family tag without parameters, for fidelity-versus-entropy lookups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Werner,
    Mems,
    Wd,
    New,
}

impl FamilyKind {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "werner" => Some(FamilyKind::Werner),
            "mems" => Some(FamilyKind::Mems),
            "wd" => Some(FamilyKind::Wd),
            "new" => Some(FamilyKind::New),
            _ => None,
        }
    }
}

/// Optimal teleportation fidelity as a function of linear entropy, one
/// printed expression per family. The Werner-derivative curve additionally
/// needs the unitary parameter `a`.
///
/// Domains: Werner and MEMS on [0, 8/9] (the Werner curve extends
/// continuously to the closed endpoint), the Werner derivative on [0, 8/9),
/// and the GHZ/W mixture on [16/27, 19/24).
pub fn fidelity_vs_entropy(kind: FamilyKind, s_lin: f64, a: Option<f64>) -> Result<f64, Error> {
    match kind {
        FamilyKind::Werner => {
            if !(0.0..=SL_MAX).contains(&s_lin) {
                return Err(Error::DomainError {
                    family: "werner",
                    value: s_lin,
                    interval: "[0, 8/9]",
                });
            }
            Ok((1.0 + (1.0 - s_lin).sqrt()) / 2.0)
        }
        FamilyKind::Mems => {
            if !(0.0..=SL_MAX).contains(&s_lin) {
                return Err(Error::DomainError {
                    family: "mems",
                    value: s_lin,
                    interval: "[0, 8/9]",
                });
            }
            if s_lin <= MEMS_BRANCH_SL {
                Ok(2.0 / 3.0 + (2.0 - 3.0 * s_lin).sqrt() / (3.0 * 2f64.sqrt()))
            } else {
                Ok(5.0 / 9.0 + (8.0 - 9.0 * s_lin).sqrt() / (3.0 * 6f64.sqrt()))
            }
        }
        FamilyKind::Wd => {
            let a = a.ok_or(Error::MissingParam { name: "a" })?;
            check_range("a", a, 0.5, 1.0, "[1/2, 1]")?;
            if !(0.0..SL_MAX).contains(&s_lin) {
                return Err(Error::DomainError {
                    family: "wd",
                    value: s_lin,
                    interval: "[0, 8/9)",
                });
            }
            let s = (a * (1.0 - a)).sqrt();
            Ok((9.0 + 3.0 * (1.0 - s_lin).sqrt() * (1.0 + 4.0 * s)) / 18.0)
        }
        FamilyKind::New => {
            if !(NEW_SL_MIN..NEW_SL_MAX).contains(&s_lin) {
                return Err(Error::DomainError {
                    family: "new",
                    value: s_lin,
                    interval: "[208/351, 2223/2808)",
                });
            }
            let p = (14.0 - (612.0 - 702.0 * s_lin).sqrt()) / 26.0;
            Ok((7.0 - 4.0 * p) / 9.0)
        }
    }
}

/// Recover the Werner singlet fraction from a linear entropy.
pub fn werner_fw_from_entropy(s_lin: f64) -> f64 {
    (1.0 + 3.0 * (1.0 - s_lin).sqrt()) / 4.0
}

/// Recover the MEMS concurrence from a linear entropy. The family's
/// entropy curve is a bijection of [0, 8/9]: its upper branch (C >= 2/3)
/// covers S_L <= 16/27 and the lower branch the rest.
pub fn mems_c_from_entropy(s_lin: f64) -> Result<f64, Error> {
    if !(0.0..=SL_MAX).contains(&s_lin) {
        return Err(Error::DomainError {
            family: "mems",
            value: s_lin,
            interval: "[0, 8/9]",
        });
    }
    if s_lin <= MEMS_BRANCH_SL {
        Ok((1.0 + (1.0 - 1.5 * s_lin).sqrt()) / 2.0)
    } else {
        Ok(((8.0 - 9.0 * s_lin) / 6.0).sqrt())
    }
}

/// Recover the GHZ/W mixing weight from a linear entropy (useful branch,
/// p < 1/4).
pub fn new_p_from_entropy(s_lin: f64) -> Result<f64, Error> {
    if !(NEW_SL_MIN..NEW_SL_MAX).contains(&s_lin) {
        return Err(Error::DomainError {
            family: "new",
            value: s_lin,
            interval: "[208/351, 2223/2808)",
        });
    }
    Ok((14.0 - (612.0 - 702.0 * s_lin).sqrt()) / 26.0)
}

/// Conditions under which the GHZ/W mixture beats the Werner derivative as
/// a teleportation channel.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrossoverReport {
    pub f_w: f64,
    pub a: f64,
    /// Mixing weights p below this bound give N(rho_new) > N(rho_wd).
    pub p_max: f64,
    /// Admissible window for `a` (requires F_w > 2/3).
    pub a_window: Option<(f64, f64)>,
    pub feasible: bool,
}

/// Evaluate the crossover conditions at (F_w, a).
pub fn crossover(f_w: f64, a: f64) -> Result<CrossoverReport, Error> {
    wd_check(f_w, a)?;
    let k = 4.0 * f_w - 1.0;
    let s = (a * (1.0 - a)).sqrt();
    let p_max = 1.0 - ((1.0 + 2.0 * f_w) / 4.0 + k * s / 2.0);
    let a_window = if f_w > 2.0 / 3.0 {
        let lo = 0.5 + ((f_w + 1.0) * (3.0 * f_w - 2.0)).sqrt() / k;
        Some((lo, wd_entangled_a_bound(f_w)))
    } else {
        None
    };
    let feasible = match a_window {
        Some((lo, hi)) => a > lo && a < hi && p_max > 0.0,
        None => false,
    };
    Ok(CrossoverReport {
        f_w,
        a,
        p_max,
        a_window,
        feasible,
    })
}

/// CHSH classification of the Werner derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WdBellCase {
    /// F_w below (3+sqrt(2))/(4 sqrt(2)): beta and gamma are complex and
    /// the inequality is never violated.
    NotApplicable,
    /// a >= gamma: the inequality is satisfied (M <= 1).
    CaseI,
    /// a < gamma: the inequality is violated (M > 1).
    CaseII,
    /// F_w exactly at the boundary: beta = gamma = 1/2 and M <= 1 with
    /// equality only at a = 1/2.
    CaseIII,
}

impl std::fmt::Display for WdBellCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            WdBellCase::NotApplicable => "not_applicable",
            WdBellCase::CaseI => "case_i",
            WdBellCase::CaseII => "case_ii",
            WdBellCase::CaseIII => "case_iii",
        };
        write!(f, "{label}")
    }
}

/// Classify the CHSH status of the Werner derivative at (F_w, a), returning
/// the case label and, when real, the roots (beta, gamma) of M = 1 in `a`.
/// The label always agrees with the sign of wd_cf(F_w, a).m_value - 1.
pub fn wd_bell_classify(f_w: f64, a: f64) -> Result<(WdBellCase, Option<(f64, f64)>), Error> {
    wd_check(f_w, a)?;
    let boundary = werner_chsh_fw_boundary();
    if (f_w - boundary).abs() <= 1e-12 {
        return Ok((WdBellCase::CaseIII, Some((0.5, 0.5))));
    }
    let k = 4.0 * f_w - 1.0;
    let disc = 2.0 * k * k - 9.0;
    if disc < 0.0 {
        return Ok((WdBellCase::NotApplicable, None));
    }
    let root = disc.sqrt() / k;
    let beta = 0.5 * (1.0 - root);
    let gamma = 0.5 * (1.0 + root);
    let case = if a < gamma {
        WdBellCase::CaseII
    } else {
        WdBellCase::CaseI
    };
    Ok((case, Some((beta, gamma))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn werner_chsh_boundary_is_exact() {
        let cf = werner_cf(werner_chsh_fw_boundary()).unwrap();
        assert!((cf.m_value - 1.0).abs() <= 1e-12);
        assert!(!cf.chsh_violated);
    }

    #[test]
    fn werner_pure_limit() {
        let cf = werner_cf(1.0).unwrap();
        assert_close(cf.f_opt, 1.0, 1e-15);
        assert_close(cf.s_lin, 0.0, 1e-15);
        assert_close(cf.m_value, 2.0, 1e-15);
    }

    #[test]
    fn werner_entropy_round_trip_table_value() {
        let f_w = werner_fw_from_entropy(0.593);
        let cf = werner_cf(f_w).unwrap();
        assert_close(cf.f_opt, 0.818983, 5e-7);
        assert_close(cf.s_lin, 0.593, 1e-12);
    }

    #[test]
    fn mems_branch_point_values() {
        let cf = mems_cf(2.0 / 3.0).unwrap();
        assert_close(cf.f_opt, 7.0 / 9.0, 1e-15);
        assert_close(cf.s_lin, 16.0 / 27.0, 1e-15);
        assert_close(cf.fef, 2.0 / 3.0, 1e-15);
    }

    #[test]
    fn mems_pure_bell_limit() {
        let cf = mems_cf(1.0).unwrap();
        assert_close(cf.f_opt, 1.0, 1e-15);
        assert_close(cf.s_lin, 0.0, 1e-15);
        assert_close(cf.m_value, 2.0, 1e-15);
        assert!(cf.chsh_violated);
    }

    #[test]
    fn mems_branch_continuity() {
        let c = 2.0 / 3.0;
        let below = mems_cf(c - 1e-13).unwrap();
        let at = mems_cf(c).unwrap();
        assert_close(below.f_opt, at.f_opt, 1e-12);
        assert_close(below.s_lin, at.s_lin, 1e-12);
        assert_close(below.fef, at.fef, 1e-12);
        assert_close(below.m_value, at.m_value, 1e-12);
    }

    #[test]
    fn mems_paper_variant_disagrees_above_branch() {
        let cf = mems_cf(2.0 / 3.0).unwrap();
        let pv = cf.paper_variant.unwrap();
        // Printed variant claims violation at the branch point, the
        // definitional matrix does not.
        assert_close(pv.m_value, 13.0 / 9.0, 1e-15);
        assert!(pv.chsh_violated);
        assert_close(cf.m_value, 8.0 / 9.0, 1e-15);
        assert!(!cf.chsh_violated);
    }

    #[test]
    fn wd_reduces_to_werner_at_a_half() {
        for f_w in [0.6, 0.75, 0.9, 1.0] {
            let cf = wd_cf(f_w, 0.5).unwrap();
            assert_close(cf.f_opt, (2.0 * f_w + 1.0) / 3.0, 1e-14);
            assert_close(cf.fef, f_w, 1e-14);
        }
    }

    #[test]
    fn wd_table_row_fidelity() {
        let cf = wd_cf(0.96, 0.962437).unwrap();
        assert_close(cf.f_opt, 0.777775, 5e-7);
        assert!(cf.chsh_violated);
    }

    #[test]
    fn wd_case_iii_boundary() {
        let cf = wd_cf(werner_chsh_fw_boundary(), 0.5).unwrap();
        assert!((cf.m_value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn new_reference_points() {
        let cf = new_cf(0.0).unwrap();
        assert_close(cf.concurrence, 2.0 / 3.0, 1e-15);
        assert_close(cf.f_opt, 7.0 / 9.0, 1e-15);
        assert_close(cf.m_value, 8.0 / 9.0, 1e-15);
        assert!(!cf.chsh_violated);

        let threshold = new_entangled_p_max();
        assert_close(new_cf(threshold).unwrap().concurrence, 0.0, 1e-12);

        let cf1 = new_cf(1.0).unwrap();
        assert_close(cf1.m_value, 1.0, 1e-15);
        assert_close(cf1.concurrence, 0.0, 1e-15);
    }

    #[test]
    fn fidelity_vs_entropy_points() {
        assert_close(
            fidelity_vs_entropy(FamilyKind::Werner, 0.0, None).unwrap(),
            1.0,
            1e-15,
        );
        let at = fidelity_vs_entropy(FamilyKind::Mems, MEMS_BRANCH_SL, None).unwrap();
        assert_close(at, 7.0 / 9.0, 1e-12);
        // Both branch expressions meet there.
        let other_branch = 5.0 / 9.0 + (8.0 - 9.0 * MEMS_BRANCH_SL).sqrt() / (3.0 * 6f64.sqrt());
        assert_close(other_branch, 7.0 / 9.0, 1e-12);

        assert_close(
            fidelity_vs_entropy(FamilyKind::New, 0.593, None).unwrap(),
            0.777603,
            5e-7,
        );
        assert!(fidelity_vs_entropy(FamilyKind::New, 0.5, None).is_err());
        assert!(fidelity_vs_entropy(FamilyKind::Wd, 0.5, None).is_err());
        assert_close(
            fidelity_vs_entropy(FamilyKind::Wd, 0.5, Some(0.5)).unwrap(),
            fidelity_vs_entropy(FamilyKind::Werner, 0.5, None).unwrap(),
            1e-14,
        );
    }

    #[test]
    fn entropy_inversions_round_trip() {
        for s in [0.0, 0.3, 16.0 / 27.0, 0.7, 8.0 / 9.0] {
            let c = mems_c_from_entropy(s).unwrap();
            assert_close(mems_cf(c).unwrap().s_lin, s, 1e-12);
        }
        for s in [16.0 / 27.0, 0.62, 0.75] {
            let p = new_p_from_entropy(s).unwrap();
            assert_close(new_cf(p).unwrap().s_lin, s, 1e-12);
        }
        for s in [0.0, 0.593, 0.88] {
            let f_w = werner_fw_from_entropy(s);
            assert_close(werner_cf(f_w).unwrap().s_lin, s, 1e-12);
        }
        assert!(new_p_from_entropy(0.5).is_err());
        assert!(mems_c_from_entropy(0.95).is_err());
    }

    #[test]
    fn crossover_examples() {
        let r = crossover(0.96, 0.962437).unwrap();
        assert!(r.feasible);
        assert!(r.p_max > 0.0 && r.p_max < 1e-5, "p_max = {}", r.p_max);

        let r = crossover(2.0 / 3.0, 0.8).unwrap();
        assert!(!r.feasible);
        assert!(r.a_window.is_none());

        let r = crossover(0.99, 0.5).unwrap();
        assert!(!r.feasible);
        let (lo, _) = r.a_window.unwrap();
        assert_close(lo, 0.969, 1e-3);
    }

    #[test]
    fn bell_classification() {
        let (case, _) = wd_bell_classify(0.97, 0.964903).unwrap();
        assert_eq!(case, WdBellCase::CaseII);
        assert!(wd_cf(0.97, 0.964903).unwrap().m_value > 1.0);

        let (case, roots) = wd_bell_classify(werner_chsh_fw_boundary(), 0.5).unwrap();
        assert_eq!(case, WdBellCase::CaseIII);
        assert_eq!(roots, Some((0.5, 0.5)));

        let (case, _) = wd_bell_classify(0.6, 0.7).unwrap();
        assert_eq!(case, WdBellCase::NotApplicable);

        // gamma(0.99) = 0.99315...; just below it the inequality is still
        // violated, just above it is satisfied.
        let (_, roots) = wd_bell_classify(0.99, 0.993147).unwrap();
        let gamma = roots.unwrap().1;
        assert_close(gamma, 0.9931507, 1e-6);
        let (case_below, _) = wd_bell_classify(0.99, 0.993147).unwrap();
        assert_eq!(case_below, WdBellCase::CaseII);
        assert!(wd_cf(0.99, 0.993147).unwrap().m_value > 1.0);
        let (case_above, _) = wd_bell_classify(0.99, gamma + 1e-6).unwrap();
        assert_eq!(case_above, WdBellCase::CaseI);
        assert!(wd_cf(0.99, gamma + 1e-6).unwrap().m_value < 1.0);
    }

    #[test]
    fn classification_agrees_with_m_sign() {
        for i in 0..60 {
            let f_w = 0.51 + 0.49 * i as f64 / 59.0;
            for j in 0..60 {
                let a = 0.5 + 0.5 * j as f64 / 59.0;
                let (case, _) = wd_bell_classify(f_w, a).unwrap();
                let m = wd_cf(f_w, a).unwrap().m_value;
                match case {
                    WdBellCase::CaseII => assert!(m > 1.0 - 1e-12, "({f_w}, {a}) m = {m}"),
                    _ => assert!(m <= 1.0 + 1e-12, "({f_w}, {a}) m = {m}"),
                }
            }
        }
    }
}
