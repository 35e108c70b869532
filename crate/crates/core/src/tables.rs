//! Reproduction of the bundled reference tables and the fidelity-versus-
//! entropy curve, plus the generic sweep-table container the CLI prints.
//!
//! Reference fidelities live in `fixtures/*.csv` exactly as printed in the
//! source tables (6 decimals); computed values are compared against them at
//! 5e-6, which absorbs their rounding.

use serde::Serialize;

use crate::closedform::{
    family_cf, fidelity_vs_entropy, new_cf, wd_cf, FamilyKind, CLASSICAL_FIDELITY, SL_MAX,
};
use crate::error::Error;
use crate::metrics::analyze;
use crate::states::{make_state, FamilySpec};

/// Which pipeline produced a column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Input,
    Definitional,
    Closedform,
    Simulator,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Input => "input",
            Provenance::Definitional => "definitional",
            Provenance::Closedform => "closedform",
            Provenance::Simulator => "simulator",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

/// Rectangular results table with per-column provenance.
#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

/// Format with nine significant digits, plain decimal notation, '.'
/// separator. The quantities in this crate all have magnitude below ten.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

impl SweepTable {
    fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        for cell in &row {
            if let Cell::Num(x) = cell {
                assert!(x.is_finite(), "non-finite cell");
            }
        }
        self.rows.push(row);
    }

    /// CSV with '#' provenance comments, a header row, '\n' endings and
    /// locale-independent number formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for col in &self.columns {
            out.push_str(&format!(
                "# column {}: {}\n",
                col.name,
                col.provenance.label()
            ));
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Num(x) => fmt_sig9(*x),
                    Cell::Bool(b) => b.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

/// One reference row of the Werner-derivative vs GHZ/W-mixture comparison.
#[derive(Clone, Copy, Debug)]
pub struct Table1Row {
    pub f_w: f64,
    pub a: f64,
    pub p: f64,
    pub f_wd_ref: f64,
    pub f_new_ref: f64,
}

/// Known misprint in the bundled table-2 reference, as (row, column) into
/// the computed table: at (S_L = 0.64, a = 0.85) the printed f_wd is
/// 0.742823, while exact evaluation of the same fidelity expression gives
/// 0.742829 — a 5.6e-6 gap, just past the 5e-6 rounding budget every other
/// cell satisfies. Comparison suites pin this cell against the formula
/// value and require its deviation from the printed digits to stay inside
/// [`TABLE2_MISPRINT_BAND`], so the record is machine-checked rather than
/// absorbed by a loosened tolerance.
pub const TABLE2_MISPRINT_CELL: (usize, usize) = (7, 4);

/// Allowed |computed - printed| band for the misprinted cell.
pub const TABLE2_MISPRINT_BAND: (f64, f64) = (5e-6, 6.5e-6);

/// One reference row of the fixed-mixedness four-family comparison.
#[derive(Clone, Copy, Debug)]
pub struct Table2Row {
    pub s_lin: f64,
    pub a: f64,
    pub f_w_ref: f64,
    pub f_mems_ref: f64,
    pub f_wd_ref: f64,
    pub f_new_ref: f64,
}

fn parse_fixture(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1) // header
        .map(|l| {
            l.split(',')
                .map(|f| f.trim().parse::<f64>().expect("fixture field is numeric"))
                .collect()
        })
        .collect()
}

/// The bundled reference rows for table 1.
pub fn table1_reference() -> Vec<Table1Row> {
    parse_fixture(include_str!("../fixtures/table1_reference.csv"))
        .into_iter()
        .map(|f| Table1Row {
            f_w: f[0],
            a: f[1],
            p: f[2],
            f_wd_ref: f[3],
            f_new_ref: f[4],
        })
        .collect()
}

/// The bundled reference rows for table 2.
pub fn table2_reference() -> Vec<Table2Row> {
    parse_fixture(include_str!("../fixtures/table2_reference.csv"))
        .into_iter()
        .map(|f| Table2Row {
            s_lin: f[0],
            a: f[1],
            f_w_ref: f[2],
            f_mems_ref: f[3],
            f_wd_ref: f[4],
            f_new_ref: f[5],
        })
        .collect()
}

/// Recompute table 1: closed-form fidelities for both non-maximally
/// entangled channels at each (F_w, a, p), with CHSH verdicts from the
/// definitional pipeline appended.
pub fn table1() -> Result<SweepTable, Error> {
    let mut t = SweepTable::new(vec![
        Column { name: "f_w", provenance: Provenance::Input },
        Column { name: "a", provenance: Provenance::Input },
        Column { name: "p", provenance: Provenance::Input },
        Column { name: "f_wd", provenance: Provenance::Closedform },
        Column { name: "f_new", provenance: Provenance::Closedform },
        Column { name: "chsh_wd", provenance: Provenance::Definitional },
        Column { name: "chsh_new", provenance: Provenance::Definitional },
    ]);
    for row in table1_reference() {
        let f_wd = wd_cf(row.f_w, row.a)?.f_opt;
        let f_new = new_cf(row.p)?.f_opt;
        let wd_state = make_state(FamilySpec::WernerDerivative { f_w: row.f_w, a: row.a })?;
        let new_state = make_state(FamilySpec::NmemsNew { p: row.p })?;
        let chsh_wd = analyze(&wd_state)?.chsh_violated;
        let chsh_new = analyze(&new_state)?.chsh_violated;
        t.push_row(vec![
            Cell::Num(row.f_w),
            Cell::Num(row.a),
            Cell::Num(row.p),
            Cell::Num(f_wd),
            Cell::Num(f_new),
            Cell::Bool(chsh_wd),
            Cell::Bool(chsh_new),
        ]);
    }
    Ok(t)
}

/// Recompute table 2: the four family fidelities at fixed mixedness via the
/// fidelity-versus-entropy forms (the Werner-derivative column recovers F_w
/// from S_L internally).
pub fn table2() -> Result<SweepTable, Error> {
    let mut t = SweepTable::new(vec![
        Column { name: "s_lin", provenance: Provenance::Input },
        Column { name: "a", provenance: Provenance::Input },
        Column { name: "f_w", provenance: Provenance::Closedform },
        Column { name: "f_mems", provenance: Provenance::Closedform },
        Column { name: "f_wd", provenance: Provenance::Closedform },
        Column { name: "f_new", provenance: Provenance::Closedform },
    ]);
    for row in table2_reference() {
        t.push_row(vec![
            Cell::Num(row.s_lin),
            Cell::Num(row.a),
            Cell::Num(fidelity_vs_entropy(FamilyKind::Werner, row.s_lin, None)?),
            Cell::Num(fidelity_vs_entropy(FamilyKind::Mems, row.s_lin, None)?),
            Cell::Num(fidelity_vs_entropy(FamilyKind::Wd, row.s_lin, Some(row.a))?),
            Cell::Num(fidelity_vs_entropy(FamilyKind::New, row.s_lin, None)?),
        ]);
    }
    Ok(t)
}

/// Werner and MEMS fidelities against linear entropy on [0, 8/9], with the
/// classical bound as a third column.
pub fn fig1(step: f64) -> Result<SweepTable, Error> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::ParamOutOfRange {
            name: "step",
            value: step,
            interval: "(0, 0.1]",
        });
    }
    let mut t = SweepTable::new(vec![
        Column { name: "s_lin", provenance: Provenance::Input },
        Column { name: "f_w", provenance: Provenance::Closedform },
        Column { name: "f_mems", provenance: Provenance::Closedform },
        Column { name: "f_classical", provenance: Provenance::Closedform },
    ]);
    let mut points = Vec::new();
    let mut k = 0usize;
    loop {
        let s = k as f64 * step;
        if s >= SL_MAX - 1e-12 {
            break;
        }
        points.push(s);
        k += 1;
    }
    points.push(SL_MAX);
    for s in points {
        t.push_row(vec![
            Cell::Num(s),
            Cell::Num(fidelity_vs_entropy(FamilyKind::Werner, s, None)?),
            Cell::Num(fidelity_vs_entropy(FamilyKind::Mems, s, None)?),
            Cell::Num(CLASSICAL_FIDELITY),
        ]);
    }
    Ok(t)
}

fn metric_columns(prefix: &'static str, provenance: Provenance) -> Vec<Column> {
    let names: [&'static str; 6] = match prefix {
        "def" => ["def_s_lin", "def_concurrence", "def_fef", "def_n", "def_m", "def_f_opt"],
        _ => ["cf_s_lin", "cf_concurrence", "cf_fef", "cf_n", "cf_m", "cf_f_opt"],
    };
    names
        .into_iter()
        .map(|name| Column { name, provenance })
        .collect()
}

/// Sweep one family over its natural parameter, reporting both pipelines
/// side by side. The Werner derivative sweeps `a` at fixed F_w; the other
/// families sweep their single parameter over [0, 1].
pub fn sweep(kind: FamilyKind, f_w: Option<f64>, step: f64) -> Result<SweepTable, Error> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::ParamOutOfRange {
            name: "step",
            value: step,
            interval: "(0, 0.5]",
        });
    }
    let (param_name, lo, hi): (&'static str, f64, f64) = match kind {
        FamilyKind::Werner => ("f_w", 0.0, 1.0),
        FamilyKind::Mems => ("c", 0.0, 1.0),
        FamilyKind::Wd => ("a", 0.5, 1.0),
        FamilyKind::New => ("p", 0.0, 1.0),
    };
    let fixed_fw = match kind {
        FamilyKind::Wd => Some(f_w.ok_or(Error::MissingParam { name: "fw" })?),
        _ => None,
    };

    let mut columns = vec![Column { name: param_name, provenance: Provenance::Input }];
    if kind == FamilyKind::Wd {
        columns.insert(0, Column { name: "f_w", provenance: Provenance::Input });
    }
    columns.extend(metric_columns("def", Provenance::Definitional));
    columns.extend(metric_columns("cf", Provenance::Closedform));
    columns.push(Column { name: "useful", provenance: Provenance::Definitional });
    columns.push(Column { name: "chsh_violated", provenance: Provenance::Definitional });
    let mut t = SweepTable::new(columns);

    let mut k = 0usize;
    loop {
        let x = (lo + k as f64 * step).min(hi);
        let spec = match kind {
            FamilyKind::Werner => FamilySpec::Werner { f_w: x },
            FamilyKind::Mems => FamilySpec::Mems { c: x },
            FamilyKind::Wd => FamilySpec::WernerDerivative {
                f_w: fixed_fw.expect("checked above"),
                a: x,
            },
            FamilyKind::New => FamilySpec::NmemsNew { p: x },
        };
        let rep = analyze(&make_state(spec)?)?;
        let cf = family_cf(spec)?;
        let mut row = Vec::new();
        if let Some(fw) = fixed_fw {
            row.push(Cell::Num(fw));
        }
        row.extend([
            Cell::Num(x),
            Cell::Num(rep.s_lin),
            Cell::Num(rep.concurrence),
            Cell::Num(rep.fef),
            Cell::Num(rep.n_value),
            Cell::Num(rep.m_value),
            Cell::Num(rep.f_opt),
            Cell::Num(cf.s_lin),
            Cell::Num(cf.concurrence),
            Cell::Num(cf.fef),
            Cell::Num(cf.n_value),
            Cell::Num(cf.m_value),
            Cell::Num(cf.f_opt),
            Cell::Bool(rep.useful),
            Cell::Bool(rep.chsh_violated),
        ]);
        t.push_row(row);
        if x >= hi {
            break;
        }
        k += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn fixtures_parse() {
        assert_eq!(table1_reference().len(), 16);
        assert_eq!(table2_reference().len(), 10);
    }

    #[test]
    fn table1_matches_reference_fidelities() {
        let refs = table1_reference();
        let t = table1().unwrap();
        for (row, r) in t.rows.iter().zip(&refs) {
            let (f_wd, f_new) = match (row[3], row[4]) {
                (Cell::Num(a), Cell::Num(b)) => (a, b),
                _ => panic!("numeric cells expected"),
            };
            assert_close(f_wd, r.f_wd_ref, 5e-6);
            assert_close(f_new, r.f_new_ref, 5e-6);
            assert!(matches!(row[5], Cell::Bool(true)), "chsh_wd must hold");
            assert!(matches!(row[6], Cell::Bool(false)), "chsh_new must not");
        }
    }

    #[test]
    fn table2_matches_reference_fidelities() {
        let refs = table2_reference();
        let t = table2().unwrap();
        for (i, (row, r)) in t.rows.iter().zip(&refs).enumerate() {
            let vals: Vec<f64> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => *x,
                    _ => panic!("numeric cells expected"),
                })
                .collect();
            for (col, reference) in [
                (2, r.f_w_ref),
                (3, r.f_mems_ref),
                (4, r.f_wd_ref),
                (5, r.f_new_ref),
            ] {
                if (i, col) == TABLE2_MISPRINT_CELL {
                    let dev = (vals[col] - reference).abs();
                    assert!(
                        dev > TABLE2_MISPRINT_BAND.0 && dev < TABLE2_MISPRINT_BAND.1,
                        "misprinted cell deviation {dev} left its recorded band"
                    );
                } else {
                    assert_close(vals[col], reference, 5e-6);
                }
            }
        }
    }

    #[test]
    fn fig1_checkpoints() {
        let t = fig1(0.01).unwrap();
        let first = &t.rows[0];
        if let (Cell::Num(s), Cell::Num(fw), Cell::Num(fm)) = (first[0], first[1], first[2]) {
            assert_close(s, 0.0, 0.0);
            assert_close(fw, 1.0, 1e-15);
            assert_close(fm, 1.0, 1e-15);
        }
        let last = t.rows.last().unwrap();
        if let (Cell::Num(s), Cell::Num(fw), Cell::Num(fm)) = (last[0], last[1], last[2]) {
            assert_close(s, SL_MAX, 1e-15);
            assert_close(fw, 2.0 / 3.0, 1e-12);
            // The MEMS curve ends at 5/9, already below the classical line
            // (it crosses 2/3 at S_L = 22/27).
            assert_close(fm, 5.0 / 9.0, 1e-12);
        }
        assert!(fig1(0.0).is_err());
        assert!(fig1(0.2).is_err());
    }

    #[test]
    fn csv_shape_and_determinism() {
        let t = table2().unwrap();
        let csv1 = t.to_csv();
        let csv2 = table2().unwrap().to_csv();
        assert_eq!(csv1, csv2);
        let comment_lines = csv1.lines().filter(|l| l.starts_with('#')).count();
        assert_eq!(comment_lines, 6);
        assert!(csv1.contains("# column f_w: closedform"));
        assert!(csv1.lines().nth(6).unwrap().starts_with("s_lin,a,"));
        assert!(!csv1.contains('\r'));
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0.000000000");
        assert_eq!(fmt_sig9(0.818983), "0.818983000");
        assert_eq!(fmt_sig9(2.6), "2.60000000");
        assert_eq!(fmt_sig9(-0.5), "-0.500000000");
    }

    #[test]
    fn sweep_wd_requires_fw() {
        assert!(sweep(FamilyKind::Wd, None, 0.1).is_err());
        let t = sweep(FamilyKind::Wd, Some(0.9), 0.1).unwrap();
        assert_eq!(t.rows.len(), 6);
        let w = sweep(FamilyKind::Werner, None, 0.25).unwrap();
        assert_eq!(w.rows.len(), 5);
    }
}
