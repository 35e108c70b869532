//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line (visible with `--nocapture`). Tolerances are
//! pinned here, in code.
//!
//! Run with: cargo test -p qchannel --test acceptance -- --nocapture

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qchannel::closedform::{
    self, family_cf, fidelity_vs_entropy, mems_cf, new_cf, wd_cf, werner_cf, FamilyKind,
};
use qchannel::metrics::{
    analyze, chsh_max_oracle, concurrence, concurrence_lambdas, fef_sampling_oracle,
    fidelity_from_n_raw, fully_entangled_fraction,
};
use qchannel::numerics::ComplexMatrix;
use qchannel::states::{make_state, random_mixed, validate_density, FamilySpec};
use qchannel::tables::{
    self, Cell, TABLE2_MISPRINT_BAND, TABLE2_MISPRINT_CELL,
};
use qchannel::telesim::{average_fidelity_2design, haar_average_fidelity};
use qchannel::verify::{self, oracle_test_states, FEF_ORACLE_SEED};

fn report(criterion: &str, detail: String) {
    println!("[acceptance] {criterion} PASS ({detail})");
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn criterion_01_table2_reproduction() {
    let t0 = Instant::now();
    let refs = tables::table2_reference();
    let computed = tables::table2().expect("table 2 computes");
    let mut worst: f64 = 0.0;
    let mut misprint_dev = 0.0;
    for (i, (row, r)) in computed.rows.iter().zip(&refs).enumerate() {
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
            let dev = (vals[col] - reference).abs();
            if (i, col) == TABLE2_MISPRINT_CELL {
                misprint_dev = dev;
            } else {
                worst = worst.max(dev);
                assert!(
                    dev <= 5e-6,
                    "row {i} col {col}: computed {} vs reference {reference}",
                    vals[col]
                );
            }
        }
    }
    // The one documented misprint: the printed value deviates from the
    // fidelity expression by just over the rounding budget; it is pinned
    // to its recorded band instead of silently widening the tolerance.
    assert!(
        misprint_dev > TABLE2_MISPRINT_BAND.0 && misprint_dev < TABLE2_MISPRINT_BAND.1,
        "misprint cell deviation {misprint_dev} left its band"
    );
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    report(
        "01 table2-reproduction",
        format!(
            "39 cells within 5e-6 (worst {worst:.2e}); misprint cell dev {misprint_dev:.2e} in \
             ({:.0e}, {:.1e}); {elapsed:?}",
            TABLE2_MISPRINT_BAND.0, TABLE2_MISPRINT_BAND.1
        ),
    );
}

#[test]
fn criterion_02_table1_reproduction() {
    let t0 = Instant::now();
    let refs = tables::table1_reference();
    assert_eq!(refs.len(), 16);
    let mut worst: f64 = 0.0;
    for r in &refs {
        let f_wd = wd_cf(r.f_w, r.a).unwrap().f_opt;
        let f_new = new_cf(r.p).unwrap().f_opt;
        let dev = (f_wd - r.f_wd_ref).abs().max((f_new - r.f_new_ref).abs());
        worst = worst.max(dev);
        assert!(dev <= 5e-6, "row ({}, {}, {}): dev {dev}", r.f_w, r.a, r.p);

        let wd_state =
            make_state(FamilySpec::WernerDerivative { f_w: r.f_w, a: r.a }).unwrap();
        let new_state = make_state(FamilySpec::NmemsNew { p: r.p }).unwrap();
        let m_wd = analyze(&wd_state).unwrap().m_value;
        let m_new = analyze(&new_state).unwrap().m_value;
        assert!(m_wd > 1.0, "row ({}, {}): M_wd = {m_wd} must exceed 1", r.f_w, r.a);
        assert!(m_new <= 1.0, "row p = {}: M_new = {m_new} must not exceed 1", r.p);
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    report(
        "02 table1-reproduction",
        format!(
            "16 rows within 5e-6 (worst {worst:.2e}); M(wd) > 1 and M(new) <= 1 certified \
             definitionally on every row; {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_03_fig1_checkpoints() {
    let f_w = |s| fidelity_vs_entropy(FamilyKind::Werner, s, None).unwrap();
    let f_m = |s| fidelity_vs_entropy(FamilyKind::Mems, s, None).unwrap();
    assert!((f_w(0.0) - 1.0).abs() <= 1e-15);
    assert!((f_m(0.0) - 1.0).abs() <= 1e-15);
    assert!((f_m(16.0 / 27.0) - 7.0 / 9.0).abs() <= 1e-12);
    assert!((f_m(22.0 / 27.0) - 2.0 / 3.0).abs() <= 1e-12);
    assert!((f_w(8.0 / 9.0) - 2.0 / 3.0).abs() <= 1e-12);
    let mut min_gap = f64::INFINITY;
    for s in grid(1000, 0.0, 8.0 / 9.0) {
        let gap = f_w(s) - f_m(s);
        if s == 0.0 {
            assert!(gap.abs() <= 1e-12, "curves must meet at S_L = 0");
        } else {
            assert!(gap > 0.0, "Werner must dominate at S_L = {s}");
            min_gap = min_gap.min(gap);
        }
    }
    report(
        "03 fig1-checkpoints",
        format!("five checkpoints at 1e-12; dominance on 1000 points (min gap {min_gap:.2e})"),
    );
}

#[test]
fn criterion_04_cross_pipeline_equivalence() {
    let mut specs: Vec<FamilySpec> = Vec::new();
    for x in grid(500, 0.0, 1.0) {
        specs.push(FamilySpec::Werner { f_w: x });
        specs.push(FamilySpec::Mems { c: x });
        specs.push(FamilySpec::NmemsNew { p: x });
    }
    for f_w in grid(23, 0.51, 1.0) {
        for a in grid(22, 0.5, 1.0) {
            specs.push(FamilySpec::WernerDerivative { f_w, a });
        }
    }
    let mut worst: f64 = 0.0;
    for &spec in &specs {
        let rep = analyze(&make_state(spec).unwrap()).unwrap();
        let cf = family_cf(spec).unwrap();
        for (def, closed) in [
            (rep.s_lin, cf.s_lin),
            (rep.concurrence, cf.concurrence),
            (rep.fef, cf.fef),
            (rep.n_value, cf.n_value),
            (rep.m_value, cf.m_value),
            (rep.f_opt, cf.f_opt),
        ] {
            let dev = (def - closed).abs();
            worst = worst.max(dev);
            assert!(dev <= 1e-9, "{spec:?}: definitional {def} vs closed {closed}");
        }
        // The single documented exception is the MEMS M source: the
        // asserted value is the definitional max(2C^2, C^2 + (4h-1)^2),
        // and the printed-variant value is recorded alongside it.
        if let FamilySpec::Mems { c } = spec {
            let pv = cf.paper_variant.expect("variant recorded for MEMS");
            if c > 2.0 / 3.0 {
                assert!(pv.m_value > cf.m_value + 0.5, "variant must disagree above the branch");
            }
        }
    }
    report(
        "04 cross-pipeline-equivalence",
        format!(
            "S_L, C, F, N, M, f_opt on {} grid points within 1e-9 (worst {worst:.2e}); MEMS \
             printed-variant M recorded separately",
            specs.len()
        ),
    );
}

#[test]
fn criterion_05_concurrence_oracle() {
    // Internal consistency on 500 random mixed states.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..500 {
        let rho = random_mixed(&mut rng);
        let l = concurrence_lambdas(&rho).expect("lambdas must be real and nonnegative");
        assert!(l.iter().all(|&x| x >= 0.0));
        assert!(l.windows(2).all(|w| w[0] >= w[1]), "descending order");
    }
    // Closed forms across the families.
    let mut worst: f64 = 0.0;
    for f_w in grid(300, 0.0, 1.0) {
        let c = concurrence(&make_state(FamilySpec::Werner { f_w }).unwrap()).unwrap();
        worst = worst.max((c - (2.0 * f_w - 1.0).max(0.0)).abs());
    }
    for c_in in grid(300, 0.0, 1.0) {
        let c = concurrence(&make_state(FamilySpec::Mems { c: c_in }).unwrap()).unwrap();
        worst = worst.max((c - c_in).abs());
    }
    for p in grid(300, 0.0, 1.0) {
        let c = concurrence(&make_state(FamilySpec::NmemsNew { p }).unwrap()).unwrap();
        let closed = 2.0 * ((1.0 - p) / 3.0 - (p * (p + 2.0) / 12.0).sqrt()).max(0.0);
        worst = worst.max((c - closed).abs());
    }
    assert!(worst <= 1e-9, "closed-form deviation {worst}");

    // Entanglement threshold of the GHZ/W mixture by bisection on the
    // definitional concurrence.
    let c_at = |p: f64| concurrence(&make_state(FamilySpec::NmemsNew { p }).unwrap()).unwrap();
    let (mut lo, mut hi) = (0.2, 0.4);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if c_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let located = 0.5 * (lo + hi);
    let expected = closedform::new_entangled_p_max();
    assert!(
        (located - expected).abs() <= 1e-10,
        "bisection {located} vs 7 - 3 sqrt(5) = {expected}"
    );
    report(
        "05 concurrence-oracle",
        format!(
            "500 random states internally consistent; family closed forms within 1e-9 (worst \
             {worst:.2e}); threshold located at {located:.10} (= 7 - 3 sqrt(5) within 1e-10)"
        ),
    );
}

#[test]
fn criterion_06_fully_entangled_fraction() {
    let mut worst: f64 = 0.0;
    for f_w in grid(400, 0.25, 1.0) {
        let fef = fully_entangled_fraction(&make_state(FamilySpec::Werner { f_w }).unwrap());
        worst = worst.max((fef - f_w).abs());
    }
    for c in grid(400, 0.0, 1.0) {
        let fef = fully_entangled_fraction(&make_state(FamilySpec::Mems { c }).unwrap());
        let h = if c >= 2.0 / 3.0 { c / 2.0 } else { 1.0 / 3.0 };
        worst = worst.max((fef - (h + c / 2.0)).abs());
    }
    assert!(worst <= 1e-12, "magic-basis closed forms deviate by {worst}");

    let states = oracle_test_states();
    assert_eq!(states.len(), 20);
    let mut worst_gap: f64 = 0.0;
    for (i, rho) in states.iter().enumerate() {
        let exact = fully_entangled_fraction(rho);
        let sampled = fef_sampling_oracle(rho, 20_000, FEF_ORACLE_SEED + i as u64);
        assert!(sampled <= exact + 1e-9, "state {i}: sampled above exact");
        assert!(exact - sampled <= 2e-3, "state {i}: gap {}", exact - sampled);
        worst_gap = worst_gap.max(exact - sampled);
    }
    report(
        "06 fully-entangled-fraction",
        format!(
            "Werner and MEMS magic-basis values within 1e-12 (worst {worst:.2e}); 20000-sample \
             oracle inside [FEF - 2e-3, FEF + 1e-9] on 20 states (worst gap {worst_gap:.2e})"
        ),
    );
}

#[test]
fn criterion_07_chsh_oracle() {
    let mut states = oracle_test_states();
    // The singlet and the maximally mixed state are members 18 and 19 of
    // the oracle set already; make their presence explicit for this check.
    states.push(make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap());
    states.push(validate_density(ComplexMatrix::identity(4).scale(0.25)).unwrap());
    let mut worst_short: f64 = 0.0;
    for (i, rho) in states.iter().enumerate() {
        let m = analyze(rho).unwrap().m_value;
        let target = 2.0 * m.sqrt();
        let reached = chsh_max_oracle(rho, 24).unwrap();
        assert!(reached <= target + 1e-9, "state {i} exceeded 2 sqrt(M)");
        assert!(target - reached <= 1e-3, "state {i} reached only {reached} of {target}");
        worst_short = worst_short.max(target - reached);
    }
    let singlet = make_state(FamilySpec::Werner { f_w: 1.0 }).unwrap();
    let tsirelson = chsh_max_oracle(&singlet, 24).unwrap();
    assert!((tsirelson - 2.0 * 2f64.sqrt()).abs() <= 1e-3);
    report(
        "07 chsh-oracle",
        format!(
            "hill-climbed maximum within 1e-3 of 2 sqrt(M) on {} states (worst shortfall \
             {worst_short:.2e}), never above it; singlet reaches {tsirelson:.6}",
            states.len()
        ),
    );
}

#[test]
fn criterion_08_teleportation_simulator() {
    // Werner saturation over 50 singlet fractions.
    let mut worst: f64 = 0.0;
    for f_w in grid(50, 0.500001, 1.0) {
        let ch = make_state(FamilySpec::Werner { f_w }).unwrap();
        let dev = (average_fidelity_2design(&ch) - (2.0 * f_w + 1.0) / 3.0).abs();
        worst = worst.max(dev);
    }
    assert!(worst <= 1e-12, "Werner saturation deviates by {worst}");

    // Simulated average never beats the optimum.
    let mut channels: Vec<_> = oracle_test_states();
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for _ in 0..20 {
        channels.push(random_mixed(&mut rng));
    }
    for (i, ch) in channels.iter().enumerate() {
        let sim = average_fidelity_2design(ch);
        let opt = analyze(ch).unwrap().f_opt;
        assert!(sim <= opt + 1e-9, "channel {i}: simulated {sim} above optimal {opt}");
    }

    // Monte-Carlo agreement at n = 100000, three seeds.
    let ch = make_state(FamilySpec::Mems { c: 0.7 }).unwrap();
    let exact = average_fidelity_2design(&ch);
    let mut worst_mc: f64 = 0.0;
    for seed in [11, 12, 13] {
        let mc = haar_average_fidelity(&ch, 100_000, seed);
        worst_mc = worst_mc.max((mc - exact).abs());
        assert!((mc - exact).abs() <= 3e-3, "seed {seed}: MC {mc} vs exact {exact}");
    }
    report(
        "08 teleportation-simulator",
        format!(
            "Werner saturation within 1e-12 (worst {worst:.2e}); simulated <= f_opt on {} \
             channels; Haar MC within 3e-3 at three seeds (worst {worst_mc:.2e})",
            channels.len()
        ),
    );
}

#[test]
fn criterion_09_classifier_boundaries() {
    let boundary = closedform::werner_chsh_fw_boundary();
    let m_werner = werner_cf(boundary).unwrap().m_value;
    assert!((m_werner - 1.0).abs() <= 1e-12);

    let m_wd = wd_cf(boundary, 0.5).unwrap().m_value;
    assert!((m_wd - 1.0).abs() <= 1e-12);

    let mut interior_max: f64 = 0.0;
    for p in grid(1000, 0.0, 1.0) {
        let m = new_cf(p).unwrap().m_value;
        assert!(m <= 1.0 + 1e-15, "M(p = {p}) = {m} exceeds 1");
        if p < 1.0 {
            interior_max = interior_max.max(m);
        }
    }
    let m_at_one = new_cf(1.0).unwrap().m_value;
    assert!((m_at_one - 1.0).abs() <= 1e-15, "equality must hold at p = 1");
    assert!(interior_max < 1.0, "equality must hold only at p = 1");
    report(
        "09 classifier-boundaries",
        format!(
            "|M - 1| = {:.1e} at the Werner boundary; |M - 1| = {:.1e} at (boundary, 1/2); \
             GHZ/W mixture M <= 1 on 1000 points with equality only at p = 1",
            (m_werner - 1.0).abs(),
            (m_wd - 1.0).abs()
        ),
    );
}

#[test]
fn criterion_10_discrepancy_record() {
    // The full verification report must carry the machine-checked MEMS
    // T-matrix discrepancy record.
    let checks = verify::run(verify::Level::Full);
    let record = checks
        .iter()
        .find(|c| c.name == "mems_chsh_paper_discrepancy")
        .expect("discrepancy record must be emitted");
    assert!(record.passed, "discrepancy record failed: {}", record.detail);
    assert!(record.detail.contains("0.707107"), "threshold must be stated");

    // Recompute the two halves of the record directly: (a) N from the
    // printed-variant T misses the printed fidelity branches everywhere,
    // (b) N from the definitional T reproduces them to 1e-12.
    let mut worst_def: f64 = 0.0;
    let mut min_variant_gap = f64::INFINITY;
    for c in grid(500, 0.0, 1.0) {
        let cf = mems_cf(c).unwrap();
        let pv = cf.paper_variant.unwrap();
        let printed = closedform::mems_printed_fidelity(c);
        worst_def = worst_def.max((fidelity_from_n_raw(cf.n_value) - printed).abs());
        min_variant_gap =
            min_variant_gap.min((fidelity_from_n_raw(pv.n_value) - printed).abs());
    }
    assert!(worst_def <= 1e-12, "definitional route must reproduce fidelities");
    assert!(min_variant_gap > 1e-3, "printed-variant route must miss them");
    report(
        "10 discrepancy-record",
        format!(
            "verify(full) emits the record; definitional N reproduces fidelities to \
             {worst_def:.2e}, printed-variant N misses by at least {min_variant_gap:.4}"
        ),
    );
}
