use tdg_core::calibration::{calibrate_table, size_standard_error, to_c_table};
use tdg_core::{
    calibrate_cm, estimate_size, exhaustion_gap, CTable, CriticalValueFamily, Error,
};

const SAMPLES: usize = 100_000;

#[test]
fn simes_has_exact_size() {
    let fam = CriticalValueFamily::simes(0.05).unwrap();
    for m in [1, 2, 5, 10] {
        let size = estimate_size(&fam, m, SAMPLES, 5).unwrap();
        let se = size_standard_error(0.05, SAMPLES);
        assert!((size - 0.05).abs() <= 3.0 * se, "m = {m}: size {size}");
    }
}

#[test]
fn original_kr_leaves_level_unused() {
    let fam = CriticalValueFamily::kr_original(0.05).unwrap();
    for m in [2, 10, 50] {
        let gap = exhaustion_gap(&fam, m, SAMPLES, 6).unwrap();
        assert!(gap > 0.01, "m = {m}: gap {gap}");
    }
}

#[test]
fn shipped_table_is_valid_at_small_m() {
    let fam = CriticalValueFamily::kr_admissible(0.05, CTable::alpha_005()).unwrap();
    for m in [1, 2, 3, 5] {
        let size = estimate_size(&fam, m, SAMPLES, 7).unwrap();
        assert!(size <= 0.05 + 3.0 * size_standard_error(0.05, SAMPLES), "m = {m}: {size}");
    }
    // m = 2 is exhausted, not merely valid
    let gap = exhaustion_gap(&fam, 2, SAMPLES, 7).unwrap();
    assert!(gap.abs() <= 3.0 * size_standard_error(0.05, SAMPLES), "gap {gap}");
}

#[test]
fn analytic_small_m_constants() {
    let c1 = calibrate_cm(0.05, 1, SAMPLES, 8, 1e-6).unwrap();
    assert!((c1.c_m - 1.0 / 1.05).abs() < 0.005, "{}", c1.c_m);
    let c2 = calibrate_cm(0.05, 2, SAMPLES, 8, 1e-6).unwrap();
    assert!((c2.c_m - 1.382).abs() < 0.01, "{}", c2.c_m);
    assert!(c2.standard_error > 0.0 && c2.standard_error < 0.01);
}

#[test]
fn calibrated_constant_attains_level() {
    let r = calibrate_cm(0.05, 6, SAMPLES, 9, 1e-6).unwrap();
    let fam = CriticalValueFamily::kr_with_constant(0.05, r.c_m).unwrap();
    // same samples: at most alpha at c_m, above alpha just below it
    assert!(estimate_size(&fam, 6, SAMPLES, 9).unwrap() <= 0.05);
    let below = CriticalValueFamily::kr_with_constant(0.05, r.c_m - 1e-4).unwrap();
    assert!(estimate_size(&below, 6, SAMPLES, 9).unwrap() > 0.05);
}

#[test]
fn constants_increase_with_m() {
    let rows = calibrate_table(0.05, &[1, 2, 5, 20, 100], SAMPLES, 10, 1e-5).unwrap();
    for pair in rows.windows(2) {
        assert!(pair[0].c_m < pair[1].c_m, "{} then {}", pair[0].c_m, pair[1].c_m);
    }
    let table = to_c_table(&rows).unwrap();
    assert_eq!(table.max_size(), 100);
}

#[test]
fn reproducible_and_thread_independent() {
    let a = calibrate_cm(0.05, 7, 30_000, 11, 1e-6).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| calibrate_cm(0.05, 7, 30_000, 11, 1e-6).unwrap());
    assert_eq!(a, b);
    let c = calibrate_cm(0.05, 7, 30_000, 12, 1e-6).unwrap();
    assert_ne!(a.c_m, c.c_m);
}

#[test]
fn rejects_bad_arguments() {
    assert!(matches!(calibrate_cm(0.05, 0, 10, 1, 1e-4), Err(Error::Domain(_))));
    assert!(calibrate_cm(0.0, 3, 10, 1, 1e-4).is_err());
    assert!(calibrate_cm(0.05, 3, 10, 1, 0.0).is_err());
}
