use contagion_wasm::*;

#[test]
fn demo_steps_and_reports_cells() {
    let mut demo = EpidemicDemo::try_new(20, 1, 0.3, 0.5, 9).unwrap();
    let cells = demo.cells();
    assert_eq!(cells.len(), 400);
    assert_eq!(cells.iter().filter(|&&c| c & INFECTED != 0).count(), demo.infected().min(400));
    assert!(cells[0] & CONTAMINATED != 0);
    let done = demo.step(5000);
    assert!(done > 0 && u64::from(done) == demo.events());
    assert!(demo.time() > 0.0);
    let cells = demo.cells();
    assert_eq!(cells.iter().filter(|&&c| c & CONTAMINATED != 0).count(), demo.contaminated());
    assert!(cells.iter().all(|&c| c & INFECTED == 0 || c & OCCUPIED != 0));
}

#[test]
fn demo_is_reproducible() {
    let mut a = EpidemicDemo::try_new(12, 1, 0.8, 2.0, 3).unwrap();
    let mut b = EpidemicDemo::try_new(12, 1, 0.8, 2.0, 3).unwrap();
    a.step(1000);
    b.step(400);
    b.step(600);
    assert_eq!(a.cells(), b.cells());
    assert_eq!(a.time(), b.time());
}

#[test]
fn demo_without_contamination_never_contaminates() {
    let mut demo = EpidemicDemo::try_new(10, 1, 0.5, f64::INFINITY, 1).unwrap();
    demo.step(3000);
    assert!(demo.cells().iter().all(|&c| c & CONTAMINATED == 0));
}

#[test]
fn demo_rejects_bad_parameters() {
    assert!(EpidemicDemo::try_new(3, 1, 1.0, 1.0, 0).is_err());
    assert!(EpidemicDemo::try_new(10, 1, -1.0, 1.0, 0).is_err());
}

#[test]
fn bounds_curve_decreases() {
    let c = bounds_curve(2, 1, 1, 1.0, 1.0, 1e4, 30);
    assert_eq!(c.len(), 60);
    assert_eq!(c[0], 1.0);
    assert!((c[58] - 1e4).abs() < 1e-6);
    assert!(c.chunks(2).zip(c.chunks(2).skip(1)).all(|(a, b)| b[1] < a[1]));
    assert!(bounds_curve(2, 1, 1, 1.0, 5.0, 1.0, 30).is_empty());
    assert!(bounds_curve(0, 1, 1, 1.0, 1.0, 2.0, 30).is_empty());
}

#[test]
fn subcritical_threshold_brackets_unit_bound() {
    let l = subcritical_threshold(1.0, 2, 1, 1);
    let at = |x: f64| bounds_curve(2, 1, 1, 1.0, x, 2.0 * x, 2)[1];
    assert!(at(l) < 1.0 && at(l - 1e-5) >= 1.0);
    assert_eq!(subcritical_threshold(f64::INFINITY, 2, 1, 1), 0.0);
    assert!(subcritical_threshold(1.0, 0, 1, 1).is_nan());
}

#[test]
fn percolation_sample_extremes_and_nesting() {
    assert!(PercolationSample::new(16, 1.0, false, 0).cells().iter().all(|&c| c == SPANNING));
    let closed = PercolationSample::new(16, 0.0, false, 0);
    assert!(!closed.spanning() && closed.cells().iter().all(|&c| c == CLOSED));
    let lo = PercolationSample::new(32, 0.5, false, 4).cells();
    let hi = PercolationSample::new(32, 0.7, false, 4).cells();
    assert!(lo.iter().zip(&hi).all(|(a, b)| *a == CLOSED || *b != CLOSED));
    let four = PercolationSample::new(32, 0.55, false, 8);
    let eight = PercolationSample::new(32, 0.55, true, 8);
    assert!(!four.spanning() || eight.spanning());
}
