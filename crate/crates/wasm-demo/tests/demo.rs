use mhd2d_wasm_demo::{partition_rows, Demo, FIELDS};

#[test]
fn fields_and_bands() {
    let mut demo = Demo::new("vacuum_bubble", 32, 1e-3, 0).unwrap();
    demo.advance(5).unwrap();
    assert!((demo.state().t - 5e-3).abs() < 1e-15);
    for name in FIELDS {
        assert_eq!(demo.field(name).unwrap().values().len(), 32 * 32);
    }
    let (lo, hi) = demo.band_range();
    let sum = (lo..=hi)
        .map(|q| demo.band("ux", q).unwrap())
        .reduce(|a, b| a.add(&b))
        .unwrap();
    assert!(sum.sub(&demo.field("ux").unwrap()).max_abs() < 1e-12);
    assert_eq!(demo.band_norms("rho").unwrap().len(), (hi - lo + 1) as usize);
    assert!(demo.field("pressure").is_err());
    assert!(Demo::new("vortex", 32, 1e-3, 0).is_err());
}

#[test]
fn energy_decays() {
    let mut demo = Demo::new("taylor_green", 16, 1e-3, 0).unwrap();
    let e0 = demo.energy();
    demo.advance(10).unwrap();
    assert!(demo.energy() < e0);
}

#[test]
fn partition_curves_sum_to_one() {
    let width = 2 + 6 + 1;
    let rows = partition_rows(-2, 4, 200, 16.0);
    assert_eq!(rows.len(), 200 * width);
    for row in rows.chunks(width) {
        assert!((row[width - 1] - 1.0).abs() < 1e-12, "{row:?}");
    }
}
