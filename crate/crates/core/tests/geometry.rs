use isolab::geometry::{
    build_domain, build_ellipse, make_pair, BumpSpec, DomainSpec, PairStatus, Point, Region,
};

fn running() -> isolab::geometry::MushroomPair {
    make_pair(
        build_ellipse(2.0, 1.0).unwrap(),
        BumpSpec::new(-1.85, 0.06, 0.05),
        BumpSpec::new(1.80, 0.05, 0.07),
        BumpSpec::new(-0.8, 0.3, 0.25),
    )
    .unwrap()
}

#[test]
fn running_example_is_a_valid_pair() {
    let pair = running();
    assert_eq!(pair.status(), PairStatus::Valid);
    assert!(!pair.b_dual);
    let c = pair.omega1.ellipse_spec().c();
    assert!((c - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn members_differ_only_by_the_focal_bump() {
    let pair = running();
    let (o1, o2) = (&pair.omega1, &pair.omega2);
    for i in 0..=400 {
        let x = -2.0 + 4.0 * i as f64 / 400.0;
        if x.abs() < 1.7 {
            assert!((o1.bottom(x) - o2.bottom(-x)).abs() < 1e-15, "x = {x}");
        } else {
            assert_eq!(o1.bottom(x), o2.bottom(x), "x = {x}");
        }
    }
    // The focal bump is one-sided, so the members are not mirror images.
    assert!((o1.bottom(-0.8) - o1.bottom(0.8)).abs() > 0.2);
    assert!(o1.contains(Point::new(-0.8, -0.2)));
    assert!(!o2.contains(Point::new(-0.8, -0.2)));
}

#[test]
fn config_round_trip_rebuilds_the_same_domain() {
    let pair = running();
    let cfg = pair.omega1.to_config();
    let again = DomainSpec::from_config(&cfg).unwrap();
    assert_eq!(again.to_config(), cfg);
    assert!((again.perimeter() - pair.omega1.perimeter()).abs() < 1e-12);
}

#[test]
fn dual_outer_bumps_make_an_isometric_pair() {
    let pair = make_pair(
        build_ellipse(2.0, 1.0).unwrap(),
        BumpSpec::new(-1.85, 0.06, 0.05),
        BumpSpec::new(1.85, 0.06, 0.05),
        BumpSpec::new(-0.8, 0.3, 0.25),
    )
    .unwrap();
    assert_eq!(pair.status(), PairStatus::Isometric);
}

#[test]
fn inadmissible_shapes_are_rejected() {
    assert!(build_ellipse(1.0, 2.0).is_err());
    assert!(build_ellipse(2.0, 0.0).is_err());
    let e = build_ellipse(2.0, 1.0).unwrap();
    // Focal bump crossing the focus.
    assert!(build_domain(e, vec![], vec![BumpSpec::new(1.6, 0.3, 0.1)], 0.0).is_err());
    // Outer bump inside the focal zone.
    assert!(build_domain(e, vec![BumpSpec::new(0.0, 0.1, 0.1)], vec![], 0.0).is_err());
    // Bump deeper than the domain allows.
    assert!(build_domain(e, vec![], vec![BumpSpec::new(0.0, 0.3, -0.1)], 0.0).is_err());
}

#[test]
fn bounding_box_contains_the_bumps() {
    let pair = running();
    let bb = pair.omega1.bbox();
    assert!(bb.min.y <= -0.25 + 1e-12);
    assert!((bb.max.y - 1.0).abs() < 1e-9);
    assert!((bb.min.x + 2.0).abs() < 1e-9 && (bb.max.x - 2.0).abs() < 1e-9);
}
