use isolab::billiards::{
    compare_spectra, conservation_check, dichotomy_check, length_spectrum, trace, BilliardError,
    Ray, SearchCaps,
};
use isolab::geometry::{build_domain, build_ellipse, make_pair, BumpSpec, MushroomPair, Point};

fn running() -> MushroomPair {
    make_pair(
        build_ellipse(2.0, 1.0).unwrap(),
        BumpSpec::new(-1.85, 0.06, 0.05),
        BumpSpec::new(1.80, 0.05, 0.07),
        BumpSpec::new(-0.8, 0.3, 0.25),
    )
    .unwrap()
}

fn caps(n_max: usize) -> SearchCaps {
    SearchCaps {
        l_max: 6.0,
        n_max,
        n_starts: 60,
        seed: 3,
    }
}

#[test]
fn caustic_is_conserved_in_the_plain_half_ellipse() {
    let d = build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap();
    let r = conservation_check(&d, 20, 200, 11, 1e-9);
    assert!(
        r.pass,
        "{:?}",
        r.samples.iter().map(|s| s.drift).fold(0.0, f64::max)
    );
}

#[test]
fn vertical_chord_bounces_back() {
    let d = build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap();
    let t = trace(&d, &Ray::new(Point::new(0.0, 0.2), Point::new(0.0, 1.0)), 4);
    assert_eq!(t.bounces.len(), 4);
    for b in &t.bounces {
        assert!((b.position.x).abs() < 1e-12);
    }
}

#[test]
fn pair_members_have_equal_length_spectra() {
    let pair = running();
    let s1 = length_spectrum(&pair.omega1, caps(4));
    let s2 = length_spectrum(&pair.omega2, caps(4));
    assert!(!s1.entries.is_empty());
    let r = compare_spectra(&s1, &s2, 1e-8).unwrap();
    assert!(r.pass, "unmatched: {:?}", r.unmatched);
    // Two-bounce vertical chord through the flat bottom.
    assert!(s1.entries.iter().any(|e| (e.length - 2.0).abs() < 1e-8));
}

#[test]
fn spectra_with_different_caps_are_not_compared() {
    let pair = running();
    let s1 = length_spectrum(&pair.omega1, caps(2));
    let s2 = length_spectrum(&pair.omega2, caps(3));
    assert!(matches!(
        compare_spectra(&s1, &s2, 1e-8),
        Err(BilliardError::CapMismatch { .. })
    ));
}

#[test]
fn dichotomy_holds_on_a_small_sample() {
    let r = dichotomy_check(&running(), 40, 200, 5);
    assert_eq!(r.violations(), 0);
}
