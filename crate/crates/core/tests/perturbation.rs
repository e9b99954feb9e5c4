use std::sync::Arc;

use isolab::geometry::{build_domain, build_ellipse, BumpSpec, Region};
use isolab::perturbation::{hadamard_rate, pair_rates, PerturbationSpec};
use isolab::spectral::{ground_state, normal_trace, SpectralOptions};

#[test]
fn rates_on_a_symmetric_domain() {
    // Outer bumps mirrored, no focal bump: the ground state is even.
    let e = build_ellipse(2.0, 1.0).unwrap();
    let d = build_domain(
        e,
        vec![
            BumpSpec::new(-1.85, 0.06, 0.05),
            BumpSpec::new(1.85, 0.06, 0.05),
        ],
        vec![],
        0.0,
    )
    .unwrap();
    let region: Arc<dyn Region> = Arc::new(d);
    let mut opts = SpectralOptions::default();
    opts.basis.n_src = 300;
    let g = Arc::new(ground_state(region, 3.0, 3.8, 9, &opts).unwrap());
    let tr = normal_trace(&g, 512).unwrap();

    let f = PerturbationSpec::unit_depth(&[BumpSpec::new(-0.8, 0.3, 0.25)], 1e-3);
    let (d1, d2) = pair_rates(&tr, &f).unwrap();
    // Lowering the bottom enlarges the domain.
    assert!(d1 < 0.0 && d2 < 0.0);
    assert!((d1 - d2).abs() < 1e-6 * d1.abs(), "{d1} vs {d2}");

    // The rate is linear in the profile.
    let twice = PerturbationSpec::new(f.bumps.iter().map(|b| b.scaled(2.0)).collect(), f.epsilon);
    let r2 = hadamard_rate(&tr, &twice).unwrap();
    assert!((r2 - 2.0 * d1).abs() < 1e-12 * d1.abs());
}

#[test]
fn mirroring_twice_is_the_identity() {
    let f = PerturbationSpec::new(vec![BumpSpec::new(-0.8, 0.3, 1.0)], 1e-3);
    assert_eq!(f.mirrored().mirrored(), f);
    assert!(!f.is_self_dual());
    assert!(PerturbationSpec::new(vec![BumpSpec::new(0.0, 0.3, 1.0)], 1e-3).is_self_dual());
}
