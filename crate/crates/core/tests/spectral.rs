use std::sync::Arc;

use isolab::geometry::{build_domain, build_ellipse, BumpSpec, Disk, Point, Region};
use isolab::spectral::{find_eigs, ground_state, normal_trace, SpectralOptions};

/// First zeros of J0 and J1.
const J01: f64 = 2.404_825_557_695_773;
const J11: f64 = 3.831_705_970_207_512;

fn opts(n_src: usize) -> SpectralOptions {
    let mut o = SpectralOptions::default();
    o.basis.n_src = n_src;
    o
}

#[test]
fn unit_disk_eigenvalues_match_bessel_zeros() {
    let disk: Arc<dyn Region> = Arc::new(Disk::new(1.0));
    let found = find_eigs(disk, 2.0, 4.0, 30, &opts(80)).unwrap();
    let ks: Vec<f64> = found.pairs.iter().map(|p| p.k).collect();
    assert_eq!(ks.len(), 2, "{ks:?}");
    assert!((ks[0] - J01).abs() / J01 < 1e-8, "{ks:?}");
    assert!((ks[1] - J11).abs() / J11 < 1e-8, "{ks:?}");
    assert_eq!(found.pairs[1].multiplicity, 2);
}

#[test]
fn bumped_half_ellipse_ground_state_is_resolved() {
    let e = build_ellipse(2.0, 1.0).unwrap();
    let d = build_domain(
        e,
        vec![BumpSpec::new(-1.85, 0.06, 0.05)],
        vec![BumpSpec::new(0.0, 0.3, 0.25)],
        0.0,
    )
    .unwrap();
    let region: Arc<dyn Region> = Arc::new(d);
    let g = Arc::new(ground_state(region.clone(), 3.0, 3.8, 9, &opts(300)).unwrap());
    assert!(g.error_bar < 1e-4, "error bar {}", g.error_bar);
    assert!((g.norm_check - 1.0).abs() < 1e-6);
    // Positive inside, vanishing on the boundary.
    let inside = g.eval(Point::new(0.0, 0.3)).unwrap();
    assert!(inside.abs() > 0.1);
    for p in region.boundary().sample_uniform(64) {
        assert!(g.value(p.position).abs() < 1e-4 * inside.abs());
    }
    let tr = normal_trace(&g, 512).unwrap();
    assert!(tr.rellich_defect() < 1e-4, "{}", tr.rellich_defect());
    assert_eq!(tr.sign_changes(1e-3), 0);
}

#[test]
fn empty_window_reports_not_found() {
    let disk: Arc<dyn Region> = Arc::new(Disk::new(1.0));
    assert!(ground_state(disk, 2.6, 3.6, 8, &opts(60)).is_err());
}
