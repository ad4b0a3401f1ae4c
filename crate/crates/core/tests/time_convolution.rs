use std::io::Write;

use fracsinc::fem::build_system;
use fracsinc::mittag_leffler::{FractionalParams, MittagLeffler};
use fracsinc::reference_oracle::spectral_apply_1d;
use fracsinc::sinc_contour::{ContourConfig, DEFAULT_B, DEFAULT_D};
use fracsinc::time_convolution::{
    dyadic_levels, geometric_partition, geometric_partition_with_levels, midpoint_loads,
    solve_nonhomogeneous, uniform_partition, GeometricPartition, SeparableForcing, SpatialProfile,
    TabulatedForcing,
};
use fracsinc::Error;
use num_complex::Complex64;
use proptest::prelude::*;

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

#[test]
fn dyadic_level_counts() {
    assert_eq!(dyadic_levels(1, 0.5), 2);
    assert_eq!(dyadic_levels(2, 1.0), 2);
    assert_eq!(dyadic_levels(4, 1.0), 4);
    assert_eq!(dyadic_levels(4, 0.5), 8);
    assert_eq!(dyadic_levels(8, 0.7), 9);
    assert_eq!(dyadic_levels(32, 0.3), 34);
}

#[test]
fn geometric_grading() {
    let p = geometric_partition(2.0, 8, 0.5).unwrap();
    let m = p.cal_m();
    assert_eq!(p.num_intervals(), (m - 1) * 8);
    assert_eq!(p.coarse_times()[m - 1], 2.0);
    let widths = p.widths();
    let coarse = p.coarse_times();
    for (j, block) in widths.chunks(8).enumerate() {
        for w in block {
            assert!((w / coarse[j] - 1.0 / 8.0).abs() < 1e-14);
        }
    }
    let total: f64 = widths.iter().sum();
    assert!((total - (2.0 - coarse[0])).abs() < 1e-14);
}

#[test]
fn uniform_partition_starts_at_zero() {
    let p = uniform_partition(1.0, 10).unwrap();
    let t = p.fine_times();
    assert_eq!(t.len(), 11);
    assert_eq!(t[0], 0.0);
    assert_eq!(t[10], 1.0);
    assert!(uniform_partition(1.0, 0).is_err());
    assert!(geometric_partition(-1.0, 4, 0.5).is_err());
    assert!(geometric_partition(1.0, 4, 1.5).is_err());
    assert!(geometric_partition_with_levels(1.0, 4, 1).is_err());
}

#[test]
fn midpoint_loads_of_unit_forcing() {
    let sys = build_system(1, 1).unwrap();
    let p = geometric_partition(1.0, 4, 0.5).unwrap();
    let loads = midpoint_loads(&sys, &p, &|_t: f64, _x: [f64; 2]| 1.0, 1.0);
    assert_eq!(loads.len(), (p.cal_m() - 1) * 4);
    for l in loads {
        assert_eq!(l.len(), 1);
        assert!((l[0] - 0.5).abs() < 1e-15);
    }
}

#[test]
fn midpoint_loads_sample_reversed_time() {
    let sys = build_system(1, 2).unwrap();
    let p = uniform_partition(1.0, 4).unwrap();
    let f = SeparableForcing {
        time: |t: f64| t,
        space: |_x: [f64; 2]| 1.0,
    };
    let loads = midpoint_loads(&sys, &p, &f, 1.0);
    // T - midpoint = 7/8, 5/8, 3/8, 1/8; each interior hat integrates to h
    for (l, s) in loads.iter().zip([0.875, 0.625, 0.375, 0.125]) {
        for v in l {
            assert!((v - 0.25 * s).abs() < 1e-15);
        }
    }
}

// For time-constant forcing the midpoint rule is exact, leaving only the sinc
// error: the scheme must equal L^{-β}(e(t_first) - e(T)) π_h f.
// With t_first = 0 the integrand keeps a z^{-β} tail and converges slower.
fn forced_against_spectral(part: &GeometricPartition, t_first: f64, tol: f64) {
    let (gamma, beta, t) = (0.6, 0.5, part.t_final());
    let sys = build_system(1, 4).unwrap();
    let params = FractionalParams::propagator(gamma, beta).unwrap();
    let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, 400, beta, PI2).unwrap();
    let profile = |x: [f64; 2]| x[0] * (1.0 - x[0]) + 0.3;
    let f = SeparableForcing {
        time: |_t: f64| 1.0,
        space: profile,
    };
    sys.reset_solve_count();
    let u = solve_nonhomogeneous(&sys, &params, &cfg, part, &f).unwrap();
    assert_eq!(sys.solve_count(), 801);
    let pf = sys.l2_project(&profile).unwrap();
    let ml = MittagLeffler::new(gamma, 1.0).unwrap();
    let e = |s: f64, lam: f64| -> f64 {
        if s == 0.0 {
            1.0
        } else {
            ml.eval(Complex64::new(-s.powf(gamma) * lam.powf(beta), 0.0))
                .unwrap()
                .re
        }
    };
    let exact = spectral_apply_1d(&sys, &pf, |lam| {
        Ok(lam.powf(-beta) * (e(t_first, lam) - e(t, lam)))
    })
    .unwrap();
    let scale = exact.max_abs();
    for (a, b) in u.coeffs().iter().zip(exact.coeffs()) {
        assert!((a - b).norm() < tol * scale, "{a} vs {b}");
    }
}

#[test]
fn geometric_scheme_matches_spectral_oracle() {
    let p = geometric_partition(0.8, 4, 0.6).unwrap();
    let t1 = p.coarse_times()[0];
    forced_against_spectral(&p, t1, 1e-8);
}

#[test]
fn uniform_scheme_matches_spectral_oracle() {
    forced_against_spectral(&uniform_partition(0.8, 16).unwrap(), 0.0, 1e-6);
}

#[test]
fn tabulated_forcing_from_csv() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        file,
        "# amplitude table\nt,amplitude\n0.0,1.0\n0.5,2.0\n1.0,0.0"
    )
    .unwrap();
    let f = TabulatedForcing::from_csv(file.path(), SpatialProfile::parse("one").unwrap(), false)
        .unwrap();
    assert_eq!(f.amplitude(-1.0), 1.0);
    assert!((f.amplitude(0.25) - 1.5).abs() < 1e-15);
    assert!((f.amplitude(0.75) - 1.0).abs() < 1e-15);
    assert_eq!(f.amplitude(3.0), 0.0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "0.0,1.0\n0.5,x").unwrap();
    let err = TabulatedForcing::from_csv(bad.path(), SpatialProfile::One, false).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(
        TabulatedForcing::new(vec![1.0, 0.5], vec![0.0, 0.0], SpatialProfile::One, false).is_err()
    );
    assert!(SpatialProfile::parse("cosine").is_err());
}

proptest! {
    #[test]
    fn partition_telescopes(cal_n in 1usize..40, gamma in 0.1f64..1.0, t in 0.01f64..10.0) {
        let p = geometric_partition(t, cal_n, gamma).unwrap();
        let pts = p.fine_times();
        prop_assert_eq!(pts.len(), p.num_intervals() + 1);
        prop_assert_eq!(*pts.last().unwrap(), t);
        prop_assert!(pts.windows(2).all(|w| w[1] > w[0]));
        for (i, (a, b)) in p.intervals().enumerate() {
            prop_assert_eq!(a, pts[i]);
            prop_assert_eq!(b, pts[i + 1]);
        }
        for &c in p.coarse_times() {
            prop_assert!(pts.contains(&c));
        }
    }
}
