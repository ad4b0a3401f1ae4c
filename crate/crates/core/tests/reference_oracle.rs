use std::f64::consts::PI;

use fracsinc::fem::build_system;
use fracsinc::mittag_leffler::{ml, FractionalParams};
use fracsinc::numerics::integrate_adaptive;
use fracsinc::reference_oracle::{
    discrete_spectral_1d, exact_solution_2d_eigen, pencil_eigenvalue_1d, pencil_eigenvector_1d,
    probe_sup, ExactSolution1d, LambdaGrid, Manufactured2d, QuadErrorProbe, SpectralTruncation,
    LAMBDA1_2D,
};
use fracsinc::sinc_contour::{ContourConfig, DEFAULT_B, DEFAULT_D};
use fracsinc::Error;
use num_complex::Complex64;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma as gamma_fn;

#[test]
fn series_at_time_zero_is_one() {
    let u = ExactSolution1d::new(0.0, 0.5, SpectralTruncation::default()).unwrap();
    assert!((u.value(0.5) - 1.0).abs() < 1e-4);
    assert!((u.coefficient(1) - 4.0 / PI).abs() < 1e-15);
    assert_eq!(u.coefficient(2), 0.0);
    assert!(u.value(0.0).abs() < 1e-12);
}

#[test]
fn series_first_mode_decay() {
    let (t, beta) = (0.5, 0.5);
    let u = ExactSolution1d::new(t, beta, SpectralTruncation::new(1).unwrap()).unwrap();
    let e = ml(
        0.5,
        1.0,
        Complex64::new(-t.powf(0.5) * (PI * PI).powf(beta), 0.0),
    )
    .unwrap()
    .re;
    assert!((u.value(0.5) - 4.0 / PI * e).abs() < 1e-14);
    assert!((u.derivative(0.0) - 4.0 * e).abs() < 1e-13);
}

#[test]
fn level_one_discrete_value() {
    let sys = build_system(1, 1).unwrap();
    for (t, gamma, beta) in [(0.5f64, 0.5, 0.5), (1.0, 0.3, 0.8), (2.0, 0.9, 0.2)] {
        let u = discrete_spectral_1d(&sys, t, beta, gamma).unwrap();
        let e = ml(
            gamma,
            1.0,
            Complex64::new(-t.powf(gamma) * 12f64.powf(beta), 0.0),
        )
        .unwrap()
        .re;
        assert!((u.coeffs()[0].re - 1.5 * e).abs() < 1e-12 * 1.5 * e);
    }
}

#[test]
fn discrete_solution_at_time_zero_is_projection() {
    let sys = build_system(1, 4).unwrap();
    let u = discrete_spectral_1d(&sys, 0.0, 0.5, 0.5).unwrap();
    let p = sys.l2_project(&|_| 1.0).unwrap();
    for (a, b) in u.coeffs().iter().zip(p.coeffs()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn discrete_eigenpairs_are_mass_orthonormal() {
    let sys = build_system(1, 4).unwrap();
    let n = sys.num_dofs();
    let h = sys.grid_spacing();
    let mut mv = vec![0.0; n];
    let mut av = vec![0.0; n];
    for l in [1, 5, 15] {
        let psi = pencil_eigenvector_1d(&sys, l).unwrap();
        sys.mass().matvec_real(&psi, &mut mv);
        sys.stiffness().matvec_real(&psi, &mut av);
        let norm: f64 = psi.iter().zip(&mv).map(|(a, b)| a * b).sum();
        assert!((norm - 1.0).abs() < 1e-12, "{norm}");
        let lam = pencil_eigenvalue_1d(h, l);
        for (a, m) in av.iter().zip(&mv) {
            assert!((a - lam * m).abs() < 1e-10 * lam);
        }
        let other = pencil_eigenvector_1d(&sys, if l < n { l + 1 } else { 1 }).unwrap();
        let cross: f64 = other.iter().zip(&mv).map(|(a, b)| a * b).sum();
        assert!(cross.abs() < 1e-12);
    }
    assert!(pencil_eigenvector_1d(&sys, 0).is_err());
    assert!(pencil_eigenvector_1d(&build_system(2, 2).unwrap(), 1).is_err());
}

#[test]
fn eigen_solution_via_erfc_identity() {
    // e^{x²} erfc(x) with x² = 2π² t, at 30 digits
    let reference = [
        (0.001, 0.859299446037854983),
        (0.01, 0.645408070108127510),
        (0.1, 0.337852855660425808),
    ];
    for (t, expected) in reference {
        let u = exact_solution_2d_eigen(t, 0.5, 0.5).unwrap();
        assert!(
            (u.factor - expected).abs() < 1e-14,
            "{} vs {expected}",
            u.factor
        );
        let x = (t * LAMBDA1_2D).sqrt();
        assert!(((x * x).exp() * erfc(x) - expected).abs() < 1e-10);
    }
}

#[test]
fn manufactured_forcing_matches_caputo_quadrature() {
    for (gamma, beta) in [(0.3, 0.5), (0.5, 0.5), (0.8, 0.25)] {
        let m = Manufactured2d::new(gamma, beta).unwrap();
        for t in [0.2f64, 1.0, 1.7] {
            // substitute u = (t - s)^{1-γ} to remove the kernel singularity
            let q = 1.0 / (1.0 - gamma);
            let integral = integrate_adaptive(
                |u| {
                    let s = t - u.powf(q);
                    Complex64::new(3.0 * s * s * q, 0.0)
                },
                0.0,
                t.powf(1.0 - gamma),
                1e-15,
                1e-14,
                200,
            );
            let caputo = integral.value.re / gamma_fn(1.0 - gamma);
            let expected = caputo + t.powi(3) * LAMBDA1_2D.powf(beta);
            assert!(
                (m.time_factor(t) - expected).abs() < 1e-11 * expected,
                "{gamma} {t}"
            );
        }
        assert_eq!(m.exact(2.0).factor, 8.0);
    }
}

fn probe(n: usize) -> QuadErrorProbe {
    let p = FractionalParams::propagator(0.5, 0.5).unwrap();
    let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, n, 0.5, 10.0).unwrap();
    QuadErrorProbe::new(&p, &cfg, 0.5).unwrap()
}

#[test]
fn probe_reference_matches_residue_form() {
    let pr = probe(50);
    for lam in [10.0, 37.0, 1e3, 1e5, 1e8] {
        let r = pr.reference_integral(lam).unwrap();
        let q = pr.residue_integral(lam).unwrap();
        assert!((r - q).norm() < 1e-11 * q.norm(), "λ={lam}: {r} vs {q}");
    }
}

#[test]
fn probe_error_is_imaginary() {
    let pr = probe(50);
    for lam in [10.0, 1e3, 1e6] {
        let e = pr.error(lam).unwrap();
        assert!(
            e.re.abs() < 1e-12 * pr.residue_integral(lam).unwrap().norm(),
            "{e}"
        );
        assert!(e.im.abs() > 0.0);
    }
}

#[test]
fn probe_decreases_with_n() {
    let lam = 500.0;
    let errs: Vec<f64> = [25, 50, 100, 200]
        .iter()
        .map(|&n| probe(n).value(lam).unwrap())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn probe_sup_is_grid_stable() {
    let p = FractionalParams::propagator(0.5, 0.5).unwrap();
    let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, 50, 0.5, 10.0).unwrap();
    let coarse = probe_sup(&LambdaGrid::default(), 0.5, &p, &cfg).unwrap();
    let fine = probe_sup(
        &LambdaGrid {
            points: 400,
            ..LambdaGrid::default()
        },
        0.5,
        &p,
        &cfg,
    )
    .unwrap();
    assert!((fine - coarse).abs() < 0.05 * fine, "{coarse} vs {fine}");
}

#[test]
fn probe_rejects_lambda_near_contour() {
    let pr = probe(20);
    assert!(matches!(pr.value(5.0), Err(Error::Domain(_))));
    let p = FractionalParams::propagator(0.5, 0.5).unwrap();
    let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, 20, 0.5, 10.0).unwrap();
    assert!(QuadErrorProbe::new(&p, &cfg, 0.0).is_err());
    assert!(probe_sup(
        &LambdaGrid {
            lo: 1.0,
            ..LambdaGrid::default()
        },
        0.5,
        &p,
        &cfg
    )
    .is_err());
}
