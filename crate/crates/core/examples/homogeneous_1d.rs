//! Sinc solution of the homogeneous 1D problem with v = 1 against the spectral series.
use fracsinc::fem::build_system;
use fracsinc::mittag_leffler::FractionalParams;
use fracsinc::reference_oracle::{ExactSolution1d, SpectralTruncation};
use fracsinc::sinc_contour::{propagate_homogeneous, ContourConfig, DEFAULT_B, DEFAULT_D};

fn main() -> fracsinc::Result<()> {
    let (gamma, beta, t) = (0.5, 0.5, 0.5);
    let params = FractionalParams::propagator(gamma, beta)?;
    let exact = ExactSolution1d::new(t, beta, SpectralTruncation::default())?;
    for level in 3..=8 {
        let sys = build_system(1, level)?;
        let cfg = ContourConfig::new(
            DEFAULT_B,
            DEFAULT_D,
            200,
            beta,
            std::f64::consts::PI.powi(2),
        )?;
        let v = sys.l2_project(&|_| 1.0)?;
        let u = propagate_homogeneous(&sys, &params, &cfg, t, &v)?;
        let (l2, h1) = sys.error_norms(&u, &|p| exact.value(p[0]), &|p| {
            [exact.derivative(p[0]), 0.0]
        })?;
        println!("h = 2^-{level}: L2 {l2:.4e}  H1 {h1:.4e}");
    }
    Ok(())
}
