//! Scalar quadrature error sup over lambda as N grows.
use fracsinc::mittag_leffler::FractionalParams;
use fracsinc::reference_oracle::{probe_sup, LambdaGrid};
use fracsinc::sinc_contour::{ContourConfig, DEFAULT_B, DEFAULT_D};

fn main() -> fracsinc::Result<()> {
    let params = FractionalParams::propagator(0.5, 0.5)?;
    let grid = LambdaGrid {
        points: 60,
        ..LambdaGrid::default()
    };
    for n in [25, 50, 100, 200] {
        let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, n, params.beta(), 10.0)?;
        let e = probe_sup(&grid, 0.5, &params, &cfg)?;
        let bound = (-(std::f64::consts::PI * DEFAULT_D * params.beta() * n as f64).sqrt()).exp();
        println!("N {n:4}  sup {e:.3e}  exp(-sqrt(pi d beta N)) {bound:.3e}");
    }
    Ok(())
}
