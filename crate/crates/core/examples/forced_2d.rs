//! Manufactured forced 2D problem on a graded time partition.
use fracsinc::fem::build_system;
use fracsinc::mittag_leffler::FractionalParams;
use fracsinc::reference_oracle::{Manufactured2d, LAMBDA1_2D};
use fracsinc::sinc_contour::{ContourConfig, DEFAULT_B, DEFAULT_D};
use fracsinc::time_convolution::{geometric_partition, solve_nonhomogeneous};

fn main() -> fracsinc::Result<()> {
    let (gamma, beta, t) = (0.5, 0.5, 1.0);
    let params = FractionalParams::propagator(gamma, beta)?;
    let m = Manufactured2d::new(gamma, beta)?;
    let sys = build_system(2, 5)?;
    let cfg = ContourConfig::new(DEFAULT_B, DEFAULT_D, 60, beta, LAMBDA1_2D)?;
    let exact = m.exact(t);
    let forcing = |s: f64, p| m.forcing(s, p);
    for cal_n in [2, 4, 8, 16] {
        let part = geometric_partition(t, cal_n, gamma)?;
        sys.reset_solve_count();
        let u = solve_nonhomogeneous(&sys, &params, &cfg, &part, &forcing)?;
        let (l2, _) = sys.error_norms(&u, &|p| exact.value(p), &|p| exact.gradient(p))?;
        println!(
            "calN {cal_n:3}  intervals {:4}  solves {}  L2 {l2:.4e}",
            part.num_intervals(),
            sys.solve_count()
        );
    }
    Ok(())
}
