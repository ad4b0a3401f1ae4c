//! L2 projection of sin(pi x) sin(pi y) on successive 2D grids.
use fracsinc::fem::build_system;
use fracsinc::reference_oracle::Eigen2d;

fn main() -> fracsinc::Result<()> {
    let u = Eigen2d { factor: 1.0 };
    let mut prev: Option<f64> = None;
    for level in 2..=6 {
        let sys = build_system(2, level)?;
        let uh = sys.l2_project(&|p| u.value(p))?;
        let (l2, h1) = sys.error_norms(&uh, &|p| u.value(p), &|p| u.gradient(p))?;
        let ratio = prev.map(|e| e / l2).unwrap_or(f64::NAN);
        println!(
            "level {level} dofs {:6}  L2 {l2:.3e}  H1 {h1:.3e}  ratio {ratio:.2}",
            sys.num_dofs()
        );
        prev = Some(l2);
    }
    Ok(())
}
