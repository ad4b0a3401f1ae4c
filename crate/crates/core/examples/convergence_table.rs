//! Spatial convergence table in the CLI's CSV format.
use fracsinc::harness::{cmd_convergence_space, ExperimentConfig};

fn main() -> fracsinc::Result<()> {
    let mut cfg = ExperimentConfig::for_command("convergence-space");
    cfg.apply_str("problem=hom-1d\nlevels=3..7\nN=200\n")?;
    cfg.validate()?;
    print!("{}", cmd_convergence_space(&cfg)?.to_csv());
    Ok(())
}
