//! Mittag-Leffler values along the negative real axis and one complex point.
use fracsinc::mittag_leffler::MittagLeffler;
use num_complex::Complex64;

fn main() -> fracsinc::Result<()> {
    let ml = MittagLeffler::new(0.5, 1.0)?;
    for x in [0.1, 1.0, 5.0, 20.0, 100.0] {
        let v = ml.evaluate(Complex64::new(-x, 0.0))?;
        println!("e_(1/2,1)(-{x:<5}) = {:.15e}  [{:?}]", v.value.re, v.regime);
    }
    let z = Complex64::new(-3.0, 4.0);
    let v = MittagLeffler::new(0.7, 0.7)?.eval(z)?;
    println!("e_(0.7,0.7)({z}) = {v:.12}");
    Ok(())
}
