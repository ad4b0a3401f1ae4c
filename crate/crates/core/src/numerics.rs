//! Small numerical utilities shared by the solver modules.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for a complex vector.
#[derive(Debug, Clone)]
pub struct CompensatedVec {
    sum: Vec<Complex64>,
    comp: Vec<Complex64>,
}

#[inline]
fn two_sum(acc: &mut f64, comp: &mut f64, x: f64) {
    let t = *acc + x;
    if acc.abs() >= x.abs() {
        *comp += (*acc - t) + x;
    } else {
        *comp += (x - t) + *acc;
    }
    *acc = t;
}

impl CompensatedVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            sum: vec![Complex64::new(0.0, 0.0); len],
            comp: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn len(&self) -> usize {
        self.sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }

    /// `self += scale * v`
    pub fn add_scaled(&mut self, scale: Complex64, v: &[Complex64]) {
        assert_eq!(v.len(), self.sum.len());
        for ((s, c), x) in self.sum.iter_mut().zip(self.comp.iter_mut()).zip(v) {
            let p = scale * x;
            two_sum(&mut s.re, &mut c.re, p.re);
            two_sum(&mut s.im, &mut c.im, p.im);
        }
    }

    pub fn finish(self) -> Vec<Complex64> {
        self.sum
            .into_iter()
            .zip(self.comp)
            .map(|(s, c)| s + c)
            .collect()
    }
}

/// Neumaier-compensated complex scalar sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        two_sum(&mut self.sum.re, &mut self.comp.re, x.re);
        two_sum(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Principal power `z^p = exp(p log z)`, branch cut on the negative real axis.
#[inline]
pub fn principal_pow(z: Complex64, p: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (z.ln() * p).exp()
}

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
// Gauss 7-point weights for the odd-indexed Kronrod nodes (and the centre)
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK15_WEIGHTS[7];
    let mut g = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let x = r * GK15_NODES[i];
        let s = f(c - x) + f(c + x);
        k += s * GK15_WEIGHTS[i];
        if i % 2 == 1 {
            g += s * G7_WEIGHTS[i / 2];
        }
    }
    (k * r, ((k - g) * r).norm())
}

/// Result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)` or `max_intervals` is hit.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let mut total = CompensatedSum::default();
        let mut err = 0.0;
        for p in &parts {
            total.add(p.2);
            err += p.3;
        }
        let value = total.value();
        if err <= abs_tol.max(rel_tol * value.norm()) || parts.len() >= max_intervals {
            return Integral {
                value,
                error: err,
                evaluations,
            };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(Complex64::new(x, -x));
        }
        assert_eq!(s.value(), Complex64::new(2.0, -2.0));
    }

    #[test]
    fn compensated_vec_accumulates() {
        let mut acc = CompensatedVec::zeros(2);
        acc.add_scaled(
            Complex64::new(0.0, 1.0),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        );
        acc.add_scaled(
            Complex64::new(2.0, 0.0),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        let v = acc.finish();
        assert_eq!(v[0], Complex64::new(2.0, 1.0));
        assert_eq!(v[1], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn principal_pow_branch() {
        let z = Complex64::new(-1.0, 1e-300);
        let w = principal_pow(z, 0.5);
        assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let z = Complex64::new(-1.0, -1e-300);
        let w = principal_pow(z, 0.5);
        assert!((w - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn adaptive_quadrature_handles_peaks() {
        // ∫_{-50}^{50} 1/(1+x²) dx = 2 atan(50)
        let r = integrate_adaptive(
            |x| Complex64::new(1.0 / (1.0 + x * x), 0.0),
            -50.0,
            50.0,
            1e-15,
            1e-15,
            4000,
        );
        assert!((r.value.re - 2.0 * 50f64.atan()).abs() < 1e-13);
        let r = integrate_adaptive(
            |x| Complex64::new(0.0, x.exp()),
            0.0,
            1.0,
            1e-15,
            1e-15,
            100,
        );
        assert!((r.value.im - (1f64.exp() - 1.0)).abs() < 1e-15);
    }
}
