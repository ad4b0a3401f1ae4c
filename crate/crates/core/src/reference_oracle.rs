//! Closed-form and spectral reference solutions, the manufactured forcing and
//! the scalar sinc quadrature error probe.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{ComplexField, Dimension, FemSystem, Point};
use crate::mittag_leffler::{FractionalParams, MittagLeffler};
use crate::numerics::{integrate_adaptive, principal_pow, CompensatedSum};
use crate::sinc_contour::ContourConfig;

/// Number of sine modes kept in the 1D series solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralTruncation {
    num_terms: usize,
}

impl Default for SpectralTruncation {
    fn default() -> Self {
        Self { num_terms: 50_000 }
    }
}

impl SpectralTruncation {
    pub fn new(num_terms: usize) -> Result<Self> {
        if num_terms == 0 {
            return Err(Error::param("truncation needs at least one term"));
        }
        Ok(Self { num_terms })
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }
}

/// Series solution on (0, 1) for v ≡ 1 and γ = 1/2:
/// u(t, x) = Σ_{ℓ odd} e_{1/2,1}(-t^{1/2} (π²ℓ²)^β) · 4/(πℓ) · sin(πℓx).
#[derive(Debug, Clone)]
pub struct ExactSolution1d {
    // (πℓ, coefficient) for odd ℓ
    modes: Vec<(f64, f64)>,
}

impl ExactSolution1d {
    pub fn new(t: f64, beta: f64, trunc: SpectralTruncation) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("time must be non-negative, got {t}")));
        }
        let ml = MittagLeffler::new(0.5, 1.0)?;
        let modes = (1..=trunc.num_terms)
            .step_by(2)
            .map(|l| {
                let w = PI * l as f64;
                let lam_beta = (w * w).powf(beta);
                let e = ml.eval(Complex64::new(-t.sqrt() * lam_beta, 0.0))?.re;
                Ok((w, 4.0 / w * e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { modes })
    }

    pub fn value(&self, x: f64) -> f64 {
        let mut s = CompensatedSum::default();
        for &(w, a) in self.modes.iter().rev() {
            s.add(Complex64::new(a * (w * x).sin(), 0.0));
        }
        s.value().re
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let mut s = CompensatedSum::default();
        for &(w, a) in self.modes.iter().rev() {
            s.add(Complex64::new(a * w * (w * x).cos(), 0.0));
        }
        s.value().re
    }

    /// Coefficient of sin(πℓx); zero for even ℓ.
    pub fn coefficient(&self, l: usize) -> f64 {
        if l.is_multiple_of(2) {
            return 0.0;
        }
        self.modes.get(l / 2).map_or(0.0, |m| m.1)
    }
}

pub fn exact_solution_1d(t: f64, x: f64, beta: f64, trunc: SpectralTruncation) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0, 1], got {x}")));
    }
    Ok(ExactSolution1d::new(t, beta, trunc)?.value(x))
}

/// Discrete pencil eigenvalue 6(1 - cos ℓπh)/(h²(2 + cos ℓπh)).
pub fn pencil_eigenvalue_1d(h: f64, l: usize) -> f64 {
    let c = (l as f64 * PI * h).cos();
    6.0 * (1.0 - c) / (h * h * (2.0 + c))
}

/// Mass-orthonormal discrete eigenvector: sin(ℓkπh) scaled by √(6/(2 + cos ℓπh)).
pub fn pencil_eigenvector_1d(system: &FemSystem, l: usize) -> Result<Vec<f64>> {
    if system.dimension() != Dimension::One {
        return Err(Error::domain(
            "discrete eigenpairs are only available in 1D",
        ));
    }
    let m = system.num_dofs();
    if l == 0 || l > m {
        return Err(Error::param(format!("mode index {l} outside 1..={m}")));
    }
    let h = system.grid_spacing();
    let scale = (6.0 / (2.0 + (l as f64 * PI * h).cos())).sqrt();
    Ok((1..=m)
        .map(|k| scale * (l as f64 * k as f64 * PI * h).sin())
        .collect())
}

/// Applies φ(λ_ℓ) on the discrete eigenbasis: Σ_ℓ φ(λ_ℓ) (ψ_ℓᵀ M c) ψ_ℓ.
pub fn spectral_apply_1d(
    system: &FemSystem,
    field: &ComplexField,
    phi: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<ComplexField> {
    system.check(field)?;
    let m = system.num_dofs();
    let mut mc = vec![Complex64::new(0.0, 0.0); m];
    system.mass().matvec(field.coeffs(), &mut mc);
    let h = system.grid_spacing();
    let terms = (1..=m)
        .into_par_iter()
        .map(|l| {
            let psi = pencil_eigenvector_1d(system, l)?;
            let coef: Complex64 = psi.iter().zip(&mc).map(|(p, v)| v * p).sum();
            let f = phi(pencil_eigenvalue_1d(h, l))?;
            Ok((psi, coef * f))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![CompensatedSum::default(); m];
    for (psi, a) in terms {
        for (o, p) in out.iter_mut().zip(&psi) {
            o.add(a * p);
        }
    }
    system.field(out.into_iter().map(|s| s.value()).collect())
}

/// Semi-discrete solution for v ≡ 1 through the closed-form eigenpairs.
pub fn discrete_spectral_1d(
    system: &FemSystem,
    t: f64,
    beta: f64,
    gamma: f64,
) -> Result<ComplexField> {
    let params = FractionalParams::propagator(gamma, beta)?;
    let v = system.l2_project(&|_| 1.0)?;
    discrete_propagator_1d(system, &params, t, &v)
}

/// Semi-discrete propagator e_{γ,1}(-t^γ L_h^β) applied to arbitrary data.
pub fn discrete_propagator_1d(
    system: &FemSystem,
    params: &FractionalParams,
    t: f64,
    v: &ComplexField,
) -> Result<ComplexField> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let ml = MittagLeffler::new(params.gamma(), 1.0)?;
    let (g, b) = (params.gamma(), params.beta());
    spectral_apply_1d(system, v, |lam| {
        Ok(ml.eval(Complex64::new(-t.powf(g) * lam.powf(b), 0.0))?.re)
    })
}

/// Eigenfunction solution on the unit square: factor · sin(πx₁) sin(πx₂).
#[derive(Debug, Clone, Copy)]
pub struct Eigen2d {
    pub factor: f64,
}

impl Eigen2d {
    pub fn profile(p: Point) -> f64 {
        (PI * p[0]).sin() * (PI * p[1]).sin()
    }

    pub fn profile_gradient(p: Point) -> [f64; 2] {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
        ]
    }

    pub fn value(&self, p: Point) -> f64 {
        self.factor * Self::profile(p)
    }

    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let g = Self::profile_gradient(p);
        [self.factor * g[0], self.factor * g[1]]
    }
}

/// Smallest Dirichlet eigenvalue of -Δ on the unit square.
pub const LAMBDA1_2D: f64 = 2.0 * PI * PI;

pub fn exact_solution_2d_eigen(t: f64, beta: f64, gamma: f64) -> Result<Eigen2d> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let ml = MittagLeffler::new(gamma, 1.0)?;
    let factor = ml
        .eval(Complex64::new(-t.powf(gamma) * LAMBDA1_2D.powf(beta), 0.0))?
        .re;
    Ok(Eigen2d { factor })
}

/// Forcing for the exact solution u = t³ sin(πx₁) sin(πx₂).
#[derive(Debug, Clone, Copy)]
pub struct Manufactured2d {
    gamma: f64,
    beta: f64,
    caputo_const: f64,
}

impl Manufactured2d {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        FractionalParams::propagator(gamma, beta)?;
        Ok(Self {
            gamma,
            beta,
            caputo_const: 6.0 / gamma_fn_checked(4.0 - gamma)?,
        })
    }

    /// Γ(4)/Γ(4-γ) t^{3-γ} + t³ (2π²)^β
    pub fn time_factor(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.caputo_const * t.powf(3.0 - self.gamma) + t.powi(3) * LAMBDA1_2D.powf(self.beta)
    }

    pub fn forcing(&self, t: f64, p: Point) -> f64 {
        self.time_factor(t) * Eigen2d::profile(p)
    }

    pub fn exact(&self, t: f64) -> Eigen2d {
        Eigen2d { factor: t.powi(3) }
    }
}

fn gamma_fn_checked(x: f64) -> Result<f64> {
    crate::special::gamma_fn(x)
}

pub fn manufactured_rhs_2d(t: f64, beta: f64, gamma: f64) -> Result<impl Fn(Point) -> f64 + Sync> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let m = Manufactured2d::new(gamma, beta)?;
    let a = m.time_factor(t);
    Ok(move |p: Point| a * Eigen2d::profile(p))
}

/// Scalar probe of the sinc error: ℰ(λ, t) = ∫ g_λ dy - k Σ_j g_λ(jk) with
/// g_λ(y) = e_{γ,1}(-t^γ z(y)^β) z'(y) / (z(y) - λ).
#[derive(Debug, Clone)]
pub struct QuadErrorProbe {
    t: f64,
    gamma: f64,
    beta: f64,
    cfg: ContourConfig,
    ml: MittagLeffler,
    // (z_j, e_{γ,1}(-t^γ z_j^β) z'_j)
    nodes: Vec<(Complex64, Complex64)>,
    cutoff: f64,
}

impl QuadErrorProbe {
    pub fn new(params: &FractionalParams, cfg: &ContourConfig, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!(
                "probe time must be positive, got {t}"
            )));
        }
        let ml = MittagLeffler::new(params.gamma(), 1.0)?;
        let (g, b) = (params.gamma(), params.beta());
        let weight = |y: f64| -> Result<(Complex64, Complex64)> {
            let z = cfg.point(y);
            let e = ml.eval(-t.powf(g) * principal_pow(z, b))?;
            Ok((z, e * cfg.derivative(y)))
        };
        let nodes = cfg
            .nodes()
            .into_iter()
            .map(weight)
            .collect::<Result<Vec<_>>>()?;
        // tail of |g| behaves like C e^{-β|y|}; fit C on a coarse scan
        let c = [10.0, 15.0, 20.0]
            .iter()
            .map(|&y| weight(y).map(|(z, w)| (w / z).norm() * (b * y).exp()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        let cutoff = ((c / (b * 1e-15)).ln() / b).clamp(20.0, 700.0);
        Ok(Self {
            t,
            gamma: g,
            beta: b,
            cfg: *cfg,
            ml,
            nodes,
            cutoff,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        if !(lambda >= self.cfg.lambda1_hint()) || !lambda.is_finite() {
            return Err(Error::domain(format!(
                "lambda {lambda} is below the spectral bound {} and too close to the contour",
                self.cfg.lambda1_hint()
            )));
        }
        Ok(())
    }

    pub fn integrand(&self, lambda: f64, y: f64) -> Complex64 {
        let z = self.cfg.point(y);
        let e = self
            .ml
            .evaluate(-self.t.powf(self.gamma) * principal_pow(z, self.beta))
            .map_or(Complex64::new(f64::NAN, 0.0), |v| v.value);
        e * self.cfg.derivative(y) / (z - lambda)
    }

    /// ∫_{-Y}^{Y} g_λ dy by adaptive Gauss-Kronrod.
    pub fn reference_integral(&self, lambda: f64) -> Result<Complex64> {
        self.check_lambda(lambda)?;
        // split at the point of the contour nearest to λ where g_λ peaks
        let yl = (lambda / self.cfg.b()).acosh().min(self.cutoff * 0.5);
        let mut total = CompensatedSum::default();
        let mut breaks = vec![
            -self.cutoff,
            -yl - 2.0,
            -yl + 2.0,
            0.0,
            yl - 2.0,
            yl + 2.0,
            self.cutoff,
        ];
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let r = integrate_adaptive(
                |y| self.integrand(lambda, y),
                w[0],
                w[1],
                1e-16,
                1e-15,
                4000,
            );
            if !r.value.re.is_finite() {
                return Err(Error::LossOfAccuracy {
                    what: "probe reference integral".into(),
                    estimate: f64::INFINITY,
                });
            }
            total.add(r.value);
        }
        Ok(total.value())
    }

    /// Closed form of the full-line integral: -2πi e_{γ,1}(-t^γ λ^β).
    pub fn residue_integral(&self, lambda: f64) -> Result<Complex64> {
        self.check_lambda(lambda)?;
        let e = self.ml.eval(Complex64::new(
            -self.t.powf(self.gamma) * lambda.powf(self.beta),
            0.0,
        ))?;
        Ok(Complex64::new(0.0, -2.0 * PI) * e)
    }

    pub fn sinc_sum(&self, lambda: f64) -> Result<Complex64> {
        self.check_lambda(lambda)?;
        let mut s = CompensatedSum::default();
        for &(z, w) in &self.nodes {
            s.add(w / (z - lambda));
        }
        Ok(s.value() * self.cfg.k())
    }

    /// Signed discrepancy ℰ(λ, t).
    pub fn error(&self, lambda: f64) -> Result<Complex64> {
        Ok(self.reference_integral(lambda)? - self.sinc_sum(lambda)?)
    }

    pub fn value(&self, lambda: f64) -> Result<f64> {
        Ok(self.error(lambda)?.norm())
    }
}

pub fn quad_error_probe(
    lambda: f64,
    t: f64,
    params: &FractionalParams,
    cfg: &ContourConfig,
) -> Result<f64> {
    QuadErrorProbe::new(params, cfg, t)?.value(lambda)
}

/// Logarithmically spaced λ samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            lo: 10.0,
            hi: 1e8,
            points: 200,
        }
    }
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.points)
            .map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

pub fn probe_sup(
    grid: &LambdaGrid,
    t: f64,
    params: &FractionalParams,
    cfg: &ContourConfig,
) -> Result<f64> {
    if !(grid.lo >= cfg.lambda1_hint()) || !(grid.hi >= grid.lo) {
        return Err(Error::param(
            "λ grid must start at or above the spectral bound",
        ));
    }
    let probe = QuadErrorProbe::new(params, cfg, t)?;
    let vals = grid
        .values()
        .into_par_iter()
        .map(|l| probe.value(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_eigenpair() {
        let s = crate::fem::build_system(1, 1).unwrap();
        assert!((pencil_eigenvalue_1d(0.5, 1) - 12.0).abs() < 1e-12);
        let psi = pencil_eigenvector_1d(&s, 1).unwrap();
        assert!((psi[0] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn manufactured_time_factor() {
        let m = Manufactured2d::new(0.5, 0.5).unwrap();
        assert!(
            (m.time_factor(1.0) - (1.805_406_667_352_820 + 4.442_882_938_158_366)).abs() < 1e-9
        );
        assert_eq!(m.time_factor(0.0), 0.0);
        assert!((crate::special::gamma(3.5) - 3.323_350_970_447_843).abs() < 1e-12);
    }
}
