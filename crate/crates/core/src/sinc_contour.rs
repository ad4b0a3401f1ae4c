//! Hyperbolic contour, sinc quadrature and the homogeneous propagator.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{ComplexField, FemSystem};
use crate::mittag_leffler::{FractionalParams, MittagLeffler};
use crate::numerics::{principal_pow, CompensatedVec};

/// Which shifted system each quadrature node solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContourSign {
    /// `(z M + A) U = Ṽ`
    Plus,
    /// `(A - z M) U = Ṽ`, the resolvent `(L - z)⁻¹` on the clockwise contour.
    #[default]
    Minus,
}

impl ContourSign {
    /// Shift handed to [`FemSystem::shifted_solve`] for contour point `z`.
    pub fn shift(self, z: Complex64) -> Complex64 {
        match self {
            ContourSign::Plus => z,
            ContourSign::Minus => -z,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContourSign::Plus => "plus",
            ContourSign::Minus => "minus",
        }
    }
}

impl FromStr for ContourSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(ContourSign::Plus),
            "minus" | "-" => Ok(ContourSign::Minus),
            other => Err(Error::Config(format!(
                "unknown contour sign '{other}' (plus|minus)"
            ))),
        }
    }
}

impl std::fmt::Display for ContourSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_D: f64 = FRAC_PI_8;
pub const DEFAULT_B: f64 = 1.0;

/// Quadrature on z(y) = b(cosh y + i sinh y), nodes y_j = jk for |j| ≤ N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    b: f64,
    d: f64,
    n: usize,
    k: f64,
    lambda1_hint: f64,
    sign: ContourSign,
}

impl ContourConfig {
    /// Balanced spacing k = √(πd/(βN)).
    pub fn new(b: f64, d: f64, n: usize, beta: f64, lambda1_hint: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
        }
        let (k, _) = sinc_grid(beta, n, d)?;
        Self::with_spacing(b, d, n, k, lambda1_hint)
    }

    pub fn with_spacing(b: f64, d: f64, n: usize, k: f64, lambda1_hint: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("N must be at least 1"));
        }
        if !(d > 0.0 && d < FRAC_PI_4) {
            return Err(Error::param(format!("d must lie in (0, π/4), got {d}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::param(format!("spacing must be positive, got {k}")));
        }
        if !(lambda1_hint > 0.0) {
            return Err(Error::param("lambda1_hint must be positive"));
        }
        if !(b > 0.0 && b < lambda1_hint / std::f64::consts::SQRT_2) {
            return Err(Error::param(format!(
                "b must lie in (0, λ₁/√2) = (0, {}), got {b}",
                lambda1_hint / std::f64::consts::SQRT_2
            )));
        }
        Ok(Self {
            b,
            d,
            n,
            k,
            lambda1_hint,
            sign: ContourSign::default(),
        })
    }

    pub fn with_sign(mut self, sign: ContourSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda1_hint(&self) -> f64 {
        self.lambda1_hint
    }

    pub fn sign(&self) -> ContourSign {
        self.sign
    }

    pub fn point(&self, y: f64) -> Complex64 {
        contour_point(self, y)
    }

    pub fn derivative(&self, y: f64) -> Complex64 {
        contour_derivative(self, y)
    }

    /// y_j for j = -N..=N in ascending order.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n as i64;
        (-n..=n).map(|j| j as f64 * self.k).collect()
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.n + 1
    }
}

pub fn contour_point(cfg: &ContourConfig, y: f64) -> Complex64 {
    Complex64::new(cfg.b * y.cosh(), cfg.b * y.sinh())
}

pub fn contour_derivative(cfg: &ContourConfig, y: f64) -> Complex64 {
    Complex64::new(cfg.b * y.sinh(), cfg.b * y.cosh())
}

/// Spacing k = √(πd/(βN)) and the 2N+1 nodes jk.
pub fn sinc_grid(beta: f64, n: usize, d: f64) -> Result<(f64, Vec<f64>)> {
    if n < 1 {
        return Err(Error::param("N must be at least 1"));
    }
    if !(beta > 0.0) || !(d > 0.0) {
        return Err(Error::param("beta and d must be positive"));
    }
    let k = (PI * d / (beta * n as f64)).sqrt();
    let n = n as i64;
    Ok((k, (-n..=n).map(|j| j as f64 * k).collect()))
}

/// Data needed at one quadrature node.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub index: i64,
    pub y: f64,
    pub z: Complex64,
    pub dz: Complex64,
}

const CHUNK: usize = 32;

/// Computes `(k / 2πi) Σ_j w_j · solve(shift(z_j), rhs_j)`, ascending in j.
///
/// `node_term` returns the scalar weight and the right-hand side for a node;
/// returning `None` for the right-hand side reuses `shared_rhs`.
pub fn quadrature_sum<F>(
    system: &FemSystem,
    cfg: &ContourConfig,
    shared_rhs: Option<&[Complex64]>,
    node_term: F,
) -> Result<Vec<Complex64>>
where
    F: Fn(&Node) -> Result<(Complex64, Option<Vec<Complex64>>)> + Sync,
{
    let n = cfg.n as i64;
    let nodes: Vec<Node> = (-n..=n)
        .map(|j| {
            let y = j as f64 * cfg.k;
            Node {
                index: j,
                y,
                z: cfg.point(y),
                dz: cfg.derivative(y),
            }
        })
        .collect();
    let mut acc = CompensatedVec::zeros(system.num_dofs());
    for chunk in nodes.chunks(CHUNK) {
        let parts: Vec<Result<(Complex64, Vec<Complex64>)>> = chunk
            .par_iter()
            .map(|node| {
                debug_assert!(node.z.re > 0.0);
                let (w, rhs) = node_term(node)?;
                let rhs_ref = match (&rhs, shared_rhs) {
                    (Some(r), _) => r.as_slice(),
                    (None, Some(r)) => r,
                    (None, None) => return Err(Error::param("no right-hand side for node")),
                };
                let u = system.shifted_solve(cfg.sign.shift(node.z), rhs_ref)?;
                Ok((w, u))
            })
            .collect();
        for part in parts {
            let (w, u) = part?;
            acc.add_scaled(w, &u);
        }
    }
    let pre = Complex64::new(0.0, -cfg.k / (2.0 * PI)); // k / (2πi)
    Ok(acc.finish().into_iter().map(|v| v * pre).collect())
}

/// Mass-weighted data vector `Ṽ = M v`.
pub fn mass_weighted(system: &FemSystem, field: &ComplexField) -> Result<Vec<Complex64>> {
    if field.system_id() != system.id() || field.len() != system.num_dofs() {
        return Err(Error::param("field does not belong to this system"));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
    system.mass().matvec(field.coeffs(), &mut out);
    Ok(out)
}

fn ml_argument(t: f64, gamma: f64, z: Complex64, beta: f64) -> Complex64 {
    -t.powf(gamma) * principal_pow(z, beta)
}

fn propagator_ml(params: &FractionalParams) -> Result<MittagLeffler> {
    MittagLeffler::new(params.gamma(), 1.0)
}

/// Sinc approximation of `e_{γ,1}(-t^γ L_h^β) v`.
pub fn propagate_homogeneous(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    t: f64,
    v_field: &ComplexField,
) -> Result<ComplexField> {
    let raw = propagate_homogeneous_raw(system, params, cfg, t, v_field)?;
    realify(&system.field(raw)?)
}

/// As [`propagate_homogeneous`] but without realification.
pub fn propagate_homogeneous_raw(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    t: f64,
    v_field: &ComplexField,
) -> Result<Vec<Complex64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!(
            "propagation time must be positive, got {t}; use initial_value for t = 0"
        )));
    }
    let rhs = mass_weighted(system, v_field)?;
    let ml = propagator_ml(params)?;
    let (g, b) = (params.gamma(), params.beta());
    quadrature_sum(system, cfg, Some(&rhs), |node| {
        let e = ml.eval(ml_argument(t, g, node.z, b))?;
        Ok((e * node.dz, None))
    })
}

/// The exact limit at t = 0: the data itself.
pub fn initial_value(system: &FemSystem, v_field: &ComplexField) -> Result<ComplexField> {
    system.check(v_field)?;
    Ok(v_field.clone())
}

/// Sinc approximation of `∫_t^{t+τ} r^{γ-1} e_{γ,γ}(-r^γ L_h^β) dr · g`.
pub fn interval_average_apply(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    t: f64,
    tau: f64,
    g_field: &ComplexField,
) -> Result<ComplexField> {
    if !(t > 0.0 && tau > 0.0) {
        return Err(Error::domain(format!(
            "need t > 0 and tau > 0, got t = {t}, tau = {tau}"
        )));
    }
    let rhs = mass_weighted(system, g_field)?;
    let ml = propagator_ml(params)?;
    let (g, b) = (params.gamma(), params.beta());
    let raw = quadrature_sum(system, cfg, Some(&rhs), |node| {
        let diff =
            ml.eval(ml_argument(t, g, node.z, b))? - ml.eval(ml_argument(t + tau, g, node.z, b))?;
        Ok((diff * principal_pow(node.z, -b) * node.dz, None))
    })?;
    realify(&system.field(raw)?)
}

/// Drops the imaginary part after checking it is at rounding level.
pub fn realify(field: &ComplexField) -> Result<ComplexField> {
    let max_re = field.coeffs().iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let max_im = field.max_imag();
    let bound = 1e-11 * (1.0 + max_re);
    if !(max_im <= bound) {
        return Err(Error::Symmetry {
            max_imag: max_im,
            bound,
        });
    }
    Ok(field.real_part())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_values() {
        let (k, nodes) = sinc_grid(0.5, 400, FRAC_PI_8).unwrap();
        assert!((k - PI / 40.0).abs() < 1e-15);
        assert_eq!(nodes.len(), 801);
        let (k, _) = sinc_grid(0.5, 100, FRAC_PI_8).unwrap();
        assert!((k - PI / 20.0).abs() < 1e-15);
        for (a, b) in nodes.iter().zip(nodes.iter().rev()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn contour_values() {
        let cfg = ContourConfig::new(1.0, FRAC_PI_8, 10, 0.5, PI * PI).unwrap();
        assert_eq!(cfg.point(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(cfg.derivative(0.0), Complex64::new(0.0, 1.0));
        let z = cfg.point(1.0);
        assert!((z - Complex64::new(1.5430806348152437, 1.1752011936438014)).norm() < 1e-14);
        for y in [0.3, 2.0, 7.5] {
            assert_eq!(cfg.point(-y), cfg.point(y).conj());
        }
    }

    #[test]
    fn config_validation() {
        assert!(ContourConfig::new(7.0, FRAC_PI_8, 10, 0.5, PI * PI).is_err());
        assert!(ContourConfig::new(1.0, 0.8, 10, 0.5, PI * PI).is_err());
        assert!(ContourConfig::new(1.0, FRAC_PI_8, 0, 0.5, PI * PI).is_err());
        assert!("sideways".parse::<ContourSign>().is_err());
        assert_eq!("Minus".parse::<ContourSign>().unwrap(), ContourSign::Minus);
    }
}
