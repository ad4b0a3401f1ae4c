//! Experiment drivers producing convergence tables, and the flat key=value
//! configuration used by the command-line tool.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::{build_system, ComplexField, Dimension, FemSystem};
use crate::mittag_leffler::{FractionalParams, MittagLeffler};
use crate::reference_oracle::{
    discrete_propagator_1d, exact_solution_2d_eigen, probe_sup, Eigen2d, ExactSolution1d,
    LambdaGrid, Manufactured2d, SpectralTruncation, LAMBDA1_2D,
};
use crate::sinc_contour::{
    propagate_homogeneous, ContourConfig, ContourSign, DEFAULT_B, DEFAULT_D,
};
use crate::time_convolution::{
    geometric_partition, solve_nonhomogeneous, uniform_partition, GeometricPartition,
    SeparableForcing,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Hom1d,
    Hom2d,
    Nonhom2d,
    SincProbe,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Hom1d => "hom-1d",
            Problem::Hom2d => "hom-2d",
            Problem::Nonhom2d => "nonhom-2d",
            Problem::SincProbe => "sinc-probe",
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hom-1d" => Ok(Problem::Hom1d),
            "hom-2d" => Ok(Problem::Hom2d),
            "nonhom-2d" => Ok(Problem::Nonhom2d),
            "sinc-probe" => Ok(Problem::SincProbe),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// How the discrete solution is produced in space-convergence runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sinc,
    /// Closed-form discrete eigenpairs (1D only).
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionChoice {
    Geometric,
    Uniform,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub gamma: f64,
    pub beta: f64,
    pub t: Vec<f64>,
    pub levels: Vec<u32>,
    pub n: Vec<usize>,
    pub cal_n: Vec<usize>,
    pub steps: Vec<usize>,
    pub d: f64,
    pub b: f64,
    pub out: Option<PathBuf>,
    pub contour_sign: ContourSign,
    pub method: Method,
    pub partition: PartitionChoice,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Hom1d,
            gamma: 0.5,
            beta: 0.5,
            t: vec![0.5],
            levels: (3..=7).collect(),
            n: vec![400],
            cal_n: vec![2, 4, 8, 16, 32],
            steps: vec![8, 16, 32, 64, 128],
            d: DEFAULT_D,
            b: DEFAULT_B,
            out: None,
            contour_sign: ContourSign::Minus,
            method: Method::Spectral,
            partition: PartitionChoice::Geometric,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let v = v.trim();
    if let Some((a, b)) = v.split_once("..") {
        // inclusive integer range "3..7"
        let (a, b): (i64, i64) = (
            a.trim().parse().map_err(|_| bad(key, v))?,
            b.trim().parse().map_err(|_| bad(key, v))?,
        );
        return (a..=b)
            .map(|i| i.to_string().parse::<T>().map_err(|_| bad(key, v)))
            .collect();
    }
    let out = v
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|_| bad(key, v)))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(bad(key, v));
    }
    Ok(out)
}

fn parse_scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| bad(key, v))
}

fn bad(key: &str, v: &str) -> Error {
    Error::Config(format!("invalid value '{v}' for key '{key}'"))
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Default parameter set for a subcommand.
    pub fn for_command(command: &str) -> Self {
        let mut c = Self::default();
        match command {
            "convergence-time" => {
                c.problem = Problem::Nonhom2d;
                c.levels = vec![5];
            }
            "sinc-decay" => {
                c.problem = Problem::SincProbe;
                c.n = vec![25, 50, 100, 200, 400];
            }
            "time-singularity" => {
                c.problem = Problem::SincProbe;
                c.n = vec![100];
                c.t = (1..=10).map(|m| 2f64.powi(-m)).collect();
            }
            _ => {}
        }
        if c.problem != Problem::Hom1d {
            c.method = Method::Sinc;
        }
        c
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "problem" => {
                self.problem = value.parse()?;
                self.method = if self.problem == Problem::Hom1d {
                    Method::Spectral
                } else {
                    Method::Sinc
                };
            }
            "gamma" => self.gamma = parse_scalar(key, value)?,
            "beta" => self.beta = parse_scalar(key, value)?,
            "t" | "t_final" => self.t = parse_list(key, value)?,
            "levels" => self.levels = parse_list(key, value)?,
            "N" => self.n = parse_list(key, value)?,
            "calN" | "calN_list" => self.cal_n = parse_list(key, value)?,
            "steps" => self.steps = parse_list(key, value)?,
            "d" => self.d = parse_scalar(key, value)?,
            "b" => self.b = parse_scalar(key, value)?,
            "out" | "output_path" => {
                self.out = if value.trim().is_empty() || value.trim() == "-" {
                    None
                } else {
                    Some(value.trim().into())
                }
            }
            "contour-sign" | "contour_sign" => self.contour_sign = value.parse()?,
            "method" => {
                self.method = match value.trim() {
                    "sinc" => Method::Sinc,
                    "spectral" => Method::Spectral,
                    _ => return Err(bad(key, value)),
                }
            }
            "partition" => {
                self.partition = match value.trim() {
                    "geometric" => PartitionChoice::Geometric,
                    "uniform" => PartitionChoice::Uniform,
                    "both" => PartitionChoice::Both,
                    _ => return Err(bad(key, value)),
                }
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        // problem is applied first so that method defaults never override an explicit choice
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        pairs.sort_by_key(|(k, _)| k != "problem");
        for (k, v) in pairs {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FractionalParams> {
        FractionalParams::propagator(self.gamma, self.beta).map_err(config_err)
    }

    pub fn single_n(&self) -> Result<usize> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => Err(Error::Config("this command needs a single N".into())),
        }
    }

    pub fn single_t(&self) -> Result<f64> {
        match self.t.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::Config("this command needs a single t".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.levels.is_empty() || self.levels.iter().any(|&l| l < 1) {
            return Err(Error::Config("levels must be positive".into()));
        }
        if self.t.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Config("times must be positive".into()));
        }
        if self.n.iter().any(|&n| n < 1)
            || self.cal_n.iter().any(|&n| n < 1)
            || self.steps.iter().any(|&n| n < 1)
        {
            return Err(Error::Config("N, calN and steps must be positive".into()));
        }
        if !(self.d > 0.0 && self.d < std::f64::consts::FRAC_PI_4) {
            return Err(Error::Config(format!(
                "d must lie in (0, pi/4), got {}",
                self.d
            )));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::Config(format!("b must be positive, got {}", self.b)));
        }
        if self.method == Method::Spectral && self.problem != Problem::Hom1d {
            return Err(Error::Config(
                "method=spectral is only available for hom-1d".into(),
            ));
        }
        Ok(())
    }

    /// Canonical `key=value` rendering of every setting.
    pub fn resolved(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("problem", self.problem.as_str().to_string());
        m.insert("gamma", self.gamma.to_string());
        m.insert("beta", self.beta.to_string());
        m.insert("t", fmt_list(&self.t));
        m.insert("levels", fmt_list(&self.levels));
        m.insert("N", fmt_list(&self.n));
        m.insert("calN", fmt_list(&self.cal_n));
        m.insert("steps", fmt_list(&self.steps));
        m.insert("d", self.d.to_string());
        m.insert("b", self.b.to_string());
        m.insert(
            "out",
            self.out
                .as_ref()
                .map_or("-".into(), |p| p.display().to_string()),
        );
        m.insert("contour-sign", self.contour_sign.to_string());
        m.insert(
            "method",
            match self.method {
                Method::Sinc => "sinc",
                Method::Spectral => "spectral",
            }
            .into(),
        );
        m.insert(
            "partition",
            match self.partition {
                PartitionChoice::Geometric => "geometric",
                PartitionChoice::Uniform => "uniform",
                PartitionChoice::Both => "both",
            }
            .into(),
        );
        m
    }

    pub fn resolved_line(&self) -> String {
        self.resolved()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) | Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub abscissa: f64,
    pub error_l2: f64,
    pub error_h1: Option<f64>,
    pub oroc_l2: Option<f64>,
    pub oroc_h1: Option<f64>,
}

/// Pairwise observed rates ln(e_{i-1}/e_i) / |ln(a_i/a_{i-1})|.
pub fn oroc(errors: &[f64], abscissae: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != abscissae.len() {
        return Err(Error::domain("errors and abscissae differ in length"));
    }
    if errors.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::domain("errors must be strictly positive"));
    }
    let inc = abscissae.windows(2).all(|w| w[1] > w[0]);
    let dec = abscissae.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) || abscissae.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::domain(
            "abscissae must be positive and strictly monotone",
        ));
    }
    Ok(errors
        .windows(2)
        .zip(abscissae.windows(2))
        .map(|(e, a)| (e[0] / e[1]).ln() / (a[1] / a[0]).ln().abs())
        .collect())
}

/// Rows plus leading comment lines, rendered as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub rows: Vec<ConvergenceRow>,
    pub trailer: Vec<String>,
}

pub const CSV_HEADER: &str = "abscissa,error_l2,error_h1,oroc_l2,oroc_h1";

fn num(x: f64) -> String {
    format!("{x:.14e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Table {
    pub fn from_errors(
        abscissae: &[f64],
        l2: &[f64],
        h1: Option<&[f64]>,
        with_rates: bool,
    ) -> Result<Self> {
        let r2 = if with_rates {
            Some(oroc(l2, abscissae)?)
        } else {
            None
        };
        let r1 = match (with_rates, h1) {
            (true, Some(h)) => Some(oroc(h, abscissae)?),
            _ => None,
        };
        let rows = (0..abscissae.len())
            .map(|i| ConvergenceRow {
                abscissa: abscissae[i],
                error_l2: l2[i],
                error_h1: h1.map(|h| h[i]),
                oroc_l2: r2.as_ref().and_then(|r| i.checked_sub(1).map(|j| r[j])),
                oroc_h1: r1.as_ref().and_then(|r| i.checked_sub(1).map(|j| r[j])),
            })
            .collect();
        Ok(Self {
            comments: Vec::new(),
            rows,
            trailer: Vec::new(),
        })
    }

    /// Rate of the final pair of rows.
    pub fn final_oroc_l2(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.oroc_l2)
    }

    pub fn final_oroc_h1(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.oroc_h1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{CSV_HEADER}");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(r.abscissa),
                num(r.error_l2),
                opt(r.error_h1),
                opt(r.oroc_l2),
                opt(r.oroc_h1)
            );
        }
        for c in &self.trailer {
            let _ = writeln!(s, "# {c}");
        }
        s
    }
}

fn header(command: &str, cfg: &ExperimentConfig) -> Vec<String> {
    vec![
        format!("fracsinc {command}"),
        format!("config: {}", cfg.resolved_line()),
    ]
}

fn lambda1(problem: Problem) -> f64 {
    match problem {
        Problem::Hom1d => PI * PI,
        Problem::Hom2d | Problem::Nonhom2d => LAMBDA1_2D,
        Problem::SincProbe => 10.0,
    }
}

pub fn contour_config(cfg: &ExperimentConfig, n: usize) -> Result<ContourConfig> {
    Ok(
        ContourConfig::new(cfg.b, cfg.d, n, cfg.beta, lambda1(cfg.problem))
            .map_err(config_err)?
            .with_sign(cfg.contour_sign),
    )
}

/// Discrete solution of the homogeneous problem at `t` (v ≡ 1 in 1D,
/// the first eigenfunction in 2D).
pub fn homogeneous_solution(
    system: &FemSystem,
    cfg: &ExperimentConfig,
    t: f64,
) -> Result<ComplexField> {
    let params = cfg.params()?;
    let v = match system.dimension() {
        Dimension::One => system.l2_project(&|_| 1.0)?,
        Dimension::Two => system.l2_project(&Eigen2d::profile)?,
    };
    match cfg.method {
        Method::Spectral => discrete_propagator_1d(system, &params, t, &v),
        Method::Sinc => propagate_homogeneous(
            system,
            &params,
            &contour_config(cfg, cfg.single_n()?)?,
            t,
            &v,
        ),
    }
}

/// L² and H¹ errors over `levels` for the homogeneous problems.
pub fn cmd_convergence_space(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let t = cfg.single_t()?;
    let (dim, exact1d, exact2d) = match cfg.problem {
        Problem::Hom1d => {
            if (cfg.gamma - 0.5).abs() > 1e-15 {
                return Err(Error::Config(
                    "the 1D reference solution requires gamma = 0.5".into(),
                ));
            }
            (
                1,
                Some(ExactSolution1d::new(
                    t,
                    cfg.beta,
                    SpectralTruncation::default(),
                )?),
                None,
            )
        }
        Problem::Hom2d => (
            2,
            None,
            Some(exact_solution_2d_eigen(t, cfg.beta, cfg.gamma)?),
        ),
        _ => {
            return Err(Error::Config(
                "convergence-space needs problem hom-1d or hom-2d".into(),
            ))
        }
    };
    let mut hs = Vec::new();
    let mut e0s = Vec::new();
    let mut e1s = Vec::new();
    for &level in &cfg.levels {
        let system = build_system(dim, level)?;
        let u = homogeneous_solution(&system, cfg, t)?;
        let (e0, e1) = match (&exact1d, &exact2d) {
            (Some(ex), _) => {
                system.error_norms(&u, &|p| ex.value(p[0]), &|p| [ex.derivative(p[0]), 0.0])?
            }
            (_, Some(ex)) => system.error_norms(&u, &|p| ex.value(p), &|p| ex.gradient(p))?,
            _ => unreachable!(),
        };
        log::info!("level {level}: L2 {e0:e} H1 {e1:e}");
        hs.push(system.mesh_size());
        e0s.push(e0);
        e1s.push(e1);
    }
    let mut table = Table::from_errors(&hs, &e0s, Some(&e1s), hs.len() > 1)?;
    table.comments = header("convergence-space", cfg);
    table.comments.push("abscissa = mesh size h".into());
    Ok(table)
}

/// Error of the forced 2D problem against u(T) = T³ sin(πx₁) sin(πx₂).
pub fn nonhomogeneous_error(
    system: &FemSystem,
    cfg: &ExperimentConfig,
    partition: &GeometricPartition,
) -> Result<(f64, f64)> {
    let params = cfg.params()?;
    let m = Manufactured2d::new(cfg.gamma, cfg.beta)?;
    let f = SeparableForcing {
        time: move |t| m.time_factor(t),
        space: Eigen2d::profile,
    };
    let u = solve_nonhomogeneous(
        system,
        &params,
        &contour_config(cfg, cfg.single_n()?)?,
        partition,
        &f,
    )?;
    let ex = m.exact(partition.t_final());
    system.error_norms(&u, &|p| ex.value(p), &|p| ex.gradient(p))
}

/// Time-quadrature errors for a geometric or uniform partition sweep.
pub fn convergence_time_table(cfg: &ExperimentConfig, kind: PartitionChoice) -> Result<Table> {
    cfg.validate()?;
    let t = cfg.single_t()?;
    let level = *cfg.levels.last().expect("validated");
    let system = build_system(2, level)?;
    let counts = match kind {
        PartitionChoice::Uniform => &cfg.steps,
        _ => &cfg.cal_n,
    };
    let mut xs = Vec::new();
    let mut e0s = Vec::new();
    let mut e1s = Vec::new();
    for &c in counts {
        let partition = match kind {
            PartitionChoice::Uniform => uniform_partition(t, c)?,
            _ => geometric_partition(t, c, cfg.gamma)?,
        };
        let (e0, e1) = nonhomogeneous_error(&system, cfg, &partition)?;
        log::info!("count {c}: L2 {e0:e}");
        xs.push(c as f64);
        e0s.push(e0);
        e1s.push(e1);
    }
    let mut table = Table::from_errors(&xs, &e0s, Some(&e1s), xs.len() > 1)?;
    table.comments = header("convergence-time", cfg);
    table.comments.push(match kind {
        PartitionChoice::Uniform => "partition=uniform abscissa = number of steps".into(),
        _ => "partition=geometric abscissa = calN".into(),
    });
    Ok(table)
}

pub fn cmd_convergence_time(cfg: &ExperimentConfig) -> Result<String> {
    if cfg.problem != Problem::Nonhom2d {
        return Err(Error::Config(
            "convergence-time needs problem nonhom-2d".into(),
        ));
    }
    Ok(match cfg.partition {
        PartitionChoice::Both => {
            let g = convergence_time_table(cfg, PartitionChoice::Geometric)?;
            let mut u = convergence_time_table(cfg, PartitionChoice::Uniform)?;
            u.comments.retain(|c| c.starts_with("partition"));
            format!("{}{}", g.to_csv(), u.to_csv())
        }
        k => convergence_time_table(cfg, k)?.to_csv(),
    })
}

/// Least-squares slope, intercept and R² of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, my - slope * mx, r2)
}

fn probe_params(cfg: &ExperimentConfig) -> Result<FractionalParams> {
    cfg.params()
}

/// Sup of the quadrature error probe over λ ∈ [10, 1e8] for each N.
pub fn cmd_sinc_decay(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let t = cfg.single_t()?;
    let params = probe_params(cfg)?;
    let mut xs = Vec::new();
    let mut sups = Vec::new();
    for &n in &cfg.n {
        let cc = ContourConfig::new(cfg.b, cfg.d, n, cfg.beta, 10.0).map_err(config_err)?;
        let s = probe_sup(&LambdaGrid::default(), t, &params, &cc)?;
        xs.push(n as f64);
        sups.push(s);
    }
    let mut table = Table::from_errors(&xs, &sups, None, false)?;
    table.comments = header("sinc-decay", cfg);
    table
        .comments
        .push("abscissa = N, error_l2 = sup over lambda of the quadrature error probe".into());
    if xs.len() > 1 {
        let sq: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        let ln: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
        let (slope, _, r2) = linear_fit(&sq, &ln);
        table.trailer.push(format!(
            "fit ln(sup) vs sqrt(N): slope={} r2={}",
            num(slope),
            num(r2)
        ));
        table.trailer.push(format!(
            "predicted slope={}",
            num(-(PI * cfg.d * cfg.beta).sqrt())
        ));
    }
    Ok(table)
}

/// Sup of the probe against t at fixed N.
pub fn cmd_time_singularity(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let n = cfg.single_n()?;
    let params = probe_params(cfg)?;
    let cc = ContourConfig::new(cfg.b, cfg.d, n, cfg.beta, 10.0).map_err(config_err)?;
    let mut ts = cfg.t.clone();
    ts.sort_by(|a, b| b.total_cmp(a));
    let sups = ts
        .iter()
        .map(|&t| probe_sup(&LambdaGrid::default(), t, &params, &cc))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::from_errors(&ts, &sups, None, false)?;
    table.comments = header("time-singularity", cfg);
    table
        .comments
        .push("abscissa = t, error_l2 = sup over lambda of the quadrature error probe".into());
    if ts.len() > 1 {
        let lt: Vec<f64> = ts.iter().map(|x| x.ln()).collect();
        let ln: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
        let (slope, _, r2) = linear_fit(&lt, &ln);
        table.trailer.push(format!(
            "fit ln(sup) vs ln(t): slope={} r2={}",
            num(slope),
            num(r2)
        ));
        table
            .trailer
            .push(format!("predicted slope={}", num(-cfg.gamma)));
    }
    Ok(table)
}

/// e_{γ,μ}(re + i im) to 12 significant digits.
pub fn cmd_ml_eval(gamma: f64, mu: f64, re: f64, im: f64) -> Result<String> {
    let ml = MittagLeffler::new(gamma, mu).map_err(config_err)?;
    let v = ml.eval(Complex64::new(re, im))?;
    Ok(format!("{:.12} {:+.12}i", v.re, v.im))
}

/// Nodal dump of one discrete solution at the final level and time.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let t = cfg.single_t()?;
    let level = *cfg.levels.last().expect("validated");
    let (system, u) = match cfg.problem {
        Problem::Hom1d | Problem::Hom2d => {
            let dim = if cfg.problem == Problem::Hom1d { 1 } else { 2 };
            let s = build_system(dim, level)?;
            let u = homogeneous_solution(&s, cfg, t)?;
            (s, u)
        }
        Problem::Nonhom2d => {
            let s = build_system(2, level)?;
            let m = Manufactured2d::new(cfg.gamma, cfg.beta)?;
            let f = SeparableForcing {
                time: move |t| m.time_factor(t),
                space: Eigen2d::profile,
            };
            let partition = match cfg.partition {
                PartitionChoice::Uniform => {
                    uniform_partition(t, *cfg.steps.last().expect("non-empty"))?
                }
                _ => geometric_partition(t, *cfg.cal_n.last().expect("non-empty"), cfg.gamma)?,
            };
            let u = solve_nonhomogeneous(
                &s,
                &cfg.params()?,
                &contour_config(cfg, cfg.single_n()?)?,
                &partition,
                &f,
            )?;
            (s, u)
        }
        Problem::SincProbe => return Err(Error::Config("solve needs a PDE problem".into())),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# fracsinc solve");
    let _ = writeln!(s, "# config: {}", cfg.resolved_line());
    let two_d = system.dimension() == Dimension::Two;
    let _ = writeln!(
        s,
        "{}",
        if two_d {
            "dof,x,y,re,im"
        } else {
            "dof,x,re,im"
        }
    );
    for (i, (p, c)) in system.node_coords().iter().zip(u.coeffs()).enumerate() {
        if two_d {
            let _ = writeln!(
                s,
                "{i},{},{},{},{}",
                num(p[0]),
                num(p[1]),
                num(c.re),
                num(c.im)
            );
        } else {
            let _ = writeln!(s, "{i},{},{},{}", num(p[0]), num(c.re), num(c.im));
        }
    }
    Ok(s)
}

/// Process exit code for an error: 2 for configuration problems, 3 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Domain(_) | Error::Io(_) => 2,
        _ => 3,
    }
}
