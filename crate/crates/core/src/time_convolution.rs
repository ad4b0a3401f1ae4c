//! Time partitions and the pseudo-midpoint convolution quadrature for the
//! forced problem.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{ComplexField, FemSystem, Point};
use crate::mittag_leffler::{FractionalParams, MittagLeffler};
use crate::numerics::principal_pow;
use crate::sinc_contour::{
    interval_average_apply, propagate_homogeneous, quadrature_sum, realify, ContourConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    Geometric,
    Uniform,
}

/// A set of quadrature intervals `[a, a + τ]` covering `[t₁, T]` (geometric)
/// or `[0, T]` (uniform).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricPartition {
    kind: PartitionKind,
    t_final: f64,
    cal_n: usize,
    cal_m: usize,
    coarse: Vec<f64>,
    // (start, width, block index)
    intervals: Vec<(f64, f64, usize)>,
}

/// Number of dyadic levels ⌈2 log₂(𝒩)/γ⌉ (at least 2).
pub fn dyadic_levels(cal_n: usize, gamma: f64) -> usize {
    let m = (2.0 * (cal_n as f64).log2() / gamma - 1e-12).ceil() as usize;
    m.max(2)
}

/// Blocks t_j = 2^{-(𝓜-j)} T, j = 1..𝓜, each of [t_j, t_{j+1}] split into 𝒩 parts.
pub fn geometric_partition(t_final: f64, cal_n: usize, gamma: f64) -> Result<GeometricPartition> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    geometric_partition_with_levels(t_final, cal_n, dyadic_levels(cal_n, gamma))
}

pub fn geometric_partition_with_levels(
    t_final: f64,
    cal_n: usize,
    cal_m: usize,
) -> Result<GeometricPartition> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::param(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if cal_n < 1 || cal_m < 2 {
        return Err(Error::param("need calN >= 1 and calM >= 2"));
    }
    if cal_m > 1000 {
        return Err(Error::Resource(format!("{cal_m} dyadic levels requested")));
    }
    let coarse: Vec<f64> = (1..=cal_m)
        .map(|j| t_final * 2f64.powi(-((cal_m - j) as i32)))
        .collect();
    let mut intervals = Vec::with_capacity((cal_m - 1) * cal_n);
    for j in 0..cal_m - 1 {
        let tj = coarse[j];
        let tau = tj / cal_n as f64;
        for l in 0..cal_n {
            intervals.push((tj + l as f64 * tau, tau, j + 1));
        }
    }
    Ok(GeometricPartition {
        kind: PartitionKind::Geometric,
        t_final,
        cal_n,
        cal_m,
        coarse,
        intervals,
    })
}

/// Equal steps T/steps starting at 0.
pub fn uniform_partition(t_final: f64, steps: usize) -> Result<GeometricPartition> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::param(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if steps < 1 {
        return Err(Error::param("need at least one step"));
    }
    let tau = t_final / steps as f64;
    let intervals = (0..steps).map(|l| (l as f64 * tau, tau, 1)).collect();
    Ok(GeometricPartition {
        kind: PartitionKind::Uniform,
        t_final,
        cal_n: steps,
        cal_m: 1,
        coarse: vec![t_final],
        intervals,
    })
}

impl GeometricPartition {
    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn cal_n(&self) -> usize {
        self.cal_n
    }

    pub fn cal_m(&self) -> usize {
        self.cal_m
    }

    pub fn coarse_times(&self) -> &[f64] {
        &self.coarse
    }

    pub fn num_intervals(&self) -> usize {
        self.intervals.len()
    }

    /// Interval endpoints `(t_{j,l-1}, t_{j,l})` in increasing order.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.intervals
            .iter()
            .enumerate()
            .map(move |(i, &(a, _, _))| (a, self.interval_end(i)))
    }

    // block ends are pinned to the coarse times, other ends to the next start
    fn interval_end(&self, i: usize) -> f64 {
        match self.kind {
            PartitionKind::Uniform if i + 1 == self.intervals.len() => self.t_final,
            PartitionKind::Geometric if (i + 1).is_multiple_of(self.cal_n) => {
                self.coarse[self.intervals[i].2]
            }
            _ => self.intervals[i + 1].0,
        }
    }

    /// All partition points, ascending.
    pub fn fine_times(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.intervals().map(|(a, _)| a).collect();
        out.push(self.t_final);
        out
    }

    pub fn widths(&self) -> Vec<f64> {
        self.intervals().map(|(a, b)| b - a).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.intervals().map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// Space-time forcing f(t, x).
pub trait Forcing: Sync {
    fn eval(&self, t: f64, p: Point) -> f64;

    /// Load vector `(f(t, ·), φ_i)`.
    fn load(&self, system: &FemSystem, t: f64) -> Vec<f64> {
        system.load_vector(&|p| self.eval(t, p))
    }
}

impl<F: Fn(f64, Point) -> f64 + Sync> Forcing for F {
    fn eval(&self, t: f64, p: Point) -> f64 {
        self(t, p)
    }
}

/// Named spatial profiles for file-driven forcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialProfile {
    One,
    /// sin(πx) in 1D, sin(πx₁) sin(πx₂) in 2D.
    Sine,
}

impl SpatialProfile {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "one" | "constant" => Ok(SpatialProfile::One),
            "sine" | "eigen" => Ok(SpatialProfile::Sine),
            other => Err(Error::Config(format!("unknown spatial profile '{other}'"))),
        }
    }

    pub fn eval(self, p: Point, two_d: bool) -> f64 {
        use std::f64::consts::PI;
        match self {
            SpatialProfile::One => 1.0,
            SpatialProfile::Sine if two_d => (PI * p[0]).sin() * (PI * p[1]).sin(),
            SpatialProfile::Sine => (PI * p[0]).sin(),
        }
    }
}

/// f(t, x) = g(t) · φ(x) with a single cached spatial load.
pub struct SeparableForcing<G, P> {
    pub time: G,
    pub space: P,
}

impl<G, P> Forcing for SeparableForcing<G, P>
where
    G: Fn(f64) -> f64 + Sync,
    P: Fn(Point) -> f64 + Sync,
{
    fn eval(&self, t: f64, p: Point) -> f64 {
        (self.time)(t) * (self.space)(p)
    }

    fn load(&self, system: &FemSystem, t: f64) -> Vec<f64> {
        let g = (self.time)(t);
        system
            .load_vector(&|p| (self.space)(p))
            .into_iter()
            .map(|v| g * v)
            .collect()
    }
}

/// Amplitude table with linear interpolation in time, times a named profile.
#[derive(Debug, Clone)]
pub struct TabulatedForcing {
    times: Vec<f64>,
    amplitudes: Vec<f64>,
    profile: SpatialProfile,
    two_d: bool,
}

impl TabulatedForcing {
    pub fn new(
        times: Vec<f64>,
        amplitudes: Vec<f64>,
        profile: SpatialProfile,
        two_d: bool,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != amplitudes.len() {
            return Err(Error::Config(
                "forcing table needs matching, non-empty columns".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "forcing times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            times,
            amplitudes,
            profile,
            two_d,
        })
    }

    /// Reads `t,amplitude` rows; `#` lines and a non-numeric header are skipped.
    pub fn from_csv(path: &Path, profile: SpatialProfile, two_d: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut times = Vec::new();
        let mut amps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                return Err(Error::Config(format!(
                    "forcing table line {}: expected t,amplitude",
                    i + 1
                )));
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    amps.push(v);
                }
                _ if times.is_empty() => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "forcing table line {}: not numeric",
                        i + 1
                    )))
                }
            }
        }
        Self::new(times, amps, profile, two_d)
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.amplitudes[0];
        }
        if t >= self.times[n - 1] {
            return self.amplitudes[n - 1];
        }
        let i = self.times.partition_point(|&s| s <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * self.amplitudes[i - 1] + w * self.amplitudes[i]
    }
}

impl Forcing for TabulatedForcing {
    fn eval(&self, t: f64, p: Point) -> f64 {
        self.amplitude(t) * self.profile.eval(p, self.two_d)
    }

    fn load(&self, system: &FemSystem, t: f64) -> Vec<f64> {
        let a = self.amplitude(t);
        let (profile, two_d) = (self.profile, self.two_d);
        system
            .load_vector(&|p| profile.eval(p, two_d))
            .into_iter()
            .map(|v| a * v)
            .collect()
    }
}

/// Load vectors of f(T - t_{j,l-1/2}), one per partition interval.
pub fn midpoint_loads(
    system: &FemSystem,
    partition: &GeometricPartition,
    f: &dyn Forcing,
    t_final: f64,
) -> Vec<Vec<f64>> {
    partition
        .midpoints()
        .into_par_iter()
        .map(|m| f.load(system, t_final - m))
        .collect()
}

fn ml_at(ml: &MittagLeffler, t: f64, gamma: f64, zb: Complex64) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    ml.eval(-t.powf(gamma) * zb)
}

// Cancellation monitor for e(a) - e(b).
fn check_difference(ea: Complex64, eb: Complex64) -> bool {
    let scale = ea.norm().max(eb.norm());
    (ea - eb).norm() > 1e3 * f64::EPSILON * scale || scale == 0.0
}

/// Fully discrete forced solution at `partition.t_final()`, with 2N+1 solves.
pub fn solve_nonhomogeneous(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    partition: &GeometricPartition,
    f: &dyn Forcing,
) -> Result<ComplexField> {
    let t_final = partition.t_final();
    let loads: Vec<Vec<Complex64>> = midpoint_loads(system, partition, f, t_final)
        .into_iter()
        .map(|l| l.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .collect();
    let times = partition.fine_times();
    let ml = MittagLeffler::new(params.gamma(), 1.0)?;
    let (g, b) = (params.gamma(), params.beta());
    let dofs = system.num_dofs();
    let warned = std::sync::atomic::AtomicBool::new(false);
    let raw = quadrature_sum(system, cfg, None, |node| {
        let zb = principal_pow(node.z, b);
        let e: Vec<Complex64> = times
            .iter()
            .map(|&t| ml_at(&ml, t, g, zb))
            .collect::<Result<_>>()?;
        let mut h = vec![Complex64::new(0.0, 0.0); dofs];
        for (i, load) in loads.iter().enumerate() {
            let (ea, eb) = (e[i], e[i + 1]);
            if !check_difference(ea, eb) && !warned.swap(true, std::sync::atomic::Ordering::Relaxed)
            {
                log::warn!(
                    "Mittag-Leffler difference near rounding level at node {}",
                    node.index
                );
            }
            let d = ea - eb;
            for (hk, lk) in h.iter_mut().zip(load) {
                *hk += d * lk;
            }
        }
        Ok((principal_pow(node.z, -b) * node.dz, Some(h)))
    })?;
    realify(&system.field(raw)?)
}

/// Reference evaluation Σ_{j,l} Q(t_{j,l-1}, τ_j) π_h f(T - t_{j,l-1/2}),
/// one interval-average operator per interval. Requires all starts > 0.
pub fn solve_nonhomogeneous_naive(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    partition: &GeometricPartition,
    f: &dyn Forcing,
) -> Result<ComplexField> {
    let t_final = partition.t_final();
    let mut acc = system.zero_field();
    for (a, b) in partition.intervals() {
        let m = 0.5 * (a + b);
        let data = system.real_field(&system.mass_solve(&f.load(system, t_final - m))?)?;
        let q = interval_average_apply(system, params, cfg, a, b - a, &data)?;
        acc = acc.axpy(Complex64::new(1.0, 0.0), &q)?;
    }
    Ok(acc)
}

/// Superposition of the homogeneous propagator and the forced solution.
pub fn solve_full(
    system: &FemSystem,
    params: &FractionalParams,
    cfg: &ContourConfig,
    partition: &GeometricPartition,
    v_field: &ComplexField,
    f: &dyn Forcing,
) -> Result<ComplexField> {
    let u0 = propagate_homogeneous(system, params, cfg, partition.t_final(), v_field)?;
    u0.axpy(
        Complex64::new(1.0, 0.0),
        &solve_nonhomogeneous(system, params, cfg, partition, f)?,
    )
}
