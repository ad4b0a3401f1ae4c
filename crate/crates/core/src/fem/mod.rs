//! Uniform P1 finite elements on the unit interval and the unit square with
//! homogeneous Dirichlet conditions.

pub mod banded;
pub mod krylov;
pub mod quadrature;
pub mod sparse;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use banded::BandedLdlt;
use krylov::{GmresOptions, SinePreconditioner};
pub use sparse::{CsrMatrix, PencilCsr};

/// Relative residual every shifted solve must meet.
pub const SOLVE_TOLERANCE: f64 = 1e-12;

/// Largest accepted number of degrees of freedom.
pub const MAX_DOFS: usize = 1 << 22;

static NEXT_SYSTEM_ID: AtomicU64 = AtomicU64::new(1);

/// Point in the domain; 1D systems ignore the second coordinate.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn from_int(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            _ => Err(Error::param(format!("dimension must be 1 or 2, got {d}"))),
        }
    }

    pub fn as_int(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// Linear solver used for shifted systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Banded complex LDLᵀ.
    Direct,
    /// GMRES preconditioned by the fast sine transform (2D only).
    Krylov,
    /// Direct in 1D and for small 2D meshes, Krylov otherwise.
    Auto,
}

/// Mesh, assembled forms and solve interface for one refinement level.
pub struct FemSystem {
    id: u64,
    dimension: Dimension,
    level: u32,
    cells: usize,
    nodes: Vec<Point>,
    node_dof: Vec<Option<usize>>,
    elements: Vec<[usize; 3]>,
    dof_coords: Vec<Point>,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    pencil: PencilCsr,
    solver: SolverKind,
    mass_factor: OnceLock<BandedLdlt>,
    precond: OnceLock<SinePreconditioner>,
    solves: AtomicUsize,
}

impl std::fmt::Debug for FemSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FemSystem")
            .field("dimension", &self.dimension)
            .field("level", &self.level)
            .field("num_dofs", &self.num_dofs())
            .finish()
    }
}

/// Builds the uniform system of the given dimension (1 or 2) and level.
pub fn build_system(dimension: usize, level: u32) -> Result<FemSystem> {
    FemSystem::new(Dimension::from_int(dimension)?, level)
}

impl FemSystem {
    pub fn new(dimension: Dimension, level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::param("level must be at least 1"));
        }
        if level > 30 {
            return Err(Error::Resource(format!(
                "level {level} exceeds mesh budget"
            )));
        }
        let cells = 1usize << level;
        let dofs = match dimension {
            Dimension::One => cells - 1,
            Dimension::Two => (cells - 1).saturating_mul(cells - 1),
        };
        if dofs > MAX_DOFS {
            return Err(Error::Resource(format!(
                "{dofs} degrees of freedom exceed the budget of {MAX_DOFS}"
            )));
        }
        let (nodes, node_dof, elements) = match dimension {
            Dimension::One => mesh_1d(cells),
            Dimension::Two => mesh_2d(cells),
        };
        let dof_coords = nodes
            .iter()
            .zip(&node_dof)
            .filter_map(|(p, d)| d.map(|_| *p))
            .collect::<Vec<_>>();
        debug_assert_eq!(dof_coords.len(), dofs);

        let mut mass = BTreeMap::new();
        let mut stiff = BTreeMap::new();
        for el in &elements {
            let (me, ke) = match dimension {
                Dimension::One => element_1d(&nodes, el),
                Dimension::Two => element_2d(&nodes, el),
            };
            let nv = vertices(dimension);
            for a in 0..nv {
                let Some(i) = node_dof[el[a]] else { continue };
                for b in 0..nv {
                    let Some(j) = node_dof[el[b]] else { continue };
                    *mass.entry((i, j)).or_insert(0.0) += me[a][b];
                    *stiff.entry((i, j)).or_insert(0.0) += ke[a][b];
                }
            }
        }
        // drop structural zeros (the diagonal of a square cell couples NE/SW only)
        stiff.retain(|_, v: &mut f64| v.abs() > 1e-14);
        let mass = CsrMatrix::from_map(dofs, &mass);
        let stiffness = CsrMatrix::from_map(dofs, &stiff);
        let pencil = PencilCsr::new(&mass, &stiffness);
        Ok(Self {
            id: NEXT_SYSTEM_ID.fetch_add(1, Ordering::Relaxed),
            dimension,
            level,
            cells,
            nodes,
            node_dof,
            elements,
            dof_coords,
            mass,
            stiffness,
            pencil,
            solver: SolverKind::Auto,
            mass_factor: OnceLock::new(),
            precond: OnceLock::new(),
            solves: AtomicUsize::new(0),
        })
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Result<Self> {
        if solver == SolverKind::Krylov && self.dimension == Dimension::One {
            return Err(Error::param("the Krylov solver is only available in 2D"));
        }
        self.solver = solver;
        Ok(self)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Grid spacing 2^{-level}.
    pub fn grid_spacing(&self) -> f64 {
        1.0 / self.cells as f64
    }

    /// Element diameter: the grid spacing in 1D, √2 times it in 2D.
    pub fn mesh_size(&self) -> f64 {
        match self.dimension {
            Dimension::One => self.grid_spacing(),
            Dimension::Two => self.grid_spacing() * std::f64::consts::SQRT_2,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn node_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn pencil(&self) -> &PencilCsr {
        &self.pencil
    }

    /// Number of shifted solves performed since construction or the last reset.
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::SeqCst)
    }

    pub fn reset_solve_count(&self) {
        self.solves.store(0, Ordering::SeqCst);
    }

    pub fn zero_field(&self) -> ComplexField {
        ComplexField {
            coeffs: vec![Complex64::new(0.0, 0.0); self.num_dofs()],
            system_id: self.id,
        }
    }

    /// Wraps coefficients as a field on this system.
    pub fn field(&self, coeffs: Vec<Complex64>) -> Result<ComplexField> {
        if coeffs.len() != self.num_dofs() {
            return Err(Error::param(format!(
                "field has {} coefficients, system has {} dofs",
                coeffs.len(),
                self.num_dofs()
            )));
        }
        Ok(ComplexField {
            coeffs,
            system_id: self.id,
        })
    }

    pub fn real_field(&self, coeffs: &[f64]) -> Result<ComplexField> {
        self.field(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub(crate) fn check(&self, field: &ComplexField) -> Result<()> {
        if field.system_id != self.id || field.coeffs.len() != self.num_dofs() {
            return Err(Error::param("field does not belong to this system"));
        }
        Ok(())
    }

    fn use_krylov(&self) -> bool {
        match self.solver {
            SolverKind::Direct => false,
            SolverKind::Krylov => true,
            SolverKind::Auto => self.dimension == Dimension::Two && self.level >= 6,
        }
    }

    /// Solves `(z M + A) U = V`.
    pub fn shifted_solve(&self, z: Complex64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.num_dofs() {
            return Err(Error::param(
                "right-hand side length does not match the system",
            ));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::param(format!("non-finite shift {z}")));
        }
        self.solves.fetch_add(1, Ordering::SeqCst);
        let bnorm = norm(rhs);
        if bnorm == 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); rhs.len()]);
        }
        if self.use_krylov() {
            let pre = self
                .precond
                .get_or_init(|| SinePreconditioner::new(self.cells));
            match krylov::gmres(&self.pencil, pre, z, rhs, GmresOptions::default()) {
                Ok((u, _)) => {
                    let res = self.residual_norm(z, &u, rhs);
                    if res <= self.residual_tolerance(z, &u, bnorm) {
                        return Ok(u);
                    }
                    log::warn!(
                        "Krylov residual {:e} too large at z = {z}, using direct solve",
                        res / bnorm
                    );
                }
                Err(e) => log::warn!("{e}; using direct solve at z = {z}"),
            }
        }
        self.direct_solve(z, rhs, bnorm)
    }

    fn direct_solve(&self, z: Complex64, rhs: &[Complex64], bnorm: f64) -> Result<Vec<Complex64>> {
        let fac = BandedLdlt::factor(&self.pencil, z)?;
        let mut u = rhs.to_vec();
        fac.solve_in_place(&mut u);
        let mut r = self.residual(z, &u, rhs);
        let mut res = norm(&r);
        if res > self.residual_tolerance(z, &u, bnorm) {
            fac.solve_in_place(&mut r);
            for (ui, di) in u.iter_mut().zip(&r) {
                *ui += di;
            }
            res = self.residual_norm(z, &u, rhs);
        }
        if res > self.residual_tolerance(z, &u, bnorm) || !res.is_finite() {
            return Err(Error::Solver {
                reason: format!("residual {:e} above tolerance at shift {z}", res / bnorm),
                condition_estimate: fac.pivot_ratio(),
            });
        }
        Ok(u)
    }

    // 1e-12·‖V‖, relaxed to the rounding level of the residual evaluation
    // itself, which exceeds it on fine grids.
    fn residual_tolerance(&self, z: Complex64, u: &[Complex64], bnorm: f64) -> f64 {
        let mut scale = vec![0.0; u.len()];
        self.pencil.apply_abs(z, u, &mut scale);
        let floor = 16.0 * f64::EPSILON * scale.iter().map(|v| v * v).sum::<f64>().sqrt();
        (SOLVE_TOLERANCE * bnorm).max(floor)
    }

    fn residual(&self, z: Complex64, u: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
        let mut r = vec![Complex64::new(0.0, 0.0); u.len()];
        self.pencil.apply(z, u, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        r
    }

    fn residual_norm(&self, z: Complex64, u: &[Complex64], rhs: &[Complex64]) -> f64 {
        norm(&self.residual(z, u, rhs))
    }

    /// Solves `M c = b` for real data.
    pub fn mass_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let fac = match self.mass_factor.get() {
            Some(f) => f,
            None => {
                let only_mass = PencilCsr::new(
                    &self.mass,
                    &CsrMatrix::from_map(self.num_dofs(), &BTreeMap::new()),
                );
                let f = BandedLdlt::factor(&only_mass, Complex64::new(1.0, 0.0))?;
                self.mass_factor.get_or_init(|| f)
            }
        };
        let mut x: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fac.solve_in_place(&mut x);
        Ok(x.into_iter().map(|c| c.re).collect())
    }

    /// Load vector `(f, φ_i)` by per-element Gauss quadrature.
    pub fn load_vector(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        let mut b = vec![0.0; self.num_dofs()];
        self.for_each_quadrature_point(|el, lam, w| {
            let p = self.map_point(el, lam);
            let fv = f(p) * w;
            for (a, &node) in el.iter().take(vertices(self.dimension)).enumerate() {
                if let Some(i) = self.node_dof[node] {
                    b[i] += fv * lam[a];
                }
            }
        });
        b
    }

    /// L² projection onto the finite element space.
    pub fn l2_project(&self, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<ComplexField> {
        let c = self.mass_solve(&self.load_vector(f))?;
        self.real_field(&c)
    }

    /// Nodal interpolant.
    pub fn interpolate(&self, f: &dyn Fn(Point) -> f64) -> ComplexField {
        let c: Vec<f64> = self.dof_coords.iter().map(|&p| f(p)).collect();
        self.real_field(&c).expect("length matches")
    }

    pub fn l2_norm(&self, field: &ComplexField) -> Result<f64> {
        self.check(field)?;
        Ok(self.mass.quadratic_form(&field.coeffs).max(0.0).sqrt())
    }

    pub fn h1_seminorm(&self, field: &ComplexField) -> Result<f64> {
        self.check(field)?;
        Ok(self.stiffness.quadratic_form(&field.coeffs).max(0.0).sqrt())
    }

    /// `(‖u − u_h‖, ‖∇u − ∇u_h‖)` by per-element quadrature.
    pub fn error_norms(
        &self,
        field: &ComplexField,
        exact: &dyn Fn(Point) -> f64,
        exact_grad: &dyn Fn(Point) -> [f64; 2],
    ) -> Result<(f64, f64)> {
        self.check(field)?;
        let nv = vertices(self.dimension);
        let mut e0 = 0.0;
        let mut e1 = 0.0;
        self.for_each_quadrature_point(|el, lam, w| {
            let mut uh = Complex64::new(0.0, 0.0);
            for a in 0..nv {
                if let Some(i) = self.node_dof[el[a]] {
                    uh += field.coeffs[i] * lam[a];
                }
            }
            let p = self.map_point(el, lam);
            e0 += w * (uh - exact(p)).norm_sqr();
            let g = exact_grad(p);
            let gh = self.element_gradient(el, &field.coeffs);
            e1 += w * ((gh[0] - g[0]).norm_sqr() + (gh[1] - g[1]).norm_sqr());
        });
        Ok((e0.sqrt(), e1.sqrt()))
    }

    fn element_gradient(&self, el: &[usize; 3], c: &[Complex64]) -> [Complex64; 2] {
        let val = |n: usize| self.node_dof[n].map_or(Complex64::new(0.0, 0.0), |i| c[i]);
        match self.dimension {
            Dimension::One => {
                let h = self.nodes[el[1]][0] - self.nodes[el[0]][0];
                [(val(el[1]) - val(el[0])) / h, Complex64::new(0.0, 0.0)]
            }
            Dimension::Two => {
                let g = p1_gradients(&self.nodes, el);
                let mut out = [Complex64::new(0.0, 0.0); 2];
                for a in 0..3 {
                    let v = val(el[a]);
                    out[0] += v * g[a][0];
                    out[1] += v * g[a][1];
                }
                out
            }
        }
    }

    fn map_point(&self, el: &[usize; 3], lam: &[f64; 3]) -> Point {
        let mut p = [0.0; 2];
        for a in 0..vertices(self.dimension) {
            let q = self.nodes[el[a]];
            p[0] += lam[a] * q[0];
            p[1] += lam[a] * q[1];
        }
        p
    }

    // visits (element, barycentric point, physical weight)
    fn for_each_quadrature_point(&self, mut visit: impl FnMut(&[usize; 3], &[f64; 3], f64)) {
        match self.dimension {
            Dimension::One => {
                let rule = quadrature::segment_rule();
                for el in &self.elements {
                    let h = self.nodes[el[1]][0] - self.nodes[el[0]][0];
                    for (l, w) in &rule {
                        visit(el, &[l[0], l[1], 0.0], w * h);
                    }
                }
            }
            Dimension::Two => {
                let rule = quadrature::triangle_rule();
                for el in &self.elements {
                    let area2 = 2.0 * triangle_area(&self.nodes, el);
                    for (l, w) in &rule {
                        visit(el, l, w * area2);
                    }
                }
            }
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn vertices(dim: Dimension) -> usize {
    match dim {
        Dimension::One => 2,
        Dimension::Two => 3,
    }
}

type Mesh = (Vec<Point>, Vec<Option<usize>>, Vec<[usize; 3]>);

fn mesh_1d(cells: usize) -> Mesh {
    let h = 1.0 / cells as f64;
    let nodes = (0..=cells).map(|i| [i as f64 * h, 0.0]).collect();
    let node_dof = (0..=cells)
        .map(|i| (i > 0 && i < cells).then(|| i - 1))
        .collect();
    let elements = (0..cells).map(|i| [i, i + 1, i + 1]).collect();
    (nodes, node_dof, elements)
}

// Each grid cell is split along its SW-NE diagonal.
fn mesh_2d(cells: usize) -> Mesh {
    let h = 1.0 / cells as f64;
    let side = cells + 1;
    let idx = |i: usize, j: usize| j * side + i;
    let mut nodes = Vec::with_capacity(side * side);
    let mut node_dof = Vec::with_capacity(side * side);
    for j in 0..=cells {
        for i in 0..=cells {
            nodes.push([i as f64 * h, j as f64 * h]);
            let interior = i > 0 && i < cells && j > 0 && j < cells;
            node_dof.push(interior.then(|| (j - 1) * (cells - 1) + (i - 1)));
        }
    }
    let mut elements = Vec::with_capacity(2 * cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let (sw, se, ne, nw) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            elements.push([sw, se, ne]);
            elements.push([sw, ne, nw]);
        }
    }
    (nodes, node_dof, elements)
}

type Local = [[f64; 3]; 3];

fn element_1d(nodes: &[Point], el: &[usize; 3]) -> (Local, Local) {
    let h = nodes[el[1]][0] - nodes[el[0]][0];
    let mut m = [[0.0; 3]; 3];
    let mut k = [[0.0; 3]; 3];
    m[0][0] = h / 3.0;
    m[1][1] = h / 3.0;
    m[0][1] = h / 6.0;
    m[1][0] = h / 6.0;
    k[0][0] = 1.0 / h;
    k[1][1] = 1.0 / h;
    k[0][1] = -1.0 / h;
    k[1][0] = -1.0 / h;
    (m, k)
}

fn triangle_area(nodes: &[Point], el: &[usize; 3]) -> f64 {
    let [a, b, c] = [nodes[el[0]], nodes[el[1]], nodes[el[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
}

fn p1_gradients(nodes: &[Point], el: &[usize; 3]) -> [[f64; 2]; 3] {
    let [a, b, c] = [nodes[el[0]], nodes[el[1]], nodes[el[2]]];
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ]
}

fn element_2d(nodes: &[Point], el: &[usize; 3]) -> (Local, Local) {
    let area = triangle_area(nodes, el);
    let g = p1_gradients(nodes, el);
    let mut m = [[0.0; 3]; 3];
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            m[a][b] = area / 12.0 * if a == b { 2.0 } else { 1.0 };
            k[a][b] = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
        }
    }
    (m, k)
}

/// Complex nodal coefficients tied to the system that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    coeffs: Vec<Complex64>,
    system_id: u64,
}

impl ComplexField {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn system_id(&self) -> u64 {
        self.system_id
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.im.abs()))
    }

    /// Same field with imaginary parts set to zero.
    pub fn real_part(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
            system_id: self.system_id,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            system_id: self.system_id,
        }
    }

    /// `self + s * other`
    pub fn axpy(&self, s: Complex64, other: &ComplexField) -> Result<Self> {
        if other.system_id != self.system_id {
            return Err(Error::param("fields live on different systems"));
        }
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
            system_id: self.system_id,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn level_one_interval() {
        let s = build_system(1, 1).unwrap();
        assert_eq!(s.num_dofs(), 1);
        assert!((s.mass().get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.stiffness().get(0, 0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn level_two_interval_stiffness() {
        let s = build_system(1, 2).unwrap();
        let d = s.stiffness().to_dense();
        let want = [[8.0, -4.0, 0.0], [-4.0, 8.0, -4.0], [0.0, -4.0, 8.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[i][j] - want[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn square_stencils() {
        let s = build_system(2, 3).unwrap();
        assert_eq!(s.num_dofs(), 49);
        let h2 = 1.0 / 64.0;
        let centre = 3 * 7 + 3;
        assert!((s.stiffness().get(centre, centre) - 4.0).abs() < 1e-13);
        assert!((s.stiffness().get(centre, centre + 1) + 1.0).abs() < 1e-13);
        assert!((s.stiffness().get(centre, centre + 8)).abs() < 1e-13);
        assert!((s.mass().get(centre, centre) - h2 / 2.0).abs() < 1e-15);
        for off in [1, 7, 8] {
            assert!((s.mass().get(centre, centre + off) - h2 / 12.0).abs() < 1e-15);
            assert!((s.mass().get(centre, centre - off) - h2 / 12.0).abs() < 1e-15);
        }
        assert_eq!(s.mass().get(centre, centre + 6), 0.0);
        assert_eq!(build_system(2, 1).unwrap().num_dofs(), 1);
    }

    #[test]
    fn hand_solves() {
        let s = build_system(1, 1).unwrap();
        let u = s.shifted_solve(c(0.0, 0.0), &[c(1.0, 0.0)]).unwrap();
        assert!((u[0] - c(0.25, 0.0)).norm() < 1e-15);
        let u = s.shifted_solve(c(0.0, 3.0), &[c(1.0, 0.0)]).unwrap();
        assert!((u[0] - c(1.0, 0.0) / c(4.0, 1.0)).norm() < 1e-15);
        assert!((u[0] - c(0.23529411764705882, -0.058823529411764705)).norm() < 1e-12);
        assert_eq!(s.solve_count(), 2);
    }

    #[test]
    fn projection_and_norms() {
        let s = build_system(1, 1).unwrap();
        let p = s.l2_project(&|_| 1.0).unwrap();
        assert!((p.coeffs()[0].re - 1.5).abs() < 1e-14);
        assert!((s.load_vector(&|_| 1.0)[0] - 0.5).abs() < 1e-15);
        let one = s.real_field(&[1.0]).unwrap();
        assert!((s.l2_norm(&one).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.h1_seminorm(&one).unwrap() - 2.0).abs() < 1e-15);
        let zero = s.zero_field();
        let pi = std::f64::consts::PI;
        let (e0, _) = s
            .error_norms(&zero, &|p| (pi * p[0]).sin(), &|p| {
                [pi * (pi * p[0]).cos(), 0.0]
            })
            .unwrap();
        assert!((e0 - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn foreign_field_rejected() {
        let a = build_system(1, 2).unwrap();
        let b = build_system(1, 2).unwrap();
        assert!(a.l2_norm(&b.zero_field()).is_err());
    }

    #[test]
    fn sine_preconditioner_inverts_symmetric_stencil() {
        // on a pure stiffness problem (shift 0) the preconditioner is exact
        let s = build_system(2, 4).unwrap();
        let pre = SinePreconditioner::new(16);
        let n = s.num_dofs();
        let x: Vec<Complex64> = (0..n)
            .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut b = vec![c(0.0, 0.0); n];
        s.pencil().apply(c(0.0, 0.0), &x, &mut b);
        pre.apply(c(0.0, 0.0), &mut b);
        let err = x
            .iter()
            .zip(&b)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn krylov_matches_direct() {
        let s = build_system(2, 4).unwrap();
        let k = build_system(2, 4)
            .unwrap()
            .with_solver(SolverKind::Krylov)
            .unwrap();
        let n = s.num_dofs();
        let rhs: Vec<Complex64> = (0..n)
            .map(|i| c(1.0 + (i % 5) as f64, (i % 3) as f64))
            .collect();
        for z in [c(-1.0, 0.0), c(-5.0, -4.9), c(-1e6, 1e6), c(3.0, 2.0)] {
            let a = s.shifted_solve(z, &rhs).unwrap();
            let b = k.shifted_solve(z, &rhs).unwrap();
            let scale = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let err = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10 * scale, "z={z}: {err}");
        }
    }
}
