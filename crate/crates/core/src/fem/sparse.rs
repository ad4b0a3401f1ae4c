//! Compressed-row storage for the assembled real symmetric forms.

use std::collections::BTreeMap;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from accumulated `(row, col) -> value` triplets.
    pub fn from_map(n: usize, entries: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for (&(r, c), &v) in entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// Largest |i - j| over the stored pattern.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn matvec_real(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in self.row(i) {
                acc += x[j] * v;
            }
            *yi = acc;
        }
    }

    /// `x* A x` for real symmetric A (real-valued for Hermitian forms).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                acc += v * (xi.conj() * x[j]).re;
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Shared sparsity pattern carrying both mass and stiffness values, so that
/// `shift * M + A` can be applied or factored without forming it.
#[derive(Debug, Clone)]
pub struct PencilCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    mass: Vec<f64>,
    stiff: Vec<f64>,
}

impl PencilCsr {
    pub fn new(mass: &CsrMatrix, stiffness: &CsrMatrix) -> Self {
        let n = mass.dim();
        let mut entries: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for i in 0..n {
            for (j, v) in mass.row(i) {
                entries.entry((i, j)).or_default().0 += v;
            }
            for (j, v) in stiffness.row(i) {
                entries.entry((i, j)).or_default().1 += v;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut m = Vec::with_capacity(entries.len());
        let mut a = Vec::with_capacity(entries.len());
        for (&(r, c), &(mv, av)) in &entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            m.push(mv);
            a.push(av);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            mass: m,
            stiff: a,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| {
                self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(move |&j| i.abs_diff(j))
            })
            .max()
            .unwrap_or(0)
    }

    /// Entries `(col, mass, stiffness)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.mass[r.clone()])
            .zip(&self.stiff[r])
            .map(|((&c, &m), &a)| (c, m, a))
    }

    /// `y = (shift M + A) x`
    pub fn apply(&self, shift: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut mx = Complex64::new(0.0, 0.0);
            let mut ax = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let xj = x[self.cols[k]];
                mx += xj * self.mass[k];
                ax += xj * self.stiff[k];
            }
            *yi = shift * mx + ax;
        }
    }

    /// `(|shift|·|M| + |A|)·|x|`, the componentwise scale of `apply`.
    pub fn apply_abs(&self, shift: Complex64, x: &[Complex64], y: &mut [f64]) {
        let s = shift.norm();
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.cols[k]].norm() * (s * self.mass[k].abs() + self.stiff[k].abs());
            }
            *yi = acc;
        }
    }
}
