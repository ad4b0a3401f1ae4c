//! Banded LDLᵀ factorization for complex symmetric (not Hermitian) matrices.
//!
//! No pivoting is performed. The shifted pencils `z M + A` met by the solver
//! have a sign-definite real or imaginary part along the whole contour, for
//! which the unpivoted factorization is stable.

use num_complex::Complex64;

use super::sparse::PencilCsr;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedLdlt {
    n: usize,
    bw: usize,
    // row i holds columns i-bw ..= i; entry (i, j) at i*(bw+1) + (j + bw - i)
    band: Vec<Complex64>,
    diag: Vec<Complex64>,
}

impl BandedLdlt {
    /// Factors `shift * M + A`.
    pub fn factor(pencil: &PencilCsr, shift: Complex64) -> Result<Self> {
        let n = pencil.dim();
        let bw = pencil.bandwidth();
        let w = bw + 1;
        let mut band = vec![Complex64::new(0.0, 0.0); n * w];
        for i in 0..n {
            for (j, m, a) in pencil.row(i) {
                if j <= i {
                    band[i * w + (j + bw - i)] += shift * m + a;
                }
            }
        }
        Self::factor_band(n, bw, band)
    }

    fn factor_band(n: usize, bw: usize, mut band: Vec<Complex64>) -> Result<Self> {
        let w = bw + 1;
        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        // ld[k] = L[i,k] D[k] for the current row
        let mut ld = vec![Complex64::new(0.0, 0.0); w];
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row_i = i * w;
            for j in lo..i {
                let row_j = j * w;
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = band[row_i + (j + bw - i)];
                // Σ_k L[i,k] D[k] L[j,k], k in klo..j
                let a = &ld[(klo + bw - i)..(j + bw - i)];
                let b = &band[(row_j + klo + bw - j)..(row_j + bw)];
                for (x, y) in a.iter().zip(b) {
                    s -= x * y;
                }
                ld[j + bw - i] = s;
                band[row_i + (j + bw - i)] = s / diag[j];
            }
            let mut d = band[row_i + bw];
            for k in lo..i {
                d -= ld[k + bw - i] * band[row_i + (k + bw - i)];
            }
            let dn = d.norm();
            if !(dn > 0.0) || !dn.is_finite() {
                return Err(Error::Solver {
                    reason: format!("zero pivot at row {i}"),
                    condition_estimate: f64::INFINITY,
                });
            }
            max_pivot = max_pivot.max(dn);
            min_pivot = min_pivot.min(dn);
            diag[i] = d;
            band[row_i + bw] = Complex64::new(1.0, 0.0);
        }
        if min_pivot < 1e-14 * max_pivot {
            return Err(Error::Solver {
                reason: "near-singular shifted system".into(),
                condition_estimate: max_pivot / min_pivot,
            });
        }
        Ok(Self { n, bw, band, diag })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of extreme pivot magnitudes; a cheap lower bound on the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        let (lo, hi) = self
            .diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
                (lo.min(d.norm()), hi.max(d.norm()))
            });
        hi / lo
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        // L y = b
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * w + (lo + bw - i)..i * w + bw];
            let mut s = x[i];
            for (l, xk) in row.iter().zip(&x[lo..i]) {
                s -= l * xk;
            }
            x[i] = s;
        }
        for (xi, d) in x.iter_mut().zip(&self.diag) {
            *xi /= d;
        }
        // Lᵀ x = y
        for i in (0..n).rev() {
            let xi = x[i];
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * w + (lo + bw - i)..i * w + bw];
            for (l, xk) in row.iter().zip(&mut x[lo..i]) {
                *xk -= l * xi;
            }
        }
    }
}
