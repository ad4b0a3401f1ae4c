//! Restarted GMRES with a fast-sine-transform preconditioner for the 2D pencil.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::sparse::PencilCsr;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Exact inverse of `shift * M_s + A` where `A` is the five-point stiffness
/// and `M_s` is the mass stencil with its diagonal couplings symmetrized.
/// Both are diagonalized by the 2D type-I sine transform.
pub struct SinePreconditioner {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    sym_a: Vec<f64>,
    sym_m: Vec<f64>,
}

impl std::fmt::Debug for SinePreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SinePreconditioner")
            .field("n", &self.n)
            .finish()
    }
}

impl SinePreconditioner {
    /// `n` cells per side, grid spacing `1/n`.
    pub fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        let h2 = 1.0 / (n * n) as f64;
        let m = n - 1;
        let mut sym_a = Vec::with_capacity(m * m);
        let mut sym_m = Vec::with_capacity(m * m);
        for k2 in 1..n {
            let c2 = (std::f64::consts::PI * k2 as f64 / n as f64).cos();
            for k1 in 1..n {
                let c1 = (std::f64::consts::PI * k1 as f64 / n as f64).cos();
                sym_a.push(4.0 - 2.0 * c1 - 2.0 * c2);
                sym_m.push(h2 * (0.5 + (c1 + c2) / 6.0 + c1 * c2 / 6.0));
            }
        }
        Self {
            n,
            fft,
            sym_a,
            sym_m,
        }
    }

    // y_k = Σ_j x_j sin(π j k / n), applied to each stride-separated line
    fn dst_lines(
        &self,
        x: &mut [Complex64],
        stride: usize,
        step: usize,
        buf: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        let (n, m) = (self.n, self.n - 1);
        for line in 0..m {
            let base = line * step;
            buf.fill(ZERO);
            for j in 1..n {
                let v = x[base + (j - 1) * stride];
                buf[j] = v;
                buf[2 * n - j] = -v;
            }
            self.fft.process_with_scratch(buf, scratch);
            for k in 1..n {
                // F_k = -2i Σ x_j sin(π j k / n)
                let f = buf[k];
                x[base + (k - 1) * stride] = Complex64::new(-0.5 * f.im, 0.5 * f.re);
            }
        }
    }

    fn dst2(&self, x: &mut [Complex64], buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let m = self.n - 1;
        self.dst_lines(x, 1, m, buf, scratch);
        self.dst_lines(x, m, 1, buf, scratch);
    }

    pub fn apply(&self, shift: Complex64, x: &mut [Complex64]) {
        let mut buf = vec![ZERO; 2 * self.n];
        let mut scratch = vec![ZERO; self.fft.get_inplace_scratch_len()];
        self.dst2(x, &mut buf, &mut scratch);
        let norm = (2.0 / self.n as f64).powi(2);
        for ((xi, &a), &m) in x.iter_mut().zip(&self.sym_a).zip(&self.sym_m) {
            *xi *= norm / (shift * m + a);
        }
        self.dst2(x, &mut buf, &mut scratch);
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            restart: 60,
            max_iter: 1200,
            rel_tol: 4e-13,
        }
    }
}

/// Right-preconditioned restarted GMRES for `(shift M + A) x = b`.
/// Returns the final iterate and the iteration count; the caller checks the
/// true residual, since the rounding floor may sit above `rel_tol`.
pub fn gmres(
    pencil: &PencilCsr,
    pre: &SinePreconditioner,
    shift: Complex64,
    b: &[Complex64],
    opts: GmresOptions,
) -> Result<(Vec<Complex64>, usize)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![ZERO; n];
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let target = opts.rel_tol * bnorm;
    let m = opts.restart;
    let mut r = b.to_vec();
    let mut iters = 0usize;
    let mut w = vec![ZERO; n];
    let mut last_res = f64::INFINITY;
    while iters < opts.max_iter {
        let beta = norm2(&r);
        if beta <= target {
            return Ok((x, iters));
        }
        if beta > 0.5 * last_res {
            // restart cycle made no headway: rounding floor reached
            break;
        }
        last_res = beta;
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut hess = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let mut zj = basis[j].clone();
            pre.apply(shift, &mut zj);
            pencil.apply(shift, &zj, &mut w);
            for (i, vi) in basis.iter().enumerate() {
                let hij = dot(vi, &w);
                hess[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm2(&w);
            hess[j + 1][j] = Complex64::new(hn, 0.0);
            for i in 0..j {
                let (a, bb) = (hess[i][j], hess[i + 1][j]);
                hess[i][j] = cs[i] * a + sn[i] * bb;
                hess[i + 1][j] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (a, bb) = (hess[j][j], hess[j + 1][j]);
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if denom == 0.0 {
                break;
            }
            let (c, s) = if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                let c = a.norm() / denom;
                (c, (a / a.norm()) * bb.conj() / denom)
            };
            cs[j] = c;
            sn[j] = s;
            hess[j][j] = c * a + s * bb;
            hess[j + 1][j] = ZERO;
            g[j + 1] = -s.conj() * g[j];
            g[j] *= c;
            used = j + 1;
            iters += 1;
            if g[j + 1].norm() <= target || hn == 0.0 || iters >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        // back substitution on the triangular system, then x += P⁻¹ V y
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= hess[i][k] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        let mut upd = vec![ZERO; n];
        for (yi, vi) in y.iter().zip(&basis) {
            for (u, v) in upd.iter_mut().zip(vi) {
                *u += yi * v;
            }
        }
        pre.apply(shift, &mut upd);
        for (xi, u) in x.iter_mut().zip(&upd) {
            *xi += u;
        }
        pencil.apply(shift, &x, &mut w);
        for ((ri, bi), wi) in r.iter_mut().zip(b).zip(&w) {
            *ri = bi - wi;
        }
    }
    let res = norm2(&r);
    if !res.is_finite() {
        return Err(Error::Solver {
            reason: "GMRES produced a non-finite iterate".into(),
            condition_estimate: f64::NAN,
        });
    }
    log::debug!(
        "GMRES stopped after {iters} iterations at relative residual {:e}",
        res / bnorm
    );
    Ok((x, iters))
}
