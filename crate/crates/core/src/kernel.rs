//! The Goursat kernel of the transmutation operator.
//!
//! `H(u, v)` solves
//!
//! ```text
//! H(u, v) = ½ ∫_0^u q(s) ds + ∫_0^u ∫_0^v q(α + β) H(α, β) dβ dα,   |u| + |v| ≤ a,
//! ```
//!
//! and the kernel of `T` is `K(x, t) = H((x + t)/2, (x - t)/2)`. The solution
//! is the sum of successive approximations `H = Σ H_m`, each term the nested
//! cumulative trapezoid integral of `q(α+β) H_{m-1}`. `H` lives on the square
//! tensor grid `[-a, a]²` in `(u, v)` with the step of the source grid, and is
//! zero outside the diamond `|u| + |v| ≤ a`.
//!
//! Because `u_j + v_k` is itself a node of the source grid, the potential is
//! read at nodes without interpolation.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::Potential;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Absolute tolerance for both the last series term and the factorial
    /// tail bound.
    pub tol: f64,
    pub n_max: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            n_max: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GoursatKernel {
    grid: Grid,
    /// Row-major `(u_j, v_k)`, index `j * (n + 1) + k`.
    values: Vec<Complex64>,
    iterations: usize,
    tail_bound: f64,
    last_term: f64,
    q_l1: f64,
}

/// Sums the successive approximations for `H` until both the sup-norm of the
/// latest term and the a-priori tail `‖q‖₁ (a‖q‖₁)^{m+1} / (m+1)!` are below
/// `opts.tol`.
///
/// Fails with [`Error::Truncated`] when `opts.n_max` terms were not enough,
/// and with [`Error::Invariant`] if a term ever exceeds its factorial bound.
pub fn build_kernel(q: &Potential, opts: KernelOptions) -> Result<GoursatKernel> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("kernel tolerance must be positive, got {}", opts.tol)));
    }
    if opts.n_max == 0 {
        return Err(Error::Domain("kernel n_max must be at least 1".into()));
    }
    let grid = *q.grid();
    let m = grid.len();
    let c = grid.center();
    let h = grid.h();
    let a = grid.a();
    let l1 = q.l1_norm();
    let qs = q.samples().values();

    let half_anti: Vec<Complex64> = q.antiderivative().values().iter().map(|v| 0.5 * v).collect();
    let mut term = vec![ZERO; m * m];
    term.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
        for (k, slot) in row.iter_mut().enumerate() {
            if inside(c, j, k) {
                *slot = half_anti[j];
            }
        }
    });
    let mut total = term.clone();

    let mut index = 0usize;
    let mut factorial_bound = l1;
    let mut term_norm = sup(&term);
    let mut tail = factorial_bound * a * l1;
    check_factorial(index, term_norm, factorial_bound)?;

    while !(term_norm <= opts.tol && tail <= opts.tol) {
        if index + 1 >= opts.n_max {
            return Err(Error::Truncated {
                what: "kernel series",
                iterations: index + 1,
                tail,
            });
        }
        // g = q(α + β) H_{m-1}, then the nested cumulative integral in place.
        term.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
            for (k, slot) in row.iter_mut().enumerate() {
                if inside(c, j, k) {
                    *slot *= qs[j + k - c];
                }
            }
        });
        cumulate_rows(&mut term, m, c, h);
        cumulate_columns(&mut term, m, c, h);
        term.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
            for (k, slot) in row.iter_mut().enumerate() {
                if !inside(c, j, k) {
                    *slot = ZERO;
                }
            }
        });

        index += 1;
        factorial_bound *= a * l1 / index as f64;
        term_norm = sup(&term);
        tail = factorial_bound * a * l1 / (index + 1) as f64;
        check_factorial(index, term_norm, factorial_bound)?;
        total
            .par_iter_mut()
            .zip(term.par_iter())
            .for_each(|(t, s)| *t += s);
    }

    Ok(GoursatKernel {
        grid,
        values: total,
        iterations: index + 1,
        tail_bound: tail,
        last_term: term_norm,
        q_l1: l1,
    })
}

fn check_factorial(index: usize, norm: f64, bound: f64) -> Result<()> {
    // the discrete H_0 is bounded by ½‖q‖₁, leaving a factor of two of slack
    if norm > bound * (1.0 + 1e-9) + 1e-300 {
        return Err(Error::Invariant(format!(
            "kernel term {index} has sup-norm {norm:e} above its factorial bound {bound:e}"
        )));
    }
    Ok(())
}

#[inline]
fn inside(c: usize, j: usize, k: usize) -> bool {
    j.abs_diff(c) + k.abs_diff(c) <= c
}

fn sup(values: &[Complex64]) -> f64 {
    values.par_iter().map(|v| v.norm()).reduce(|| 0.0, f64::max)
}

/// In-place `∫_0^{v_k}` along each row, outward from the centre column.
fn cumulate_rows(values: &mut [Complex64], m: usize, c: usize, h: f64) {
    values.par_chunks_mut(m).for_each(|row| {
        let g_center = row[c];
        row[c] = ZERO;
        let mut prev = g_center;
        for k in c + 1..m {
            let g = row[k];
            row[k] = row[k - 1] + 0.5 * h * (prev + g);
            prev = g;
        }
        prev = g_center;
        for k in (0..c).rev() {
            let g = row[k];
            row[k] = row[k + 1] - 0.5 * h * (g + prev);
            prev = g;
        }
    });
}

/// In-place `∫_0^{u_j}` down each column, outward from the centre row.
fn cumulate_columns(values: &mut [Complex64], m: usize, c: usize, h: f64) {
    let g_center: Vec<Complex64> = values[c * m..(c + 1) * m].to_vec();
    values[c * m..(c + 1) * m].fill(ZERO);
    let mut prev = g_center.clone();
    for j in c + 1..m {
        let (done, rest) = values.split_at_mut(j * m);
        let below = &done[(j - 1) * m..];
        let row = &mut rest[..m];
        for k in 0..m {
            let g = row[k];
            row[k] = below[k] + 0.5 * h * (prev[k] + g);
            prev[k] = g;
        }
    }
    prev.copy_from_slice(&g_center);
    for j in (0..c).rev() {
        let (head, tail) = values.split_at_mut((j + 1) * m);
        let above = &tail[..m];
        let row = &mut head[j * m..];
        for k in 0..m {
            let g = row[k];
            row[k] = above[k] - 0.5 * h * (g + prev[k]);
            prev[k] = g;
        }
    }
}

impl GoursatKernel {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn a(&self) -> f64 {
        self.grid.a()
    }

    /// Number of series terms summed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `‖q‖₁ (a‖q‖₁)^{m+1} / (m+1)!` for the last term index `m`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Sup-norm of the last term added.
    pub fn last_term_norm(&self) -> f64 {
        self.last_term
    }

    pub fn q_l1(&self) -> f64 {
        self.q_l1
    }

    /// `‖q‖₁ e^{a‖q‖₁}`, the a-priori bound on `|H|`.
    pub fn a_priori_bound(&self) -> f64 {
        self.q_l1 * (self.a() * self.q_l1).exp()
    }

    pub fn is_inside(&self, j: usize, k: usize) -> bool {
        let n = self.grid.n();
        j <= n && k <= n && inside(self.grid.center(), j, k)
    }

    /// `H(u_j, v_k)`; zero outside the diamond.
    pub fn node_value(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.len() + k]
    }

    /// Iterator over `(j, k, H)` for the nodes of the diamond.
    pub fn inside_nodes(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let m = self.grid.len();
        (0..m).flat_map(move |j| {
            (0..m)
                .filter(move |&k| self.is_inside(j, k))
                .map(move |k| (j, k, self.node_value(j, k)))
        })
    }

    pub fn sup_norm(&self) -> f64 {
        sup(&self.values)
    }

    /// `H(u, v)` by bilinear interpolation. Cells cut by the diamond boundary
    /// use the linear interpolant on their inside triangle.
    pub fn h_at(&self, u: f64, v: f64) -> Result<Complex64> {
        let h = self.grid.h();
        let a = self.a();
        if !(u.is_finite() && v.is_finite()) || u.abs() + v.abs() > a + 1e-9 * h {
            return Err(Error::Domain(format!(
                "(u, v) = ({u}, {v}) lies outside |u| + |v| <= {a}"
            )));
        }
        let n = self.grid.n() as f64;
        let c = self.grid.center() as f64;
        let fu = (u / h + c).clamp(0.0, n);
        let fv = (v / h + c).clamp(0.0, n);
        let j = (fu.floor() as usize).min(self.grid.n() - 1);
        let k = (fv.floor() as usize).min(self.grid.n() - 1);
        Ok(self.interpolate_cell(j, k, fu - j as f64, fv - k as f64))
    }

    fn interpolate_cell(&self, j: usize, k: usize, s: f64, t: f64) -> Complex64 {
        let f00 = self.node_value(j, k);
        let f10 = self.node_value(j + 1, k);
        let f01 = self.node_value(j, k + 1);
        let f11 = self.node_value(j + 1, k + 1);
        let out = [
            !self.is_inside(j, k),
            !self.is_inside(j + 1, k),
            !self.is_inside(j, k + 1),
            !self.is_inside(j + 1, k + 1),
        ];
        match out {
            [false, false, false, false] => {
                f00 * (1.0 - s) * (1.0 - t) + f10 * s * (1.0 - t) + f01 * (1.0 - s) * t + f11 * s * t
            }
            [false, false, false, true] => f00 + (f10 - f00) * s + (f01 - f00) * t,
            [true, false, false, false] => f11 + (f01 - f11) * (1.0 - s) + (f10 - f11) * (1.0 - t),
            [false, true, false, false] => f00 + (f01 - f00) * t + (f11 - f01) * s,
            [false, false, true, false] => f00 + (f10 - f00) * s + (f11 - f10) * t,
            _ => {
                // corner cells of the diamond: fall back to the nearest inside corner
                let corners = [
                    (0.0, 0.0, f00, out[0]),
                    (1.0, 0.0, f10, out[1]),
                    (0.0, 1.0, f01, out[2]),
                    (1.0, 1.0, f11, out[3]),
                ];
                corners
                    .iter()
                    .filter(|c| !c.3)
                    .min_by(|p, q| {
                        let dp = (p.0 - s).powi(2) + (p.1 - t).powi(2);
                        let dq = (q.0 - s).powi(2) + (q.1 - t).powi(2);
                        dp.total_cmp(&dq)
                    })
                    .map_or(ZERO, |c| c.2)
            }
        }
    }

    /// `K(x_i, t_j)` at source-grid nodes anywhere on the square.
    ///
    /// When `i + j` is even the point is a node of the `(u, v)` grid; when odd
    /// it is a cell centre.
    pub fn node_kernel(&self, i: usize, j: usize) -> Complex64 {
        let s = i + j;
        let d = i + self.grid.n() - j;
        if s % 2 == 0 {
            self.node_value(s / 2, d / 2)
        } else {
            self.interpolate_cell((s - 1) / 2, (d - 1) / 2, 0.5, 0.5)
        }
    }

    /// `K(x, t)` anywhere on the square `[-a, a]²`.
    pub fn value(&self, x: f64, t: f64) -> Result<Complex64> {
        self.h_at(0.5 * (x + t), 0.5 * (x - t))
    }

    /// Restriction onto every `factor`-th node in both directions.
    pub fn restricted(&self, factor: usize) -> Result<GoursatKernel> {
        let n = self.grid.n();
        if factor == 0 || n % factor != 0 || (n / factor) % 2 != 0 {
            return Err(Error::GridMismatch(format!("cannot restrict n = {n} by {factor}")));
        }
        let grid = Grid::new(self.a(), n / factor)?;
        let m = grid.len();
        let mut values = vec![ZERO; m * m];
        for j in 0..m {
            for k in 0..m {
                values[j * m + k] = self.node_value(j * factor, k * factor);
            }
        }
        Ok(GoursatKernel {
            grid,
            values,
            ..self.clone()
        })
    }

    /// Writes `u,v,H_re,H_im` for every node of the diamond.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "u,v,H_re,H_im")?;
        for (j, k, v) in self.inside_nodes() {
            writeln!(out, "{},{},{},{}", self.grid.node(j), self.grid.node(k), v.re, v.im)?;
        }
        Ok(())
    }

    /// Sidecar metadata as `key = value` lines.
    pub fn write_metadata<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "a = {}", self.a())?;
        writeln!(out, "n = {}", self.grid.n())?;
        writeln!(out, "iterations = {}", self.iterations)?;
        writeln!(out, "tail_bound = {:e}", self.tail_bound)?;
        writeln!(out, "last_term = {:e}", self.last_term)?;
        writeln!(out, "q_l1 = {}", self.q_l1)?;
        Ok(())
    }
}

/// `K(x, t)` on the support triangle `|t| <= |x| <= a`.
pub fn kernel_at(kernel: &GoursatKernel, x: f64, t: f64) -> Result<Complex64> {
    let slack = 1e-9 * kernel.grid.h();
    if !(x.is_finite() && t.is_finite()) || x.abs() > kernel.a() + slack || t.abs() > x.abs() + slack {
        return Err(Error::Domain(format!(
            "(x, t) = ({x}, {t}) is outside the support triangle |t| <= |x| <= {}",
            kernel.a()
        )));
    }
    kernel.value(x, t)
}

/// Maximum node residuals of `K(x, x) = ½∫_0^x q` and `K(x, -x) = 0`, the
/// antiderivative taken from `q` itself.
pub fn verify_goursat_bc(kernel: &GoursatKernel, q: &Potential) -> Result<(f64, f64)> {
    kernel.grid.ensure_same(q.grid())?;
    let anti = q.antiderivative();
    goursat_bc_residuals(kernel, |i| 0.5 * anti.values()[i])
}

/// Same as [`verify_goursat_bc`] against a caller-supplied diagonal, indexed
/// by node.
pub fn goursat_bc_residuals<F: Fn(usize) -> Complex64>(
    kernel: &GoursatKernel,
    diagonal: F,
) -> Result<(f64, f64)> {
    let g = kernel.grid;
    let mut diag = 0.0f64;
    let mut anti = 0.0f64;
    for i in 0..g.len() {
        diag = diag.max((kernel.node_kernel(i, i) - diagonal(i)).norm());
        anti = anti.max(kernel.node_kernel(i, g.mirror(i)).norm());
    }
    Ok((diag, anti))
}

/// Polynomial bump `(1 - ((x-cx)/b)²)³ (1 - ((t-ct)/b)²)³` on `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFunction {
    pub cx: f64,
    pub ct: f64,
    pub b: f64,
}

impl BumpTestFunction {
    /// `(φ, ∂_x φ, ∂_t φ)`.
    pub fn eval(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let (px, dx) = bump_1d((x - self.cx) / self.b);
        let (pt, dt) = bump_1d((t - self.ct) / self.b);
        (px * pt, dx / self.b * pt, px * dt / self.b)
    }

    /// Deterministic family with supports inside `[-0.9a, 0.9a]²`.
    pub fn family(a: f64, size: usize) -> Vec<BumpTestFunction> {
        const SEEDS: [(f64, f64, f64); 8] = [
            (0.0, 0.0, 0.6),
            (0.3, 0.1, 0.45),
            (-0.35, 0.2, 0.4),
            (0.1, -0.4, 0.35),
            (-0.2, -0.3, 0.45),
            (0.5, 0.0, 0.3),
            (0.0, 0.5, 0.3),
            (-0.4, -0.4, 0.25),
        ];
        (0..size)
            .map(|i| {
                let (cx, ct, b) = if i < SEEDS.len() {
                    SEEDS[i]
                } else {
                    let frac = (i as f64 * 0.618_033_988_749_895).fract();
                    let theta = i as f64 * 2.399_963_229_728_653;
                    let r = 0.5 * frac.sqrt();
                    let (cx, ct) = (r * theta.cos(), r * theta.sin());
                    (cx, ct, (0.9 - cx.abs().max(ct.abs())).min(0.3))
                };
                BumpTestFunction {
                    cx: cx * a,
                    ct: ct * a,
                    b: b * a,
                }
            })
            .collect()
    }
}

fn bump_1d(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let w = 1.0 - s * s;
    (w * w * w, -6.0 * s * w * w)
}

/// Weak-form residual of `K_xx - q K = K_tt` against [`BumpTestFunction`]s.
///
/// The integral `∬ [K_t φ_t - K_x φ_x - q K φ] dx dt` is evaluated in the
/// characteristic coordinates, where it reads
/// `-∬ [H_u φ_v + H_v φ_u + 2 q(u+v) H φ] du dv`, with central differences
/// for `H_u`, `H_v` (one-sided where a neighbour leaves the diamond). Each
/// residual is divided by `‖φ‖_{W^{1,1}(Ω)}`; the maximum is returned.
pub fn verify_weak_goursat(kernel: &GoursatKernel, q: &Potential, test_family_size: usize) -> Result<f64> {
    kernel.grid.ensure_same(q.grid())?;
    let g = kernel.grid;
    let m = g.len();
    let c = g.center();
    let h = g.h();
    let qs = q.samples().values();

    let diff = |j: usize, k: usize, along_u: bool| -> Complex64 {
        let at = |dj: isize| -> Option<Complex64> {
            let (jj, kk) = if along_u {
                (j as isize + dj, k as isize)
            } else {
                (j as isize, k as isize + dj)
            };
            if jj < 0 || kk < 0 || jj as usize >= m || kk as usize >= m {
                return None;
            }
            let (jj, kk) = (jj as usize, kk as usize);
            kernel.is_inside(jj, kk).then(|| kernel.node_value(jj, kk))
        };
        let here = kernel.node_value(j, k);
        match (at(-1), at(1)) {
            (Some(lo), Some(hi)) => (hi - lo) / (2.0 * h),
            (None, Some(hi)) => (hi - here) / h,
            (Some(lo), None) => (here - lo) / h,
            (None, None) => ZERO,
        }
    };

    let family = BumpTestFunction::family(g.a(), test_family_size);
    let residuals: Vec<f64> = family
        .par_iter()
        .map(|phi| {
            let mut acc = ZERO;
            let mut norm = 0.0;
            for j in 0..m {
                for k in 0..m {
                    if !kernel.is_inside(j, k) {
                        continue;
                    }
                    let (u, v) = (g.node(j), g.node(k));
                    let (f, fx, ft) = phi.eval(u + v, u - v);
                    if f == 0.0 && fx == 0.0 && ft == 0.0 {
                        continue;
                    }
                    let (fu, fv) = (fx + ft, fx - ft);
                    let hv = kernel.node_value(j, k);
                    let integrand = diff(j, k, true) * fv + diff(j, k, false) * fu
                        + 2.0 * qs[j + k - c] * hv * f;
                    acc -= integrand;
                    norm += 2.0 * (f.abs() + fx.abs() + ft.abs());
                }
            }
            // supports stay away from the diamond edge, so interior weights suffice
            let acc = acc * h * h;
            let norm = norm * h * h;
            if norm > 0.0 {
                acc.norm() / norm
            } else {
                0.0
            }
        })
        .collect();
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// Sup-norm of `H₁ - H₂` over the diamond.
pub fn kernel_distance(k1: &GoursatKernel, k2: &GoursatKernel) -> Result<f64> {
    k1.grid.ensure_same(&k2.grid)?;
    Ok(k1
        .values
        .par_iter()
        .zip(k2.values.par_iter())
        .map(|(a, b)| (a - b).norm())
        .reduce(|| 0.0, f64::max))
}

/// `(½ + a sup|H|) ‖q̃ - q‖₁ e^{a‖q̃‖₁}`, the continuity bound on
/// `sup|H̃ - H|` where `kernel` is built from `q`.
pub fn continuity_bound(kernel: &GoursatKernel, q: &Potential, q_tilde: &Potential) -> Result<f64> {
    let a = kernel.a();
    let dist = q.l1_distance(q_tilde)?;
    Ok((0.5 + a * kernel.sup_norm()) * dist * (a * q_tilde.l1_norm()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(1.0, n).unwrap()
    }

    /// Closed form for constant `q = c`: `H = (c u / 2) Σ (c u v)^m / (m! (m+1)!)`.
    fn constant_kernel(c: f64, u: f64, v: f64) -> f64 {
        let z = c * u * v;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..40 {
            term *= z / (m as f64 * (m + 1) as f64);
            sum += term;
        }
        0.5 * c * u * sum
    }

    #[test]
    fn zero_potential_gives_zero_kernel_in_one_term() {
        let q = Potential::zero(grid(40));
        let k = build_kernel(&q, KernelOptions::default()).unwrap();
        assert_eq!(k.iterations(), 1);
        assert_eq!(k.sup_norm(), 0.0);
        assert_eq!(k.tail_bound(), 0.0);
        assert_eq!(kernel_at(&k, 0.5, 0.25).unwrap(), ZERO);
    }

    #[test]
    fn constant_potential_axis_values() {
        let g = grid(200);
        let k = build_kernel(&Potential::constant(g, 1.0), KernelOptions::default()).unwrap();
        let c = g.center();
        for j in 0..g.len() {
            assert!((k.node_value(j, c).re - g.node(j) / 2.0).abs() < 1e-14);
            assert_eq!(k.node_value(c, j), ZERO);
        }
        assert!(k.sup_norm() <= 2.0 * (2.0f64).exp());
    }

    #[test]
    fn constant_potential_matches_closed_form() {
        let g = grid(200);
        let k = build_kernel(&Potential::constant(g, 1.0), KernelOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for (j, kk, v) in k.inside_nodes() {
            let exact = constant_kernel(1.0, g.node(j), g.node(kk));
            worst = worst.max((v.re - exact).abs());
        }
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn kernel_at_checks_support_triangle() {
        let g = grid(100);
        let k = build_kernel(&Potential::constant(g, 1.0), KernelOptions::default()).unwrap();
        assert!(matches!(kernel_at(&k, 0.2, 0.5), Err(Error::Domain(_))));
        assert!(matches!(kernel_at(&k, 1.2, 0.0), Err(Error::Domain(_))));
        for x in [-0.83, -0.2, 0.37, 1.0] {
            assert!(kernel_at(&k, x, -x).unwrap().norm() < 1e-14);
            assert!((kernel_at(&k, x, x).unwrap().re - x / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_reproduces_node_values_and_cell_centres() {
        let g = grid(20);
        let k = build_kernel(&Potential::constant(g, 2.0), KernelOptions::default()).unwrap();
        for (j, kk, v) in k.inside_nodes() {
            assert!((k.h_at(g.node(j), g.node(kk)).unwrap() - v).norm() < 1e-14);
        }
        // node_kernel agrees with the general evaluator at every node pair
        for i in 0..g.len() {
            for j in 0..g.len() {
                let direct = k.value(g.node(i), g.node(j)).unwrap();
                assert!((k.node_kernel(i, j) - direct).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn tail_bound_and_iteration_count_for_unit_constant() {
        let g = grid(100);
        let k = build_kernel(&Potential::constant(g, 1.0), KernelOptions::default()).unwrap();
        assert!(k.tail_bound() <= 1e-12);
        assert!(k.iterations() <= 25);
        assert!((k.q_l1() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn n_max_truncation_is_reported() {
        let g = grid(40);
        let err = build_kernel(
            &Potential::constant(g, 3.0),
            KernelOptions { tol: 1e-12, n_max: 3 },
        )
        .unwrap_err();
        match err {
            Error::Truncated { iterations, tail, .. } => {
                assert_eq!(iterations, 3);
                assert!(tail > 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_kernel(&Potential::zero(g), KernelOptions { tol: 0.0, n_max: 5 }).is_err());
    }

    #[test]
    fn goursat_conditions_hold_at_nodes() {
        let g = grid(200);
        let q = Potential::step(g, 1.0, 0.0);
        let k = build_kernel(&q, KernelOptions::default()).unwrap();
        let (d, a) = verify_goursat_bc(&k, &q).unwrap();
        assert!(d < 1e-14 && a < 1e-14);
        let (d, _) = goursat_bc_residuals(&k, |i| Complex64::new(g.node(i).max(0.0) / 2.0, 0.0)).unwrap();
        assert!(d < 1e-14);
    }

    #[test]
    fn weak_residual_vanishes_for_zero_potential() {
        let q = Potential::zero(grid(60));
        let k = build_kernel(&q, KernelOptions::default()).unwrap();
        assert_eq!(verify_weak_goursat(&k, &q, 5).unwrap(), 0.0);
    }

    #[test]
    fn family_supports_stay_inside() {
        for phi in BumpTestFunction::family(2.0, 40) {
            assert!(phi.cx.abs() + phi.b <= 1.8 + 1e-12);
            assert!(phi.ct.abs() + phi.b <= 1.8 + 1e-12);
            assert!(phi.b > 0.0);
        }
    }

    #[test]
    fn distance_and_restriction() {
        let g = grid(80);
        let q = Potential::constant(g, 1.0);
        let k = build_kernel(&q, KernelOptions::default()).unwrap();
        assert_eq!(kernel_distance(&k, &k).unwrap(), 0.0);
        let fine = build_kernel(&Potential::constant(g.refined(2).unwrap(), 1.0), KernelOptions::default())
            .unwrap()
            .restricted(2)
            .unwrap();
        let d = kernel_distance(&k, &fine).unwrap();
        assert!(d > 0.0 && d < 1e-4, "{d}");
        let other = build_kernel(&Potential::constant(grid(40), 1.0), KernelOptions::default()).unwrap();
        assert!(matches!(kernel_distance(&k, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn csv_lists_only_diamond_nodes() {
        let g = grid(8);
        let k = build_kernel(&Potential::constant(g, 1.0), KernelOptions::default()).unwrap();
        let mut buf = Vec::new();
        k.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // 2c² + 2c + 1 nodes in the diamond with c = 4
        assert_eq!(text.lines().count(), 1 + 41);
        assert!(text.starts_with("u,v,H_re,H_im\n"));
        let mut meta = Vec::new();
        k.write_metadata(&mut meta).unwrap();
        let meta = String::from_utf8(meta).unwrap();
        assert!(meta.contains("n = 8") && meta.contains("iterations = "));
    }
}
