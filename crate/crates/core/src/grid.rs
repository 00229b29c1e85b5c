//! Uniform grids on `[-a, a]`, sampled functions, and the trapezoid-based
//! quadrature every other module is built on.
//!
//! Nodes are `x_i = (i - n/2) h` with `h = 2a/n` and `n` even, so the origin
//! is always the node `n/2` and the node set is exactly symmetric.

use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    n: usize,
}

impl Grid {
    /// Builds the grid with `n` subintervals on `[-a, a]`.
    ///
    /// `n` must be even (so that `0` is a node) and at least 4 so the
    /// one-sided endpoint stencils have room.
    pub fn new(a: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Domain(format!("half-width must be positive, got {a}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::Domain(format!(
                "number of subintervals must be even and >= 4, got {n}"
            )));
        }
        Ok(Self { a, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        2.0 * self.a / self.n as f64
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - i
    }

    /// Nearest node index, accepting points up to `h/2` outside the interval.
    pub fn nearest_index(&self, x: f64) -> Result<usize> {
        let h = self.h();
        if !x.is_finite() || x.abs() > self.a + 0.5 * h {
            return Err(Error::Domain(format!(
                "x = {x} lies outside [-{a}, {a}]",
                a = self.a
            )));
        }
        let idx = (x / h).round() + self.center() as f64;
        Ok((idx.max(0.0) as usize).min(self.n))
    }

    /// Refined grid with `factor * n` subintervals on the same interval.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.a, self.n * factor)
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> SampledFunction {
        SampledFunction {
            grid: *self,
            values: (0..self.len()).map(|i| f(self.node(i))).collect(),
        }
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> SampledFunction {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(a = {}, n = {}) vs (a = {}, n = {})",
                self.a, self.n, other.a, other.n
            )))
        }
    }
}

/// Complex values at every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, ZERO)
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at_origin(&self) -> Complex64 {
        self.values[self.grid.center()]
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.node(i), v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &SampledFunction,
        f: F,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| c * v)
    }

    /// Pointwise product.
    pub fn product(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm of `self - other`.
    pub fn distance(&self, other: &SampledFunction) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(self)
    }

    pub fn l2_norm(&self) -> f64 {
        let squares = self.map(|_, v| Complex64::new(v.norm_sqr(), 0.0));
        integral(&squares).re.sqrt()
    }

    /// Bilinear pairing `∫ f g` over the interval (no conjugation).
    pub fn pairing(&self, other: &SampledFunction) -> Result<Complex64> {
        Ok(integral(&self.product(other)?))
    }

    /// Restriction onto every `factor`-th node, i.e. the grid with `n / factor` subintervals.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.grid.n % factor != 0 {
            return Err(Error::GridMismatch(format!(
                "cannot coarsen n = {} by {factor}",
                self.grid.n
            )));
        }
        let grid = Grid::new(self.grid.a, self.grid.n / factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Ok(Self { grid, values })
    }

    pub fn interp(&self, x: f64) -> Result<Complex64> {
        interp_linear(self, x)
    }

    /// Writes `x,value_re,value_im` rows with shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,value_re,value_im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{},{}", self.grid.node(i), v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the two- or three-column CSV written by [`Self::write_csv`].
    ///
    /// Rows must line up with the nodes of `grid`.
    pub fn read_csv<R: BufRead>(grid: Grid, input: R) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let tol = 1e-9 * grid.h();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if lineno == 0 && cols[0].parse::<f64>().is_err() {
                continue;
            }
            if cols.len() < 2 || cols.len() > 3 {
                return Err(Error::parse(
                    "csv",
                    format!("line {}: expected 2 or 3 columns", lineno + 1),
                ));
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::parse("csv", format!("line {}: `{s}`: {e}", lineno + 1))
                })
            };
            let x = num(cols[0])?;
            let re = num(cols[1])?;
            let im = if cols.len() == 3 { num(cols[2])? } else { 0.0 };
            let i = values.len();
            if i >= grid.len() || (grid.node(i) - x).abs() > tol {
                return Err(Error::GridMismatch(format!(
                    "csv row {} at x = {x} does not match grid node {i}",
                    lineno + 1
                )));
            }
            values.push(Complex64::new(re, im));
        }
        Self::new(grid, values)
    }
}

impl Add for &SampledFunction {
    type Output = SampledFunction;

    fn add(self, rhs: &SampledFunction) -> SampledFunction {
        self.zip_with(rhs, |a, b| a + b)
            .expect("adding sampled functions on different grids")
    }
}

impl Sub for &SampledFunction {
    type Output = SampledFunction;

    fn sub(self, rhs: &SampledFunction) -> SampledFunction {
        self.zip_with(rhs, |a, b| a - b)
            .expect("subtracting sampled functions on different grids")
    }
}

impl Mul<Complex64> for &SampledFunction {
    type Output = SampledFunction;

    fn mul(self, rhs: Complex64) -> SampledFunction {
        self.scale(rhs)
    }
}

impl Neg for &SampledFunction {
    type Output = SampledFunction;

    fn neg(self) -> SampledFunction {
        self.map(|_, v| -v)
    }
}

/// `F(x_i) = ∫_0^{x_i} f` by the composite trapezoid rule, accumulated
/// outward from the origin in both directions. `F(0) = 0` exactly.
pub fn cumulative_integral(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let h = grid.h();
    let c = grid.center();
    let v = f.values();
    let mut out = vec![ZERO; grid.len()];
    for i in c + 1..grid.len() {
        out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
    }
    for i in (0..c).rev() {
        out[i] = out[i + 1] - 0.5 * h * (v[i] + v[i + 1]);
    }
    SampledFunction { grid, values: out }
}

/// Trapezoid antiderivative with the Gregory endpoint correction
/// `-h²/12 (f'(x) - f'(0))`, the derivative taken from [`derivative`].
///
/// Fourth order for smooth integrands and still second order for integrands
/// that are only `C¹`. Integrands with jumps should use
/// [`cumulative_integral`] instead.
pub fn cumulative_integral_corrected(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let h = grid.h();
    let d = derivative(f);
    let d0 = d.at_origin();
    let mut out = cumulative_integral(f);
    for (o, &di) in out.values.iter_mut().zip(d.values()) {
        *o -= h * h / 12.0 * (di - d0);
    }
    out
}

/// Trapezoid rule over the whole interval.
pub fn integral(f: &SampledFunction) -> Complex64 {
    let v = f.values();
    let n = v.len() - 1;
    let interior: Complex64 = v[1..n].iter().sum();
    f.grid().h() * (interior + 0.5 * (v[0] + v[n]))
}

/// Trapezoid quadrature of `|f|` over `[-a, a]`.
pub fn l1_norm(f: &SampledFunction) -> f64 {
    let v = f.values();
    let n = v.len() - 1;
    let interior: f64 = v[1..n].iter().map(|z| z.norm()).sum();
    f.grid().h() * (interior + 0.5 * (v[0].norm() + v[n].norm()))
}

/// Piecewise-linear interpolation, exact at nodes. Accepts `x` up to `h/2`
/// outside the interval and clamps it onto the endpoint.
pub fn interp_linear(f: &SampledFunction, x: f64) -> Result<Complex64> {
    let grid = f.grid();
    let h = grid.h();
    if !x.is_finite() || x.abs() > grid.a() + 0.5 * h {
        return Err(Error::Domain(format!(
            "x = {x} lies outside [-{a}, {a}]",
            a = grid.a()
        )));
    }
    let pos = (x / h + grid.center() as f64).clamp(0.0, grid.n() as f64);
    let i = (pos.floor() as usize).min(grid.n() - 1);
    let s = pos - i as f64;
    let v = f.values();
    if s == 0.0 {
        return Ok(v[i]);
    }
    Ok(v[i] * (1.0 - s) + v[i + 1] * s)
}

/// First derivative: central differences inside, second-order one-sided
/// stencils at the endpoints.
pub fn derivative(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let h = grid.h();
    let v = f.values();
    let n = grid.n();
    let mut out = vec![ZERO; grid.len()];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    for i in 1..n {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    SampledFunction { grid, values: out }
}

/// Second derivative: the three-point central stencil inside and the
/// four-point one-sided stencil at the endpoints.
pub fn second_difference(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let h2 = grid.h() * grid.h();
    let v = f.values();
    let n = grid.n();
    let mut out = vec![ZERO; grid.len()];
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    out[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / h2;
    for i in 1..n {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    SampledFunction { grid, values: out }
}

/// `∫ |f|` restricted to interior nodes, the norm used for residuals whose
/// endpoint values come from lower-accuracy one-sided stencils.
pub fn interior_l1_norm(f: &SampledFunction) -> f64 {
    let v = f.values();
    let n = v.len() - 1;
    let h = f.grid().h();
    let inner: f64 = v[2..n - 1].iter().map(|z| z.norm()).sum();
    h * (inner + 0.5 * (v[1].norm() + v[n - 1].norm()))
}
