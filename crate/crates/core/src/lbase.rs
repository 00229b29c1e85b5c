//! Base solutions of `φ'' = q φ`, the Green function built from them, and the
//! standard L-base recursion
//!
//! ```text
//! φ_k(x) = k(k-1) ∫_0^x G(x, s) φ_{k-2}(s) ds,   k >= 2.
//! ```

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::format_complex;
use crate::error::{Error, Result};
use crate::grid::{
    cumulative_integral, cumulative_integral_corrected, derivative, interior_l1_norm,
    second_difference, Grid, SampledFunction,
};
use crate::potential::Potential;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative Wronskian threshold below which a pair counts as degenerate.
pub const DEGENERATE_WRONSKIAN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Sup-norm tolerance between sweeps, relative to `max(1, sup|φ|)`.
    pub tol: f64,
    pub n_max: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            n_max: 500,
        }
    }
}

/// Solves `φ'' = q φ`, `φ(0) = u0`, `φ'(0) = u0p` by Picard iteration on
/// `φ(x) = u0 + u0p x + ∫_0^x (x - t) q(t) φ(t) dt`.
pub fn solve_base_solution(
    q: &Potential,
    u0: Complex64,
    u0p: Complex64,
    opts: PicardOptions,
) -> Result<SampledFunction> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("Picard tolerance must be positive, got {}", opts.tol)));
    }
    let grid = *q.grid();
    let seed = grid.sample(|x| u0 + u0p * x);
    let mut phi = seed.clone();
    let mut change = f64::INFINITY;
    for sweep in 1..=opts.n_max {
        let inner = q.weighted_antiderivative_corrected(&phi)?;
        let weighted = q.weighted_antiderivative_corrected(&phi.map(|x, v| x * v))?;
        let values: Vec<Complex64> = (0..grid.len())
            .map(|i| seed.values()[i] + grid.node(i) * inner.values()[i] - weighted.values()[i])
            .collect();
        let next = SampledFunction::new(grid, values)?;
        change = next.distance(&phi)?;
        phi = next;
        if change <= opts.tol * phi.sup_norm().max(1.0) {
            return Ok(phi);
        }
        if !change.is_finite() {
            return Err(Error::Invariant(format!("Picard iteration diverged at sweep {sweep}")));
        }
    }
    Err(Error::Truncated {
        what: "Picard iteration",
        iterations: opts.n_max,
        tail: change,
    })
}

/// Two solutions of `φ'' = q φ` together with their data at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSolutionPair {
    phi0: SampledFunction,
    phi1: SampledFunction,
    init: [Complex64; 4],
}

impl BaseSolutionPair {
    /// `init = [φ₀(0), φ₀'(0), φ₁(0), φ₁'(0)]`.
    pub fn new(phi0: SampledFunction, phi1: SampledFunction, init: [Complex64; 4]) -> Result<Self> {
        phi0.grid().ensure_same(phi1.grid())?;
        Ok(Self { phi0, phi1, init })
    }

    /// Solves for both members from their initial data.
    pub fn solve(q: &Potential, init: [Complex64; 4], opts: PicardOptions) -> Result<Self> {
        let phi0 = solve_base_solution(q, init[0], init[1], opts)?;
        let phi1 = solve_base_solution(q, init[2], init[3], opts)?;
        Self::new(phi0, phi1, init)
    }

    pub fn phi0(&self) -> &SampledFunction {
        &self.phi0
    }

    pub fn phi1(&self) -> &SampledFunction {
        &self.phi1
    }

    pub fn grid(&self) -> &Grid {
        self.phi0.grid()
    }

    pub fn init_data(&self) -> [Complex64; 4] {
        self.init
    }

    /// `W(φ₀, φ₁)` from the initial data.
    pub fn wronskian(&self) -> Complex64 {
        let [a, ap, b, bp] = self.init;
        a * bp - ap * b
    }

    /// `φ₀ φ₁' - φ₀' φ₁` node by node, derivatives by finite differences.
    pub fn discrete_wronskian(&self) -> SampledFunction {
        discrete_wronskian(&self.phi0, &self.phi1)
    }

    /// Largest deviation of the discrete Wronskian from [`Self::wronskian`].
    pub fn wronskian_drift(&self) -> f64 {
        let w = self.wronskian();
        self.discrete_wronskian()
            .values()
            .iter()
            .map(|v| (v - w).norm())
            .fold(0.0, f64::max)
    }

    /// The pair `(m00 φ₀ + m01 φ₁, m10 φ₀ + m11 φ₁)`.
    pub fn recombined(&self, m: [[Complex64; 2]; 2]) -> Self {
        let mix = |r: [Complex64; 2]| &self.phi0.scale(r[0]) + &self.phi1.scale(r[1]);
        let [a, ap, b, bp] = self.init;
        Self {
            phi0: mix(m[0]),
            phi1: mix(m[1]),
            init: [
                m[0][0] * a + m[0][1] * b,
                m[0][0] * ap + m[0][1] * bp,
                m[1][0] * a + m[1][1] * b,
                m[1][0] * ap + m[1][1] * bp,
            ],
        }
    }

    pub(crate) fn checked_wronskian(&self) -> Result<Complex64> {
        let w = self.wronskian();
        let scale = self.phi0.sup_norm() * self.phi1.sup_norm();
        if !(w.norm() > DEGENERATE_WRONSKIAN * scale) {
            return Err(Error::DegeneratePair(w.norm()));
        }
        Ok(w)
    }
}

pub(crate) fn discrete_wronskian(f: &SampledFunction, g: &SampledFunction) -> SampledFunction {
    let df = derivative(f);
    let dg = derivative(g);
    let values = (0..f.grid().len())
        .map(|i| f.values()[i] * dg.values()[i] - df.values()[i] * g.values()[i])
        .collect();
    SampledFunction::new(*f.grid(), values).expect("same grid")
}

/// The pair with `α₀(0) = α₁'(0) = 1`, `α₀'(0) = α₁(0) = 0`.
pub fn canonical_pair(q: &Potential, opts: PicardOptions) -> Result<BaseSolutionPair> {
    BaseSolutionPair::solve(q, [ONE, ZERO, ZERO, ONE], opts)
}

/// `G(x, s) = [φ₀(s) φ₁(x) - φ₀(x) φ₁(s)] / W`, off-node values by linear
/// interpolation.
pub fn green_function(pair: &BaseSolutionPair, x: f64, s: f64) -> Result<Complex64> {
    let w = pair.checked_wronskian()?;
    let (p0x, p1x) = (pair.phi0.interp(x)?, pair.phi1.interp(x)?);
    let (p0s, p1s) = (pair.phi0.interp(s)?, pair.phi1.interp(s)?);
    Ok((p0s * p1x - p0x * p1s) / w)
}

/// A standard L-base `{φ_k}`, `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SLBase {
    pair: BaseSolutionPair,
    members: Vec<SampledFunction>,
}

/// Builds `φ_2, …, φ_{k_max}` through the factorised Green function
///
/// ```text
/// φ_k = k(k-1)/W [φ₁ ∫_0^x φ₀ φ_{k-2} - φ₀ ∫_0^x φ₁ φ_{k-2}],
/// ```
///
/// two cumulative integrals per member. The integrands are `C¹` for any
/// integrable `q`, so the endpoint-corrected trapezoid rule applies.
pub fn build_slbase(pair: &BaseSolutionPair, k_max: usize) -> Result<SLBase> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let w = pair.checked_wronskian()?;
    let grid = *pair.grid();
    let mut members = vec![pair.phi0.clone(), pair.phi1.clone()];
    for k in 2..=k_max {
        let prev = &members[k - 2];
        let i0 = cumulative_integral_corrected(&pair.phi0.product(prev)?);
        let i1 = cumulative_integral_corrected(&pair.phi1.product(prev)?);
        let factor = (k * (k - 1)) as f64 / w;
        let values = (0..grid.len())
            .map(|i| {
                factor
                    * (pair.phi1.values()[i] * i0.values()[i]
                        - pair.phi0.values()[i] * i1.values()[i])
            })
            .collect();
        members.push(SampledFunction::new(grid, values)?);
    }
    members.truncate(k_max + 1);
    Ok(SLBase {
        pair: pair.clone(),
        members,
    })
}

impl SLBase {
    pub fn pair(&self) -> &BaseSolutionPair {
        &self.pair
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn member(&self, k: usize) -> Option<&SampledFunction> {
        self.members.get(k)
    }

    pub fn k_max(&self) -> usize {
        self.members.len() - 1
    }

    pub fn grid(&self) -> &Grid {
        self.pair.grid()
    }

    /// Interior `L¹` norm of `D²φ_k - q φ_k - k(k-1) φ_{k-2}` (zero right-hand
    /// side for `k < 2`).
    pub fn ode_residual(&self, q: &Potential, k: usize) -> Result<f64> {
        let phi = self
            .members
            .get(k)
            .ok_or_else(|| Error::Domain(format!("member {k} not built")))?;
        let d2 = second_difference(phi);
        let qphi = q.samples().product(phi)?;
        let mut residual = &d2 - &qphi;
        if k >= 2 {
            residual = &residual - &self.members[k - 2].scale(Complex64::from((k * (k - 1)) as f64));
        }
        Ok(interior_l1_norm(&residual))
    }

    /// `x` column followed by `phi<k>_re,phi<k>_im` for each member.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "x")?;
        for k in 0..self.members.len() {
            write!(out, ",phi{k}_re,phi{k}_im")?;
        }
        writeln!(out)?;
        let grid = self.grid();
        for i in 0..grid.len() {
            write!(out, "{}", grid.node(i))?;
            for m in &self.members {
                let v = m.values()[i];
                write!(out, ",{},{}", v.re, v.im)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_metadata<W: Write>(&self, mut out: W) -> Result<()> {
        let grid = self.grid();
        let [a, ap, b, bp] = self.pair.init;
        let w = self.pair.wronskian();
        writeln!(out, "a = {}", grid.a())?;
        writeln!(out, "n = {}", grid.n())?;
        writeln!(out, "k_max = {}", self.k_max())?;
        writeln!(out, "phi0_0 = {}", format_complex(a))?;
        writeln!(out, "phi0_prime_0 = {}", format_complex(ap))?;
        writeln!(out, "phi1_0 = {}", format_complex(b))?;
        writeln!(out, "phi1_prime_0 = {}", format_complex(bp))?;
        writeln!(out, "wronskian = {}", format_complex(w))?;
        Ok(())
    }
}

/// Dense polynomial `Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn sample(&self, grid: &Grid) -> SampledFunction {
        grid.sample(|x| self.eval(x))
    }
}

/// Where [`polynomial_approx`] gets `u''` from.
#[derive(Debug, Clone, Copy)]
pub enum SecondDerivative<'a> {
    /// Samples of `u''` itself.
    Samples(&'a SampledFunction),
    /// Samples of `u`; `u''` is taken by second differences.
    FromFunction(&'a SampledFunction),
}

/// `P(x) = u0 + u0p x + ∫_0^x ∫_0^t Q`, where `Q` (degree `degree - 2`) is the
/// trapezoid-weighted least-squares fit of `u''` on the grid.
pub fn polynomial_approx(
    source: SecondDerivative<'_>,
    u0: Complex64,
    u0p: Complex64,
    degree: usize,
) -> Result<Polynomial> {
    let second = match source {
        SecondDerivative::Samples(s) => s.clone(),
        SecondDerivative::FromFunction(u) => second_difference(u),
    };
    let grid = *second.grid();
    if degree > grid.n() - 2 {
        return Err(Error::IllPosed(format!(
            "degree {degree} exceeds n - 2 = {}",
            grid.n() - 2
        )));
    }
    let mut coeffs = vec![u0, u0p];
    if degree < 2 {
        coeffs.truncate(degree + 1);
        return Ok(Polynomial::new(coeffs));
    }
    let q = least_squares_fit(&second, degree - 2)?;
    for (k, c) in q.iter().enumerate() {
        coeffs.push(c / ((k + 1) * (k + 2)) as f64);
    }
    Ok(Polynomial::new(coeffs))
}

/// Monomial coefficients of the weighted least-squares fit of degree `d`.
fn least_squares_fit(f: &SampledFunction, d: usize) -> Result<Vec<Complex64>> {
    let grid = *f.grid();
    let a = grid.a();
    let rows = grid.len();
    let cols = d + 1;
    let weight = |i: usize| {
        let w = if i == 0 || i == grid.n() { 0.5 } else { 1.0 };
        (w * grid.h()).sqrt()
    };
    // Legendre basis in s = x / a keeps the system well conditioned.
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = DMatrix::<f64>::zeros(rows, 2);
    for i in 0..rows {
        let s = grid.node(i) / a;
        let w = weight(i);
        let (mut p_prev, mut p) = (1.0, s);
        for k in 0..cols {
            let value = match k {
                0 => 1.0,
                1 => s,
                _ => {
                    let next = ((2 * k - 1) as f64 * s * p - (k - 1) as f64 * p_prev) / k as f64;
                    p_prev = p;
                    p = next;
                    next
                }
            };
            design[(i, k)] = w * value;
        }
        rhs[(i, 0)] = w * f.values()[i].re;
        rhs[(i, 1)] = w * f.values()[i].im;
    }
    let solution = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::IllPosed(format!("least-squares solve failed: {e}")))?;

    // Legendre -> monomials in s -> monomials in x.
    let legendre = legendre_monomials(d);
    let mut out = vec![ZERO; cols];
    for (k, poly) in legendre.iter().enumerate() {
        let c = Complex64::new(solution[(k, 0)], solution[(k, 1)]);
        for (p, &m) in poly.iter().enumerate() {
            out[p] += c * m;
        }
    }
    for (p, c) in out.iter_mut().enumerate() {
        *c /= a.powi(p as i32);
    }
    Ok(out)
}

fn legendre_monomials(d: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    if d >= 1 {
        polys.push(vec![0.0, 1.0]);
    }
    for k in 1..d {
        let mut next = vec![0.0; k + 2];
        for (p, &c) in polys[k].iter().enumerate() {
            next[p + 1] += (2 * k + 1) as f64 * c / (k + 1) as f64;
        }
        for (p, &c) in polys[k - 1].iter().enumerate() {
            next[p] -= k as f64 * c / (k + 1) as f64;
        }
        polys.push(next);
    }
    polys
}

/// Direct `O(n²)` evaluation of `k(k-1) ∫_0^x G(x, s) φ_{k-2}(s) ds` with
/// plain trapezoid per node. Kept for cross-checking [`build_slbase`].
pub fn slbase_member_direct(
    pair: &BaseSolutionPair,
    prev: &SampledFunction,
    k: usize,
) -> Result<SampledFunction> {
    let w = pair.checked_wronskian()?;
    let grid = *pair.grid();
    let (p0, p1) = (pair.phi0.values(), pair.phi1.values());
    let factor = (k * (k - 1)) as f64 / w;
    let values = (0..grid.len())
        .map(|i| {
            let integrand: Vec<Complex64> = (0..grid.len())
                .map(|j| (p0[j] * p1[i] - p0[i] * p1[j]) * prev.values()[j])
                .collect();
            let f = SampledFunction::new(grid, integrand).expect("grid sized");
            factor * cumulative_integral(&f).values()[i]
        })
        .collect();
    SampledFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(1.0, n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_potential_base_solution_is_linear() {
        let g = grid(100);
        let q = Potential::zero(g);
        let phi = solve_base_solution(&q, ONE, ZERO, PicardOptions::default()).unwrap();
        assert_eq!(phi.distance(&SampledFunction::constant(g, ONE)).unwrap(), 0.0);
    }

    #[test]
    fn unit_potential_base_solutions_are_hyperbolic() {
        let g = grid(1000);
        let q = Potential::constant(g, 1.0);
        let opts = PicardOptions::default();
        let cosh = solve_base_solution(&q, ONE, ZERO, opts).unwrap();
        let sinh = solve_base_solution(&q, ZERO, ONE, opts).unwrap();
        assert!(cosh.distance(&g.sample_real(f64::cosh)).unwrap() <= 1e-5);
        assert!(sinh.distance(&g.sample_real(f64::sinh)).unwrap() <= 1e-5);
        let d = derivative(&sinh);
        assert!((d.at_origin() - ONE).norm() < 1e-5);
    }

    #[test]
    fn picard_reports_non_convergence() {
        let q = Potential::constant(grid(50), 4.0);
        let err = solve_base_solution(&q, ONE, ZERO, PicardOptions { tol: 1e-14, n_max: 2 });
        assert!(matches!(err, Err(Error::Truncated { iterations: 2, .. })));
    }

    #[test]
    fn canonical_pair_data() {
        let g = grid(200);
        let pair = canonical_pair(&Potential::zero(g), PicardOptions::default()).unwrap();
        assert_eq!(pair.wronskian(), ONE);
        assert!(pair.phi1().distance(&g.sample_real(|x| x)).unwrap() < 1e-15);
        let pair = canonical_pair(&Potential::step(g, 3.0, 0.0), PicardOptions::default()).unwrap();
        assert_eq!(pair.wronskian(), ONE);
        assert_eq!(pair.init_data(), [ONE, ZERO, ZERO, ONE]);
    }

    #[test]
    fn green_function_examples() {
        let g = grid(1000);
        let zero = canonical_pair(&Potential::zero(g), PicardOptions::default()).unwrap();
        assert!((green_function(&zero, 0.3, -0.5).unwrap() - c(0.8)).norm() < 1e-14);
        let unit = canonical_pair(&Potential::constant(g, 1.0), PicardOptions::default()).unwrap();
        for (x, s) in [(0.4, 0.1), (-0.9, 0.7), (1.0, -1.0)] {
            assert_eq!(green_function(&unit, x, x).unwrap(), ZERO);
            let gv = green_function(&unit, x, s).unwrap();
            assert!((gv.re - (x - s).sinh()).abs() < 1e-5);
        }
        let other = unit.recombined([[ONE, ZERO], [ONE, c(3.0)]]);
        for (x, s) in [(0.4, 0.1), (-0.9, 0.7)] {
            let a = green_function(&unit, x, s).unwrap();
            let b = green_function(&other, x, s).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_pair_is_rejected() {
        let g = grid(40);
        let pair = canonical_pair(&Potential::zero(g), PicardOptions::default()).unwrap();
        let bad = pair.recombined([[ONE, ZERO], [c(2.0), ZERO]]);
        assert!(matches!(green_function(&bad, 0.1, 0.2), Err(Error::DegeneratePair(_))));
        assert!(matches!(build_slbase(&bad, 4), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn zero_potential_slbase_is_powers() {
        let g = grid(400);
        let pair = canonical_pair(&Potential::zero(g), PicardOptions::default()).unwrap();
        let base = build_slbase(&pair, 12).unwrap();
        for k in 0..=12 {
            let exact = g.sample_real(|x| x.powi(k as i32));
            // leading quadrature error scales with the fourth derivative, ~k⁴h⁴
            let bound = 1e-13 + (k as f64 * g.h()).powi(4);
            assert!(base.members()[k].distance(&exact).unwrap() <= bound, "k = {k}");
        }
    }

    #[test]
    fn unit_potential_second_member_is_x_sinh_x() {
        // Oracle: direct O(n²) quadrature of 2∫_0^x sinh(x - s) cosh(s) ds.
        let g = grid(400);
        let pair = canonical_pair(&Potential::constant(g, 1.0), PicardOptions::default()).unwrap();
        let direct = slbase_member_direct(&pair, pair.phi0(), 2).unwrap();
        let closed = g.sample_real(|x| x * x.sinh());
        assert!(direct.distance(&closed).unwrap() < 1e-4);
        let base = build_slbase(&pair, 2).unwrap();
        assert!(base.members()[2].distance(&closed).unwrap() < 1e-5);
        assert!(base.members()[2].distance(&direct).unwrap() < 1e-4);
    }

    #[test]
    fn higher_members_vanish_to_first_order_at_origin() {
        let g = grid(500);
        let pair = canonical_pair(&Potential::step(g, 1.0, 0.0), PicardOptions::default()).unwrap();
        let base = build_slbase(&pair, 8).unwrap();
        let h2 = g.h() * g.h();
        for k in 2..=8 {
            let m = &base.members()[k];
            assert_eq!(m.at_origin(), ZERO);
            assert!(derivative(m).at_origin().norm() <= 10.0 * h2, "k = {k}");
        }
    }

    #[test]
    fn slbase_is_deterministic() {
        let g = grid(200);
        let pair = canonical_pair(&Potential::polynomial(g, &[0.5, 0.0, 1.0]), PicardOptions::default())
            .unwrap();
        assert_eq!(build_slbase(&pair, 9).unwrap(), build_slbase(&pair, 9).unwrap());
    }

    #[test]
    fn polynomial_recovery_is_exact() {
        let g = grid(100);
        let u = Polynomial::new(vec![c(0.5), c(-1.0), c(2.0), c(0.25), c(-3.0)]);
        let u2 = u.derivative().derivative().sample(&g);
        let p = polynomial_approx(SecondDerivative::Samples(&u2), c(0.5), c(-1.0), 6).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.77, 1.0] {
            assert!((p.eval(x) - u.eval(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn polynomial_approx_of_sine() {
        let g = grid(1000);
        let u = g.sample_real(f64::sin);
        let p = polynomial_approx(SecondDerivative::FromFunction(&u), ZERO, ONE, 9).unwrap();
        assert!(p.sample(&g).distance(&u).unwrap() <= 1e-6);
    }

    #[test]
    fn polynomial_approx_rejects_high_degree() {
        let g = grid(10);
        let u = g.sample_real(f64::cos);
        assert!(matches!(
            polynomial_approx(SecondDerivative::FromFunction(&u), ONE, ZERO, 9),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn polynomial_approx_of_w21_function_improves_with_degree() {
        let g = grid(1000);
        let u = g.sample_real(|x| x.abs() * x);
        let exact2 = g.sample_real(|x| 2.0 * x.signum());
        let mut last = f64::INFINITY;
        for degree in [3, 7, 11, 15] {
            let p = polynomial_approx(SecondDerivative::FromFunction(&u), ZERO, ZERO, degree).unwrap();
            let p2 = p.derivative().derivative().sample(&g);
            let err = (&p2 - &exact2).l1_norm();
            assert!(err < last, "degree {degree}: {err} >= {last}");
            last = err;
        }
    }

    #[test]
    fn metadata_lists_init_data() {
        let g = grid(8);
        let pair = canonical_pair(&Potential::zero(g), PicardOptions::default()).unwrap();
        let base = build_slbase(&pair, 3).unwrap();
        let mut meta = Vec::new();
        base.write_metadata(&mut meta).unwrap();
        let meta = String::from_utf8(meta).unwrap();
        assert!(meta.contains("wronskian = 1"));
        let mut csv = Vec::new();
        base.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("x,phi0_re,phi0_im,phi1_re"));
        assert_eq!(csv.lines().count(), 10);
    }
}
