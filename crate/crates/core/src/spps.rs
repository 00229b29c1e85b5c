//! Spectral parameter power series for `v'' - q v = λ v`:
//!
//! ```text
//! v₁ = Σ_{k≥0} λ^k φ_{2k} / (2k)!,    v₂ = Σ_{k≥0} λ^k φ_{2k+1} / (2k+1)!,
//! ```
//!
//! with `{φ_k}` a standard L-base. Built on the canonical pair, `v₁` and `v₂`
//! carry the initial data `(1, 0)` and `(0, 1)` at the origin.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::lbase::SLBase;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default truncation tolerance, relative to the partial sums.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SPPSSolution {
    pub lambda: Complex64,
    /// Index of the last series term included.
    pub k_used: usize,
    pub v1: SampledFunction,
    pub v2: SampledFunction,
    /// Sup-norm of the last included term of either series.
    pub tail_estimate: f64,
}

impl SPPSSolution {
    /// `c1 v₁ + c2 v₂`.
    pub fn combine(&self, c1: Complex64, c2: Complex64) -> SampledFunction {
        &self.v1.scale(c1) + &self.v2.scale(c2)
    }

    /// `x,v1_re,v1_im,v2_re,v2_im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,v1_re,v1_im,v2_re,v2_im")?;
        let g = self.v1.grid();
        for i in 0..g.len() {
            let (a, b) = (self.v1.values()[i], self.v2.values()[i]);
            writeln!(out, "{},{},{},{},{}", g.node(i), a.re, a.im, b.re, b.im)?;
        }
        Ok(())
    }
}

struct Series {
    v1: Vec<Complex64>,
    v2: Vec<Complex64>,
    k_used: usize,
    tail: f64,
}

/// Sums both series on the given node indices.
fn sum_series(base: &SLBase, lambda: Complex64, tol: f64, nodes: &[usize]) -> Result<Series> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    base.pair().checked_wronskian()?;
    let members = base.members();
    let at = |m: usize| nodes.iter().map(move |&i| members[m].values()[i]);
    let sup = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut v1: Vec<Complex64> = at(0).collect();
    let mut v2: Vec<Complex64> = at(1).collect();
    let (mut c1, mut c2) = (ONE, ONE);
    let mut tail = sup(&v1).max(sup(&v2));
    if lambda == ZERO {
        return Ok(Series { v1, v2, k_used: 0, tail: 0.0 });
    }
    let mut k = 0;
    loop {
        k += 1;
        if 2 * k + 1 >= members.len() {
            return Err(Error::Truncated {
                what: "spectral parameter power series",
                iterations: k - 1,
                tail,
            });
        }
        let kf = k as f64;
        c1 *= lambda / ((2.0 * kf) * (2.0 * kf - 1.0));
        c2 *= lambda / ((2.0 * kf + 1.0) * (2.0 * kf));
        let (mut t1, mut t2) = (0.0f64, 0.0f64);
        for ((s, p), (r, w)) in v1.iter_mut().zip(at(2 * k)).zip(v2.iter_mut().zip(at(2 * k + 1))) {
            let a = c1 * p;
            let b = c2 * w;
            *s += a;
            *r += b;
            t1 = t1.max(a.norm());
            t2 = t2.max(b.norm());
        }
        tail = t1.max(t2);
        // joint scale: v1 and v2 never vanish together (unit Wronskian),
        // while either alone may, e.g. at a Dirichlet eigenvalue
        if tail <= tol * sup(&v1).max(sup(&v2)) {
            return Ok(Series { v1, v2, k_used: k, tail });
        }
        if !tail.is_finite() {
            return Err(Error::Invariant(format!("series overflow at term {k} for λ = {lambda}")));
        }
    }
}

/// Sums both series, stopping once the sup-norm of the added terms is at most
/// `tol` times the larger partial sum. Running out of L-base members first is a
/// [`Error::Truncated`] error.
pub fn spps_solve(base: &SLBase, lambda: Complex64, tol: f64) -> Result<SPPSSolution> {
    let g = *base.grid();
    let nodes: Vec<usize> = (0..g.len()).collect();
    let s = sum_series(base, lambda, tol, &nodes)?;
    Ok(SPPSSolution {
        lambda,
        k_used: s.k_used,
        v1: SampledFunction::new(g, s.v1)?,
        v2: SampledFunction::new(g, s.v2)?,
        tail_estimate: s.tail,
    })
}

/// `c1 v₁ + c2 v₂`.
pub fn general_solution(
    base: &SLBase,
    lambda: Complex64,
    c1: Complex64,
    c2: Complex64,
    tol: f64,
) -> Result<SampledFunction> {
    Ok(spps_solve(base, lambda, tol)?.combine(c1, c2))
}

/// `v₁(l) v₂(r) - v₁(r) v₂(l)`, the ends snapped to the nearest nodes. Its
/// zeros in `λ` are the Dirichlet eigenvalues on `[left, right]`.
///
/// Only the two end values of the series are summed.
pub fn dirichlet_char(base: &SLBase, lambda: Complex64, left: f64, right: f64, tol: f64) -> Result<Complex64> {
    let (l, r) = snap_interval(base, left, right)?;
    let s = sum_series(base, lambda, tol, &[l, r])?;
    Ok(s.v1[0] * s.v2[1] - s.v1[1] * s.v2[0])
}

fn snap_interval(base: &SLBase, left: f64, right: f64) -> Result<(usize, usize)> {
    let g = base.grid();
    let (l, r) = (g.nearest_index(left)?, g.nearest_index(right)?);
    if l >= r {
        return Err(Error::Domain(format!(
            "interval [{left}, {right}] collapses to less than one cell"
        )));
    }
    Ok((l, r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Uniform scan samples over the λ interval.
    pub scan: usize,
    /// Bisection stops once the bracket is this narrow.
    pub bracket_tol: f64,
    /// Series truncation tolerance.
    pub series_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            scan: 200,
            bracket_tol: 1e-8,
            series_tol: DEFAULT_TOL,
        }
    }
}

/// Real Dirichlet eigenvalues on `[left, right]` inside
/// `[lambda_min, lambda_max]`, found from sign changes of `Re` of
/// [`dirichlet_char`] on a uniform scan and refined by bisection.
///
/// Roots come out in decreasing order, the ground state first; at most
/// `count` are returned. No sign change means an empty list.
pub fn find_eigenvalues(
    base: &SLBase,
    left: f64,
    right: f64,
    lambda_min: f64,
    lambda_max: f64,
    count: usize,
    opts: EigenOptions,
) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Err(Error::Domain("eigenvalue count must be at least 1".into()));
    }
    if !(lambda_min < lambda_max) || !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(Error::Domain(format!("bad scan interval [{lambda_min}, {lambda_max}]")));
    }
    if opts.scan < 2 {
        return Err(Error::Domain("eigenvalue scan needs at least two samples".into()));
    }
    snap_interval(base, left, right)?;
    let f = |lambda: f64| -> Result<f64> {
        Ok(dirichlet_char(base, Complex64::from(lambda), left, right, opts.series_tol)?.re)
    };
    let step = (lambda_max - lambda_min) / (opts.scan - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..opts.scan)
        .into_par_iter()
        .map(|i| {
            let lambda = lambda_max - i as f64 * step;
            f(lambda).map(|v| (lambda, v))
        })
        .collect::<Result<_>>()?;

    let mut roots = Vec::new();
    for (idx, w) in samples.windows(2).enumerate() {
        if roots.len() == count {
            break;
        }
        let ((hi, fhi), (lo, flo)) = (w[0], w[1]);
        if fhi == 0.0 {
            if idx == 0 || samples[idx - 1].1 != 0.0 {
                roots.push(Complex64::from(hi));
            }
            continue;
        }
        if fhi.signum() != flo.signum() && flo != 0.0 {
            roots.push(Complex64::from(bisect(&f, lo, flo, hi, opts.bracket_tol)?));
        }
    }
    if roots.len() < count {
        if let Some(&(lambda, v)) = samples.last() {
            if v == 0.0 {
                roots.push(Complex64::from(lambda));
            }
        }
    }
    Ok(roots)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut flo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{derivative, interior_l1_norm, second_difference, Grid};
    use crate::lbase::{build_slbase, canonical_pair, PicardOptions};
    use crate::potential::Potential;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn base(q: &Potential, k_max: usize) -> SLBase {
        build_slbase(&canonical_pair(q, PicardOptions::default()).unwrap(), k_max).unwrap()
    }

    /// Classical RK4 for `v'' = (q(x) + λ) v` from `x0` to `x1`, with `steps`
    /// uniform steps; `q` is only evaluated at stage points.
    fn rk4<F: Fn(f64) -> f64>(q: F, lambda: f64, x0: f64, x1: f64, mut y: [f64; 2], steps: usize) -> [f64; 2] {
        let h = (x1 - x0) / steps as f64;
        let rhs = |x: f64, y: [f64; 2]| [y[1], (q(x) + lambda) * y[0]];
        for i in 0..steps {
            let x = x0 + i as f64 * h;
            let k1 = rhs(x, y);
            let k2 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for d in 0..2 {
                y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
            }
        }
        y
    }

    #[test]
    fn zero_potential_gives_hyperbolic_functions() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::zero(g), 30);
        let s = spps_solve(&b, ONE, DEFAULT_TOL).unwrap();
        assert!(s.v1.distance(&g.sample_real(f64::cosh)).unwrap() <= 1e-8);
        assert!(s.v2.distance(&g.sample_real(f64::sinh)).unwrap() <= 1e-8);
        assert!(s.k_used <= 12, "k_used = {}", s.k_used);
        assert!(s.tail_estimate <= DEFAULT_TOL * 2.0);
    }

    #[test]
    fn zero_lambda_returns_the_pair() {
        let g = Grid::new(1.0, 100).unwrap();
        let b = base(&Potential::polynomial(g, &[0.0, 1.0, 1.0]), 3);
        let s = spps_solve(&b, ZERO, DEFAULT_TOL).unwrap();
        assert_eq!(&s.v1, b.pair().phi0());
        assert_eq!(&s.v2, b.pair().phi1());
    }

    #[test]
    fn unit_potential_against_trigonometric_solutions() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::constant(g, 1.0), 40);
        let s = spps_solve(&b, c(-5.0), DEFAULT_TOL).unwrap();
        assert!(s.v1.distance(&g.sample_real(|x| (2.0 * x).cos())).unwrap() <= 1e-5);
        assert!(s.v2.distance(&g.sample_real(|x| (2.0 * x).sin() / 2.0)).unwrap() <= 1e-5);
        let both = general_solution(&b, c(-5.0), ONE, ONE, DEFAULT_TOL).unwrap();
        let exact = g.sample_real(|x| (2.0 * x).cos() + (2.0 * x).sin() / 2.0);
        assert!(both.distance(&exact).unwrap() <= 1e-5);
        assert_eq!(general_solution(&b, c(-5.0), ONE, ZERO, DEFAULT_TOL).unwrap(), s.v1);
        assert_eq!(general_solution(&b, c(-5.0), ZERO, ZERO, DEFAULT_TOL).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn quadratic_potential_against_rk4() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::polynomial(g, &[0.0, 0.0, 1.0]), 40);
        let s = spps_solve(&b, ONE, DEFAULT_TOL).unwrap();
        let mut err: f64 = 0.0;
        for i in (0..g.len()).step_by(50) {
            let x = g.node(i);
            let y = rk4(|t| t * t, 1.0, 0.0, x, [1.0, 0.0], 2000);
            err = err.max((s.v1.values()[i] - c(y[0])).norm());
        }
        assert!(err <= 1e-4, "max error {err}");
    }

    #[test]
    fn initial_data_and_wronskian() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::polynomial(g, &[1.0, 0.5, 2.0]), 40);
        for lambda in [c(-7.0), c(3.0), Complex64::new(-2.0, 1.5)] {
            let s = spps_solve(&b, lambda, DEFAULT_TOL).unwrap();
            let (d1, d2) = (derivative(&s.v1), derivative(&s.v2));
            assert!((s.v1.at_origin() - ONE).norm() < 1e-14);
            assert!(s.v2.at_origin().norm() < 1e-14);
            let h2 = g.h() * g.h();
            assert!(d1.at_origin().norm() <= 100.0 * h2);
            assert!((d2.at_origin() - ONE).norm() <= 100.0 * h2);
            let w = s.v1.at_origin() * d2.at_origin() - d1.at_origin() * s.v2.at_origin();
            assert!((w - ONE).norm() <= 100.0 * h2);
        }
    }

    #[test]
    fn ode_residual_decreases_under_refinement() {
        let mut last = f64::INFINITY;
        for n in [250, 500, 1000] {
            let g = Grid::new(1.0, n).unwrap();
            let q = Potential::polynomial(g, &[0.5, 0.0, 1.0]);
            let b = base(&q, 40);
            let s = spps_solve(&b, c(-3.0), DEFAULT_TOL).unwrap();
            let r = &(&second_difference(&s.v1) - &q.samples().product(&s.v1).unwrap()) - &s.v1.scale(c(-3.0));
            let res = interior_l1_norm(&r);
            assert!(res < last, "n = {n}: {res}");
            last = res;
        }
    }

    #[test]
    fn truncation_is_reported() {
        let g = Grid::new(1.0, 200).unwrap();
        let b = base(&Potential::zero(g), 5);
        match spps_solve(&b, c(-50.0), DEFAULT_TOL) {
            Err(Error::Truncated { tail, .. }) => assert!(tail > 0.0),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn series_terms_decay_factorially() {
        // φ_k = T[x^k], so sup|φ_k| <= a^k (1 + 2a sup|H|) and the k-th term
        // of v₁ is at most C (|λ| a²)^k / (2k)!.
        let g = Grid::new(1.0, 400).unwrap();
        let q = Potential::constant(g, 1.0);
        let b = base(&q, 40);
        let kernel = crate::kernel::build_kernel(&q, Default::default()).unwrap();
        let bound = 1.0 + 2.0 * g.a() * kernel.sup_norm();
        let lambda: f64 = 4.0;
        let mut fact = 1.0;
        for k in 1..=20 {
            fact *= ((2 * k) * (2 * k - 1)) as f64;
            let scale = (lambda * g.a() * g.a()).powi(k as i32) / fact;
            let term = b.members()[2 * k].sup_norm() * lambda.powi(k as i32) / fact;
            assert!(term <= bound * scale * (1.0 + 1e-6), "k = {k}");
        }
    }

    #[test]
    fn conjugate_lambda_gives_conjugate_characteristic() {
        let g = Grid::new(1.0, 200).unwrap();
        let b = base(&Potential::polynomial(g, &[1.0, -0.5, 2.0]), 40);
        let z = Complex64::new(-6.0, 2.5);
        let a = dirichlet_char(&b, z, -0.5, 1.0, DEFAULT_TOL).unwrap();
        let bb = dirichlet_char(&b, z.conj(), -0.5, 1.0, DEFAULT_TOL).unwrap();
        assert!((a.conj() - bb).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn characteristic_function_examples() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::zero(g), 40);
        let at0 = dirichlet_char(&b, ZERO, 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((at0 - ONE).norm() < 1e-14);
        assert!(matches!(dirichlet_char(&b, ONE, 0.3, 0.3, DEFAULT_TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn dirichlet_spectrum_of_free_and_shifted_problems() {
        let g = Grid::new(1.0, 1000).unwrap();
        let opts = EigenOptions::default();
        let free = base(&Potential::zero(g), 64);
        let roots = find_eigenvalues(&free, 0.0, 1.0, -100.0, 0.0, 3, opts).unwrap();
        assert_eq!(roots.len(), 3);
        for (m, r) in roots.iter().enumerate() {
            let exact = -((m + 1) as f64 * PI).powi(2);
            assert!((r.re - exact).abs() <= 1e-5, "m = {}: {} vs {exact}", m + 1, r.re);
        }
        // v'' - v = λv: λ = -1 - m²π²
        let unit = base(&Potential::constant(g, 1.0), 64);
        let roots = find_eigenvalues(&unit, 0.0, 1.0, -100.0, 0.0, 3, opts).unwrap();
        assert_eq!(roots.len(), 3);
        for (m, r) in roots.iter().enumerate() {
            let exact = -1.0 - ((m + 1) as f64 * PI).powi(2);
            assert!((r.re - exact).abs() <= 1e-5, "m = {}: {} vs {exact}", m + 1, r.re);
        }
        // v'' + v = λv, i.e. potential -1: λ = 1 - m²π²
        let flipped = base(&Potential::constant(g, -1.0), 64);
        let roots = find_eigenvalues(&flipped, 0.0, 1.0, -100.0, 0.0, 3, opts).unwrap();
        assert_eq!(roots.len(), 3);
        for (m, r) in roots.iter().enumerate() {
            let exact = 1.0 - ((m + 1) as f64 * PI).powi(2);
            assert!((r.re - exact).abs() <= 1e-5, "m = {}: {} vs {exact}", m + 1, r.re);
        }
        assert!(find_eigenvalues(&free, 0.0, 1.0, -5.0, 0.0, 3, opts).unwrap().is_empty());
    }

    #[test]
    fn step_potential_spectrum_against_shooting() {
        let g = Grid::new(1.0, 1000).unwrap();
        let b = base(&Potential::step(g, 5.0, 0.0), 64);
        let roots = find_eigenvalues(&b, -1.0, 1.0, -40.0, 0.0, 3, EigenOptions::default()).unwrap();
        assert!(!roots.is_empty());
        // Shooting oracle: y(-1) = 0, y'(-1) = 1, integrate to 1 in two legs
        // split at the jump.
        let shoot = |lambda: f64| {
            let mid = rk4(|_| 0.0, lambda, -1.0, 0.0, [0.0, 1.0], 4000);
            rk4(|_| 5.0, lambda, 0.0, 1.0, mid, 4000)[0]
        };
        for r in roots {
            let (mut lo, mut hi) = (r.re - 0.05, r.re + 0.05);
            assert!(shoot(lo).signum() != shoot(hi).signum());
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if shoot(mid).signum() == shoot(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((r.re - lo).abs() <= 1e-4, "{} vs {lo}", r.re);
        }
    }
}
