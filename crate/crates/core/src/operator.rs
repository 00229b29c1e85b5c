//! The transmutation operator
//!
//! ```text
//! T u(x) = u(x) + ∫_{-x}^{x} K(x, t) u(t) dt,
//! ```
//!
//! its inverse and transpose, and the operators assembled from `T`, the
//! parity projectors `P±`, the antiderivative `A` and `d/dx`.
//!
//! All quadratures run over whole grid nodes: the grid is symmetric, so the
//! limits `±x_i` are always nodes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, derivative, Grid, SampledFunction};
use crate::kernel::GoursatKernel;
use crate::lbase::{discrete_wronskian, BaseSolutionPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Determinants at or below this are treated as zero.
pub const SINGULAR_DETERMINANT: f64 = 1e-12;

/// `c_plus TP₊ + c_a TAP₊ + c_d T(d/dx)P₋ + c_minus TP₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmutationSpec {
    pub c_plus: Complex64,
    pub c_a: Complex64,
    pub c_d: Complex64,
    pub c_minus: Complex64,
}

impl TransmutationSpec {
    pub fn new(c_plus: Complex64, c_a: Complex64, c_d: Complex64, c_minus: Complex64) -> Self {
        Self {
            c_plus,
            c_a,
            c_d,
            c_minus,
        }
    }

    /// `(1, 0, 0, 1)`, i.e. `T` itself.
    pub fn canonical() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    /// `(1, c, 0, 1)`: `T_c u = T[u + (c/2) ∫_{-x}^{x} u]`.
    pub fn relaxed(c: Complex64) -> Self {
        Self::new(ONE, c, ZERO, ONE)
    }

    /// `(φ₀(0), φ₀'(0), φ₁(0), φ₁'(0))`.
    pub fn from_pair(pair: &BaseSolutionPair) -> Self {
        let [a, ap, b, bp] = pair.init_data();
        Self::new(a, ap, b, bp)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.c_plus, self.c_a, self.c_d, self.c_minus]
    }

    /// `c_plus c_minus - c_a c_d`; the Wronskian when built from a pair.
    pub fn determinant(&self) -> Complex64 {
        self.c_plus * self.c_minus - self.c_a * self.c_d
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().norm() > SINGULAR_DETERMINANT
    }
}

impl Default for TransmutationSpec {
    fn default() -> Self {
        Self::canonical()
    }
}

/// `(u(x) + u(-x)) / 2`.
pub fn project_even(u: &SampledFunction) -> SampledFunction {
    project(u, 1.0)
}

/// `(u(x) - u(-x)) / 2`.
pub fn project_odd(u: &SampledFunction) -> SampledFunction {
    project(u, -1.0)
}

fn project(u: &SampledFunction, sign: f64) -> SampledFunction {
    let g = *u.grid();
    let v = u.values();
    let values = (0..g.len()).map(|i| 0.5 * (v[i] + sign * v[g.mirror(i)])).collect();
    SampledFunction::new(g, values).expect("grid sized")
}

/// Trapezoid sum of `f(j)` over `j in lo..=hi`.
fn trapezoid<F: Fn(usize) -> Complex64>(h: f64, lo: usize, hi: usize, f: F) -> Complex64 {
    if hi <= lo {
        return ZERO;
    }
    let inner: Complex64 = (lo + 1..hi).map(&f).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

fn check_grids(kernel: &GoursatKernel, u: &SampledFunction) -> Result<Grid> {
    kernel.grid().ensure_same(u.grid())?;
    Ok(*u.grid())
}

/// `∫_{-x_i}^{x_i} f` with orientation: negative for `x_i < 0`.
fn symmetric_integral<F: Fn(usize) -> Complex64>(g: &Grid, i: usize, f: F) -> Complex64 {
    let c = g.center();
    let m = i.abs_diff(c);
    let s = trapezoid(g.h(), c - m, c + m, f);
    if i < c {
        -s
    } else {
        s
    }
}

fn per_node<F: Fn(usize) -> Complex64 + Sync + Send>(g: Grid, f: F) -> SampledFunction {
    let values = (0..g.len()).into_par_iter().map(f).collect();
    SampledFunction::new(g, values).expect("grid sized")
}

/// `T u(x) = u(x) + ∫_{-x}^{x} K(x, t) u(t) dt`.
pub fn apply_t(kernel: &GoursatKernel, u: &SampledFunction) -> Result<SampledFunction> {
    let g = check_grids(kernel, u)?;
    let v = u.values();
    Ok(per_node(g, |i| {
        v[i] + symmetric_integral(&g, i, |j| kernel.node_kernel(i, j) * v[j])
    }))
}

/// `T⁻¹ u(x) = u(x) - ∫_{-x}^{x} K(t, x) u(t) dt`.
pub fn apply_t_inverse(kernel: &GoursatKernel, u: &SampledFunction) -> Result<SampledFunction> {
    let g = check_grids(kernel, u)?;
    let v = u.values();
    Ok(per_node(g, |i| {
        v[i] - symmetric_integral(&g, i, |j| kernel.node_kernel(j, i) * v[j])
    }))
}

/// Nodes at each end on which a test function must vanish.
const SUPPORT_GUARD: usize = 2;

/// `T^□ψ(x) = ψ(x) - ∫_{-a}^{-|x|} K(t, x) ψ(t) dt + ∫_{|x|}^{a} K(t, x) ψ(t) dt`,
/// the operator with `⟨Tu, ψ⟩ = ⟨u, T^□ψ⟩`.
///
/// `ψ` must be compactly supported in `(-a, a)`: it is checked to be below
/// `1e-14` on the outer two nodes at both ends.
pub fn apply_t_transpose(kernel: &GoursatKernel, psi: &SampledFunction) -> Result<SampledFunction> {
    let g = check_grids(kernel, psi)?;
    let v = psi.values();
    let n = g.n();
    let touching = (0..SUPPORT_GUARD)
        .chain(n + 1 - SUPPORT_GUARD..=n)
        .find(|&i| v[i].norm() >= 1e-14);
    if let Some(i) = touching {
        return Err(Error::Precondition(format!(
            "test function does not vanish near the boundary: |psi(x_{i})| = {:e}",
            v[i].norm()
        )));
    }
    let c = g.center();
    let h = g.h();
    Ok(per_node(g, |i| {
        let m = i.abs_diff(c);
        let f = |j: usize| kernel.node_kernel(j, i) * v[j];
        v[i] - trapezoid(h, 0, c - m, f) + trapezoid(h, c + m, n, f)
    }))
}

/// The four fundamental s-transmutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fundamental {
    /// `T P₊`
    Even,
    /// `T A P₊`, `A` the antiderivative from 0.
    IntegratedEven,
    /// `T (d/dx) P₋`
    DifferentiatedOdd,
    /// `T P₋`
    Odd,
}

impl Fundamental {
    pub const ALL: [Fundamental; 4] = [
        Fundamental::Even,
        Fundamental::IntegratedEven,
        Fundamental::DifferentiatedOdd,
        Fundamental::Odd,
    ];

    /// The part applied before `T`.
    pub fn prepare(self, u: &SampledFunction) -> SampledFunction {
        match self {
            Fundamental::Even => project_even(u),
            Fundamental::IntegratedEven => cumulative_integral(&project_even(u)),
            Fundamental::DifferentiatedOdd => derivative(&project_odd(u)),
            Fundamental::Odd => project_odd(u),
        }
    }
}

pub fn fundamental_apply(
    which: Fundamental,
    kernel: &GoursatKernel,
    u: &SampledFunction,
) -> Result<SampledFunction> {
    apply_t(kernel, &which.prepare(u))
}

/// `Σ c_k S(F_k u)` for the preparations `F_k = P₊, AP₊, (d/dx)P₋, P₋`
/// and a linear operator `S`, which is applied once to the combination.
pub fn combine_fundamental<S>(coeffs: [Complex64; 4], u: &SampledFunction, apply: S) -> Result<SampledFunction>
where
    S: FnOnce(&SampledFunction) -> Result<SampledFunction>,
{
    apply(&prepared_combination(coeffs, u))
}

fn prepared_combination(coeffs: [Complex64; 4], u: &SampledFunction) -> SampledFunction {
    let mut acc = SampledFunction::zeros(*u.grid());
    for (c, which) in coeffs.into_iter().zip(Fundamental::ALL) {
        if c != ZERO {
            acc = &acc + &which.prepare(u).scale(c);
        }
    }
    acc
}

/// `T_φ u = c_plus TP₊u + c_a TAP₊u + c_d T(d/dx)P₋u + c_minus TP₋u`.
pub fn general_apply(
    spec: &TransmutationSpec,
    kernel: &GoursatKernel,
    u: &SampledFunction,
) -> Result<SampledFunction> {
    check_grids(kernel, u)?;
    combine_fundamental(spec.coefficients(), u, |w| apply_t(kernel, w))
}

/// The inverse of [`general_apply`],
///
/// ```text
/// M_φ = (1/W)[c_minus P₊ - c_a AP₊ - c_d (d/dx)P₋ + c_plus P₋] T⁻¹,
/// ```
///
/// with `W = c_plus c_minus - c_a c_d`.
pub fn general_inverse_apply(
    spec: &TransmutationSpec,
    kernel: &GoursatKernel,
    u: &SampledFunction,
) -> Result<SampledFunction> {
    let w = spec.determinant();
    if !spec.is_invertible() {
        return Err(Error::NotInvertible(w.norm()));
    }
    let inner = apply_t_inverse(kernel, u)?;
    let coeffs = [spec.c_minus, -spec.c_a, -spec.c_d, spec.c_plus].map(|c| c / w);
    Ok(prepared_combination(coeffs, &inner))
}

/// Coefficients expressing `T_φ` through `T_ψ`,
///
/// ```text
/// T_φ = [W(φ₀,ψ₁) T_ψP₊ - W(φ₀,ψ₀) T_ψAP₊ + W(φ₁,ψ₁) T_ψ(d/dx)P₋ - W(φ₁,ψ₀) T_ψP₋] / W(ψ₀,ψ₁),
/// ```
///
/// valid on polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseRelation {
    pub coefficients: [Complex64; 4],
    /// Largest deviation of a discrete cross-Wronskian from its value at the
    /// origin, relative to `|W(ψ₀,ψ₁)|`. Should be `O(h²)`.
    pub drift: f64,
}

impl BaseRelation {
    /// `T_φ u` given the kernel of `T` and the `ψ` pair the relation was built
    /// against.
    pub fn apply(
        &self,
        psi: &TransmutationSpec,
        kernel: &GoursatKernel,
        u: &SampledFunction,
    ) -> Result<SampledFunction> {
        combine_fundamental(self.coefficients, u, |w| general_apply(psi, kernel, w))
    }
}

pub fn relate_bases(phi: &BaseSolutionPair, psi: &BaseSolutionPair) -> Result<BaseRelation> {
    phi.grid().ensure_same(psi.grid())?;
    let w = psi.checked_wronskian()?;
    let [f0, f0p, f1, f1p] = phi.init_data();
    let [g0, g0p, g1, g1p] = psi.init_data();
    let cross = |a: Complex64, ap: Complex64, b: Complex64, bp: Complex64| a * bp - ap * b;
    let w01 = cross(f0, f0p, g1, g1p);
    let w00 = cross(f0, f0p, g0, g0p);
    let w11 = cross(f1, f1p, g1, g1p);
    let w10 = cross(f1, f1p, g0, g0p);

    let pairs = [
        (phi.phi0(), psi.phi1(), w01),
        (phi.phi0(), psi.phi0(), w00),
        (phi.phi1(), psi.phi1(), w11),
        (phi.phi1(), psi.phi0(), w10),
    ];
    let drift = pairs
        .iter()
        .map(|(f, g, at0)| {
            discrete_wronskian(f, g)
                .values()
                .iter()
                .map(|v| (v - at0).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
        / w.norm();

    Ok(BaseRelation {
        coefficients: [w01 / w, -w00 / w, w11 / w, -w10 / w],
        drift,
    })
}
