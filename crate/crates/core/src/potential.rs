//! Sampled integrable potentials.
//!
//! Samples follow the averaging convention: at a node carrying a jump the
//! stored value is the mean of the one-sided limits. The limits themselves are
//! kept as well, so antiderivatives that start at a jump node (the step at the
//! origin is the common case) integrate each cell from its own side.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};

/// One-sided limits of `q` at a node where it jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub index: usize,
    pub left: Complex64,
    pub right: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    samples: SampledFunction,
    jumps: Vec<Jump>,
    l1: f64,
}

impl Potential {
    pub fn from_samples(samples: SampledFunction) -> Self {
        Self::with_jumps(samples, Vec::new()).expect("no jumps to validate")
    }

    /// Builds a potential whose samples are overwritten at each jump node by
    /// the average of the given limits.
    pub fn with_jumps(mut samples: SampledFunction, mut jumps: Vec<Jump>) -> Result<Self> {
        let grid = *samples.grid();
        jumps.sort_by_key(|j| j.index);
        let mut values = samples.values().to_vec();
        for (k, j) in jumps.iter().enumerate() {
            if j.index >= grid.len() {
                return Err(Error::Domain(format!("jump index {} out of range", j.index)));
            }
            if k > 0 && jumps[k - 1].index == j.index {
                return Err(Error::Domain(format!("duplicate jump at node {}", j.index)));
            }
            values[j.index] = 0.5 * (j.left + j.right);
        }
        samples = SampledFunction::new(grid, values)?;
        let mut q = Self {
            samples,
            jumps,
            l1: 0.0,
        };
        q.l1 = q.cell_trapezoid(|a, b| 0.5 * (a.norm() + b.norm()));
        Ok(q)
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Self {
        Self::from_samples(grid.sample_real(f))
    }

    pub fn zero(grid: Grid) -> Self {
        Self::from_samples(SampledFunction::zeros(grid))
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self::from_fn(grid, |_| value)
    }

    /// `q(x) = Σ c_k x^k`.
    pub fn polynomial(grid: Grid, coeffs: &[f64]) -> Self {
        Self::from_fn(grid, |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
    }

    /// `q = value` for `x > location`, `0` for `x < location`.
    ///
    /// A location that coincides with a node (to `1e-9 h`) is recorded as a
    /// jump there.
    pub fn step(grid: Grid, value: f64, location: f64) -> Self {
        let samples = grid.sample_real(|x| if x > location { value } else { 0.0 });
        let h = grid.h();
        let nearest = ((location / h).round() + grid.center() as f64) as isize;
        if nearest >= 0
            && (nearest as usize) < grid.len()
            && (grid.node(nearest as usize) - location).abs() <= 1e-9 * h
        {
            let jump = Jump {
                index: nearest as usize,
                left: Complex64::new(0.0, 0.0),
                right: Complex64::new(value, 0.0),
            };
            return Self::with_jumps(samples, vec![jump]).expect("valid jump index");
        }
        Self::from_samples(samples)
    }

    /// Linear interpolation of tabulated `(x, q)` points onto the grid; the
    /// table must cover `[-a, a]`.
    pub fn from_table(grid: Grid, points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("potential table needs at least two points".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain("potential table must be strictly increasing in x".into()));
        }
        let slack = 1e-9 * grid.h();
        let (x0, x1) = (points[0].0, points[points.len() - 1].0);
        if x0 > -grid.a() + slack || x1 < grid.a() - slack {
            return Err(Error::Domain(format!(
                "potential table covers [{x0}, {x1}], need [-{a}, {a}]",
                a = grid.a()
            )));
        }
        let samples = grid.sample_real(|x| {
            let x = x.clamp(x0, x1);
            let k = points.partition_point(|p| p.0 < x).clamp(1, points.len() - 1) - 1;
            let ((xa, qa), (xb, qb)) = (points[k], points[k + 1]);
            qa + (qb - qa) * (x - xa) / (xb - xa)
        });
        Ok(Self::from_samples(samples))
    }

    pub fn grid(&self) -> &Grid {
        self.samples.grid()
    }

    /// Node samples (averaged at jumps).
    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// `‖q‖_{L¹}` by cell-wise trapezoid with one-sided limits at jumps.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    fn right_limit(&self, i: usize) -> Complex64 {
        match self.jumps.binary_search_by_key(&i, |j| j.index) {
            Ok(k) => self.jumps[k].right,
            Err(_) => self.samples.values()[i],
        }
    }

    fn left_limit(&self, i: usize) -> Complex64 {
        match self.jumps.binary_search_by_key(&i, |j| j.index) {
            Ok(k) => self.jumps[k].left,
            Err(_) => self.samples.values()[i],
        }
    }

    /// Values of `q` at the two ends of cell `[x_i, x_{i+1}]`, taken from
    /// inside the cell.
    fn cell_ends(&self, i: usize) -> (Complex64, Complex64) {
        (self.right_limit(i), self.left_limit(i + 1))
    }

    fn cell_trapezoid<F: Fn(Complex64, Complex64) -> f64>(&self, f: F) -> f64 {
        let h = self.grid().h();
        (0..self.grid().n())
            .map(|i| {
                let (l, r) = self.cell_ends(i);
                h * f(l, r)
            })
            .sum()
    }

    /// `∫_0^x q(s) f(s) ds` at every node, cell-wise trapezoid with
    /// one-sided limits of `q`. `f` is assumed continuous.
    pub fn weighted_antiderivative(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let grid = *self.grid();
        grid.ensure_same(f.grid())?;
        let h = grid.h();
        let c = grid.center();
        let fv = f.values();
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for i in c..grid.n() {
            let (l, r) = self.cell_ends(i);
            out[i + 1] = out[i] + 0.5 * h * (l * fv[i] + r * fv[i + 1]);
        }
        for i in (0..c).rev() {
            let (l, r) = self.cell_ends(i);
            out[i] = out[i + 1] - 0.5 * h * (l * fv[i] + r * fv[i + 1]);
        }
        SampledFunction::new(grid, out)
    }

    /// [`Self::weighted_antiderivative`] plus the endpoint correction
    /// `-h²/12 [g'(x) - g'(0)]`, `g = q f`, applied piece by piece between
    /// recorded jumps. Fourth order when `q` is smooth between its jumps and
    /// `f` is smooth.
    ///
    /// One-sided derivatives come from differences taken inside each piece;
    /// only their values at piece ends survive the telescoping sum.
    pub fn weighted_antiderivative_corrected(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let trapezoid = self.weighted_antiderivative(f)?;
        let grid = *self.grid();
        let (n, h, c) = (grid.n(), grid.h(), grid.center());
        let fv = f.values();
        let zero = Complex64::new(0.0, 0.0);

        let mut breaks = vec![0];
        breaks.extend(self.jumps.iter().map(|j| j.index).filter(|&i| i > 0 && i < n));
        breaks.push(n);

        // dl[i]: g' at x_i seen from the cell on its left; dr[i]: from the right.
        let mut dl = vec![zero; grid.len()];
        let mut dr = vec![zero; grid.len()];
        for w in breaks.windows(2) {
            let (s, e) = (w[0], w[1]);
            let g = |i: usize| {
                let q = if i == s {
                    self.right_limit(i)
                } else if i == e {
                    self.left_limit(i)
                } else {
                    self.samples.values()[i]
                };
                q * fv[i]
            };
            for i in s..=e {
                let d = if e - s == 1 {
                    (g(e) - g(s)) / h
                } else if i == s {
                    (-3.0 * g(s) + 4.0 * g(s + 1) - g(s + 2)) / (2.0 * h)
                } else if i == e {
                    (3.0 * g(e) - 4.0 * g(e - 1) + g(e - 2)) / (2.0 * h)
                } else {
                    (g(i + 1) - g(i - 1)) / (2.0 * h)
                };
                if i > s {
                    dl[i] = d;
                }
                if i < e {
                    dr[i] = d;
                }
            }
        }

        let mut corr = vec![zero; grid.len()];
        for i in c..n {
            corr[i + 1] = corr[i] + (dl[i + 1] - dr[i]);
        }
        for i in (0..c).rev() {
            corr[i] = corr[i + 1] - (dl[i + 1] - dr[i]);
        }
        let k = h * h / 12.0;
        let values = trapezoid
            .values()
            .iter()
            .zip(&corr)
            .map(|(t, d)| t - k * d)
            .collect();
        SampledFunction::new(grid, values)
    }

    /// `∫_0^x q(s) ds` at every node.
    pub fn antiderivative(&self) -> SampledFunction {
        let one = SampledFunction::constant(*self.grid(), Complex64::new(1.0, 0.0));
        self.weighted_antiderivative(&one).expect("same grid")
    }

    /// `‖q - other‖_{L¹}` with one-sided limits of both potentials.
    pub fn l1_distance(&self, other: &Potential) -> Result<f64> {
        self.grid().ensure_same(other.grid())?;
        let h = self.grid().h();
        Ok((0..self.grid().n())
            .map(|i| {
                let (a0, a1) = self.cell_ends(i);
                let (b0, b1) = other.cell_ends(i);
                0.5 * h * ((a0 - b0).norm() + (a1 - b1).norm())
            })
            .sum())
    }
}

/// Textual potential description used by run configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialDescriptor {
    Zero,
    Constant(f64),
    Step { value: f64, location: f64 },
    Polynomial(Vec<f64>),
    Csv(PathBuf),
}

impl PotentialDescriptor {
    pub fn build(&self, grid: Grid) -> Result<Potential> {
        Ok(match self {
            PotentialDescriptor::Zero => Potential::zero(grid),
            PotentialDescriptor::Constant(c) => Potential::constant(grid, *c),
            PotentialDescriptor::Step { value, location } => {
                Potential::step(grid, *value, *location)
            }
            PotentialDescriptor::Polynomial(c) => Potential::polynomial(grid, c),
            PotentialDescriptor::Csv(path) => {
                let text = std::fs::read_to_string(path)?;
                Potential::from_table(grid, &parse_table(&text)?)?
            }
        })
    }
}

fn parse_table(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(x), Some(v)) = (cols.next(), cols.next()) else {
            return Err(Error::parse("potential", format!("csv line {}: need x,value", lineno + 1)));
        };
        match (x.parse::<f64>(), v.parse::<f64>()) {
            (Ok(x), Ok(v)) => points.push((x, v)),
            _ if points.is_empty() => continue, // header
            _ => {
                return Err(Error::parse(
                    "potential",
                    format!("csv line {}: `{line}` is not numeric", lineno + 1),
                ))
            }
        }
    }
    Ok(points)
}

impl FromStr for PotentialDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (s, None),
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse("potential", format!("`{t}` is not a number in `{s}`")))
        };
        match (kind, rest) {
            ("zero", None) => Ok(PotentialDescriptor::Zero),
            ("const", Some(r)) => Ok(PotentialDescriptor::Constant(num(r)?)),
            ("step", Some(r)) => {
                let (v, loc) = r.split_once(':').ok_or_else(|| {
                    Error::parse("potential", format!("`{s}`: expected step:<value>:<location>"))
                })?;
                Ok(PotentialDescriptor::Step {
                    value: num(v)?,
                    location: num(loc)?,
                })
            }
            ("poly", Some(r)) => {
                let coeffs = r.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Ok(PotentialDescriptor::Polynomial(coeffs))
            }
            ("csv", Some(r)) if !r.is_empty() => Ok(PotentialDescriptor::Csv(PathBuf::from(r))),
            _ => Err(Error::parse(
                "potential",
                format!("unrecognised descriptor `{s}` (zero, const:, step:, poly:, csv:)"),
            )),
        }
    }
}

impl fmt::Display for PotentialDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialDescriptor::Zero => write!(f, "zero"),
            PotentialDescriptor::Constant(c) => write!(f, "const:{c}"),
            PotentialDescriptor::Step { value, location } => write!(f, "step:{value}:{location}"),
            PotentialDescriptor::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            PotentialDescriptor::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_at_origin_records_jump_and_averages() {
        let g = Grid::new(1.0, 10).unwrap();
        let q = Potential::step(g, 1.0, 0.0);
        assert_eq!(q.jumps().len(), 1);
        assert_eq!(q.samples().at_origin().re, 0.5);
        assert!((q.l1_norm() - 1.0).abs() < 1e-15);
        let anti = q.antiderivative();
        for (i, v) in anti.values().iter().enumerate() {
            let exact = g.node(i).max(0.0);
            assert!((v.re - exact).abs() < 1e-15, "node {i}: {} vs {exact}", v.re);
        }
    }

    #[test]
    fn step_between_nodes_has_no_jump_record() {
        let g = Grid::new(1.0, 10).unwrap();
        let q = Potential::step(g, 2.0, 0.05);
        assert!(q.jumps().is_empty());
        assert_eq!(q.samples().at_origin().re, 0.0);
    }

    #[test]
    fn polynomial_and_constant_l1() {
        let g = Grid::new(1.0, 1000).unwrap();
        assert!((Potential::constant(g, 1.0).l1_norm() - 2.0).abs() < 1e-13);
        let q = Potential::polynomial(g, &[0.0, 0.0, 1.0]);
        assert!((q.l1_norm() - 2.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn table_potential_interpolates_and_checks_coverage() {
        let g = Grid::new(1.0, 8).unwrap();
        let q = Potential::from_table(g, &[(-1.0, 0.0), (1.0, 2.0)]).unwrap();
        for (i, v) in q.samples().values().iter().enumerate() {
            assert!((v.re - (g.node(i) + 1.0)).abs() < 1e-14);
        }
        assert!(Potential::from_table(g, &[(-0.5, 0.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn descriptors_parse_and_display() {
        for s in ["zero", "const:1.5", "step:1:0", "poly:0,0,1", "csv:/tmp/q.csv"] {
            let d: PotentialDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string().parse::<PotentialDescriptor>().unwrap(), d);
        }
        assert_eq!(
            "step:2:0.5".parse::<PotentialDescriptor>().unwrap(),
            PotentialDescriptor::Step {
                value: 2.0,
                location: 0.5
            }
        );
        for bad in ["", "const", "const:x", "step:1", "poly:1,,2", "wave:3"] {
            let err = bad.parse::<PotentialDescriptor>().unwrap_err();
            assert!(matches!(err, Error::Parse { ref field, .. } if field == "potential"), "{bad}");
        }
    }

    #[test]
    fn table_parser_skips_header() {
        let pts = parse_table("x,q\n-1,0\n# comment\n1,1\n").unwrap();
        assert_eq!(pts, vec![(-1.0, 0.0), (1.0, 1.0)]);
        assert!(parse_table("-1,0\n0,zz\n").is_err());
    }

    #[test]
    fn corrected_antiderivative_is_fourth_order_across_jumps() {
        // ∫_0^x q(s) cos(s) ds with q = 2 for s > 0.25, 0 otherwise.
        let exact = |x: f64| if x > 0.25 { 2.0 * (x.sin() - 0.25f64.sin()) } else { 0.0 };
        let smooth_exact = |x: f64| x.exp() * (x.sin() - x.cos()) / 2.0 + 0.5;
        let mut prev = (f64::NAN, f64::NAN);
        for n in [40, 80, 160] {
            let g = Grid::new(1.0, n).unwrap();
            let f = g.sample_real(f64::cos);
            let step = Potential::step(g, 2.0, 0.25);
            let e1 = step.weighted_antiderivative_corrected(&f).unwrap().distance(&g.sample_real(exact)).unwrap();
            let smooth = Potential::from_fn(g, f64::exp);
            let e2 = smooth
                .weighted_antiderivative_corrected(&g.sample_real(f64::sin))
                .unwrap()
                .distance(&g.sample_real(smooth_exact))
                .unwrap();
            if !prev.0.is_nan() {
                assert!(prev.0 / e1 > 12.0, "step: {} -> {e1}", prev.0);
                assert!(prev.1 / e2 > 12.0, "smooth: {} -> {e2}", prev.1);
            }
            prev = (e1, e2);
        }
    }
}
