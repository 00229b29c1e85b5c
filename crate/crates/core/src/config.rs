//! Flat `key = value` run configuration.
//!
//! ```text
//! # unit potential on [-1, 1]
//! a = 1
//! n = 1000
//! potential = const:1
//! lambdas = -5, 1+0.5i
//! spec = 1, 2, 0, 1
//! ```
//!
//! Unknown keys are rejected. Complex values are written `re`, `imi` or
//! `re±imi`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::KernelOptions;
use crate::operator::TransmutationSpec;
use crate::potential::{Potential, PotentialDescriptor};
use crate::spps::{EigenOptions, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub n: usize,
    pub potential: PotentialDescriptor,
    pub kernel: KernelOptions,
    pub k_max: usize,
    pub lambdas: Vec<Complex64>,
    pub spps_tol: f64,
    pub spec: TransmutationSpec,
    /// Dirichlet interval `[left, right]` for the eigenvalue search.
    pub eig_interval: (f64, f64),
    /// Real λ range scanned for eigenvalues.
    pub eig_scan: (f64, f64),
    pub eig_count: usize,
    pub eig_samples: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            n: 1000,
            potential: PotentialDescriptor::Zero,
            kernel: KernelOptions::default(),
            k_max: 30,
            lambdas: vec![Complex64::new(1.0, 0.0)],
            spps_tol: DEFAULT_TOL,
            spec: TransmutationSpec::canonical(),
            eig_interval: (0.0, 1.0),
            eig_scan: (-100.0, 0.0),
            eig_count: 3,
            eig_samples: 200,
            out: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config: RunConfig = text.parse()?;
        // relative csv potentials resolve against the config file
        if let PotentialDescriptor::Csv(p) = &config.potential {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    config.potential = PotentialDescriptor::Csv(dir.join(p));
                }
            }
        }
        Ok(config)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.a, self.n)
    }

    pub fn build_potential(&self) -> Result<Potential> {
        self.potential.build(self.grid()?)
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            scan: self.eig_samples,
            series_tol: self.spps_tol,
            ..EigenOptions::default()
        }
    }

    /// Base length for the eigenvalue scan: at least `k_max`, raised until
    /// the factorial bound `(√Λ a)^k / k!` on the series terms at the far end
    /// of the scan drops well below `spps_tol`, plus a margin for the growth
    /// of the L-base members.
    pub fn eig_k_max(&self) -> usize {
        let reach = self.eig_scan.0.abs().max(self.eig_scan.1.abs()).sqrt() * self.a;
        let (mut k, mut term) = (0usize, 1.0f64);
        while term >= 1e-2 * self.spps_tol || (k as f64) < reach {
            k += 1;
            term *= reach / k as f64;
        }
        self.k_max.max(k + 8)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::parse("a", format!("must be positive, got {}", self.a)));
        }
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::parse("n", format!("must be even and >= 4, got {}", self.n)));
        }
        if !(self.kernel.tol > 0.0) {
            return Err(Error::parse("kernel_tol", "must be positive"));
        }
        if self.kernel.n_max == 0 {
            return Err(Error::parse("kernel_n_max", "must be at least 1"));
        }
        if self.k_max == 0 {
            return Err(Error::parse("k_max", "must be at least 1"));
        }
        if !(self.spps_tol > 0.0) {
            return Err(Error::parse("spps_tol", "must be positive"));
        }
        if !(self.eig_interval.0 < self.eig_interval.1) {
            return Err(Error::parse("eig_interval", "left end must be below right end"));
        }
        if !(self.eig_scan.0 < self.eig_scan.1) {
            return Err(Error::parse("eig_scan", "lower bound must be below upper bound"));
        }
        if self.eig_count == 0 {
            return Err(Error::parse("eig_count", "must be at least 1"));
        }
        if self.eig_samples < 2 {
            return Err(Error::parse("eig_samples", "must be at least 2"));
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse("config", format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "a" => c.a = parse_num(key, value)?,
                "n" => c.n = parse_num(key, value)?,
                "potential" => c.potential = value.parse()?,
                "kernel_tol" => c.kernel.tol = parse_num(key, value)?,
                "kernel_n_max" => c.kernel.n_max = parse_num(key, value)?,
                "k_max" => c.k_max = parse_num(key, value)?,
                "lambdas" => {
                    c.lambdas = split_list(value)
                        .map(|s| parse_complex(key, s))
                        .collect::<Result<_>>()?
                }
                "spps_tol" => c.spps_tol = parse_num(key, value)?,
                "spec" => c.spec = parse_spec(value)?,
                "eig_interval" => c.eig_interval = parse_pair(key, value)?,
                "eig_scan" => c.eig_scan = parse_pair(key, value)?,
                "eig_count" => c.eig_count = parse_num(key, value)?,
                "eig_samples" => c.eig_samples = parse_num(key, value)?,
                "out" => c.out = PathBuf::from(value),
                other => return Err(Error::parse(other, "unknown configuration key")),
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_num<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::parse(field, format!("`{value}`: {e}")))
}

fn parse_pair(field: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = split_list(value).collect();
    match parts.as_slice() {
        [l, r] => Ok((parse_num(field, l)?, parse_num(field, r)?)),
        _ => Err(Error::parse(field, format!("expected two numbers, got `{value}`"))),
    }
}

fn parse_spec(value: &str) -> Result<TransmutationSpec> {
    let parts: Vec<Complex64> = split_list(value)
        .map(|s| parse_complex("spec", s))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        &[p, a, d, m] => Ok(TransmutationSpec::new(p, a, d, m)),
        _ => Err(Error::parse("spec", format!("expected four values, got {}", parts.len()))),
    }
}

/// Parses `re`, `imi`, `re+imi` or `re-imi` (no inner spaces needed; any are
/// ignored).
pub fn parse_complex(field: &str, text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::parse(field, format!("`{text}` is not a complex number"));
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => real(t),
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    // the sign that splits real from imaginary part is not leading and does
    // not belong to an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Inverse of [`parse_complex`] using shortest round-trip formatting.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", Complex64::new(1.0, 0.0)),
            ("-2.5", Complex64::new(-2.5, 0.0)),
            ("3i", Complex64::new(0.0, 3.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("1+2i", Complex64::new(1.0, 2.0)),
            ("1 - 2i", Complex64::new(1.0, -2.0)),
            ("1e-3+2E+2i", Complex64::new(1e-3, 200.0)),
            ("-1e-3-1e-3i", Complex64::new(-1e-3, -1e-3)),
        ];
        for (s, z) in cases {
            assert_eq!(parse_complex("x", s).unwrap(), z, "{s}");
        }
        for s in ["", "abc", "1+", "1+2j", "i1"] {
            assert!(parse_complex("x", s).is_err(), "{s}");
        }
    }

    proptest! {
        #[test]
        fn complex_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = Complex64::new(re, im);
            prop_assert_eq!(parse_complex("z", &format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn full_config() {
        let text = "\
            # comment\n\
            a = 2\n\
            n = 200   # trailing\n\
            potential = step:1:0\n\
            kernel_tol = 1e-10\n\
            kernel_n_max = 80\n\
            k_max = 40\n\
            lambdas = -5, 1+0.5i\n\
            spec = 1, 2, 0, 1\n\
            eig_interval = -1, 1\n\
            eig_scan = -50, 0\n\
            eig_count = 2\n\
            eig_samples = 100\n\
            out = results\n";
        let c: RunConfig = text.parse().unwrap();
        assert_eq!(c.a, 2.0);
        assert_eq!(c.n, 200);
        assert_eq!(c.potential, PotentialDescriptor::Step { value: 1.0, location: 0.0 });
        assert_eq!(c.kernel, KernelOptions { tol: 1e-10, n_max: 80 });
        assert_eq!(c.lambdas, vec![Complex64::new(-5.0, 0.0), Complex64::new(1.0, 0.5)]);
        assert_eq!(c.spec, TransmutationSpec::relaxed(Complex64::new(2.0, 0.0)));
        assert_eq!(c.eig_interval, (-1.0, 1.0));
        assert_eq!(c.eig_scan, (-50.0, 0.0));
        assert_eq!((c.eig_count, c.eig_samples), (2, 100));
        assert_eq!(c.out, PathBuf::from("results"));
    }

    #[test]
    fn eigen_base_covers_the_scan() {
        let mut c = RunConfig::default();
        assert!(c.eig_k_max() >= 50);
        c.eig_scan = (-4.0, 0.0);
        assert_eq!(c.eig_k_max(), c.k_max);
        c.k_max = 100;
        c.eig_scan = (-100.0, 0.0);
        assert_eq!(c.eig_k_max(), 100);
    }

    #[test]
    fn errors_name_the_field() {
        let field = |text: &str| match text.parse::<RunConfig>() {
            Err(Error::Parse { field, .. }) => field,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(field("n = 7"), "n");
        assert_eq!(field("a = -1"), "a");
        assert_eq!(field("potential = wobbly"), "potential");
        assert_eq!(field("spec = 1, 2"), "spec");
        assert_eq!(field("colour = red"), "colour");
        assert_eq!(field("lambdas = 1+x"), "lambdas");
        assert_eq!(field("just words"), "config");
    }
}
