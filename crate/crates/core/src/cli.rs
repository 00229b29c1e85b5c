//! Command-line driver: `kernel`, `basis`, `apply`, `spps`, `eig`, `verify`.
//!
//! Exit codes: 0 success, 1 bad arguments or configuration, 2 numerical
//! failure (including failed verification checks), 3 I/O.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::{format_complex, RunConfig};
use crate::error::{Error, Result};
use crate::grid::{interior_l1_norm, l1_norm, second_difference, Grid, SampledFunction};
use crate::kernel::{build_kernel, verify_goursat_bc, verify_weak_goursat, GoursatKernel};
use crate::lbase::{build_slbase, canonical_pair, discrete_wronskian, PicardOptions, SLBase};
use crate::operator::{
    apply_t, apply_t_inverse, apply_t_transpose, general_apply, general_inverse_apply,
};
use crate::potential::{Potential, PotentialDescriptor};
use crate::spps::{find_eigenvalues, spps_solve};

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "transmutation", version, about = "Transmutation operators for d²/dx² - q")]
pub struct Cli {
    /// Run configuration (`key = value` lines); defaults apply without it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configuration's `out`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Goursat kernel H(u, v) and its metadata.
    Kernel,
    /// Canonical base solutions and the standard L-base.
    Basis,
    /// Apply T, its inverse, its transpose or the configured spec to a CSV function.
    Apply {
        /// Grid function as `x,value_re[,value_im]` rows on the configured grid.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
        #[arg(long, value_enum, ignore_case = true, default_value_t = ApplyKind::T)]
        which: ApplyKind,
    },
    /// Power series solutions for each configured λ.
    Spps,
    /// Dirichlet eigenvalues on the configured interval.
    Eig,
    /// Run every numerical check and print a table.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApplyKind {
    #[value(name = "T")]
    T,
    #[value(name = "Tinv")]
    Tinv,
    #[value(name = "Ttrans")]
    Ttrans,
    #[value(name = "spec")]
    Spec,
}

impl ApplyKind {
    fn label(self) -> &'static str {
        match self {
            ApplyKind::T => "T",
            ApplyKind::Tinv => "Tinv",
            ApplyKind::Ttrans => "Ttrans",
            ApplyKind::Spec => "spec",
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            return EXIT_PARSE;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    match &cli.command {
        Command::Kernel => cmd_kernel(&config, stdout).map(|_| 0),
        Command::Basis => cmd_basis(&config, stdout).map(|_| 0),
        Command::Apply { input, which } => cmd_apply(&config, input, *which, stdout).map(|_| 0),
        Command::Spps => cmd_spps(&config, stdout).map(|_| 0),
        Command::Eig => cmd_eig(&config, stdout).map(|_| 0),
        Command::Verify => {
            let checks = verify_suite(&config)?;
            write_check_table(&checks, stdout)?;
            Ok(if checks.iter().all(Check::passed) { 0 } else { EXIT_NUMERIC })
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes `kernel.csv` and `kernel.meta`.
pub fn cmd_kernel(config: &RunConfig, stdout: &mut dyn Write) -> Result<GoursatKernel> {
    let q = config.build_potential()?;
    let kernel = build_kernel(&q, config.kernel)?;
    let mut csv = create(&config.out, "kernel.csv")?;
    kernel.write_csv(&mut csv)?;
    csv.flush()?;
    let mut meta = create(&config.out, "kernel.meta")?;
    writeln!(meta, "potential = {}", config.potential)?;
    kernel.write_metadata(&mut meta)?;
    meta.flush()?;
    writeln!(
        stdout,
        "kernel: {} iterations, tail bound {:e}",
        kernel.iterations(),
        kernel.tail_bound()
    )?;
    Ok(kernel)
}

fn canonical_base(config: &RunConfig, q: &Potential) -> Result<SLBase> {
    build_slbase(&canonical_pair(q, PicardOptions::default())?, config.k_max)
}

/// Writes `slbase.csv` and `slbase.meta` for the canonical pair.
pub fn cmd_basis(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let q = config.build_potential()?;
    let base = canonical_base(config, &q)?;
    let mut csv = create(&config.out, "slbase.csv")?;
    base.write_csv(&mut csv)?;
    csv.flush()?;
    let mut meta = create(&config.out, "slbase.meta")?;
    writeln!(meta, "potential = {}", config.potential)?;
    base.write_metadata(&mut meta)?;
    meta.flush()?;
    writeln!(stdout, "basis: {} members", base.k_max() + 1)?;
    Ok(())
}

/// Reads a grid function and writes `apply_<which>.csv`.
pub fn cmd_apply(config: &RunConfig, input: &Path, which: ApplyKind, stdout: &mut dyn Write) -> Result<()> {
    let grid = config.grid()?;
    let u = SampledFunction::read_csv(grid, BufReader::new(File::open(input)?))?;
    let q = config.build_potential()?;
    let kernel = build_kernel(&q, config.kernel)?;
    let result = match which {
        ApplyKind::T => apply_t(&kernel, &u)?,
        ApplyKind::Tinv => apply_t_inverse(&kernel, &u)?,
        ApplyKind::Ttrans => apply_t_transpose(&kernel, &u)?,
        ApplyKind::Spec => general_apply(&config.spec, &kernel, &u)?,
    };
    let name = format!("apply_{}.csv", which.label());
    let mut csv = create(&config.out, &name)?;
    result.write_csv(&mut csv)?;
    csv.flush()?;
    writeln!(stdout, "apply: wrote {name}")?;
    Ok(())
}

/// Writes `spps_<k>.csv` per configured λ plus `spps.meta`.
pub fn cmd_spps(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let q = config.build_potential()?;
    let base = canonical_base(config, &q)?;
    let mut meta = create(&config.out, "spps.meta")?;
    writeln!(meta, "potential = {}", config.potential)?;
    writeln!(meta, "tol = {:e}", config.spps_tol)?;
    for (k, &lambda) in config.lambdas.iter().enumerate() {
        let s = spps_solve(&base, lambda, config.spps_tol)?;
        let mut csv = create(&config.out, &format!("spps_{k}.csv"))?;
        s.write_csv(&mut csv)?;
        csv.flush()?;
        writeln!(meta, "lambda_{k} = {}", format_complex(lambda))?;
        writeln!(meta, "k_used_{k} = {}", s.k_used)?;
        writeln!(meta, "tail_{k} = {:e}", s.tail_estimate)?;
    }
    meta.flush()?;
    writeln!(stdout, "spps: {} solutions", config.lambdas.len())?;
    Ok(())
}

/// Writes `eigenvalues.csv`: `#` metadata lines, a header, one value per line.
pub fn cmd_eig(config: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<Complex64>> {
    let q = config.build_potential()?;
    let base = build_slbase(&canonical_pair(&q, PicardOptions::default())?, config.eig_k_max())?;
    let opts = config.eigen_options();
    let (left, right) = config.eig_interval;
    let (lo, hi) = config.eig_scan;
    let roots = find_eigenvalues(&base, left, right, lo, hi, config.eig_count, opts)?;
    let k_used = roots
        .iter()
        .map(|&r| spps_solve(&base, r, config.spps_tol).map(|s| s.k_used))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let mut out = create(&config.out, "eigenvalues.csv")?;
    writeln!(out, "# potential = {}", config.potential)?;
    writeln!(out, "# interval = {}, {}", left, right)?;
    writeln!(out, "# scan = {}, {}", lo, hi)?;
    writeln!(out, "# samples = {}", opts.scan)?;
    writeln!(out, "# tolerance = {:e}", opts.bracket_tol)?;
    writeln!(out, "# k_max = {}", base.k_max())?;
    writeln!(out, "# k_used = {k_used}")?;
    writeln!(out, "lambda_re,lambda_im")?;
    for r in &roots {
        writeln!(out, "{},{}", r.re, r.im)?;
    }
    out.flush()?;
    let list: Vec<String> = roots.iter().map(|r| format!("{}", r.re)).collect();
    writeln!(stdout, "eigenvalues: {}", list.join(", "))?;
    Ok(roots)
}

/// One row of the verification table; passes when `value <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

pub fn write_check_table(checks: &[Check], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{:<28} {:>12} {:>12}  result", "check", "value", "threshold")?;
    for c in checks {
        writeln!(
            out,
            "{:<28} {:>12.3e} {:>12.3e}  {}",
            c.name,
            c.value,
            c.threshold,
            if c.passed() { "pass" } else { "FAIL" }
        )?;
    }
    Ok(())
}

/// Potentials with discontinuities get the looser first-order thresholds.
fn is_rough(config: &RunConfig, q: &Potential) -> bool {
    !q.jumps().is_empty()
        || matches!(config.potential, PotentialDescriptor::Step { .. } | PotentialDescriptor::Csv(_))
}

/// Every invariant the library can check on the configured problem.
///
/// Thresholds: kernel tail at the configured tolerance; Goursat boundary
/// residuals `1e-6` (`1e-4` for discontinuous `q`); weak residual `5e-3`;
/// Wronskian drift `h²·(1 + sup|q|)` (`h·(1 + jump)` when rough); operator
/// round trips and cross-construction `1e-4`; duality `1e-5` relative; SPPS
/// Wronskian at the origin `h²·(1 + sup|q| + max|λ|)^{3/2}` (`h·…` when
/// rough); SPPS ODE residual `1e-2` relative to `sup|v₁|`.
pub fn verify_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let grid = config.grid()?;
    let q = config.build_potential()?;
    let rough = is_rough(config, &q);
    let h = grid.h();
    let q_sup = q.samples().sup_norm();
    let mut checks = Vec::new();

    let kernel = build_kernel(&q, config.kernel)?;
    checks.push(Check {
        name: "kernel_tail_bound",
        value: kernel.tail_bound(),
        threshold: config.kernel.tol,
    });
    checks.push(Check {
        name: "kernel_growth_excess",
        value: (kernel.sup_norm() - kernel.a_priori_bound()).max(0.0),
        threshold: 0.0,
    });
    let bc = if rough { 1e-4 } else { 1e-6 };
    let (diag, anti) = verify_goursat_bc(&kernel, &q)?;
    checks.push(Check { name: "goursat_diagonal", value: diag, threshold: bc });
    checks.push(Check { name: "goursat_antidiagonal", value: anti, threshold: bc });
    checks.push(Check {
        name: "weak_goursat_residual",
        value: verify_weak_goursat(&kernel, &q, 12)?,
        threshold: 5e-3,
    });

    let pair = canonical_pair(&q, PicardOptions::default())?;
    let jump = q.jumps().iter().map(|j| (j.right - j.left).norm()).fold(0.0, f64::max);
    checks.push(Check {
        name: "wronskian_drift",
        value: pair.wronskian_drift(),
        threshold: if rough { h * (1.0 + jump.max(q_sup)) } else { h * h * (1.0 + q_sup) },
    });

    let k_cross = 8.min(config.k_max);
    let base = build_slbase(&pair, config.k_max)?;
    let mut cross: f64 = 0.0;
    for k in 0..=k_cross {
        let xk = grid.sample_real(|x| x.powi(k as i32));
        cross = cross.max(apply_t(&kernel, &xk)?.distance(&base.members()[k])?);
    }
    checks.push(Check { name: "slbase_vs_transmuted_powers", value: cross, threshold: 1e-4 });

    let u6 = grid.sample_real(|x| x.powi(6));
    let u6pp = grid.sample_real(|x| 30.0 * x.powi(4));
    let tu = apply_t(&kernel, &u6)?;
    let residual = &(&second_difference(&tu) - &q.samples().product(&tu)?) - &apply_t(&kernel, &u6pp)?;
    checks.push(Check {
        name: "transmutation_residual_l1",
        value: l1_norm(&residual),
        // the second difference straddling a jump is off by O(jump·|Tu|)
        // on one node
        threshold: if rough { h * (1.0 + jump) * tu.sup_norm() } else { 1e-3 },
    });

    let poly = grid.sample_real(|x| 0.3 - x + 2.0 * x * x - x.powi(3) + 0.5 * x.powi(4) + x.powi(5));
    let back = apply_t_inverse(&kernel, &apply_t(&kernel, &poly)?)?;
    checks.push(Check { name: "inverse_round_trip", value: back.distance(&poly)?, threshold: 1e-4 });

    checks.push(Check {
        name: "transpose_duality",
        value: duality_defect(&kernel, &grid)?,
        threshold: 1e-5,
    });

    if config.spec.is_invertible() {
        let u4 = grid.sample_real(|x| x.powi(4));
        let round = general_inverse_apply(&config.spec, &kernel, &general_apply(&config.spec, &kernel, &u4)?)?;
        checks.push(Check { name: "spec_round_trip", value: round.distance(&u4)?, threshold: 1e-4 });
    }

    // finite-difference derivatives of v₁, v₂ lose accuracy like |λ|^{3/2}
    let lambda_max = config.lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let spectral_scale = (1.0 + jump.max(q_sup) + lambda_max).powf(1.5);
    let mut w_err: f64 = 0.0;
    let mut ode: f64 = 0.0;
    for &lambda in &config.lambdas {
        let s = spps_solve(&base, lambda, config.spps_tol)?;
        let w = discrete_wronskian(&s.v1, &s.v2);
        w_err = w_err.max((w.at_origin() - 1.0).norm());
        let r = &(&second_difference(&s.v1) - &q.samples().product(&s.v1)?) - &s.v1.scale(lambda);
        ode = ode.max(interior_l1_norm(&r) / s.v1.sup_norm().max(1.0));
    }
    checks.push(Check {
        name: "spps_wronskian_at_origin",
        value: w_err,
        threshold: if rough { h * spectral_scale } else { h * h * spectral_scale },
    });
    checks.push(Check { name: "spps_ode_residual_l1", value: ode, threshold: 1e-2 });

    Ok(checks)
}

/// `max |⟨Tu, ψ⟩ - ⟨u, T^□ψ⟩| / (‖u‖₂ ‖ψ‖₂)` over a few fixed pairs.
fn duality_defect(kernel: &GoursatKernel, grid: &Grid) -> Result<f64> {
    let a = grid.a();
    let bump = |c: f64, w: f64| {
        grid.sample_real(move |x| {
            let s = (x - c * a) / (w * a);
            if s.abs() < 1.0 { (1.0 - s * s).powi(4) } else { 0.0 }
        })
    };
    let pairs = [
        (grid.sample_real(|x| 1.0 + x), bump(0.0, 0.7)),
        (grid.sample_real(|x| x * x - x.powi(3)), bump(0.3, 0.5)),
        (grid.sample_real(|x| (2.0 * x).cos()), bump(-0.4, 0.4)),
    ];
    let mut worst: f64 = 0.0;
    for (u, psi) in &pairs {
        let lhs = apply_t(kernel, u)?.pairing(psi)?;
        let rhs = u.pairing(&apply_t_transpose(kernel, psi)?)?;
        worst = worst.max((lhs - rhs).norm() / (u.l2_norm() * psi.l2_norm()));
    }
    Ok(worst)
}
