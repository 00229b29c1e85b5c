//! Transmutation operators for `d²/dx² - q(x)` on a symmetric interval
//! `[-a, a]`, with `q` merely integrable.
//!
//! The operator `T u = u + ∫_{-x}^{x} K(x, t) u(t) dt` maps solutions of
//! `u'' = λu` to solutions of `v'' - qv = λv`. From its Goursat kernel the
//! crate builds base solutions, standard L-bases, the family of
//! s-transmutations, the transpose, and spectral parameter power series.
//!
//! ```
//! use transmutation::{build_kernel, Grid, KernelOptions, Potential};
//! use transmutation::operator::apply_t;
//!
//! let grid = Grid::new(1.0, 200)?;
//! let q = Potential::constant(grid, 1.0);
//! let kernel = build_kernel(&q, KernelOptions::default())?;
//! let cosh = apply_t(&kernel, &grid.sample_real(|_| 1.0))?;
//! assert!(cosh.distance(&grid.sample_real(f64::cosh))? < 1e-3);
//! # Ok::<(), transmutation::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod lbase;
pub mod operator;
pub mod potential;
pub mod spps;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use grid::{Grid, SampledFunction};
pub use kernel::{build_kernel, GoursatKernel, KernelOptions};
pub use lbase::{build_slbase, canonical_pair, BaseSolutionPair, PicardOptions, SLBase};
pub use num_complex::Complex64;
pub use operator::{Fundamental, TransmutationSpec};
pub use potential::{Potential, PotentialDescriptor};
pub use spps::{spps_solve, SPPSSolution};
