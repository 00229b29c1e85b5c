// Spectral parameter power series: solutions of `v'' - qv = λv` for many λ
// from one L-base, and Dirichlet eigenvalues from the characteristic
// function.
//
// ```bash
// cargo run --example spectral_series
// ```

use std::f64::consts::PI;

use transmutation::spps::{dirichlet_char, find_eigenvalues, EigenOptions, DEFAULT_TOL};
use transmutation::{build_slbase, canonical_pair, spps_solve, Complex64, Grid, PicardOptions, Potential};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 1000)?;
    let q = Potential::constant(grid, 1.0);
    let base = build_slbase(&canonical_pair(&q, PicardOptions::default())?, 64)?;

    let s = spps_solve(&base, Complex64::new(-5.0, 0.0), DEFAULT_TOL)?;
    println!(
        "λ = -5: {} terms, |v₁ - cos 2x| = {:.3e}, |v₂ - sin(2x)/2| = {:.3e}",
        s.k_used,
        s.v1.distance(&grid.sample_real(|x| (2.0 * x).cos()))?,
        s.v2.distance(&grid.sample_real(|x| (2.0 * x).sin() / 2.0))?
    );

    let z = Complex64::new(-3.0, 4.0);
    println!("char({z}) = {:.6}", dirichlet_char(&base, z, 0.0, 1.0, DEFAULT_TOL)?);

    let roots = find_eigenvalues(&base, 0.0, 1.0, -100.0, 0.0, 3, EigenOptions::default())?;
    for (m, r) in roots.iter().enumerate() {
        let exact = -1.0 - ((m + 1) as f64 * PI).powi(2);
        println!("λ_{} = {:.9}  (exact {exact:.9})", m + 1, r.re);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spectral_series example failed");
}
