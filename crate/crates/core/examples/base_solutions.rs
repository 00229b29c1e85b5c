// Canonical base solutions of `φ'' = φ`, the Green function and the
// standard L-base, checked against closed forms.
//
// ```bash
// cargo run --example base_solutions
// ```

use transmutation::lbase::green_function;
use transmutation::{build_slbase, canonical_pair, Grid, PicardOptions, Potential};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 1000)?;
    let q = Potential::constant(grid, 1.0);
    let pair = canonical_pair(&q, PicardOptions::default())?;

    let cosh = pair.phi0().distance(&grid.sample_real(f64::cosh))?;
    let sinh = pair.phi1().distance(&grid.sample_real(f64::sinh))?;
    println!("|α₀ - cosh|  {cosh:.3e}");
    println!("|α₁ - sinh|  {sinh:.3e}");
    println!("Wronskian drift {:.3e}", pair.wronskian_drift());

    let g = green_function(&pair, 0.7, 0.2)?;
    println!("G(0.7, 0.2) = {:.8}  (sinh 0.5 = {:.8})", g.re, 0.5f64.sinh());

    let base = build_slbase(&pair, 8)?;
    let phi2 = base.members()[2].distance(&grid.sample_real(|x| x * x.sinh()))?;
    println!("|φ₂ - x sinh x| {phi2:.3e}");
    for k in 2..=8 {
        println!("φ_{k}(1) = {:.10}   residual {:.2e}", base.members()[k].values()[grid.n()].re, base.ode_residual(&q, k)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("base_solutions example failed");
}
