// The four fundamental s-transmutations, their combination `T_φ` and its
// inverse `M_φ`.
//
// ```bash
// cargo run --example fundamental_family
// ```

use transmutation::operator::{apply_t, fundamental_apply, general_apply, general_inverse_apply};
use transmutation::{build_kernel, Complex64, Fundamental, Grid, KernelOptions, Potential, TransmutationSpec};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 1000)?;
    let q = Potential::constant(grid, 1.0);
    let kernel = build_kernel(&q, KernelOptions::default())?;

    let one = grid.sample_real(|_| 1.0);
    let x = grid.sample_real(|x| x);
    let sinh = grid.sample_real(f64::sinh);
    let cosh = grid.sample_real(f64::cosh);
    println!("TAP₊[1] vs sinh   {:.3e}", fundamental_apply(Fundamental::IntegratedEven, &kernel, &one)?.distance(&sinh)?);
    println!("TDP₋[x] vs cosh   {:.3e}", fundamental_apply(Fundamental::DifferentiatedOdd, &kernel, &x)?.distance(&cosh)?);
    println!("TP₊[x]            {:.3e}", fundamental_apply(Fundamental::Even, &kernel, &x)?.sup_norm());

    // T_c u = T[u + (c/2)∫_{-x}^{x} u] with c = 2
    let spec = TransmutationSpec::relaxed(Complex64::new(2.0, 0.0));
    let u = grid.sample_real(|x| 1.0 + x * x);
    let direct = apply_t(&kernel, &grid.sample_real(|x| 1.0 + x * x + 2.0 * x + 2.0 * x.powi(3) / 3.0))?;
    println!("T_c vs T[u + ∫u]  {:.3e}", general_apply(&spec, &kernel, &u)?.distance(&direct)?);

    let x4 = grid.sample_real(|x| x.powi(4));
    let back = general_inverse_apply(&spec, &kernel, &general_apply(&spec, &kernel, &x4)?)?;
    println!("M_φ T_φ x⁴ - x⁴   {:.3e}", back.distance(&x4)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fundamental_family example failed");
}
