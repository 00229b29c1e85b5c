// Goursat kernel of a step potential: convergence of the successive
// approximations, the a-priori growth bound and both boundary conditions.
//
// ```bash
// cargo run --example goursat_kernel
// ```

use transmutation::kernel::{kernel_at, verify_goursat_bc, verify_weak_goursat};
use transmutation::{build_kernel, Grid, KernelOptions, Potential};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 400)?;
    let q = Potential::step(grid, 1.0, 0.0);
    let kernel = build_kernel(&q, KernelOptions::default())?;

    println!("terms summed      {}", kernel.iterations());
    println!("factorial tail    {:.3e}", kernel.tail_bound());
    println!(
        "sup |H| = {:.6} <= ||q||_1 e^(a||q||_1) = {:.6}",
        kernel.sup_norm(),
        kernel.a_priori_bound()
    );

    let (diag, anti) = verify_goursat_bc(&kernel, &q)?;
    println!("K(x, x) - ½∫q     {diag:.3e}");
    println!("K(x, -x)          {anti:.3e}");
    println!("weak residual     {:.3e}", verify_weak_goursat(&kernel, &q, 8)?);

    for (x, t) in [(0.5, 0.5), (0.5, 0.0), (0.8, -0.3), (-0.6, 0.2)] {
        println!("K({x:5.2}, {t:5.2}) = {:.6}", kernel_at(&kernel, x, t)?.re);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("goursat_kernel example failed");
}
