// Polynomial approximation of a `W^{2,1}` function through a least-squares
// fit of its second derivative.
//
// ```bash
// cargo run --example polynomial_approximation
// ```

use transmutation::grid::l1_norm;
use transmutation::lbase::{polynomial_approx, SecondDerivative};
use transmutation::{Complex64, Grid};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 1000)?;
    let zero = Complex64::new(0.0, 0.0);

    let sin = grid.sample_real(f64::sin);
    let p = polynomial_approx(SecondDerivative::FromFunction(&sin), zero, Complex64::new(1.0, 0.0), 9)?;
    println!("sin x, degree 9: max error {:.3e}", p.sample(&grid).distance(&sin)?);

    // u = |x| x has u'' = 2 sign(x): only L¹ convergence of P'' is expected
    let u = grid.sample_real(|x| x.abs() * x);
    let u2 = grid.sample_real(|x| 2.0 * x.signum());
    for degree in [3, 7, 11, 15, 19] {
        let p = polynomial_approx(SecondDerivative::FromFunction(&u), zero, zero, degree)?;
        let p2 = p.derivative().derivative().sample(&grid);
        println!("|x|x, degree {degree:2}: ||P'' - u''||_1 = {:.3e}", l1_norm(&(&p2 - &u2)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("polynomial_approximation example failed");
}
