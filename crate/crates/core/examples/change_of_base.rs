// Expressing `T_φ` through `T_ψ` for two arbitrary base pairs, and checking
// the result against the L-base of `φ`.
//
// ```bash
// cargo run --example change_of_base
// ```

use transmutation::operator::relate_bases;
use transmutation::{
    build_kernel, build_slbase, BaseSolutionPair, Complex64, Grid, KernelOptions, PicardOptions, Potential,
    TransmutationSpec,
};

pub fn run_example() -> transmutation::Result<()> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let grid = Grid::new(1.0, 800)?;
    let q = Potential::step(grid, 2.0, 0.0);
    let kernel = build_kernel(&q, KernelOptions::default())?;
    let opts = PicardOptions::default();

    let phi = BaseSolutionPair::solve(&q, [c(2.0), c(-1.0), c(0.5), c(3.0)], opts)?;
    let psi = BaseSolutionPair::solve(&q, [c(1.0), c(1.0), c(-0.5), c(2.0)], opts)?;
    let rel = relate_bases(&phi, &psi)?;
    println!("coefficients {:?}", rel.coefficients.map(|z| z.re));
    println!("cross-Wronskian drift {:.3e}", rel.drift);

    let psi_spec = TransmutationSpec::from_pair(&psi);
    let base = build_slbase(&phi, 6)?;
    for k in 0..=6 {
        let xk = grid.sample_real(|x| x.powi(k));
        let via = rel.apply(&psi_spec, &kernel, &xk)?;
        println!("k = {k}: |T_φ[x^k] - φ_k| = {:.3e}", via.distance(&base.members()[k as usize])?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("change_of_base example failed");
}
