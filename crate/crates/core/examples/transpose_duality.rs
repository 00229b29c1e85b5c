// `⟨Tu, ψ⟩ = ⟨u, T^□ψ⟩` for compactly supported test functions `ψ`.
//
// ```bash
// cargo run --example transpose_duality
// ```

use transmutation::operator::{apply_t, apply_t_transpose};
use transmutation::{build_kernel, Grid, KernelOptions, Potential};

pub fn run_example() -> transmutation::Result<()> {
    let grid = Grid::new(1.0, 1000)?;
    let q = Potential::polynomial(grid, &[1.0, 0.0, -2.0]);
    let kernel = build_kernel(&q, KernelOptions::default())?;

    let bump = |c: f64, w: f64| {
        grid.sample_real(move |x| {
            let s = (x - c) / w;
            if s.abs() < 1.0 { (1.0 - s * s).powi(4) } else { 0.0 }
        })
    };
    let cases = [
        ("1 + x", grid.sample_real(|x| 1.0 + x), bump(0.0, 0.8)),
        ("x³ - x", grid.sample_real(|x| x.powi(3) - x), bump(0.35, 0.5)),
        ("e^x", grid.sample_real(f64::exp), bump(-0.5, 0.3)),
    ];
    for (name, u, psi) in &cases {
        let lhs = apply_t(&kernel, u)?.pairing(psi)?;
        let rhs = u.pairing(&apply_t_transpose(&kernel, psi)?)?;
        println!("{name:8} ⟨Tu,ψ⟩ = {:+.10}   ⟨u,T^□ψ⟩ = {:+.10}", lhs.re, rhs.re);
    }

    // ψ reaching the boundary is refused
    let wide = grid.sample_real(|x| 1.0 - x * x + 0.1);
    match apply_t_transpose(&kernel, &wide) {
        Err(e) => println!("boundary support: {e}"),
        Ok(_) => unreachable!("support check"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("transpose_duality example failed");
}
