//! The truncated sideband system at θ = 78°, kδq₀ = 0.03, Δ = 1e-3: entries,
//! Thomas solve versus dense elimination, and the three-sideband closed form.

use mirror_dce::emission::ModeContext;
use mirror_dce::sideband::{
    build_system, closed_form_solution, perturbative_solution, solve_dense_oracle, solve_tridiagonal,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mode = ModeContext::new(78.0, 0.03, 1e-3);
    let params = mode.channel()?;
    let omega = mode.partner_frequency();
    let system = build_system(omega, &params, mode.dq0, 3)?;

    println!("base frequency {omega:.6}, Omega0 = {:.6}, dq0 = {:.6}", params.omega0(), mode.dq0);
    println!("{:>3}  {:>10}  {:>26}  {:>14}", "m", "omega_m", "diagonal iK", "rhs");
    for m in -3..=3 {
        let i = system.index(m).unwrap();
        println!(
            "{m:>3}  {:>10.5}  {:>26}  {:>14}",
            system.sideband_frequency(m),
            format!("{:.6e}", system.diag()[i]),
            format!("{:.4e}", system.rhs()[i].re)
        );
    }

    let thomas = solve_tridiagonal(&system)?;
    let dense = solve_dense_oracle(&system)?;
    println!("\nresidual {:.2e}, near-singular: {}", thomas.residual, thomas.condition_flag);
    for (m, g) in thomas.iter() {
        println!("g[{m:>2}] = {:<40} |thomas - dense| = {:.1e}", format!("{g:.6e}"), (g - dense.g(m)).norm());
    }

    let order1 = solve_tridiagonal(&build_system(omega, &params, mode.dq0, 1)?)?;
    let cf = closed_form_solution(omega, &params, mode.dq0)?;
    let pert = perturbative_solution(omega, &params, mode.dq0)?;
    println!("\nclosed form g1 = {:.10e}", cf.g1);
    println!("order-1 solve  = {:.10e}", order1.g(1));
    println!("order-3 solve  = {:.10e}", thomas.g(1));
    println!("perturbative   = {:.10e}", pert.g1);
    println!("denominator {:.4e} (scale {:.4e})", cf.denominator, cf.denominator_scale);
    Ok(())
}
