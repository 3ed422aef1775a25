//! How g₁ and the rate settle as the sideband window grows.

use mirror_dce::sweeps::convergence_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for delta in [1e-6, 1e-4, 1e-3, 1e-1] {
        let rep = convergence_report(78.0, 0.03, delta, &[1, 2, 3, 4, 5, 6, 7, 8])?;
        println!("delta = {delta:e}  (converged below 1e-10 at order {:?})", rep.converged_at);
        for row in &rep.rows {
            println!(
                "  M={}  rho={:.12e}  change={}",
                row.order,
                row.rho,
                row.change.map_or("-".into(), |c| format!("{c:.2e}"))
            );
        }
    }
    Ok(())
}
