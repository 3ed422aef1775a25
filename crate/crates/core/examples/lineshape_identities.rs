//! Normalisation of the damped-oscillation lineshape and of its square.

use std::f64::consts::PI;

use mirror_dce::spectral::{lineshape, lineshape_integral, lineshape_square_integral, LineshapeParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for delta_t in [1e3, 1e4, 1e6] {
        let p = LineshapeParams::new(1.5, delta_t)?;
        let norm = lineshape_integral(&p)?;
        let square = lineshape_square_integral(&p)?;
        println!(
            "dt = {delta_t:>8.0e}: h(Omega0) = {:.4e}, int h = {norm:.12}, int h^2 / (dt/2pi) = {:.12}",
            lineshape(1.5, &p),
            square / (delta_t / (2.0 * PI))
        );
    }
    Ok(())
}
