//! Normalised emission rate near threshold for the three methods: the
//! perturbative rate diverges like Δ^(-1/2), the coupled rates vanish like
//! Δ^(1/2) and peak at the shifted resonance.

use mirror_dce::emission::{rate_direct, EmissionQuery, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (theta, k_dq0) = (78.0, 0.03);
    let methods = [Method::Perturbative, Method::ClosedForm, Method::Truncated(3)];
    println!("{:>11}  {:>14}  {:>14}  {:>14}", "delta", "perturbative", "closed-form", "truncated:3");
    for i in 0..=24 {
        let delta = 10f64.powf(-14.0 + 0.5 * f64::from(i));
        let mut line = format!("{delta:>11.3e}");
        for m in methods {
            let s = rate_direct(&EmissionQuery::new(theta, k_dq0, delta, m)?)?;
            line += &format!("  {:>14.6e}{}", s.rho, if s.singular { "*" } else { " " });
        }
        println!("{line}");
    }

    // log-log slopes between the two smallest detunings
    for m in [Method::Perturbative, Method::ClosedForm] {
        let a = rate_direct(&EmissionQuery::new(theta, k_dq0, 1e-14, m)?)?;
        let b = rate_direct(&EmissionQuery::new(theta, k_dq0, 1e-12, m)?)?;
        let slope = (b.rho / a.rho).ln() / (b.delta_eff / a.delta_eff).ln();
        println!("{m}: slope {slope:+.4}");
    }
    Ok(())
}
