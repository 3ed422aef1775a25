//! Resonance shift against emission angle, analytic and numeric.

use mirror_dce::resonance::shift_vs_angle_sweep;

fn main() {
    let mut thetas: Vec<f64> = (1..=17).map(|i| 5.0 * f64::from(i)).collect();
    thetas.push(89.0);
    println!("{:>6}  {:>12}  {:>12}", "theta", "analytic", "truncated:3");
    for r in shift_vs_angle_sweep(0.03, &thetas, Some(3)) {
        match r {
            Ok(r) => println!(
                "{:>6.1}  {:>12.4e}  {:>12}",
                r.theta_deg,
                r.delta_s_analytic,
                r.delta_s_numeric.map_or("-".into(), |v| format!("{v:.4e}"))
            ),
            Err(e) => println!("error: {e}"),
        }
    }
}
