//! Normal wavenumber K(ω) across the travelling, boundary and evanescent
//! regimes, together with the coupling function H(ω).

use mirror_dce::spectral::{h_aux, kx_branch, ChannelParams};

fn main() {
    let params = ChannelParams::new(0.6, 2.0).expect("valid channel");
    println!("k_par = {}, omega0 = {}", params.k_par(), params.omega0());
    println!("{:>8}  {:>12}  {:>24}  {:>10}", "omega", "regime", "K(omega)", "H(omega)");
    for omega in [-2.0, -1.0, -0.6, -0.3, 0.0, 0.3, 0.6, 0.6 + 1e-12, 1.0, 2.0] {
        let k = kx_branch(omega, &params);
        println!(
            "{omega:>8.3}  {:>12}  {:>24}  {:>10.4}",
            format!("{:?}", k.regime),
            format!("{:.6e}", k.value),
            h_aux(omega, &params)
        );
    }
    // just above the branch point the factored square root keeps full precision
    let omega = 0.6 + 1e-14;
    let eps = omega - 0.6; // the offset actually represented
    let k = kx_branch(omega, &params).value.re;
    println!("K(k_par + {eps:.3e}) = {k:.6e}  (sqrt(2 k_par eps) = {:.6e})", (2.0 * 0.6 * eps).sqrt());
}
