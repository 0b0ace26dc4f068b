//! Time-domain, Lyapunov and direct-solve checks of the closed forms.

use git_channel::channel::{channel_at, transfer_coefficients_analytic, transparency_linewidth};
use git_channel::model::SymmetricParams;
use git_channel::oracle::{mean_field_transmission, mechanical_entanglement, output_spectrum, IntegrationOptions};

fn main() -> git_channel::Result<()> {
    let p = SymmetricParams::reference();
    let w = transparency_linewidth(&p);
    for omega in [-w, -w / 2.0, 0.0, w / 2.0, w] {
        let mf = mean_field_transmission(&p, omega, &IntegrationOptions::default())?;
        let a1 = transfer_coefficients_analytic(&p, omega)?.alpha_1;
        println!(
            "omega {omega:>10.3e}: time domain {:.9}, closed form {:.9}, {} steps",
            mf.ratio.norm(),
            a1.norm(),
            mf.steps
        );
    }
    let direct = output_spectrum(&p, 0.0)?;
    println!("added noise: direct {direct:.12}, closed form {:.12}", channel_at(&p, 0.0)?.output_noise);
    let v = mechanical_entanglement(&p)?;
    println!("stationary mechanical modes entangled: {} (nu~ = {:.4})", v.entangled, v.nu_tilde_minus);
    Ok(())
}
