//! Tuning detunings and couplings when the two systems differ.

use git_channel::channel::{asymmetric_channel_at, asymmetric_optimum};
use git_channel::model::{AsymmetricParams, SymmetricParams};

fn main() -> git_channel::Result<()> {
    let mut p = AsymmetricParams::from_symmetric(&SymmetricParams::reference());
    p.systems[1].omega_b *= 1.0 + 1e-5;
    p.systems[1].kappa *= 2.0;
    p.systems[1].n_thermal *= 2.0;

    let tuned = asymmetric_optimum(&p)?;
    println!("system 1: Delta = {:.10e}, g = {:.4e}", tuned.delta_1, tuned.g_1);
    println!("system 2: Delta = {:.10e}, g = {:.4e}", tuned.delta_2, tuned.g_2);
    println!("ratio {:.4}, eta {:.10}, threshold {:.4}", tuned.ratio, tuned.eta, tuned.threshold);

    let (ch, tc) = asymmetric_channel_at(&tuned.apply(&p), tuned.omega)?;
    println!("channel at omega_B,1: eta {:.10}, ratio {:.4}, unitarity {:.2e}", ch.eta, ch.ratio(), tc.unitarity_sum() - 1.0);
    Ok(())
}
