//! Device scales and the optimal operating point of the reference setup.

use git_channel::channel::{channel_at, optimal_point};
use git_channel::criteria::{boundary_q, minimum_time};
use git_channel::model::{critical_frequencies, rwa_valid, DeviceGeometry, SymmetricParams, CONSTANTS};

fn main() -> git_channel::Result<()> {
    let cf = critical_frequencies(CONSTANTS.rho_gold, 1e-3)?;
    println!("gravitational frequency w_G = {:.4e} s^-1", cf.w_g);
    println!("thermal frequency       w_T = {:.4e} s^-1", cf.w_t);

    let p = SymmetricParams::reference();
    let device = DeviceGeometry::gold_reference();
    println!("lambda                      = {:.4e} s^-1", device.lambda(p.omega_b)?);
    println!("thermal occupation          = {:.4e}", p.n_thermal);

    let opt = optimal_point(&p);
    let ch = channel_at(&p, 0.0)?;
    println!("optimal coupling            = {:.4e} s^-1", opt.g_opt);
    println!("1 - eta                     = {:.3e}", opt.loss_opt);
    println!("added noise (1 - eta) N     = {:.4}", ch.output_noise);
    println!("ratio eta / ((1 - eta) N)   = {:.4}", ch.ratio());
    println!("minimum measurement time    = {:.3e} s", minimum_time(&p));
    println!("quality factor at boundary  = {:.4e}", boundary_q(p.omega_b, cf.w_g, cf.w_t));

    let rwa = rwa_valid(&p);
    println!("rotating-wave valid         = {} (margin {:.1})", rwa.valid, rwa.margin);
    Ok(())
}
