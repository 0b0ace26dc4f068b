//! A two-mode squeezed vacuum sent through attenuators on either side of the
//! entanglement-breaking boundary `eta = (1 - eta) N`.

use git_channel::channel::AttenuatorChannel;
use git_channel::gaussian::{apply_attenuator, make_state, two_mode_verdict, StateKind};

fn main() -> git_channel::Result<()> {
    let tmsv = make_state(StateKind::TwoModeSqueezed { r: 1.0 })?;
    let n = 4.0;
    let boundary = n / (n + 1.0);
    println!("N = {n}, boundary eta = {boundary:.4}");
    for k in 0..11 {
        let eta = boundary + (k as f64 - 5.0) * 0.02;
        let ch = AttenuatorChannel::new(eta, n, 0.0)?;
        let v = two_mode_verdict(&apply_attenuator(&tmsv, 1, &ch)?, 0, 1)?;
        println!("eta {eta:.4}  ratio {:.3}  log-negativity {:.4}  entangled {}", ch.ratio(), v.log_negativity, v.entangled);
    }
    Ok(())
}
