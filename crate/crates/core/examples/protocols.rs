//! The three verification protocols on the predicted channel, at the
//! reference point and with ten times the mechanical damping.

use git_channel::model::SymmetricParams;
use git_channel::protocols::{end_to_end, ProtocolKind, ProtocolOptions};

fn main() -> git_channel::Result<()> {
    let opts = ProtocolOptions { seed: 7, workers: 4, ..Default::default() };
    let base = SymmetricParams::reference();
    for (label, p) in [("reference", base), ("10x damping", base.with_gamma(10.0 * base.gamma))] {
        println!("{label}:");
        for kind in [ProtocolKind::Probe, ProtocolKind::Benchmark, ProtocolKind::Entanglement] {
            let r = end_to_end(&p, kind, &opts)?;
            let key = match kind {
                ProtocolKind::Probe => "statistic",
                ProtocolKind::Benchmark => "fidelity",
                ProtocolKind::Entanglement => "log_negativity",
            };
            println!("  {:<13} {key} = {:<10.5} -> {:?}", format!("{kind:?}"), r.estimates[key], r.verdict);
        }
    }
    Ok(())
}
