//! Transparency window: transmissivity and added noise against probe detuning.

use git_channel::model::SymmetricParams;
use git_channel::sweep::{default_range, spectrum_scan};

fn main() -> git_channel::Result<()> {
    let p = SymmetricParams::reference();
    let scan = spectrum_scan(&p, default_range(&p, 3.0), 25, 4)?;
    println!("{:>12}  {:>10}  {:>10}  {:>8}", "omega", "eta", "noise", "ratio");
    for r in &scan.rows {
        let mark = if r.nonclassical { "*" } else { "" };
        println!("{:>12.3e}  {:>10.6}  {:>10.4}  {:>8.4} {mark}", r.omega, r.eta, r.output_noise, r.ratio);
    }
    let s = scan.summary();
    println!("peak ratio {:.4}, linewidth {:.3e} s^-1", s.peak_ratio, s.linewidth);
    if let Some((a, b)) = s.nonclassical_band {
        println!("nonclassical for omega in [{a:.3e}, {b:.3e}]");
    }
    Ok(())
}
