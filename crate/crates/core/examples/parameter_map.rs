//! Coarse quantum/classical map over mechanical frequency and quality factor.

use git_channel::criteria::{Classification, GridSpec};
use git_channel::model::DeviceGeometry;
use git_channel::sweep::{figure_grid, FigureId};

fn main() -> git_channel::Result<()> {
    let spec = GridSpec { n_omega: 56, n_q: 20, ..GridSpec::default() };
    let grid = figure_grid(FigureId::Fig2, &DeviceGeometry::gold_reference(), &spec, 4)?;
    let qs = spec.q_axis();
    println!("rows: log10 Q from {:.0} down to {:.0}; columns: omega_B from 1e-3 to 1e11", qs[qs.len() - 1].log10(), qs[0].log10());
    for qi in (0..spec.n_q).rev() {
        let line: String = (0..spec.n_omega)
            .map(|wi| match grid.points[wi * spec.n_q + qi].classification {
                Classification::Quantum => '#',
                Classification::Classical => '.',
            })
            .collect();
        println!("{:>5.1} {line}", qs[qi].log10());
    }
    let quantum = grid.points.iter().filter(|p| p.classification == Classification::Quantum).count();
    println!("{quantum} of {} cells quantum", grid.points.len());
    Ok(())
}
