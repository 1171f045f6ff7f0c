use std::time::Instant;

use timeopt_core::sweep::{run_sweep, SweepConfig};

fn main() {
    let reaction = std::env::args().any(|a| a == "--reaction");
    let config = if reaction {
        SweepConfig::default_reaction()
    } else {
        SweepConfig::default_diffusion()
    };
    let start = Instant::now();
    let report = run_sweep::<f64>(&config).expect("sweep");
    println!("baseline {:?}", report.baseline);
    for r in &report.records {
        println!(
            "eps {:.5} tau* {:.9} tau_err {:.3e} l2 {:.3e} linf {:.3e} sg {:.3e} res {:.3e} conv {} err {:?}",
            r.epsilon,
            r.tau_star,
            r.tau_err,
            r.ctrl_l2,
            r.ctrl_linf_trunc,
            r.semigroup_dist,
            r.resolvent_dist,
            r.converged,
            r.error
        );
        if let Some(rep) = &r.residuals {
            println!(
                "    {:?}",
                rep.checks
                    .iter()
                    .map(|c| (c.name.as_str(), c.value, c.pass))
                    .collect::<Vec<_>>()
            );
        }
    }
    println!("elapsed {:.1?}", start.elapsed());
}
