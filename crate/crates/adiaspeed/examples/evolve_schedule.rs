//! Evolve the search system under the linear ramp and under the built
//! constant-speed schedule for the same total time, then find how long each
//! schedule needs to reach fidelity 0.75.
//!
//!     cargo run --release --example evolve_schedule

use adiaspeed::evolution::{evolve, fidelity, min_time_for_fidelity, EvolutionConfig};
use adiaspeed::hamiltonians::{grover_effective, GroverParams};
use adiaspeed::projector::ProjectorBackend;
use adiaspeed::scheduler::{build_constant_speed, linear, BuilderConfig};

fn main() -> adiaspeed::Result<()> {
    let n_items = 4096u64;
    let h = grover_effective(GroverParams::new(n_items)?);
    let proto = EvolutionConfig::new(1.0, 10.2, 0)?;

    let built = build_constant_speed(&h, &BuilderConfig::new(ProjectorBackend::Exact), &proto)?
        .schedule;
    let ramp = linear();

    let psi0 = h.at(0.0)?.eig().eigenstate(0);
    let phi = h.at(1.0)?.eig().eigenstate(0);

    println!("N = {n_items}: fidelity after evolving for a fixed time T\n");
    println!("    T      linear    constant-speed");
    for t in [64.0, 256.0, 1024.0, 4096.0] {
        let f_lin = fidelity(&evolve(&h, &ramp, &proto.with_total_time(t), &psi0)?, &phi);
        let f_css = fidelity(&evolve(&h, &built, &proto.with_total_time(t), &psi0)?, &phi);
        println!("  {t:>6.0}   {f_lin:.4}    {f_css:.4}");
    }

    let t_lin = min_time_for_fidelity(&h, &ramp, 0.75, (1.0, 16.0), &proto)?;
    let t_css = min_time_for_fidelity(&h, &built, 0.75, (1.0, 16.0), &proto)?;
    println!("\ntime to reach fidelity 0.75:");
    println!("  linear ramp:     {t_lin:.4e}");
    println!("  constant speed:  {t_css:.4e}");
    println!("  speedup:         {:.0}x", t_lin / t_css);
    Ok(())
}
