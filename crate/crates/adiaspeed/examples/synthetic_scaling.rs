//! Scaling study on the avoided-crossing family: measured time-to-fidelity
//! slopes for the linear and constant-speed schedules, plus the cheap
//! matrix-element time estimate evaluated on both schedules — the estimate
//! reproduces the same exponent contrast without running any dynamics.
//!
//!     cargo run --release --example synthetic_scaling

use adiaspeed::eigenpath::{asp_time_estimate, schedule_s_grid, track_eigenstate};
use adiaspeed::evolution::EvolutionConfig;
use adiaspeed::experiments::{
    fit_power_law, synthetic_sweep, sweep_fits, BackendSpec, ScheduleKind, SweepSettings,
};
use adiaspeed::hamiltonians::landau_zener;
use adiaspeed::projector::ProjectorBackend;
use adiaspeed::scheduler::{build_constant_speed, linear, BuilderConfig};

fn main() -> adiaspeed::Result<()> {
    let deltas = [0.2, 0.1, 0.05, 0.025];
    let settings = SweepSettings::new(BackendSpec::exact());

    let records = synthetic_sweep(
        &deltas,
        &[ScheduleKind::Linear, ScheduleKind::Built],
        &settings,
    )?;
    println!("half-gap   schedule   gap      T");
    for r in &records {
        println!(
            "{:>8}   {:<8} {:>6.3}  {:>9.3e}",
            r.parameter, r.schedule, r.delta, r.t
        );
    }
    let fits = sweep_fits(&records)?;
    println!("\nmeasured slopes:");
    println!("  linear ramp:     {:+.3}", fits["linear"].slope);
    println!("  constant speed:  {:+.3}", fits["built"].slope);

    // The diagnostic: max over the path of |<ground| dH/dt |excited>| / gap^2.
    // It needs only the eigenstate path, not a single Schrödinger solve.
    let proto = EvolutionConfig::new(1.0, 10.2, 0)?;
    let mut est_linear = Vec::new();
    let mut est_built = Vec::new();
    for &d in &deltas {
        let h = landau_zener(d)?;
        let gap = 2.0 * d;
        for (sched, sink) in [
            (linear(), &mut est_linear),
            (
                build_constant_speed(&h, &BuilderConfig::new(ProjectorBackend::Exact), &proto)?
                    .schedule,
                &mut est_built,
            ),
        ] {
            let table = track_eigenstate(&h, &schedule_s_grid(&sched, 2001), 0)?;
            sink.push((gap, asp_time_estimate(&table, &h, &sched)?));
        }
    }
    let fit_lin = fit_power_law(&est_linear)?;
    let fit_css = fit_power_law(&est_built)?;
    println!("\ntime-estimate slopes (no dynamics involved):");
    println!("  linear ramp:     {:+.3}", fit_lin.slope);
    println!("  constant speed:  {:+.3}", fit_css.slope);
    println!(
        "\nexponent contrast: measured {:+.3}, estimated {:+.3}",
        fits["linear"].slope - fits["built"].slope,
        fit_lin.slope - fit_css.slope
    );
    Ok(())
}
