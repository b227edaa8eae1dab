//! Reproduce the quadratic-speedup scaling experiment: time-to-fidelity
//! against the minimum gap for the linear ramp versus the built
//! constant-speed schedule, with fitted power laws.
//!
//! The built schedule restores the optimal 1/gap scaling; charging the
//! measurement pulses on top (total column) keeps the same exponent.
//!
//!     cargo run --release --example grover_scaling

use adiaspeed::experiments::{
    grover_sweep, sweep_fits, BackendKind, BackendSpec, ScheduleKind, SweepSettings,
};

fn main() -> adiaspeed::Result<()> {
    // Width beta = 2/gap per system; pulses cost 2 beta = 4/gap each.
    let settings = SweepSettings::new(BackendSpec::with_kind(BackendKind::Gaussian));
    let exponents = [6u32, 8, 10, 12, 14];
    let kinds = [ScheduleKind::Linear, ScheduleKind::Built];

    let records = grover_sweep(&exponents, &kinds, &settings)?;

    println!("family           N      schedule   gap       T          T_p      T_tot");
    for r in &records {
        println!(
            "{:<15} {:>6}  {:<8} {:>8.5}  {:>9.3e}  {:>7.1}  {:>9.3e}",
            r.family, r.parameter as u64, r.schedule, r.delta, r.t, r.t_p, r.t_tot
        );
    }

    let fits = sweep_fits(&records)?;
    println!("\nfitted T ~ gap^slope:");
    for (label, fit) in &fits {
        println!(
            "  {label:<13} slope {:+.3}  (r^2 = {:.5})",
            fit.slope, fit.r_squared
        );
    }

    let largest = records
        .iter()
        .filter(|r| r.parameter == (1u64 << 14) as f64)
        .collect::<Vec<_>>();
    let t_lin = largest.iter().find(|r| r.schedule == "linear").unwrap().t;
    let t_css = largest.iter().find(|r| r.schedule == "built").unwrap().t;
    println!(
        "\nat N = 2^14 the constant-speed schedule is {:.0}x faster ({:.3e} vs {:.3e})",
        t_lin / t_css,
        t_css,
        t_lin
    );
    Ok(())
}
