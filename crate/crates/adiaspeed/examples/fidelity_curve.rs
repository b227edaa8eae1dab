//! Fidelity as a function of total evolution time for the linear ramp and
//! the built constant-speed schedule at N = 2^14, locating where each curve
//! crosses 0.75.
//!
//!     cargo run --release --example fidelity_curve

use adiaspeed::evolution::EvolutionConfig;
use adiaspeed::experiments::fidelity_curve;
use adiaspeed::hamiltonians::{grover_effective, GroverParams};
use adiaspeed::projector::ProjectorBackend;
use adiaspeed::scheduler::{build_constant_speed, linear, BuilderConfig, Schedule};

fn crossing(curve: &[(f64, f64)], level: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((t0, f0), (t1, f1)) = (w[0], w[1]);
        if f0 < level && f1 >= level {
            // log-linear interpolation between the bracketing samples
            let x = (level - f0) / (f1 - f0);
            Some(t0 * (t1 / t0).powf(x))
        } else {
            None
        }
    })
}

fn main() -> adiaspeed::Result<()> {
    let h = grover_effective(GroverParams::new(1 << 14)?);
    let proto = EvolutionConfig::new(1.0, 10.2, 0)?;
    let built = build_constant_speed(&h, &BuilderConfig::new(ProjectorBackend::Exact), &proto)?
        .schedule;

    // Log-spaced times covering both crossings (the linear ramp needs
    // roughly the square of what the constant-speed schedule needs).
    let times: Vec<f64> = (0..25)
        .map(|k| 16.0 * 2f64.powf(k as f64 * 0.5))
        .collect();

    let run = |sched: &Schedule| fidelity_curve(&h, sched, &times, &proto);
    let ramp_curve = run(&linear())?;
    let css_curve = run(&built)?;

    println!("      T      linear    constant-speed");
    for (a, b) in ramp_curve.iter().zip(&css_curve) {
        println!("  {:>9.1}   {:.4}    {:.4}", a.0, a.1, b.1);
    }

    let t_css = crossing(&css_curve, 0.75).expect("curve spans the crossing");
    let t_lin = crossing(&ramp_curve, 0.75).expect("curve spans the crossing");
    println!("\nfidelity 0.75 crossing:");
    println!("  constant speed: T = {t_css:.3e}");
    println!("  linear ramp:    T = {t_lin:.3e}");
    println!("  ratio: {:.0}", t_lin / t_css);
    Ok(())
}
