//! Geometry of the ground-state path: arc length against closed forms, the
//! constant-speed property of the optimal schedule, the curvature identity
//! relating projector acceleration to (vdot, kappa, v), and the two
//! independent evaluations of the schedule-quality functional.
//!
//!     cargo run --release --example path_geometry

use adiaspeed::eigenpath::{
    c_functional, curvature_and_qpp, path_length, schedule_s_grid, speed_profile,
    track_eigenstate, uniform_s_grid,
};
use adiaspeed::hamiltonians::{grover_effective, GroverParams};
use adiaspeed::scheduler::{grover_optimal, linear};

fn main() -> adiaspeed::Result<()> {
    // Arc length of the eigenstate curve: for the search family it has the
    // closed form arctan-difference/2, approached as the grid refines.
    println!("path length vs closed form:");
    for (n_items, grid) in [(64u64, 4001usize), (1024, 16001)] {
        let params = GroverParams::new(n_items)?;
        let h = grover_effective(params);
        let table = track_eigenstate(&h, &uniform_s_grid(grid), 0)?;
        let l = path_length(&table);
        let angle = |s: f64| {
            let (vz, vx) = params.bloch_components(s);
            vx.atan2(vz)
        };
        let exact = 0.5 * (angle(0.0) - angle(1.0));
        println!("  N = {n_items:>5}: L = {l:.9}  (closed form {exact:.9})");
    }

    let n_items = 1024u64;
    let h = grover_effective(GroverParams::new(n_items)?);
    let sched = grover_optimal(n_items)?;
    let m = 4001;
    let table = track_eigenstate(&h, &schedule_s_grid(&sched, m), 0)?;

    // Under the optimal schedule the path is traversed at constant speed.
    let tau: Vec<f64> = (0..m).map(|k| k as f64 / (m - 1) as f64).collect();
    let v = speed_profile(&sched, &table, &tau)?;
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let sd =
        (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64).sqrt();
    println!("\nspeed along the optimal schedule:");
    println!("  mean {mean:.6e}, relative std {:.2e}", sd / mean);

    // Projector-acceleration identity at a few interior samples: the direct
    // operator norm equals sqrt(vdot^2 + kappa^2 v^4). Checked on the
    // linear ramp, where the speed actually varies (under the optimal
    // schedule both terms vanish and the identity is trivial).
    let ramp = linear();
    let ramp_table = track_eigenstate(&h, &schedule_s_grid(&ramp, m), 0)?;
    println!("\nacceleration identity |Q d2/dtau2 Phi| vs sqrt(vdot^2 + kappa^2 v^4):");
    // (skipping tau = 0.5, where vdot crosses zero and both sides vanish)
    for k in [m / 5, 2 * m / 5, 4 * m / 5] {
        let (_kappa, direct, geometric) = curvature_and_qpp(&ramp_table, k, &ramp)?;
        println!(
            "  tau = {:.2}: direct {direct:.6e}, geometric {geometric:.6e}, rel diff {:.1e}",
            k as f64 / (m - 1) as f64,
            (direct / geometric - 1.0).abs()
        );
    }

    // The schedule-quality functional, evaluated from geometric quantities
    // and re-derived from finite-differenced projectors.
    println!("\nschedule-quality functional (geometric vs projector forms):");
    for (label, sched) in [("linear", linear()), ("optimal", grover_optimal(n_items)?)] {
        let table = track_eigenstate(&h, &schedule_s_grid(&sched, 2001), 0)?;
        let c = c_functional(&sched, &table, &h)?;
        println!(
            "  {label:<8} C = {:.4e}  (projector form {:.4e}, rel diff {:.1e})",
            c.c_geometric,
            c.c_projector,
            (c.c_geometric / c.c_projector - 1.0).abs()
        );
    }
    Ok(())
}
