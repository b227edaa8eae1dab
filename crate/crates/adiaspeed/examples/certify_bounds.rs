//! Run the error-bound certification suite: random spectra against the
//! filter-width condition and its energy/weight guarantees, a domain sweep
//! of the Lambert branch used to derive the width condition, and seeded
//! repetition tests of the sampled estimator's spread and bias.
//!
//!     cargo run --release --example certify_bounds

use adiaspeed::experiments::certify_bounds;
use adiaspeed::projector::{beta_requirement, energy_error_bound, sample_count};

fn main() -> adiaspeed::Result<()> {
    // What the width condition demands for a typical spectrum: gap 0.1,
    // ground weight 0.6 (r = 1.5).
    let gap = 0.1;
    let r = 1.5;
    let beta = beta_requirement(gap, r)?;
    println!("width condition at gap = {gap}, weight ratio r = {r}:");
    println!("  required beta = {beta:.3}  (beta * gap = {:.3})", beta * gap);
    println!(
        "  guaranteed peak-energy error <= {:.3e}",
        energy_error_bound(beta, gap, r)?
    );
    println!(
        "  samples for 1% ratio error at 5% allowed drop: {}",
        sample_count(0.01, 0.05)?
    );

    let report = certify_bounds(200, 42)?;
    println!("\ncertification over {} random spectra:", report.trials);
    println!(
        "  peak-energy error within bound: {}/{}",
        report.energy_bound_passes, report.trials
    );
    println!(
        "  peak weight inside certified window: {}/{}",
        report.norm_window_passes, report.trials
    );
    println!(
        "  Lambert branch worst relative defect: {:.2e}",
        report.lambert_max_relative_residual
    );
    println!(
        "  sampled ratio spread over {} repetitions: {:.3e} (bound {:.3e})",
        report.mc_repetitions, report.mc_ratio_std, report.mc_ratio_bound
    );
    println!(
        "  estimator bias over {} seeds: {:.2} standard errors",
        report.mc_unbiasedness_seeds, report.mc_unbiasedness_sigma
    );
    println!(
        "\nall bounds certified: {}",
        if report.all_pass() { "yes" } else { "NO" }
    );
    Ok(())
}
