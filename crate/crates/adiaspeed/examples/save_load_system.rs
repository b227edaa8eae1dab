//! Persist an interpolated Hamiltonian to its text format, load it back,
//! and verify the round trip by rebuilding the same schedule from the
//! loaded copy.
//!
//!     cargo run --release --example save_load_system

use adiaspeed::evolution::EvolutionConfig;
use adiaspeed::hamiltonians::{grover_full, load, save};
use adiaspeed::projector::ProjectorBackend;
use adiaspeed::scheduler::{build_constant_speed, BuilderConfig};

fn main() -> adiaspeed::Result<()> {
    let h = grover_full(4, 3)?; // 16 states, marked item 3
    let dir = std::env::temp_dir().join("adiaspeed-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("grover4.txt");

    save(&h, &path)?;
    println!("saved {}-dimensional system to {}", h.dim(), path.display());
    let text = std::fs::read_to_string(&path)?;
    println!(
        "file is {} lines; header: {:?}",
        text.lines().count(),
        text.lines().next().unwrap_or_default()
    );

    let back = load(&path)?;
    let proto = EvolutionConfig::new(1.0, 10.2, 0)?;
    let cfg = BuilderConfig::new(ProjectorBackend::Exact);
    let a = build_constant_speed(&h, &cfg, &proto)?;
    let b = build_constant_speed(&back, &cfg, &proto)?;

    println!(
        "schedule from original: {} segments, T = {:.6e}",
        a.cost.segments, a.cost.total_time
    );
    println!(
        "schedule from loaded:   {} segments, T = {:.6e}",
        b.cost.segments, b.cost.total_time
    );
    println!(
        "round trip reproduces the build exactly: {}",
        a.cost.total_time == b.cost.total_time && a.cost.segments == b.cost.segments
    );
    Ok(())
}
