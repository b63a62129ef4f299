//! How hard the occupancy estimate leans on the detection probability.
//!
//! Holding the observed fraction of detected sites fixed, each assumed
//! per-occasion detection probability implies one occupancy. The sweep
//! exposes the danger zone: where the curve is steep, a small error in `p`
//! moves the occupancy a lot, and where it exceeds 1 the assumed `p` is
//! too small to explain the data at all.
//!
//! ```text
//! cargo run --example sensitivity
//! ```

use occupancy::{sensitivity_profile, SuffStats};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 77 sites, 3 occasions, 45 never-detected sites
    let stats = SuffStats::new(77, 3, 45, 57, None)?;
    let profile = sensitivity_profile(&stats, 19)?;

    println!(
        "detected fraction O/S = {}/{} = {:.4} (the perfect-detection floor)",
        stats.detected(),
        stats.sites(),
        profile.floor()
    );
    println!();
    println!("assumed p   implied psi   sensitivity");
    for pt in &profile.points {
        let note = if pt.psi_bar > 1.0 { "   impossible" } else { "" };
        println!(
            "   {:.2}      {:8.3}      {:8.3}{note}",
            pt.p, pt.psi_bar, pt.derivative
        );
    }
    println!();
    println!("sensitivity = floor x |d ln psi-bar / dp|: how fast the implied");
    println!("occupancy falls, per unit of assumed detectability");
    Ok(())
}
