//! Entropy table for both chrominance slots of a noisy scene: H0 of the
//! component and of its AVG and MED residuals, with the change against
//! plain RDgDb.

use rdls::estimate::estimate_options;
use rdls::synth;

fn main() -> rdls::Result<()> {
    let sigma = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20.0);
    let img = synth::noisy_scene(192, 128, 7, sigma)?;
    let report = estimate_options(&img)?;
    for slot in [&report.dg, &report.db] {
        let base = slot.get(rdls::SlotChoice::Difference).unwrap().h0_med;
        println!("{:?} slot, sigma {sigma}", slot.slot);
        println!(
            "  {:<12} {:>7} {:>7} {:>7} {:>8}",
            "option", "H0", "AVG", "MED", "dMED%"
        );
        for e in &slot.options {
            println!(
                "  {:<12} {:>7.3} {:>7.3} {:>7.3} {:>+8.2}",
                e.option.to_string(),
                e.h0,
                e.h0_avg,
                e.h0_med,
                100.0 * (e.h0_med - base) / base
            );
        }
    }
    Ok(())
}
