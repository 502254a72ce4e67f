//! Per-slot selection at increasing noise levels, with each metric.

use rdls::select::{apply_selection, select_transform, Metric};
use rdls::synth;
use rdls::transforms::inverse;

fn main() -> rdls::Result<()> {
    for sigma in [0.0, 5.0, 20.0, 80.0] {
        let img = synth::noisy_scene(128, 128, 3, sigma)?;
        for metric in [Metric::H0, Metric::H0Avg, Metric::H0Med, Metric::Codec] {
            let sel = select_transform(&img, metric)?;
            let (t, desc) = apply_selection(&img, &sel)?;
            assert_eq!(inverse(&t, &desc)?, img);
            println!(
                "sigma {sigma:>4}  {metric:<5}  Dg slot {:<12} ({:.3})  Db slot {:<12} ({:.3})",
                sel.dg.choice.to_string(),
                sel.dg.value,
                sel.db.choice.to_string(),
                sel.db.value
            );
        }
    }
    Ok(())
}
