//! How the center weight trades smoothing against fidelity: mean squared
//! error of the denoised noisy G plane against the clean one, for every w.

use rdls::denoise::denoise_plane_all_weights;
use rdls::{synth, FilterSpec, Plane};

fn mse(a: &Plane, b: &Plane) -> f64 {
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| ((x - y) as f64).powi(2))
        .sum();
    sum / a.len() as f64
}

fn main() -> rdls::Result<()> {
    let clean = synth::scene(128, 128, 4)?;
    let noisy = synth::noisy_scene(128, 128, 4, 20.0)?;
    println!(
        "noisy G vs clean: mse {:.1}",
        mse(noisy.plane(1), clean.plane(1))
    );
    for (f, d) in FilterSpec::all().zip(denoise_plane_all_weights(noisy.plane(1))) {
        println!("{:>7}: mse {:.1}", f.to_string(), mse(&d, clean.plane(1)));
    }
    Ok(())
}
