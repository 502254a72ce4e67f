//! Forward and inverse transforms on a noisy synthetic scene, including a
//! trip through the planar file format.

use rdls::imageio::{decode_planar, encode_planar};
use rdls::transforms::{forward, inverse};
use rdls::{synth, FilterSpec, TransformDescriptor};

fn main() -> rdls::Result<()> {
    let img = synth::noisy_scene(96, 64, 11, 12.0)?;
    let w = |n| FilterSpec::new(n);
    let descriptors = [
        TransformDescriptor::identity(),
        TransformDescriptor::rdgdb(),
        TransformDescriptor::rct(),
        TransformDescriptor::rdls_rdgdb(w(2)?, w(1)?),
        TransformDescriptor::rdls_rdgdb(w(1024)?, w(1024)?),
    ];
    for desc in descriptors {
        let t = forward(&img, &desc)?;
        let bytes = encode_planar(&t, &desc)?;
        let (stored, stored_desc) = decode_planar(&bytes)?;
        let back = inverse(&stored, &stored_desc)?;
        println!(
            "{:<34} roles {:?}  planar {} bytes  exact: {}",
            desc.to_string(),
            t.roles(),
            bytes.len(),
            back == img
        );
    }
    Ok(())
}
