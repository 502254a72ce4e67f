//! End-to-end bitrates with the internal coder: each transform is applied,
//! the three planes are coded, and the result is decoded and checked.

use rdls::container::{compress, decompress};
use rdls::select::{select_transform, Metric};
use rdls::{synth, TransformDescriptor};

fn main() -> rdls::Result<()> {
    for sigma in [0.0, 10.0, 40.0] {
        let img = synth::noisy_scene(256, 192, 21, sigma)?;
        let n = img.pixel_count();
        let auto = select_transform(&img, Metric::H0Med)?.descriptor();
        println!("sigma {sigma}");
        for desc in [
            TransformDescriptor::identity(),
            TransformDescriptor::rdgdb(),
            TransformDescriptor::rct(),
            auto,
        ] {
            let c = compress(&img, &desc)?;
            let (back, _) = decompress(&c.bytes)?;
            assert_eq!(back, img);
            println!("  {:<44} {:.4} bpp", desc.to_string(), c.total_bpp(n));
        }
    }
    Ok(())
}
