//! Dataset preparation: build an RGGB mosaic from a scene, convert it to
//! half-size RGB, reduce it 3× and add noise. Files go to a temporary
//! directory (or the directory given as the first argument).

use std::path::PathBuf;

use rdls::imageio::{add_awgn, bayer_rggb_to_rgb, read_ppm, reduce3x, write_pgm, write_ppm};
use rdls::{synth, Plane};

fn main() -> rdls::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("rdls-dataset-prep"));
    std::fs::create_dir_all(&dir)?;

    let scene = synth::scene(240, 180, 9)?;
    let mosaic = Plane::from_fn(240, 180, 0, 255, |x, y| {
        let c = match (x % 2, y % 2) {
            (0, 0) => 0,
            (1, 1) => 2,
            _ => 1,
        };
        scene.plane(c).get(x, y)
    })?;
    write_pgm(&mosaic, dir.join("mosaic.pgm"))?;

    let rgb = bayer_rggb_to_rgb(&mosaic)?;
    let small = reduce3x(&rgb)?;
    let noisy = add_awgn(&small, [8.0, 6.0, 10.0], 42)?;
    write_ppm(&noisy, dir.join("noisy.ppm"))?;
    assert_eq!(read_ppm(dir.join("noisy.ppm"))?, noisy);

    println!("mosaic   {}x{}", mosaic.width(), mosaic.height());
    println!("bayer    {}x{}", rgb.width(), rgb.height());
    println!("reduced  {}x{}", small.width(), small.height());
    println!("written  {}", dir.display());
    Ok(())
}
