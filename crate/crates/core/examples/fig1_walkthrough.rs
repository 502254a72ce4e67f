//! Denoising inside a single lifting step on a 4×4 image.
//!
//! The 3×3 window of G around (1, 1) sums to 720, so with w = 1 the denoised
//! G there is 80 and dDb = 80 − 75 = 5. The inverse recomputes the same
//! denoised G from the untouched G plane and restores B = 75.

use rdls::denoise::denoise_plane;
use rdls::transforms::{rdls_rdgdb_forward, rdls_rdgdb_inverse};
use rdls::{ColorImage, FilterSpec};

fn main() -> rdls::Result<()> {
    let g = [
        70, 75, 80, 90, 85, 80, 90, 95, 60, 100, 80, 85, 70, 75, 80, 90,
    ];
    let img = ColorImage::from_rgb_fn(4, 4, |x, y| {
        [120, g[y * 4 + x], if (x, y) == (1, 1) { 75 } else { 70 }]
    })?;

    let w1 = FilterSpec::new(1)?;
    let window: i32 = (0..3)
        .flat_map(|y| (0..3).map(move |x| (x, y)))
        .map(|(x, y)| img.plane(1).get(x, y))
        .sum();
    let gd = denoise_plane(img.plane(1), w1);
    println!("G window sum at (1,1): {window}");
    println!("denoised G at (1,1):   {}", gd.get(1, 1));

    let t = rdls_rdgdb_forward(&img, w1, w1)?;
    println!("roles after forward:   {:?}", t.roles());
    println!("dDb at (1,1):          {}", t.plane(2).get(1, 1));

    let back = rdls_rdgdb_inverse(&t, w1, w1)?;
    println!("B restored at (1,1):   {}", back.plane(2).get(1, 1));
    assert_eq!(back, img);
    Ok(())
}
