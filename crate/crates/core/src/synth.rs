//! Deterministic synthetic color scenes.
//!
//! A scene is a smooth, strongly correlated RGB image: a shared luminance
//! field built from value noise at several scales, plus slowly varying color
//! offsets for R and B. Only additions and multiplications of `f64` values are
//! used, so output is identical on every platform for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::imageio::add_awgn;
use crate::plane::ColorImage;

/// Value noise on a square lattice with smoothstep interpolation, values in
/// `[-1, 1]`.
struct ValueNoise {
    cell: usize,
    cols: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(width: usize, height: usize, cell: usize, rng: &mut ChaCha8Rng) -> Self {
        let cols = width / cell + 2;
        let rows = height / cell + 2;
        let lattice = (0..cols * rows)
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        ValueNoise {
            cell,
            cols,
            lattice,
        }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        let (cx, cy) = (x / self.cell, y / self.cell);
        let step = |t: f64| t * t * (3.0 - 2.0 * t);
        let fx = step((x % self.cell) as f64 / self.cell as f64);
        let fy = step((y % self.cell) as f64 / self.cell as f64);
        let v = |i: usize, j: usize| self.lattice[j * self.cols + i];
        let top = v(cx, cy) * (1.0 - fx) + v(cx + 1, cy) * fx;
        let bottom = v(cx, cy + 1) * (1.0 - fx) + v(cx + 1, cy + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

const EDGE: f64 = 35.0;
const MEDIUM: f64 = 30.0;
const FINE: f64 = 28.0;

/// Noise-free scene of the given size.
pub fn scene(width: usize, height: usize, seed: u64) -> Result<ColorImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = ValueNoise::new(width, height, 32, &mut rng);
    let medium = ValueNoise::new(width, height, 8, &mut rng);
    let fine = ValueNoise::new(width, height, 3, &mut rng);
    let regions = ValueNoise::new(width, height, 24, &mut rng);
    let red = ValueNoise::new(width, height, 48, &mut rng);
    let blue = ValueNoise::new(width, height, 40, &mut rng);
    ColorImage::from_rgb_fn(width, height, |x, y| {
        let edge = if regions.at(x, y) > 0.0 { EDGE } else { -EDGE };
        let l =
            128.0 + 45.0 * coarse.at(x, y) + edge + MEDIUM * medium.at(x, y) + FINE * fine.at(x, y);
        let l = l.round().clamp(30.0, 225.0);
        let r = l + 15.0 + 12.0 * red.at(x, y);
        let b = l - 10.0 + 12.0 * blue.at(x, y);
        [to_u8(r), to_u8(l), to_u8(b)]
    })
}

/// Scene plus Gaussian noise of standard deviation `sigma` on every component.
/// The noise stream is derived from `seed`, independently of the scene.
pub fn noisy_scene(width: usize, height: usize, seed: u64, sigma: f64) -> Result<ColorImage> {
    let clean = scene(width, height, seed)?;
    add_awgn(&clean, [sigma; 3], seed ^ 0x9e37_79b9_7f4a_7c15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = scene(40, 30, 1).unwrap();
        assert_eq!(a, scene(40, 30, 1).unwrap());
        assert_ne!(a, scene(40, 30, 2).unwrap());
        assert_eq!(noisy_scene(40, 30, 1, 0.0).unwrap(), a);
        assert_ne!(noisy_scene(40, 30, 1, 5.0).unwrap(), a);
    }

    #[test]
    fn components_are_correlated() {
        let img = scene(64, 64, 3).unwrap();
        let [r, g, b] = img.planes();
        let mean_abs = |p: &[i16], q: &[i16]| {
            p.iter()
                .zip(q)
                .map(|(&a, &b)| (a - b).abs() as f64)
                .sum::<f64>()
                / p.len() as f64
        };
        assert!(mean_abs(r.samples(), g.samples()) < 30.0);
        assert!(mean_abs(g.samples(), b.samples()) < 25.0);
        let spread = g.samples().iter().max().unwrap() - g.samples().iter().min().unwrap();
        assert!(spread > 60);
    }
}
