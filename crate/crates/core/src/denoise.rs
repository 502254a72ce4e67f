//! Weighted 3×3 averaging filter used inside denoising lifting steps.
//!
//! Each output sample is the weighted mean of the in-bounds pixels of the
//! 3×3 window, with weight `w` on the center and 1 on each neighbor, rounded
//! to the nearest integer with ties away from zero. At image edges the window
//! shrinks to the pixels that exist. Everything is integer arithmetic, so the
//! forward and inverse transforms see identical denoised values on any
//! platform.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Number of supported center weights: `1, 2, 4, ..., 1024`.
pub const WEIGHT_COUNT: usize = 11;

/// Denoising filter with a 3×3 window and a power-of-two center weight.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FilterSpec {
    log2_weight: u8,
}

impl FilterSpec {
    pub fn new(center_weight: u32) -> Result<Self> {
        if center_weight.is_power_of_two() && center_weight <= 1024 {
            Ok(FilterSpec {
                log2_weight: center_weight.trailing_zeros() as u8,
            })
        } else {
            Err(Error::InvalidFilterWeight(center_weight))
        }
    }

    /// Filter with center weight `2^k`, `k` in `0..=10`.
    pub fn from_log2(k: u8) -> Result<Self> {
        if (k as usize) < WEIGHT_COUNT {
            Ok(FilterSpec { log2_weight: k })
        } else {
            Err(Error::InvalidFilterWeight(
                1u32.checked_shl(k as u32).unwrap_or(0),
            ))
        }
    }

    pub fn center_weight(self) -> u32 {
        1 << self.log2_weight
    }

    pub fn log2_weight(self) -> u8 {
        self.log2_weight
    }

    /// All eleven filters, strongest (w = 1) first.
    pub fn all() -> impl Iterator<Item = FilterSpec> {
        (0..WEIGHT_COUNT as u8).map(|k| FilterSpec { log2_weight: k })
    }
}

impl fmt::Debug for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FilterSpec(w={})", self.center_weight())
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w={}", self.center_weight())
    }
}

impl TryFrom<u32> for FilterSpec {
    type Error = Error;

    fn try_from(w: u32) -> Result<Self> {
        FilterSpec::new(w)
    }
}

impl From<FilterSpec> for u32 {
    fn from(f: FilterSpec) -> u32 {
        f.center_weight()
    }
}

/// `round(num / den)` with ties away from zero, `den > 0`.
#[inline]
pub(crate) fn round_div(num: i32, den: i32) -> i32 {
    debug_assert!(den > 0);
    if num >= 0 {
        (2 * num + den) / (2 * den)
    } else {
        -((-2 * num + den) / (2 * den))
    }
}

/// Per-pixel sum of the in-bounds neighbors (center excluded) and their count.
struct NeighborSums {
    sums: Vec<i32>,
    counts: Vec<u8>,
}

impl NeighborSums {
    fn compute(p: &Plane) -> Self {
        let (w, h) = (p.width(), p.height());
        let s = p.samples();

        // horizontal 3-sums, center included
        let mut hsum = vec![0i32; w * h];
        for y in 0..h {
            let row = &s[y * w..(y + 1) * w];
            let out = &mut hsum[y * w..(y + 1) * w];
            for x in 0..w {
                let mut acc = row[x] as i32;
                if x > 0 {
                    acc += row[x - 1] as i32;
                }
                if x + 1 < w {
                    acc += row[x + 1] as i32;
                }
                out[x] = acc;
            }
        }

        let span = |i: usize, n: usize| 1 + (i > 0) as u8 + (i + 1 < n) as u8;
        let mut sums = vec![0i32; w * h];
        let mut counts = vec![0u8; w * h];
        for y in 0..h {
            let rows = span(y, h);
            for x in 0..w {
                let i = y * w + x;
                let mut window = hsum[i];
                if y > 0 {
                    window += hsum[i - w];
                }
                if y + 1 < h {
                    window += hsum[i + w];
                }
                sums[i] = window - s[i] as i32;
                counts[i] = rows * span(x, w) - 1;
            }
        }
        NeighborSums { sums, counts }
    }

    fn filter(&self, p: &Plane, f: FilterSpec) -> Plane {
        let k = f.log2_weight as u32;
        let samples = p
            .samples()
            .iter()
            .zip(&self.sums)
            .zip(&self.counts)
            .map(|((&c, &s), &n)| round_div(((c as i32) << k) + s, (1 << k) + n as i32) as i16)
            .collect();
        Plane::from_parts_unchecked(p.width(), p.height(), p.min_value(), p.max_value(), samples)
    }
}

/// Denoises `p` with the weighted 3×3 mean. The output keeps the input's
/// dimensions and bounds.
pub fn denoise_plane(p: &Plane, f: FilterSpec) -> Plane {
    NeighborSums::compute(p).filter(p, f)
}

/// Denoised planes for every center weight `1, 2, ..., 1024`, in that order.
///
/// The neighbor sums are computed once and shared, so each additional weight
/// costs a shift, two additions and a division per pixel.
pub fn denoise_plane_all_weights(p: &Plane) -> Vec<Plane> {
    let sums = NeighborSums::compute(p);
    FilterSpec::all().map(|f| sums.filter(p, f)).collect()
}
