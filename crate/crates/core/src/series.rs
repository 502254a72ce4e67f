//! Noise sweeps: per-component internal-codec bitrates as a function of the
//! noise level.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::measure_bitrate;
use crate::descriptor::SlotChoice;
use crate::error::{Error, Result};
use crate::estimate::slot_candidates;
use crate::imageio::add_awgn;
use crate::plane::{ColorImage, RGB_ROLES};

pub const DEFAULT_SIGMAS: [f64; 6] = [0.0, 5.0, 10.0, 20.0, 40.0, 80.0];

/// Bitrates in bits per pixel at one noise level. `w_dg` and `w_db` are the
/// filter weights giving the lowest dDg and dDb bitrates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub sigma: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Dg")]
    pub dg: f64,
    #[serde(rename = "Db")]
    pub db: f64,
    #[serde(rename = "dDg")]
    pub ddg: f64,
    pub w_dg: u32,
    #[serde(rename = "dDb")]
    pub ddb: f64,
    pub w_db: u32,
}

/// Lowest-bitrate denoised option: (bpp, weight). Ties go to the larger weight.
fn best_denoised(candidates: &[(SlotChoice, f64)]) -> (f64, u32) {
    candidates
        .iter()
        .filter_map(|&(c, bpp)| c.filter().map(|f| (bpp, f.center_weight())))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
        .expect("denoised options present")
}

fn measure_row(img: &ColorImage, sigma: f64) -> SeriesRow {
    let [r, g, b] = img.planes();
    let rate = |cands: Vec<(SlotChoice, crate::plane::Plane)>| -> Vec<(SlotChoice, f64)> {
        cands
            .into_par_iter()
            .map(|(c, p)| (c, measure_bitrate(&p)))
            .collect()
    };
    let dg_slot = rate(slot_candidates(r, g));
    let db_slot = rate(slot_candidates(g, b));
    let of = |slot: &[(SlotChoice, f64)], c: SlotChoice| slot.iter().find(|o| o.0 == c).unwrap().1;
    let (ddg, w_dg) = best_denoised(&dg_slot);
    let (ddb, w_db) = best_denoised(&db_slot);
    SeriesRow {
        sigma,
        r: measure_bitrate(r),
        g: of(&dg_slot, SlotChoice::Untransformed),
        b: of(&db_slot, SlotChoice::Untransformed),
        dg: of(&dg_slot, SlotChoice::Difference),
        db: of(&db_slot, SlotChoice::Difference),
        ddg,
        w_dg,
        ddb,
        w_db,
    }
}

/// Adds noise of each `sigma` to all components of `clean` (seeded with
/// `seed`) and measures every component.
pub fn noise_series(clean: &ColorImage, sigmas: &[f64], seed: u64) -> Result<Vec<SeriesRow>> {
    clean.expect_roles(RGB_ROLES)?;
    sigmas
        .iter()
        .map(|&sigma| {
            let noisy = add_awgn(clean, [sigma; 3], seed)?;
            Ok(measure_row(&noisy, sigma))
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SeriesRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::InvalidArgument(format!("CSV output: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn csv_shape() {
        let img = synth::scene(32, 32, 1).unwrap();
        let rows = noise_series(&img, &[0.0, 20.0], 3).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sigma,R,G,B,Dg,Db,dDg,w_dg,dDb,w_db");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.0,"));
        assert!(rows[1].g > rows[0].g);
    }

    #[test]
    fn best_denoised_prefers_larger_weight_on_ties() {
        let f = |w| SlotChoice::Denoised(crate::denoise::FilterSpec::new(w).unwrap());
        let cands = [
            (SlotChoice::Difference, 0.5),
            (f(1), 1.0),
            (f(4), 1.0),
            (f(2), 2.0),
        ];
        assert_eq!(best_denoised(&cands), (1.0, 4));
    }
}
