//! Per-slot transform selection by minimal estimator value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::descriptor::{SlotChoice, TransformDescriptor};
use crate::error::{Error, Result};
use crate::estimate::{
    estimate_options_with, EstimateOptions, EstimateReport, OptionEstimate, Slot, SlotReport,
};
use crate::plane::ColorImage;
use crate::transforms;

/// Quantity minimized by the selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Entropy of the component itself.
    H0,
    /// Entropy of the AVG residual.
    H0Avg,
    /// Entropy of the MED residual.
    H0Med,
    /// Bitrate of the internal coder.
    Codec,
}

impl Metric {
    pub fn value(self, e: &OptionEstimate) -> Option<f64> {
        match self {
            Metric::H0 => Some(e.h0),
            Metric::H0Avg => Some(e.h0_avg),
            Metric::H0Med => Some(e.h0_med),
            Metric::Codec => e.codec_bpp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::H0 => "h0",
            Metric::H0Avg => "avg",
            Metric::H0Med => "med",
            Metric::Codec => "codec",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h0" => Ok(Metric::H0),
            "avg" => Ok(Metric::H0Avg),
            "med" => Ok(Metric::H0Med),
            "codec" => Ok(Metric::Codec),
            _ => Err(Error::InvalidArgument(format!(
                "unknown metric {s:?}, expected h0, avg, med or codec"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedOption {
    pub option: SlotChoice,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSelection {
    pub slot: Slot,
    pub choice: SlotChoice,
    /// Estimator value of the chosen option, in bits per pixel.
    pub value: f64,
    /// Every option, best first.
    pub ranked: Vec<RankedOption>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub metric: Metric,
    pub dg: SlotSelection,
    pub db: SlotSelection,
}

impl Selection {
    pub fn descriptor(&self) -> TransformDescriptor {
        TransformDescriptor::Differences {
            dg: self.dg.choice,
            db: self.db.choice,
        }
    }

    /// Sum of the two chosen estimator values.
    pub fn total(&self) -> f64 {
        self.dg.value + self.db.value
    }
}

/// Lower value first; equal values fall back to the complexity rank.
fn rank_order(a: &RankedOption, b: &RankedOption) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.option.complexity_rank().cmp(&b.option.complexity_rank()))
}

fn select_slot(report: &SlotReport, metric: Metric) -> Result<SlotSelection> {
    let mut ranked = report
        .options
        .iter()
        .map(|e| {
            metric
                .value(e)
                .map(|value| RankedOption {
                    option: e.option,
                    value,
                })
                .ok_or_else(|| Error::InvalidArgument(format!("report lacks {metric} values")))
        })
        .collect::<Result<Vec<_>>>()?;
    if ranked.is_empty() {
        return Err(Error::InvalidArgument("empty option list".into()));
    }
    ranked.sort_by(rank_order);
    Ok(SlotSelection {
        slot: report.slot,
        choice: ranked[0].option,
        value: ranked[0].value,
        ranked,
    })
}

/// Picks the best option per slot from an existing report.
pub fn select_from_report(report: &EstimateReport, metric: Metric) -> Result<Selection> {
    Ok(Selection {
        metric,
        dg: select_slot(&report.dg, metric)?,
        db: select_slot(&report.db, metric)?,
    })
}

pub fn select_transform(img: &ColorImage, metric: Metric) -> Result<Selection> {
    let opts = EstimateOptions {
        codec: metric == Metric::Codec,
    };
    select_from_report(&estimate_options_with(img, opts)?, metric)
}

/// Applies the chosen per-slot options to an RGB image.
pub fn apply_selection(
    img: &ColorImage,
    sel: &Selection,
) -> Result<(ColorImage, TransformDescriptor)> {
    let desc = sel.descriptor();
    Ok((transforms::forward(img, &desc)?, desc))
}
