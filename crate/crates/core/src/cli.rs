//! The `rdls` command-line tool.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::container;
use crate::denoise::FilterSpec;
use crate::descriptor::{SlotChoice, TransformDescriptor};
use crate::error::{Error, Result};
use crate::estimate::{
    entropy_h0, estimate_options_with, EstimateOptions, EstimateReport, SlotReport,
};
use crate::imageio;
use crate::plane::ColorImage;
use crate::select::{self, Metric, Selection};
use crate::series;
use crate::synth;
use crate::transforms;

/// Identifies the estimate report layout; bumped on any incompatible change.
pub const ESTIMATE_SCHEMA: &str = "rdls-estimate/1";
pub const SELECT_SCHEMA: &str = "rdls-select/1";

#[derive(Debug, Parser)]
#[command(
    name = "rdls",
    version,
    about = "Reversible denoising and lifting color transforms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a color transform to a PPM and write a planar file.
    Transform(TransformArgs),
    /// Invert a planar file back to PPM.
    Inverse { input: PathBuf, output: PathBuf },
    /// Entropy report for every option of both chrominance slots.
    Estimate(EstimateArgs),
    /// Choose the best option per slot.
    Select(SelectArgs),
    /// Transform and code a PPM with the internal coder.
    Compress(CompressArgs),
    /// Decode a compressed file back to PPM.
    Decompress { input: PathBuf, output: PathBuf },
    /// Add seeded Gaussian noise to a PPM.
    Noise(NoiseArgs),
    /// Convert an RGGB Bayer mosaic (PGM) to a half-size PPM.
    Bayer { input: PathBuf, output: PathBuf },
    /// Average 3×3 blocks of a PPM.
    Reduce3x { input: PathBuf, output: PathBuf },
    /// Bitrates of every component over a sweep of noise levels, as CSV.
    Series(SeriesArgs),
    /// Write a deterministic synthetic scene as PPM.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformName {
    Rdgdb,
    Rct,
    RdlsRdgdb,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// Center weight of the filter on R in the Dg step.
    #[arg(long)]
    pub w_dg: Option<u32>,
    /// Center weight of the filter on G in the Db step.
    #[arg(long)]
    pub w_db: Option<u32>,
}

impl WeightArgs {
    fn rdls(&self) -> Result<TransformDescriptor> {
        match (self.w_dg, self.w_db) {
            (Some(dg), Some(db)) => Ok(TransformDescriptor::rdls_rdgdb(
                FilterSpec::new(db)?,
                FilterSpec::new(dg)?,
            )),
            _ => Err(Error::InvalidArgument(
                "rdls-rdgdb requires both --w-dg and --w-db".into(),
            )),
        }
    }

    fn reject(&self, transform: &str) -> Result<()> {
        if self.w_dg.is_some() || self.w_db.is_some() {
            return Err(Error::InvalidArgument(format!(
                "--w-dg and --w-db only apply to rdls-rdgdb, not {transform}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub transform: TransformName,
    #[command(flatten)]
    pub weights: WeightArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    pub input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also measure internal-codec bitrates.
    #[arg(long)]
    pub codec: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    H0,
    Avg,
    Med,
    Codec,
}

impl From<MetricName> for Metric {
    fn from(m: MetricName) -> Metric {
        match m {
            MetricName::H0 => Metric::H0,
            MetricName::Avg => Metric::H0Avg,
            MetricName::Med => Metric::H0Med,
            MetricName::Codec => Metric::Codec,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "med")]
    pub metric: MetricName,
    /// Write the selected transform as a planar file.
    #[arg(long)]
    pub apply: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompressTransform {
    Auto,
    None,
    Rdgdb,
    Rct,
    RdlsRdgdb,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub transform: CompressTransform,
    /// Metric used by `auto`.
    #[arg(long, value_enum, default_value = "med")]
    pub metric: MetricName,
    #[command(flatten)]
    pub weights: WeightArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Standard deviation for all three components.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long)]
    pub sigma_r: Option<f64>,
    #[arg(long)]
    pub sigma_g: Option<f64>,
    #[arg(long)]
    pub sigma_b: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long, default_value_t = 1)]
    pub scene_seed: u64,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Noise-free PPM; a synthetic scene is used when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[arg(long, value_delimiter = ',', default_values_t = series::DEFAULT_SIGMAS)]
    pub sigmas: Vec<f64>,
    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub output: PathBuf,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
}

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub width: usize,
    pub height: usize,
}

impl InputInfo {
    fn new(path: &Path, img: &ColorImage) -> Self {
        InputInfo {
            path: path.display().to_string(),
            width: img.width(),
            height: img.height(),
        }
    }
}

/// One option of one slot with percent changes against the RDgDb option of
/// the same slot. Negative deltas are reductions; they are null when the
/// baseline is zero.
#[derive(Debug, Serialize)]
pub struct OptionRow {
    pub option: SlotChoice,
    pub label: String,
    pub h0: f64,
    pub h0_avg: f64,
    pub h0_med: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codec_bpp: Option<f64>,
    pub delta_h0_pct: Option<f64>,
    pub delta_h0_avg_pct: Option<f64>,
    pub delta_h0_med_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_codec_pct: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SlotRows {
    pub dg: Vec<OptionRow>,
    pub db: Vec<OptionRow>,
}

#[derive(Debug, Serialize)]
pub struct EstimateDocument {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input: InputInfo,
    pub slots: SlotRows,
}

/// `100·(new − base)/base`, absent for a zero baseline.
pub fn percent_delta(new: f64, base: f64) -> Option<f64> {
    (base != 0.0).then(|| 100.0 * (new - base) / base)
}

fn slot_rows(report: &SlotReport) -> Vec<OptionRow> {
    let base = report
        .get(SlotChoice::Difference)
        .expect("RDgDb option present");
    report
        .options
        .iter()
        .map(|e| OptionRow {
            option: e.option,
            label: e.option.to_string(),
            h0: e.h0,
            h0_avg: e.h0_avg,
            h0_med: e.h0_med,
            codec_bpp: e.codec_bpp,
            delta_h0_pct: percent_delta(e.h0, base.h0),
            delta_h0_avg_pct: percent_delta(e.h0_avg, base.h0_avg),
            delta_h0_med_pct: percent_delta(e.h0_med, base.h0_med),
            delta_codec_pct: e
                .codec_bpp
                .zip(base.codec_bpp)
                .and_then(|(n, b)| percent_delta(n, b)),
        })
        .collect()
}

pub fn estimate_document(
    path: &Path,
    img: &ColorImage,
    report: &EstimateReport,
) -> EstimateDocument {
    EstimateDocument {
        schema: ESTIMATE_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        input: InputInfo::new(path, img),
        slots: SlotRows {
            dg: slot_rows(&report.dg),
            db: slot_rows(&report.db),
        },
    }
}

#[derive(Debug, Serialize)]
pub struct SelectDocument<'a> {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input: InputInfo,
    pub descriptor: String,
    pub selection: &'a Selection,
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    match path {
        Some(p) => fs::write(p, text + "\n")?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn print_plane_entropies(img: &ColorImage) -> Result<()> {
    let mut out = io::stdout().lock();
    for (p, role) in img.planes().iter().zip(img.roles()) {
        writeln!(out, "{role}\tH0={:.4}", entropy_h0(p))?;
    }
    Ok(())
}

fn cmd_transform(a: &TransformArgs) -> Result<()> {
    let desc = match a.transform {
        TransformName::Rdgdb => {
            a.weights.reject("rdgdb")?;
            TransformDescriptor::rdgdb()
        }
        TransformName::Rct => {
            a.weights.reject("rct")?;
            TransformDescriptor::rct()
        }
        TransformName::RdlsRdgdb => a.weights.rdls()?,
    };
    let img = imageio::read_ppm(&a.input)?;
    let t = transforms::forward(&img, &desc)?;
    imageio::write_planar(&t, &desc, &a.output)?;
    print_plane_entropies(&t)
}

fn cmd_inverse(input: &Path, output: &Path) -> Result<()> {
    let (t, desc) = imageio::read_planar(input)?;
    imageio::write_ppm(&transforms::inverse(&t, &desc)?, output)
}

fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let img = imageio::read_ppm(&a.input)?;
    let report = estimate_options_with(&img, EstimateOptions { codec: a.codec })?;
    write_json(
        &estimate_document(&a.input, &img, &report),
        a.json.as_deref(),
    )
}

fn cmd_select(a: &SelectArgs) -> Result<()> {
    let img = imageio::read_ppm(&a.input)?;
    let sel = select::select_transform(&img, a.metric.into())?;
    let desc = sel.descriptor();
    if let Some(path) = &a.apply {
        let (t, desc) = select::apply_selection(&img, &sel)?;
        imageio::write_planar(&t, &desc, path)?;
    }
    write_json(
        &SelectDocument {
            schema: SELECT_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            input: InputInfo::new(&a.input, &img),
            descriptor: desc.to_string(),
            selection: &sel,
        },
        None,
    )
}

fn cmd_compress(a: &CompressArgs) -> Result<()> {
    let img = imageio::read_ppm(&a.input)?;
    let desc = match a.transform {
        CompressTransform::RdlsRdgdb => a.weights.rdls()?,
        other => {
            a.weights.reject(&format!("{other:?}").to_lowercase())?;
            match other {
                CompressTransform::Auto => {
                    select::select_transform(&img, a.metric.into())?.descriptor()
                }
                CompressTransform::None => TransformDescriptor::identity(),
                CompressTransform::Rdgdb => TransformDescriptor::rdgdb(),
                CompressTransform::Rct => TransformDescriptor::rct(),
                CompressTransform::RdlsRdgdb => unreachable!(),
            }
        }
    };
    let c = container::compress(&img, &desc)?;
    fs::write(&a.output, &c.bytes)?;
    let n = img.pixel_count();
    let mut out = io::stdout().lock();
    writeln!(out, "transform\t{desc}")?;
    for (bytes, role) in c.plane_bytes.iter().zip(desc.output_roles()) {
        writeln!(
            out,
            "{role}\t{:.4} bpp",
            crate::estimate::bitrate(*bytes, n)?
        )?;
    }
    writeln!(out, "total\t{:.4} bpp", c.total_bpp(n))?;
    Ok(())
}

fn cmd_decompress(input: &Path, output: &Path) -> Result<()> {
    let (img, _) = container::decompress(&fs::read(input)?)?;
    imageio::write_ppm(&img, output)
}

fn cmd_noise(a: &NoiseArgs) -> Result<()> {
    let img = imageio::read_ppm(&a.input)?;
    let sigmas = [
        a.sigma_r.unwrap_or(a.sigma),
        a.sigma_g.unwrap_or(a.sigma),
        a.sigma_b.unwrap_or(a.sigma),
    ];
    imageio::write_ppm(&imageio::add_awgn(&img, sigmas, a.seed)?, &a.output)
}

fn cmd_series(a: &SeriesArgs) -> Result<()> {
    let clean = match &a.input {
        Some(p) => imageio::read_ppm(p)?,
        None => synth::scene(a.scene.width, a.scene.height, a.scene.scene_seed)?,
    };
    let rows = series::noise_series(&clean, &a.sigmas, a.seed)?;
    match &a.out {
        Some(p) => series::write_csv(&rows, fs::File::create(p)?),
        None => series::write_csv(&rows, io::stdout().lock()),
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let img = synth::noisy_scene(a.scene.width, a.scene.height, a.scene.scene_seed, a.sigma)?;
    imageio::write_ppm(&img, &a.output)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Inverse { input, output } => cmd_inverse(input, output),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Select(a) => cmd_select(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress { input, output } => cmd_decompress(input, output),
        Command::Noise(a) => cmd_noise(a),
        Command::Bayer { input, output } => imageio::write_ppm(
            &imageio::bayer_rggb_to_rgb(&imageio::read_pgm(input)?)?,
            output,
        ),
        Command::Reduce3x { input, output } => {
            imageio::write_ppm(&imageio::reduce3x(&imageio::read_ppm(input)?)?, output)
        }
        Command::Series(a) => cmd_series(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

/// Configures the thread pool from `RDLS_THREADS` (unset or 0: one thread per core).
pub fn init_threads() -> Result<()> {
    let n = match std::env::var("RDLS_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidArgument(format!("RDLS_THREADS={v:?} is not a thread count"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}
