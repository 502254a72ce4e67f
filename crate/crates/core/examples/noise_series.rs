//! Per-component bitrates over a noise sweep, written as CSV to stdout.
//! Dg falls behind R as noise grows while dDg stays close to G.

use rdls::series::{noise_series, write_csv, DEFAULT_SIGMAS};
use rdls::synth;

fn main() -> rdls::Result<()> {
    let clean = synth::scene(192, 192, 1)?;
    let rows = noise_series(&clean, &DEFAULT_SIGMAS, 0)?;
    write_csv(&rows, std::io::stdout().lock())
}
