//! A small grid sweep written as CSV to stdout.

use std::collections::BTreeMap;

use xpm_comp::channel::ChannelParams;
use xpm_comp::harness::{run_sweep, write_csv, SweepGrid, TrialConfig};

fn main() {
    let base = TrialConfig { n_symbols: 100_000, channel: ChannelParams { seed: 77, ..Default::default() }, ..Default::default() };
    let grid = SweepGrid { sigma_common: vec![0.2, 0.3, 0.4], sigma_additive: vec![0.12, 0.18], ..Default::default() };
    let reports: Vec<_> = run_sweep(&base, &grid, &BTreeMap::new()).into_iter().map(|p| p.result.unwrap()).collect();
    write_csv(&reports, std::io::stdout().lock()).unwrap();
}
