//! How often each constellation case occurs, and the label for a few hand-picked symbols.

use xpm_comp::channel::ChannelParams;
use xpm_comp::harness::{classify_case, run_trial, ConstellationCase, TrialConfig};

fn main() {
    for (tx, rx, post) in [([0, 1], [0, 1], [0, 1]), ([0, 1], [3, 1], [0, 1]), ([0, 1], [0, 2], [1, 2]), ([2, 2], [1, 3], [1, 3])] {
        println!("tx {tx:?} rx {rx:?} post {post:?}: {:?}", classify_case(tx, rx, post).unwrap().case);
    }

    for sc in [0.2, 0.3, 0.4] {
        let cfg = TrialConfig {
            n_symbols: 200_000,
            channel: ChannelParams { sigma_common: sc, sigma_additive: 0.15, seed: 8, ..Default::default() },
            ..Default::default()
        };
        let h = run_trial(&cfg).unwrap().case_histogram;
        print!("sigma_common {sc}:");
        for case in ConstellationCase::ALL {
            print!("  {case:?} {:.4}", h.get(case) as f64 / h.total() as f64);
        }
        println!();
    }
}
