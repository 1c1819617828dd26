//! One paired trial: conventional correction versus joint compensation.

use xpm_comp::channel::ChannelParams;
use xpm_comp::harness::{run_trial, TrialConfig};

fn main() {
    let cfg = TrialConfig {
        n_symbols: 500_000,
        channel: ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, delay_offset: 3, seed: 2024, ..Default::default() },
        ..Default::default()
    };
    let r = run_trial(&cfg).unwrap();
    let base = r.uncompensated.unwrap();
    println!("lag {} (confident: {})", r.lag, r.lag_confident);
    println!("baseline    BER {:.3e}  [{:.3e}, {:.3e}]", base.ber, base.ci.lo, base.ci.hi);
    println!("compensated BER {:.3e}  [{:.3e}, {:.3e}]", r.compensated.ber, r.compensated.ci.lo, r.compensated.ci.hi);
    println!("intervals overlap: {}", base.ci.overlaps(&r.compensated.ci));
}
