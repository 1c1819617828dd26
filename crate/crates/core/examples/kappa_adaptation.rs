//! Tune the weighting factor by golden-section search on the compensated BER.

use xpm_comp::alignment::adapt_kappa;
use xpm_comp::channel::ChannelParams;
use xpm_comp::harness::{run_trial, TrialConfig};
use xpm_comp::joint::EstimatorConfig;

fn main() {
    let base = TrialConfig {
        n_symbols: 100_000,
        channel: ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, seed: 5, ..Default::default() },
        compare_baseline: false,
        ..Default::default()
    };
    let ber = |cfg: &TrialConfig| run_trial(cfg).unwrap().ber_compensated;

    let r = adapt_kappa(
        |kappa| {
            let cfg = TrialConfig { estimator: EstimatorConfig::finite(kappa), ..base.clone() };
            let b = ber(&cfg);
            println!("  kappa {kappa:>8.4}: BER {b:.5}");
            b
        },
        0.0,
        40.0,
        0.5,
    )
    .unwrap();
    println!("kappa_opt {:.3} (BER {:.5}) after {} evaluations", r.kappa_opt, r.ber_at_opt, r.evaluations);
    println!("kappa inf BER {:.5}", ber(&TrialConfig { estimator: EstimatorConfig::infinite(), ..base }));
}
