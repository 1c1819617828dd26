//! Recover the inter-channel delay from per-symbol phase traces.

use rand::Rng;
use xpm_comp::alignment::estimate_delay;
use xpm_comp::channel::{apply_channel, ChannelParams};
use xpm_comp::cpe::{extract_phase, VvConfig};
use xpm_comp::qpsk::SymbolStream;
use xpm_comp::rng::{stream_rng, Stream};

fn main() {
    let n = 20_000;
    let mut rng = stream_rng(1, Stream::Payload1);
    let q1: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let q2: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let (tx1, tx2) = (SymbolStream::from_quadrants(&q1).unwrap(), SymbolStream::from_quadrants(&q2).unwrap());

    for (d, sa) in [(0, 0.1), (4, 0.1), (-7, 0.1), (5, 0.3), (5, 0.6)] {
        let params = ChannelParams { sigma_common: 0.3, sigma_additive: sa, delay_offset: d, seed: 17, ..Default::default() };
        let out = apply_channel(&tx1, &tx2, &params).unwrap();
        let t1 = extract_phase(&out.rx1, &VvConfig::per_symbol()).unwrap();
        let t2 = extract_phase(&out.rx2, &VvConfig::per_symbol()).unwrap();
        let r = estimate_delay(&t1, &t2, 10).unwrap();
        println!(
            "true {d:>3}, sigma_additive {sa}: lag {:>3}, peak {:.3}{}",
            r.lag,
            r.peak_correlation,
            if r.confident { "" } else { " (not confident)" }
        );
    }
}
