//! Fourth-power phase extraction on a noisy, rotated stream with several window lengths.

use xpm_comp::channel::{apply_channel, ChannelParams};
use xpm_comp::cpe::{correct_carrier_phase, extract_phase, VvConfig};
use xpm_comp::qpsk::{count_errors, demap_symbols, map_symbols, BitStream};
use xpm_comp::Complex64;

fn main() {
    let n = 50_000;
    let bits = BitStream::new((0..2 * n).map(|i| ((i * 2654435761usize) >> 7 & 1) as u8).collect()).unwrap();
    let tx = map_symbols(&bits);
    let params = ChannelParams { sigma_additive: 0.25, seed: 9, ..Default::default() };
    let offset = Complex64::cis(0.4);
    let rx: Vec<Complex64> = apply_channel(&tx, &tx, &params).unwrap().rx1.iter().map(|z| z * offset).collect();

    println!("raw BER {:.4}", count_errors(&bits, &demap_symbols(&rx)).unwrap().ber);
    for window in [1, 9, 33, 129] {
        let cfg = VvConfig { window, remove_mean: false };
        let t = extract_phase(&rx, &cfg).unwrap();
        let rms = (t.values.iter().map(|x| (x - 0.4).powi(2)).sum::<f64>() / n as f64).sqrt();
        let fixed = correct_carrier_phase(&rx, &cfg).unwrap();
        let ber = count_errors(&bits, &demap_symbols(&fixed)).unwrap().ber;
        println!("window {window:>3}: mean {:.4} rad, rms error {rms:.4} rad, BER {ber:.4}", t.mean());
    }
}
