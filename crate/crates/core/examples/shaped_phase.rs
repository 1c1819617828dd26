//! Compare the spectrum of the iid and the shaped common-phase models.

use rustfft::FftPlanner;
use xpm_comp::channel::{gen_common_phase, ChannelParams, PhaseModel};
use xpm_comp::Complex64;

fn band_power(values: &[f64], bands: usize) -> Vec<f64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let half = buf.len() / 2;
    let per = half / bands;
    (0..bands)
        .map(|b| buf[b * per..(b + 1) * per].iter().map(|z| z.norm_sqr()).sum::<f64>() / (per * buf.len()) as f64)
        .collect()
}

fn main() {
    let n = 1 << 16;
    for model in [PhaseModel::Iid, PhaseModel::Shaped] {
        let params = ChannelParams { sigma_common: 0.2, phase_model: model, dbeta: 5e-9, cpe_cutoff: 2e8, ..Default::default() };
        let phase = gen_common_phase(n, &params).unwrap();
        let var = phase.values.iter().map(|x| x * x).sum::<f64>() / n as f64;
        println!("{model:?}: std {:.4}", var.sqrt());
        for (b, p) in band_power(&phase.values, 8).iter().enumerate() {
            println!("  band {b}: {:>8.5}", p);
        }
    }
}
