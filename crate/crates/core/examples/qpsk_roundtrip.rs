//! Gray-mapped QPSK: map bits, rotate the constellation, count decision errors.

use xpm_comp::qpsk::{count_errors, demap_symbols, map_symbols, quadrant_bits, quadrant_symbol, BitStream};
use xpm_comp::Complex64;

fn main() {
    for q in 0..4u8 {
        let s = quadrant_symbol(q).unwrap();
        println!("quadrant {q}: bits {:?} -> {:+.4} {:+.4}i", quadrant_bits(q), s.re, s.im);
    }

    let bits = BitStream::new((0..4000).map(|i| ((i * 37 + i / 3) % 2) as u8).collect()).unwrap();
    let tx = map_symbols(&bits);
    for deg in [0.0, 30.0, 44.0, 46.0, 90.0] {
        let rot = Complex64::cis(f64::to_radians(deg));
        let rx: Vec<Complex64> = tx.samples().iter().map(|z| z * rot).collect();
        let e = count_errors(&bits, &demap_symbols(&rx)).unwrap();
        println!("rotation {deg:>4} deg: {} of {} bits wrong (BER {:.3})", e.errors, e.bits, e.ber);
    }
}
