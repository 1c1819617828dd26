//! Pump-to-phase conversion efficiency versus frequency for a few walk-off values.

use xpm_comp::channel::efficiency_curve;

fn main() {
    let alpha_db = 0.2;
    for dbeta in [0.0, 1e-9, 5e-9] {
        println!("dbeta = {dbeta:e} s/km");
        for (f, eff) in efficiency_curve(alpha_db, dbeta, 2e9, 5) {
            println!("  {:>6.2} GHz  {eff:.4e}", f / 1e9);
        }
    }
}
