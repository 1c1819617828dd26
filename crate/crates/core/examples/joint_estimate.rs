//! The weighted common-phase estimator for a few phase pairs and weighting factors.

use xpm_comp::joint::{estimate_common_phase, EstimatorConfig};

fn main() {
    let pairs = [(0.10, 0.12), (0.05, -0.60), (-0.30, 0.70), (0.40, 0.40)];
    let configs = [
        ("kappa 0", EstimatorConfig::finite(0.0)),
        ("kappa 5", EstimatorConfig::finite(5.0)),
        ("kappa 50", EstimatorConfig::finite(50.0)),
        ("kappa inf", EstimatorConfig::infinite()),
    ];
    print!("{:>16}", "phi1, phi2");
    for (name, _) in &configs {
        print!("{name:>11}");
    }
    println!();
    for (p1, p2) in pairs {
        print!("{:>16}", format!("{p1:+.2}, {p2:+.2}"));
        for (_, cfg) in &configs {
            print!("{:>+11.4}", estimate_common_phase(p1, p2, cfg).unwrap().value);
        }
        println!();
    }
}
