//! The unit step and the freeze ramp.

use causal_surgery::geometry::{freeze_ramp, unit_step};

fn main() {
    println!("{:>6} {:>12} {:>12}", "r", "step", "ramp");
    for k in -2..=12 {
        let r = k as f64 / 10.0;
        println!("{r:>6.2} {:>12.8} {:>12.8}", unit_step(r), freeze_ramp(r));
    }
}
