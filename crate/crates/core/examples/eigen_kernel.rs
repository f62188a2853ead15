//! The generalized eigenvalue `sup B(v, v) / A(v, v)` against a brute-force
//! scan over unit directions.

use causal_surgery::geometry::{spd_generalized_max_eigenvalue, SymMatrix};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spd(rng: &mut ChaCha8Rng) -> SymMatrix {
    let (a, b, c) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    // L L^T + 0.1 I
    SymMatrix::two(a * a + 0.1, a * b, b * b + c * c + 0.1)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!("{:>12} {:>12} {:>10}", "pencil", "scan", "rel diff");
    for _ in 0..8 {
        let (a, b) = (random_spd(&mut rng), random_spd(&mut rng));
        let mu = spd_generalized_max_eigenvalue(&a, &b)?;
        let scan = (0..10_000)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / 10_000.0;
                let v = [phi.cos(), phi.sin()];
                b.quad(v) / a.quad(v)
            })
            .fold(f64::MIN, f64::max);
        println!("{mu:>12.6} {scan:>12.6} {:>10.2e}", (mu - scan) / mu);
    }
    let e = spd_generalized_max_eigenvalue(&SymMatrix::two(1.0, 2.0, 1.0), &SymMatrix::identity(2));
    println!("\nindefinite base: {}", e.unwrap_err());
    Ok(())
}
