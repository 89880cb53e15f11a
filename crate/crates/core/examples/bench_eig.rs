use std::time::Instant;

use quasichain::eig::eig;
use quasichain::ham::{build, Hopping};
use quasichain::lattice::{ChainSpec, FibonacciWordParams, Model};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(987);
    let theta: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(std::f64::consts::FRAC_PI_2);
    let chain = ChainSpec::new(Model::Fibonacci(FibonacciWordParams::for_size(n, 1.0).unwrap()), n);
    let h = build(&chain, &Hopping::new(13.0, theta)).unwrap();
    let start = Instant::now();
    let s = eig(&h.entries).unwrap();
    println!(
        "n={n} time={:.2?} sweeps={} max_residual={:.3e} norm={:.3}",
        start.elapsed(),
        s.qr_sweeps,
        s.max_residual(),
        s.matrix_norm
    );
}
