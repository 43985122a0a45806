//! Times one full run on a seeded random walk.
//!
//! cargo run --release -p mprofile --example throughput -- [n] [m] [workers] [single|double] [batch]

use mprofile::{run, synthetic, Precision, RunConfig, TimeSeries};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg =
        |k: usize, default: usize| args.get(k).and_then(|s| s.parse().ok()).unwrap_or(default);
    let (n, m, workers, batch) = (arg(0, 32_768), arg(1, 1024), arg(2, 1), arg(4, 8));
    let precision = if args.get(3).is_some_and(|s| s == "single") {
        Precision::Single
    } else {
        Precision::Double
    };
    let series = TimeSeries::new(synthetic::random_walk(n, 0)).unwrap();
    let r = run(
        &series,
        &RunConfig::new(m)
            .workers(workers)
            .precision(precision)
            .batch_width(batch),
    )
    .unwrap();
    let secs = r.elapsed.as_secs_f64();
    println!(
        "n={n} m={m} workers={workers} {precision:?}: {:.3}s, {} cells, {:.2} ns/cell",
        secs,
        r.cells_evaluated,
        secs * 1e9 / r.cells_evaluated as f64
    );
}
