//! Checking the closed forms against the discrete-event simulator.
//!
//! Run with: cargo run --release -p pfs-queue --example simulate_oracle

use pfsq::{compare_analytic, optimize_m, report, HeterogeneousArray, SimConfig, SimTopology};

pub fn run_example() -> pfsq::Result<()> {
    run_with(200_000)
}

pub fn run_with(completions: usize) -> pfsq::Result<()> {
    let cases = [
        ("parallel m=4", 2.0, SimTopology::homogeneous_parallel(0.25, 4)),
        ("tandem m=4", 2.0, SimTopology::Tandem { stage_times: vec![0.0625; 4] }),
        ("feedback V=4", 2.0, SimTopology::Feedback { service_time: 0.0625, visits: 4 }),
    ];
    for (label, rate, topology) in cases {
        let cmp = compare_analytic(&SimConfig::new(42, rate, completions, topology))?;
        print!("{}", report::render_comparison(label, &cmp));
        println!();
    }

    let array = HeterogeneousArray::new(166.67, vec![0.005, 0.015, 0.020, 0.020])?;
    let opt = optimize_m(&array)?;
    let topology = SimTopology::heterogeneous_parallel(&array, &opt.routing);
    let cmp = compare_analytic(&SimConfig::new(42, 166.67, completions, topology))?;
    print!("{}", report::render_comparison("optimized quad disk", &cmp));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
