//! Enumerated parallel queues and their per-node report.
//!
//! Four queues named ParaQ1..ParaQ4 share a global arrival rate of 2 req/s;
//! each is declared with the fractional service time 0.25/4.
//!
//! Run with: cargo run -p pfs-queue --example listing_report

use pfsq::{build_parallel_method_b, report, solve};

pub fn run_example() -> pfsq::Result<()> {
    let network = build_parallel_method_b(2.0, 0.25, 4)?;
    for node in network.nodes() {
        println!("{:<8} S = {:.4}  arrivals = {}", node.name, node.service_time, node.arrival_rate);
    }
    println!();
    let solution = solve(&network)?;
    print!("{}", report::render_solution(&solution));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
