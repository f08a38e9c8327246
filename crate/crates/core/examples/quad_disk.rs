//! Routing over four heterogeneous disks.
//!
//! Run with: cargo run -p pfs-queue --example quad_disk

use pfsq::{objective, optimize_m, report, HeterogeneousArray, RoutingVector};

pub fn run_example() -> pfsq::Result<()> {
    let array = HeterogeneousArray::new(166.67, vec![0.005, 0.015, 0.020, 0.020])?;
    let feas = array.feasibility();
    println!("capacity {:.2} req/s, feasible: {}", feas.capacity, feas.feasible);

    let opt = optimize_m(&array)?;
    print!("{}", report::render_optimum(&array, &opt));

    let naive = objective(&array, &RoutingVector::normalized(&[200.0, 66.67, 50.0, 50.0])?)?;
    println!("capacity-proportional routing: {naive:.6} s");

    // the slowest disk is left idle when traffic is light
    let light = HeterogeneousArray::new(20.0, vec![0.005, 0.015, 0.020, 0.200])?;
    println!("light load: {:?}", optimize_m(&light)?.routing.fractions());
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
