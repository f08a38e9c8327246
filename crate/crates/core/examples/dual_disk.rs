//! Splitting IO between a fast and a slow disk.
//!
//! Run with: cargo run -p pfs-queue --example dual_disk

use pfsq::cli::sweep;
use pfsq::optimize_dual;

pub fn run_example() -> pfsq::Result<()> {
    let (rate, fast, slow) = (166.67, 0.005, 0.015);
    let opt = optimize_dual(rate, fast, slow)?;
    let phi = opt.routing.fractions()[0];
    println!("fast-disk share {phi:.6}, array response {:.6} s", opt.response_time);

    let rows = sweep(rate, fast, slow, 1000)?;
    let best = rows
        .iter()
        .min_by(|a, b| a.total.total_cmp(&b.total))
        .expect("non-empty sweep");
    println!("grid minimum at phi = {:.6} ({:.6} s)", best.phi, best.total);

    let even = optimize_dual(rate, fast, fast)?;
    println!("identical disks split {:?}", even.routing.fractions());
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
