//! CSV response-time profiles for a pair of disks.
//!
//! Writes `phi,r_fast,r_slow,r_total` rows for a homogeneous and a
//! heterogeneous pair; pipe to a file and plot.
//!
//! Run with: cargo run -p pfs-queue --example response_profile

use pfsq::cli::cmd_sweep;

pub fn run_example() -> pfsq::Result<()> {
    println!("# homogeneous pair");
    print!("{}", cmd_sweep(166.67, 0.005, 0.005, 11)?);
    println!("# heterogeneous pair");
    print!("{}", cmd_sweep(166.67, 0.005, 0.015, 11)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
