//! Parallel array vs. fast tandem chain vs. feedback queue.
//!
//! For a fixed aggregate rate and total service time, prints the residence
//! of an `m`-way parallel array, an `m`-stage tandem chain of `S/m` servers,
//! and a single queue revisited `m` times.
//!
//! Run with: cargo run -p pfs-queue --example equivalence

use pfsq::cli;

pub fn run_example() -> pfsq::Result<()> {
    let (rate, service) = (2.0, 0.25);
    println!("{:>4} {:>12} {:>12} {:>12}", "m", "parallel", "tandem", "feedback");
    for m in [1, 2, 4, 8, 16, 64] {
        let eq = cli::equivalence(rate, service, m)?;
        let fb = eq
            .feedback
            .map_or_else(|| "saturated".to_string(), |r| format!("{r:.6}"));
        println!("{m:>4} {:>12.6} {:>12.6} {fb:>12}", eq.parallel, eq.serial);
        assert!(eq.holds);
    }
    println!();
    print!("{}", cli::render_equivalence(rate, service, 4, &cli::equivalence(rate, service, 4)?));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
