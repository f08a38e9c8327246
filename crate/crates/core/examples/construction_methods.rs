//! Declaring the same parallel array two ways.
//!
//! Method A keeps one representative queue fed `λ/m`; method B enumerates
//! every queue, feeds each the global `λ`, and scales service times to `S/m`.
//! Both must report the same system residence.
//!
//! Run with: cargo run -p pfs-queue --example construction_methods

use pfsq::{build_parallel_method_a, build_parallel_method_b, serialize_transform, solve};

pub fn run_example() -> pfsq::Result<()> {
    for (rate, service, m) in [(3.0, 0.2, 5), (2.0, 0.25, 4), (166.67, 0.005, 2)] {
        let a = solve(&build_parallel_method_a(rate, service, m)?)?;
        let b_net = build_parallel_method_b(rate, service, m)?;
        let b = solve(&b_net)?;
        let t = solve(&serialize_transform(&b_net)?)?;
        println!(
            "lambda={rate:<7} S={service:<6} m={m}: A {:.9}  B {:.9}  tandem {:.9}  ({} vs {} nodes)",
            a.system_residence,
            b.system_residence,
            t.system_residence,
            a.nodes.len(),
            b.nodes.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
