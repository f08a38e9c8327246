//! Reading a long tandem chain as hidden parallelism.
//!
//! A model calibrated with 300 sequential 1 ms queues predicts about 300 ms.
//! The same residence is produced by 300 parallel queues of 300 ms each, and
//! parallelizing the 1 ms stages directly gives a 300-fold speedup.
//!
//! Run with: cargo run -p pfs-queue --example cloud_rewrite

use pfsq::{parallelize_equivalent, parallelize_transform, solve, OpenNetwork, Topology};

pub fn run_example() -> pfsq::Result<()> {
    let rate = 1.0;
    let chain = OpenNetwork::homogeneous_tandem(rate, 0.001, 300, "Poll")?;
    let r_chain = solve(&chain)?.system_residence;
    println!("300 x 1 ms tandem at {rate} req/s: {:.3} ms", r_chain * 1e3);

    let equivalent = parallelize_equivalent(&chain)?;
    if let Topology::ParallelArray { m, service_time, .. } = &equivalent.topology {
        println!(
            "equivalent array: {m} queues x {:.0} ms -> {:.3} ms",
            service_time * 1e3,
            solve(&equivalent)?.system_residence * 1e3
        );
    }

    for keep in [true, false] {
        let para = parallelize_transform(&chain, keep)?;
        let r = solve(&para)?.system_residence;
        println!(
            "parallelized, keep_stage_load={keep:<5}: {:.6} ms (speedup {:.3})",
            r * 1e3,
            r_chain / r
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pfsq::Result<()> {
    run_example()
}
