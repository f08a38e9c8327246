//! Command implementations behind the `pfsq` binary.
//!
//! Each command returns its rendered output; the binary only parses flags,
//! prints, and maps [`Error::exit_code`] onto the process status.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernel;
use crate::model::{ModelBody, ModelFile};
use crate::network::solve;
use crate::optimizer::{self, HeterogeneousArray, STABILITY_MARGIN};
use crate::report::{self, SweepRow};
use crate::sim::{self, SimConfig, SimTopology};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COMPLETIONS: usize = 200_000;
/// Relative tolerance for the parallel/tandem identity.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-12;

pub fn cmd_solve(model: &ModelFile) -> Result<String> {
    let network = model.network()?.ok_or_else(|| {
        Error::invalid("topology", "`solve` needs a [parallel], [tandem] or [feedback] section")
    })?;
    Ok(report::render_solution(&solve(&network)?))
}

pub fn cmd_optimize(rate: f64, service_times: &[f64]) -> Result<String> {
    let array = HeterogeneousArray::new(rate, service_times.to_vec())?;
    let opt = optimizer::optimize_m(&array)?;
    Ok(report::render_optimum(&array, &opt))
}

/// Response-time profile of a fast/slow pair over the stable range of the
/// fast-queue fraction `φ`, on a uniform grid of `steps` points.
pub fn sweep(rate: f64, fast: f64, slow: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::invalid("steps", "must be >= 2"));
    }
    let array = HeterogeneousArray::new(rate, vec![fast, slow])?;
    let feasibility = array.feasibility();
    if !feasibility.feasible {
        return Err(Error::Infeasible {
            rate,
            capacity: feasibility.capacity,
        });
    }
    let (lo, hi) = if rate == 0.0 {
        (0.0, 1.0)
    } else {
        let cap = 1.0 - STABILITY_MARGIN;
        ((1.0 - cap / (rate * slow)).max(0.0), (cap / (rate * fast)).min(1.0))
    };
    if lo > hi {
        return Err(Error::Infeasible {
            rate,
            capacity: feasibility.capacity,
        });
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let phi = if i == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last)
            };
            let r_fast = phi * fast / (1.0 - phi * rate * fast);
            let q = 1.0 - phi;
            let r_slow = q * slow / (1.0 - q * rate * slow);
            SweepRow {
                phi,
                fast: r_fast,
                slow: r_slow,
                total: r_fast + r_slow,
            }
        })
        .collect())
}

pub fn cmd_sweep(rate: f64, fast: f64, slow: f64, steps: usize) -> Result<String> {
    Ok(report::render_sweep(&sweep(rate, fast, slow, steps)?))
}

/// Simulation config for a model, with optional overrides of its
/// `[simulate]` section. Optimize models are simulated under their optimal
/// routing.
pub fn sim_config(
    model: &ModelFile,
    seed: Option<u64>,
    completions: Option<usize>,
) -> Result<(String, SimConfig)> {
    let section = model.simulate.clone().unwrap_or_default();
    let seed = seed.or(section.seed).unwrap_or(DEFAULT_SEED);
    let measured = completions.or(section.completions).unwrap_or(DEFAULT_COMPLETIONS);
    let (label, topology) = match &model.body {
        ModelBody::Optimize { .. } => {
            let array = model.array()?.expect("optimize body");
            let opt = optimizer::optimize_m(&array)?;
            ("optimized parallel".to_string(), SimTopology::heterogeneous_parallel(&array, &opt.routing))
        }
        body => {
            let network = model.network()?.expect("topology body");
            let label = match body {
                ModelBody::Parallel { .. } => "parallel",
                ModelBody::Tandem { .. } => "tandem",
                _ => "feedback",
            };
            (label.to_string(), SimTopology::from_network(&network))
        }
    };
    let mut config = SimConfig::new(seed, model.arrival_rate, measured, topology);
    if let Some(w) = section.warmup {
        config.warmup_completions = w;
    }
    Ok((label, config))
}

pub fn cmd_simulate(model: &ModelFile, seed: Option<u64>, completions: Option<usize>) -> Result<String> {
    let (label, config) = sim_config(model, seed, completions)?;
    let cmp = sim::compare_analytic(&config)?;
    let mut out = format!("seed              {}\n", config.seed);
    out.push_str(&report::render_comparison(&label, &cmp));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub parallel: f64,
    pub serial: f64,
    pub feedback: Option<f64>,
    /// `|R_para - R_serial| / max(R_para, R_serial)`.
    pub relative_difference: f64,
    pub holds: bool,
}

/// Parallel, tandem and feedback residence for the same `(λ, S, m)`.
///
/// The feedback queue can saturate where the other two do not; it is then
/// reported as absent.
pub fn equivalence(rate: f64, service: f64, m: u32) -> Result<Equivalence> {
    if m == 0 {
        return Err(Error::invalid("m", "must be >= 1"));
    }
    if !(service > 0.0 && service.is_finite()) {
        return Err(Error::invalid("service_time", "must be finite and > 0"));
    }
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::invalid("arrival_rate", "must be finite and >= 0"));
    }
    let saturated = |node: &str| {
        let node = node.to_string();
        move |s: crate::error::Saturation| Error::Saturated {
            node,
            utilization: s.utilization,
        }
    };
    let parallel = kernel::parallel_array_residence(rate, service, m).map_err(saturated("parallel"))?;
    let serial = kernel::tandem_residence(rate, service, m).map_err(saturated("tandem"))?;
    let feedback = kernel::feedback_residence(rate, service / f64::from(m), m).ok();
    let relative_difference = (parallel - serial).abs() / parallel.max(serial);
    Ok(Equivalence {
        parallel,
        serial,
        feedback,
        relative_difference,
        holds: relative_difference <= EQUIVALENCE_TOLERANCE,
    })
}

pub fn render_equivalence(rate: f64, service: f64, m: u32, eq: &Equivalence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "arrival rate {rate}, service time {service}, m = {m}");
    let _ = writeln!(out, "{:<34}{:>14}", "R_para   S/(1-(lambda/m)S)", format!("{:.6}", eq.parallel));
    let _ = writeln!(out, "{:<34}{:>14}", "R_serial m(S/m)/(1-lambda S/m)", format!("{:.6}", eq.serial));
    match eq.feedback {
        Some(fb) => {
            let _ = writeln!(out, "{:<34}{:>14}", "R_feedback D/(1-lambda D), D=S", format!("{fb:.6}"));
        }
        None => {
            let _ = writeln!(out, "{:<34}{:>14}", "R_feedback D/(1-lambda D), D=S", "saturated");
        }
    }
    let _ = writeln!(out, "{:<34}{:>14}", "R_para - R_serial", format!("{:.3e}", eq.parallel - eq.serial));
    if let Some(fb) = eq.feedback {
        let _ = writeln!(out, "{:<34}{:>14}", "R_feedback - R_serial", format!("{:.6}", fb - eq.serial));
    }
    let _ = writeln!(
        out,
        "identity {} (relative difference {:.3e}, tolerance {:.0e})",
        if eq.holds { "holds" } else { "FAILS" },
        eq.relative_difference,
        EQUIVALENCE_TOLERANCE
    );
    out
}
