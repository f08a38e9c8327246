//! Open-network construction, solution, and the parallel/serial rewrites.
//!
//! A homogeneous parallel array can be declared two ways:
//!
//! * [`Method::A`] models one representative queue that only sees its share
//!   `λ/m` of the aggregate stream.
//! * [`Method::B`] enumerates all `m` queues by name. Every queue sees the
//!   global `λ` and is given the fractional service time `S/m` instead,
//!   which is structurally a tandem chain of `m` fast stages.
//!
//! Both solve to the same system residence time.

use crate::error::{Error, Result};
use crate::kernel::{self, Metrics};

pub const DEFAULT_WORKLOAD: &str = "Requests";
pub const DEFAULT_PARALLEL_PREFIX: &str = "ParaQ";
pub const DEFAULT_TANDEM_PREFIX: &str = "Stage";
pub const DEFAULT_FEEDBACK_NAME: &str = "FeedbackQ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueNode {
    pub name: String,
    pub service_time: f64,
    pub visits: u32,
}

impl QueueNode {
    pub fn new(name: impl Into<String>, service_time: f64) -> Result<Self> {
        Self::with_visits(name, service_time, 1)
    }

    pub fn with_visits(name: impl Into<String>, service_time: f64, visits: u32) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        check_service_time(service_time)?;
        if visits == 0 {
            return Err(Error::invalid("visits", "must be >= 1"));
        }
        Ok(QueueNode {
            name,
            service_time,
            visits,
        })
    }

    /// Service demand `V·S` accumulated over all visits.
    pub fn demand(&self) -> f64 {
        f64::from(self.visits) * self.service_time
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    /// `m` identical queues, each with mean service time `service_time`.
    ParallelArray {
        m: u32,
        service_time: f64,
        method: Method,
        prefix: String,
    },
    TandemChain(Vec<QueueNode>),
    /// A single queue whose `visits` field counts the revisits.
    FeedbackQueue(QueueNode),
}

/// Node as the solver sees it after the topology has assigned arrival rates.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub name: String,
    pub service_time: f64,
    pub visits: u32,
    pub arrival_rate: f64,
    /// Number of physical queues this entry stands for.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenNetwork {
    pub workload: String,
    pub arrival_rate: f64,
    pub topology: Topology,
}

fn check_service_time(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("service_time", "must be finite and > 0"));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::invalid("arrival_rate", "must be finite and >= 0"));
    }
    Ok(())
}

impl OpenNetwork {
    pub fn parallel(agg_rate: f64, service_time: f64, m: u32, method: Method) -> Result<Self> {
        check_rate(agg_rate)?;
        check_service_time(service_time)?;
        if m == 0 {
            return Err(Error::invalid("m", "must be >= 1"));
        }
        Ok(OpenNetwork {
            workload: DEFAULT_WORKLOAD.to_string(),
            arrival_rate: agg_rate,
            topology: Topology::ParallelArray {
                m,
                service_time,
                method,
                prefix: DEFAULT_PARALLEL_PREFIX.to_string(),
            },
        })
    }

    pub fn tandem(agg_rate: f64, stages: Vec<QueueNode>) -> Result<Self> {
        check_rate(agg_rate)?;
        if stages.is_empty() {
            return Err(Error::invalid("stages", "tandem chain must not be empty"));
        }
        for (i, a) in stages.iter().enumerate() {
            if stages[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::invalid("name", format!("duplicate node name `{}`", a.name)));
            }
        }
        Ok(OpenNetwork {
            workload: DEFAULT_WORKLOAD.to_string(),
            arrival_rate: agg_rate,
            topology: Topology::TandemChain(stages),
        })
    }

    /// `m` identical stages named `<prefix>1..<prefix>m`.
    pub fn homogeneous_tandem(
        agg_rate: f64,
        stage_time: f64,
        m: u32,
        prefix: &str,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m", "must be >= 1"));
        }
        let stages = (1..=m)
            .map(|k| QueueNode::new(format!("{prefix}{k}"), stage_time))
            .collect::<Result<Vec<_>>>()?;
        Self::tandem(agg_rate, stages)
    }

    pub fn feedback(agg_rate: f64, node: QueueNode) -> Result<Self> {
        check_rate(agg_rate)?;
        Ok(OpenNetwork {
            workload: DEFAULT_WORKLOAD.to_string(),
            arrival_rate: agg_rate,
            topology: Topology::FeedbackQueue(node),
        })
    }

    pub fn with_workload(mut self, workload: impl Into<String>) -> Self {
        self.workload = workload.into();
        self
    }

    /// Renames the enumerated queues of a parallel array. No-op otherwise.
    pub fn with_prefix(mut self, new_prefix: impl Into<String>) -> Self {
        if let Topology::ParallelArray { prefix, .. } = &mut self.topology {
            *prefix = new_prefix.into();
        }
        self
    }

    /// Expands the topology into solver nodes with their local arrival rates.
    pub fn nodes(&self) -> Vec<NodeSpec> {
        let lambda = self.arrival_rate;
        match &self.topology {
            Topology::ParallelArray {
                m,
                service_time,
                method: Method::A,
                prefix,
            } => vec![NodeSpec {
                name: prefix.clone(),
                service_time: *service_time,
                visits: 1,
                arrival_rate: lambda / f64::from(*m),
                multiplicity: *m,
            }],
            Topology::ParallelArray {
                m,
                service_time,
                method: Method::B,
                prefix,
            } => (1..=*m)
                .map(|k| NodeSpec {
                    name: format!("{prefix}{k}"),
                    service_time: service_time / f64::from(*m),
                    visits: 1,
                    arrival_rate: lambda,
                    multiplicity: 1,
                })
                .collect(),
            Topology::TandemChain(stages) => stages
                .iter()
                .map(|n| NodeSpec {
                    name: n.name.clone(),
                    service_time: n.service_time,
                    visits: n.visits,
                    arrival_rate: lambda,
                    multiplicity: 1,
                })
                .collect(),
            Topology::FeedbackQueue(n) => vec![NodeSpec {
                name: n.name.clone(),
                service_time: n.service_time,
                visits: n.visits,
                arrival_rate: lambda,
                multiplicity: 1,
            }],
        }
    }
}

pub fn build_parallel_method_a(agg_rate: f64, service_time: f64, m: u32) -> Result<OpenNetwork> {
    OpenNetwork::parallel(agg_rate, service_time, m, Method::A)
}

pub fn build_parallel_method_b(agg_rate: f64, service_time: f64, m: u32) -> Result<OpenNetwork> {
    OpenNetwork::parallel(agg_rate, service_time, m, Method::B)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport {
    pub name: String,
    pub service_time: f64,
    pub visits: u32,
    pub multiplicity: u32,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub workload: String,
    pub arrival_rate: f64,
    pub nodes: Vec<NodeReport>,
    pub system_residence: f64,
    pub system_throughput: f64,
}

impl SolutionReport {
    pub fn node(&self, name: &str) -> Option<&NodeReport> {
        self.nodes.iter().find(|n| n.name == name)
    }
}

/// Solves every node analytically.
///
/// Parallel arrays report the per-queue share `λ/m` as node throughput under
/// both construction methods. The first saturated node aborts the solve.
pub fn solve(network: &OpenNetwork) -> Result<SolutionReport> {
    let lambda = network.arrival_rate;
    let reported_throughput = match &network.topology {
        Topology::ParallelArray { m, .. } => lambda / f64::from(*m),
        _ => lambda,
    };

    let mut nodes = Vec::new();
    for spec in network.nodes() {
        let demand = f64::from(spec.visits) * spec.service_time;
        let rho = kernel::utilization(spec.arrival_rate, demand);
        let residence_time =
            kernel::mm1_residence(spec.arrival_rate, demand).map_err(|s| Error::Saturated {
                node: spec.name.clone(),
                utilization: s.utilization,
            })?;
        nodes.push(NodeReport {
            name: spec.name,
            service_time: spec.service_time,
            visits: spec.visits,
            multiplicity: spec.multiplicity,
            metrics: Metrics {
                utilization: rho,
                residence_time,
                queue_length: kernel::queue_length(rho)?,
                throughput: reported_throughput,
            },
        });
    }

    let system_residence = match &network.topology {
        Topology::ParallelArray {
            m,
            service_time,
            method,
            ..
        } => {
            let closed = match method {
                Method::A => kernel::parallel_array_residence(lambda, *service_time, *m),
                Method::B => kernel::tandem_residence(lambda, *service_time, *m),
            };
            // Node-level checks above already caught saturation.
            closed.map_err(|s| Error::Saturated {
                node: nodes[0].name.clone(),
                utilization: s.utilization,
            })?
        }
        Topology::TandemChain(_) | Topology::FeedbackQueue(_) => {
            nodes.iter().map(|n| n.metrics.residence_time).sum()
        }
    };

    Ok(SolutionReport {
        workload: network.workload.clone(),
        arrival_rate: lambda,
        nodes,
        system_residence,
        system_throughput: lambda,
    })
}

/// Rewrites a homogeneous parallel array as the equivalent tandem chain of
/// `m` stages with service time `S/m`, all driven at the same `λ`.
pub fn serialize_transform(parallel: &OpenNetwork) -> Result<OpenNetwork> {
    let Topology::ParallelArray {
        m,
        service_time,
        prefix,
        ..
    } = &parallel.topology
    else {
        return Err(Error::Topology {
            expected: "a homogeneous parallel array",
        });
    };
    Ok(OpenNetwork::homogeneous_tandem(
        parallel.arrival_rate,
        service_time / f64::from(*m),
        *m,
        prefix,
    )?
    .with_workload(parallel.workload.clone()))
}

fn homogeneous_stages(serial: &OpenNetwork) -> Result<(u32, f64)> {
    let Topology::TandemChain(stages) = &serial.topology else {
        return Err(Error::Topology {
            expected: "a homogeneous tandem chain",
        });
    };
    let first = &stages[0];
    if stages
        .iter()
        .any(|n| n.service_time != first.service_time || n.visits != 1)
    {
        return Err(Error::Topology {
            expected: "a homogeneous tandem chain (equal stage times, one visit each)",
        });
    }
    let m = u32::try_from(stages.len()).map_err(|_| Error::invalid("stages", "too many stages"))?;
    Ok((m, first.service_time))
}

/// Reconfigures `m` tandem stages of service time `s` as `m` parallel queues
/// that keep the same service time `s`.
///
/// With `keep_stage_load` each parallel queue still sees the full stage rate
/// `λ` (the aggregate becomes `mλ`) and the residence drops by exactly `m`.
/// Without it the original `λ` is split `m` ways, and the factor-`m` speedup
/// only holds in the light-load limit.
pub fn parallelize_transform(serial: &OpenNetwork, keep_stage_load: bool) -> Result<OpenNetwork> {
    let (m, stage_time) = homogeneous_stages(serial)?;
    let agg_rate = if keep_stage_load {
        serial.arrival_rate * f64::from(m)
    } else {
        serial.arrival_rate
    };
    Ok(OpenNetwork::parallel(agg_rate, stage_time, m, Method::A)?
        .with_workload(serial.workload.clone()))
}

/// Inverse of [`serialize_transform`]: `m` stages of time `s` become an
/// `m`-way array of queues with service time `m·s`, which has identical
/// residence at the same `λ`.
pub fn parallelize_equivalent(serial: &OpenNetwork) -> Result<OpenNetwork> {
    let (m, stage_time) = homogeneous_stages(serial)?;
    Ok(
        OpenNetwork::parallel(serial.arrival_rate, stage_time * f64::from(m), m, Method::B)?
            .with_workload(serial.workload.clone()),
    )
}
