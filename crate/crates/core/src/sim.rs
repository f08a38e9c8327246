//! Discrete-event simulation of the open networks the analytic side solves.
//!
//! Each run is single-threaded on one event clock and fully determined by
//! its seed. Random streams are ChaCha8 streams keyed by the seed, with the
//! stream id built from a node index and a purpose tag, so arrival,
//! routing, and per-node service draws never share a sequence.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::network::{OpenNetwork, Topology};
use crate::optimizer::{self, HeterogeneousArray, RoutingVector};

pub const BATCHES: usize = 20;
pub const MIN_MEASURED: usize = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SimTopology {
    /// Each arrival joins queue `k` with probability `routing[k]`.
    Parallel {
        service_times: Vec<f64>,
        routing: Vec<f64>,
    },
    Tandem { stage_times: Vec<f64> },
    /// One FIFO queue; a job rejoins the tail after each of its first
    /// `visits - 1` services.
    Feedback { service_time: f64, visits: u32 },
}

impl SimTopology {
    pub fn homogeneous_parallel(service_time: f64, m: usize) -> Self {
        SimTopology::Parallel {
            service_times: vec![service_time; m],
            routing: vec![1.0 / m as f64; m],
        }
    }

    pub fn heterogeneous_parallel(array: &HeterogeneousArray, routing: &RoutingVector) -> Self {
        SimTopology::Parallel {
            service_times: array.service_times().to_vec(),
            routing: routing.fractions().to_vec(),
        }
    }

    /// The physical system an [`OpenNetwork`] describes.
    ///
    /// Parallel arrays are simulated as real arrays with random splitting,
    /// whichever construction method declared them.
    pub fn from_network(network: &OpenNetwork) -> Self {
        match &network.topology {
            Topology::ParallelArray { m, service_time, .. } => {
                Self::homogeneous_parallel(*service_time, *m as usize)
            }
            Topology::TandemChain(stages) if stages.iter().all(|n| n.visits == 1) => {
                SimTopology::Tandem {
                    stage_times: stages.iter().map(|n| n.service_time).collect(),
                }
            }
            // visits on a chain stage are simulated as that stage's demand
            Topology::TandemChain(stages) => SimTopology::Tandem {
                stage_times: stages.iter().map(|n| n.demand()).collect(),
            },
            Topology::FeedbackQueue(node) => SimTopology::Feedback {
                service_time: node.service_time,
                visits: node.visits,
            },
        }
    }

    fn node_count(&self) -> usize {
        match self {
            SimTopology::Parallel { service_times, .. } => service_times.len(),
            SimTopology::Tandem { stage_times } => stage_times.len(),
            SimTopology::Feedback { .. } => 1,
        }
    }

    /// Utilization each node would have in steady state.
    pub fn offered_load(&self, arrival_rate: f64) -> Vec<f64> {
        match self {
            SimTopology::Parallel {
                service_times,
                routing,
            } => service_times
                .iter()
                .zip(routing)
                .map(|(s, p)| p * arrival_rate * s)
                .collect(),
            SimTopology::Tandem { stage_times } => {
                stage_times.iter().map(|s| arrival_rate * s).collect()
            }
            SimTopology::Feedback {
                service_time,
                visits,
            } => vec![arrival_rate * f64::from(*visits) * service_time],
        }
    }

    /// Closed-form mean residence for this topology.
    pub fn analytic_residence(&self, arrival_rate: f64) -> Result<f64> {
        let unstable = |index: usize, load: f64| Error::Unstable { index, load };
        match self {
            SimTopology::Parallel {
                service_times,
                routing,
            } => {
                let array = HeterogeneousArray::new(arrival_rate, service_times.clone())?;
                let routing = RoutingVector::new(routing.clone())?;
                optimizer::objective(&array, &routing)
            }
            SimTopology::Tandem { stage_times } => {
                let mut total = 0.0;
                for (i, s) in stage_times.iter().enumerate() {
                    total += crate::kernel::mm1_residence(arrival_rate, *s)
                        .map_err(|e| unstable(i, e.utilization))?;
                }
                Ok(total)
            }
            SimTopology::Feedback {
                service_time,
                visits,
            } => crate::kernel::feedback_residence(arrival_rate, *service_time, *visits)
                .map_err(|e| unstable(0, e.utilization)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub arrival_rate: f64,
    pub warmup_completions: usize,
    pub measured_completions: usize,
    pub topology: SimTopology,
}

impl SimConfig {
    /// Config with the default warmup of 10% of the measured count.
    pub fn new(seed: u64, arrival_rate: f64, measured_completions: usize, topology: SimTopology) -> Self {
        SimConfig {
            seed,
            arrival_rate,
            warmup_completions: measured_completions / 10,
            measured_completions,
            topology,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
            return Err(Error::invalid(
                "arrival_rate",
                "simulation needs a finite positive arrival rate",
            ));
        }
        if self.measured_completions < MIN_MEASURED {
            return Err(Error::invalid(
                "completions",
                format!("need at least {MIN_MEASURED} measured completions"),
            ));
        }
        match &self.topology {
            SimTopology::Parallel {
                service_times,
                routing,
            } => {
                if service_times.is_empty() || service_times.len() != routing.len() {
                    return Err(Error::invalid(
                        "routing",
                        "one fraction per parallel queue is required",
                    ));
                }
                RoutingVector::new(routing.clone())?;
                check_times(service_times)?;
            }
            SimTopology::Tandem { stage_times } => {
                if stage_times.is_empty() {
                    return Err(Error::invalid("stages", "tandem chain must not be empty"));
                }
                check_times(stage_times)?;
            }
            SimTopology::Feedback {
                service_time,
                visits,
            } => {
                check_times(&[*service_time])?;
                if *visits == 0 {
                    return Err(Error::invalid("visits", "must be >= 1"));
                }
            }
        }
        for (index, load) in self.topology.offered_load(self.arrival_rate).into_iter().enumerate() {
            if load >= 1.0 {
                return Err(Error::Unstable { index, load });
            }
        }
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::invalid("service_time", "must be finite and > 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub mean_residence: f64,
    pub half_width_95: f64,
    pub batch_means: Vec<f64>,
    pub per_node_utilization: Vec<f64>,
    /// External or internal arrivals per node over the whole run.
    pub per_node_arrivals: Vec<u64>,
    pub per_node_completions: Vec<u64>,
    /// Completions inside the measurement window.
    pub completions: usize,
    /// Simulated time covered by the measurement window.
    pub window: f64,
}

impl SimStats {
    pub fn ci(&self) -> (f64, f64) {
        (
            self.mean_residence - self.half_width_95,
            self.mean_residence + self.half_width_95,
        )
    }

    pub fn ci_contains(&self, x: f64) -> bool {
        let (lo, hi) = self.ci();
        lo <= x && x <= hi
    }

    pub fn ci_overlaps(&self, other: &SimStats) -> bool {
        let (a, b) = self.ci();
        let (c, d) = other.ci();
        a <= d && c <= b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrival,
    Departure(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (time, seq)
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    born: f64,
    // next stage for tandem, remaining visits for feedback
    progress: u32,
}

struct Node {
    queue: VecDeque<Job>,
    busy_since: Option<f64>,
    busy_total: f64,
    service: Exp<f64>,
    rng: ChaCha8Rng,
    arrivals: u64,
    completions: u64,
}

impl Node {
    fn busy_at(&self, t: f64) -> f64 {
        self.busy_total + self.busy_since.map_or(0.0, |start| t - start)
    }
}

const PURPOSE_ARRIVAL: u64 = 0;
const PURPOSE_ROUTING: u64 = 1;
const PURPOSE_SERVICE: u64 = 2;

/// Stream id for `(node, purpose)`; node-less streams use node index 0.
fn stream_rng(seed: u64, node: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((node as u64) << 8) | purpose);
    rng
}

fn exp(rate: f64) -> Exp<f64> {
    // rates are validated positive and finite before this is reached
    Exp::new(rate).expect("positive rate")
}

struct Engine {
    clock: f64,
    seq: u64,
    events: BinaryHeap<Event>,
    nodes: Vec<Node>,
}

impl Engine {
    fn schedule(&mut self, time: f64, kind: EventKind) -> Result<()> {
        if !time.is_finite() {
            return Err(Error::ClockOverflow(time));
        }
        self.seq += 1;
        self.events.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        Ok(())
    }

    fn enqueue(&mut self, node: usize, job: Job) -> Result<()> {
        let now = self.clock;
        let n = &mut self.nodes[node];
        n.arrivals += 1;
        n.queue.push_back(job);
        if n.busy_since.is_none() {
            n.busy_since = Some(now);
            let service = n.service.sample(&mut n.rng);
            self.schedule(now + service, EventKind::Departure(node))?;
        }
        Ok(())
    }

    /// Finishes the head-of-line job and starts the next one.
    fn depart(&mut self, node: usize) -> Result<Job> {
        let now = self.clock;
        let n = &mut self.nodes[node];
        let job = n.queue.pop_front().expect("departure from an empty queue");
        n.completions += 1;
        if n.queue.is_empty() {
            let start = n.busy_since.take().expect("idle server departing");
            n.busy_total += now - start;
        } else {
            let service = n.service.sample(&mut n.rng);
            self.schedule(now + service, EventKind::Departure(node))?;
        }
        Ok(job)
    }
}

/// Runs one replication.
///
/// The first `warmup_completions` system departures are discarded, the next
/// `measured_completions` are recorded, then external arrivals stop and the
/// network drains so per-node arrival and completion counts balance.
pub fn simulate(config: &SimConfig) -> Result<SimStats> {
    config.validate()?;
    let lambda = config.arrival_rate;
    let topo = &config.topology;
    let node_count = topo.node_count();

    let service_rates: Vec<f64> = match topo {
        SimTopology::Parallel { service_times, .. } => service_times.iter().map(|s| 1.0 / s).collect(),
        SimTopology::Tandem { stage_times } => stage_times.iter().map(|s| 1.0 / s).collect(),
        SimTopology::Feedback { service_time, .. } => vec![1.0 / service_time],
    };
    let nodes = service_rates
        .iter()
        .enumerate()
        .map(|(i, &mu)| Node {
            queue: VecDeque::new(),
            busy_since: None,
            busy_total: 0.0,
            service: exp(mu),
            rng: stream_rng(config.seed, i, PURPOSE_SERVICE),
            arrivals: 0,
            completions: 0,
        })
        .collect();

    let mut engine = Engine {
        clock: 0.0,
        seq: 0,
        events: BinaryHeap::new(),
        nodes,
    };
    let mut arrival_rng = stream_rng(config.seed, 0, PURPOSE_ARRIVAL);
    let mut routing_rng = stream_rng(config.seed, 0, PURPOSE_ROUTING);
    let interarrival = exp(lambda);
    let cumulative: Vec<f64> = match topo {
        SimTopology::Parallel { routing, .. } => routing
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect(),
        _ => Vec::new(),
    };

    let target = config.warmup_completions + config.measured_completions;
    let mut departed = 0usize;
    let mut residences = Vec::with_capacity(config.measured_completions);
    let mut window_start = 0.0;
    let mut busy_at_start = vec![0.0; node_count];
    let mut window_end = 0.0;
    let mut busy_at_end = vec![0.0; node_count];
    let mut arrivals_open = true;

    let first = interarrival.sample(&mut arrival_rng);
    engine.schedule(first, EventKind::Arrival)?;

    while let Some(event) = engine.events.pop() {
        engine.clock = event.time;
        match event.kind {
            EventKind::Arrival => {
                if !arrivals_open {
                    continue;
                }
                let now = engine.clock;
                let (node, progress) = match topo {
                    SimTopology::Parallel { .. } => {
                        let u: f64 = routing_rng.random();
                        let k = cumulative
                            .iter()
                            .position(|&c| u < c)
                            .unwrap_or(node_count - 1);
                        (k, 0)
                    }
                    SimTopology::Tandem { .. } => (0, 0),
                    SimTopology::Feedback { visits, .. } => (0, *visits),
                };
                engine.enqueue(node, Job { born: now, progress })?;
                let next = now + interarrival.sample(&mut arrival_rng);
                engine.schedule(next, EventKind::Arrival)?;
            }
            EventKind::Departure(node) => {
                let mut job = engine.depart(node)?;
                let leaves = match topo {
                    SimTopology::Parallel { .. } => true,
                    SimTopology::Tandem { .. } => {
                        if node + 1 < node_count {
                            engine.enqueue(node + 1, job)?;
                            false
                        } else {
                            true
                        }
                    }
                    SimTopology::Feedback { .. } => {
                        job.progress -= 1;
                        if job.progress > 0 {
                            engine.enqueue(0, job)?;
                            false
                        } else {
                            true
                        }
                    }
                };
                if leaves && arrivals_open {
                    departed += 1;
                    let now = engine.clock;
                    if departed == config.warmup_completions {
                        window_start = now;
                        for (i, n) in engine.nodes.iter().enumerate() {
                            busy_at_start[i] = n.busy_at(now);
                        }
                    } else if departed > config.warmup_completions {
                        residences.push(now - job.born);
                    }
                    if departed == target {
                        window_end = now;
                        for (i, n) in engine.nodes.iter().enumerate() {
                            busy_at_end[i] = n.busy_at(now);
                        }
                        arrivals_open = false;
                    }
                }
            }
        }
    }

    let window = window_end - window_start;
    let per_node_utilization = busy_at_end
        .iter()
        .zip(&busy_at_start)
        .map(|(e, s)| ((e - s) / window).clamp(0.0, 1.0))
        .collect();

    let (mean_residence, half_width_95, batch_means) = batch_means(&residences);
    Ok(SimStats {
        mean_residence,
        half_width_95,
        batch_means,
        per_node_utilization,
        per_node_arrivals: engine.nodes.iter().map(|n| n.arrivals).collect(),
        per_node_completions: engine.nodes.iter().map(|n| n.completions).collect(),
        completions: residences.len(),
        window,
    })
}

/// Mean and 95% half-width from [`BATCHES`] equal consecutive batches.
/// Leftover observations that do not fill a batch are dropped.
fn batch_means(samples: &[f64]) -> (f64, f64, Vec<f64>) {
    let size = samples.len() / BATCHES;
    let means: Vec<f64> = samples
        .chunks_exact(size)
        .take(BATCHES)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let n = means.len() as f64;
    let grand = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .expect("valid degrees of freedom")
        .inverse_cdf(0.975);
    let half = (t * (var / n).sqrt()).max(f64::MIN_POSITIVE);
    (grand, half, means)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub analytic: f64,
    pub stats: SimStats,
    pub pass: bool,
}

impl Comparison {
    pub fn relative_error(&self) -> f64 {
        (self.stats.mean_residence - self.analytic).abs() / self.analytic
    }
}

/// Simulates `config` and checks the closed-form residence against it.
///
/// Passes when the analytic value lies in the 95% interval or within 2% of
/// the simulated mean, whichever is looser.
pub fn compare_analytic(config: &SimConfig) -> Result<Comparison> {
    config.validate()?;
    let analytic = config.topology.analytic_residence(config.arrival_rate)?;
    let stats = simulate(config)?;
    let slack = stats.half_width_95.max(0.02 * analytic);
    let pass = (stats.mean_residence - analytic).abs() <= slack;
    Ok(Comparison {
        analytic,
        stats,
        pass,
    })
}
