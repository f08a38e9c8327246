//! Sectioned `key = value` model files.
//!
//! ```text
//! [network]
//! workload = Requests
//! arrival_rate = 2.0
//!
//! [parallel]
//! m = 4
//! service_time = 0.25
//! method = b
//!
//! [simulate]
//! seed = 42
//! completions = 200000
//! ```
//!
//! Exactly one of `[parallel]`, `[tandem]`, `[feedback]` or `[optimize]` must
//! be present. `#` and `;` start comment lines. Unknown sections and keys are
//! rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{
    self, Method, OpenNetwork, QueueNode, DEFAULT_FEEDBACK_NAME, DEFAULT_PARALLEL_PREFIX,
    DEFAULT_TANDEM_PREFIX, DEFAULT_WORKLOAD,
};
use crate::optimizer::HeterogeneousArray;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub workload: String,
    pub arrival_rate: f64,
    pub body: ModelBody,
    pub simulate: Option<SimulateSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    Parallel {
        m: u32,
        service_time: f64,
        method: Method,
        prefix: String,
    },
    Tandem {
        service_times: Vec<f64>,
        prefix: String,
    },
    Feedback {
        service_time: f64,
        visits: u32,
        name: String,
    },
    Optimize {
        service_times: Vec<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimulateSection {
    pub seed: Option<u64>,
    pub completions: Option<usize>,
    pub warmup: Option<usize>,
}

const SECTIONS: [&str; 6] = ["network", "parallel", "tandem", "feedback", "optimize", "simulate"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "network" => &["workload", "arrival_rate"],
        "parallel" => &["m", "service_time", "method", "prefix"],
        "tandem" => &["stages", "service_time", "service_times", "prefix"],
        "feedback" => &["service_time", "visits", "name"],
        "optimize" => &["service_times"],
        "simulate" => &["seed", "completions", "warmup"],
        _ => &[],
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, (usize, BTreeMap<String, Entry>)>;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_error(line, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(parse_error(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(parse_error(line, format!("duplicate section [{name}]")));
            }
            sections.insert(name.clone(), (line, BTreeMap::new()));
            current = Some(name);
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, found `{trimmed}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let section = current
            .as_ref()
            .ok_or_else(|| parse_error(line, "key outside of any section"))?;
        if !allowed_keys(section).contains(&key.as_str()) {
            return Err(parse_error(line, format!("unknown key `{key}` in [{section}]")));
        }
        let entries = &mut sections.get_mut(section).expect("section registered").1;
        if entries.contains_key(&key) {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
        entries.insert(key, Entry { line, value });
    }
    if sections.is_empty() {
        return Err(parse_error(1, "model file has no sections"));
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    line: usize,
    entries: &'a BTreeMap<String, Entry>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                parse_error(e.line, format!("cannot parse `{}` for `{key}`", e.value))
            }),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| {
            parse_error(self.line, format!("[{}] is missing `{key}`", self.name))
        })
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key)
            .map(|e| parse_list(&e.value).map_err(|m| parse_error(e.line, m)))
            .transpose()
    }
}

/// Comma-separated decimals.
pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| format!("cannot parse `{t}` as a decimal"))
        })
        .collect()
}

fn positive(field: &'static str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::invalid(field, format!("must be a positive decimal, got {x}")))
    }
}

fn positive_list(field: &'static str, xs: Vec<f64>) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::invalid(field, "must not be empty"));
    }
    for x in &xs {
        positive(field, *x)?;
    }
    Ok(xs)
}

impl FromStr for ModelFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let sections = tokenize(text)?;
        let section = |name: &'static str| {
            sections.get(name).map(|(line, entries)| Section {
                name,
                line: *line,
                entries,
            })
        };

        let network = section("network")
            .ok_or_else(|| parse_error(1, "missing [network] section"))?;
        let workload = network
            .get::<String>("workload")?
            .unwrap_or_else(|| DEFAULT_WORKLOAD.to_string());
        if workload.is_empty() || workload.contains(char::is_whitespace) {
            return Err(Error::invalid("workload", "must be a single non-empty word"));
        }
        let arrival_rate: f64 = network.require("arrival_rate")?;
        if !(arrival_rate >= 0.0 && arrival_rate.is_finite()) {
            return Err(Error::invalid(
                "arrival_rate",
                format!("must be a non-negative decimal, got {arrival_rate}"),
            ));
        }

        let present: Vec<&str> = ["parallel", "tandem", "feedback", "optimize"]
            .into_iter()
            .filter(|s| sections.contains_key(*s))
            .collect();
        if present.len() != 1 {
            return Err(Error::invalid(
                "topology",
                format!(
                    "exactly one of [parallel], [tandem], [feedback], [optimize] is required, found {}",
                    present.len()
                ),
            ));
        }

        let body = match present[0] {
            "parallel" => {
                let s = section("parallel").expect("present");
                let m: u32 = s.require("m")?;
                if m == 0 {
                    return Err(Error::invalid("m", "must be >= 1"));
                }
                let method = match s.get::<String>("method")?.as_deref() {
                    None | Some("b") | Some("B") => Method::B,
                    Some("a") | Some("A") => Method::A,
                    Some(other) => {
                        return Err(Error::invalid("method", format!("must be `a` or `b`, got `{other}`")))
                    }
                };
                ModelBody::Parallel {
                    m,
                    service_time: positive("service_time", s.require("service_time")?)?,
                    method,
                    prefix: s
                        .get("prefix")?
                        .unwrap_or_else(|| DEFAULT_PARALLEL_PREFIX.to_string()),
                }
            }
            "tandem" => {
                let s = section("tandem").expect("present");
                let service_times = match (s.get::<u32>("stages")?, s.get::<f64>("service_time")?, s.list("service_times")?) {
                    (Some(n), Some(t), None) => {
                        if n == 0 {
                            return Err(Error::invalid("stages", "must be >= 1"));
                        }
                        vec![positive("service_time", t)?; n as usize]
                    }
                    (None, None, Some(list)) => positive_list("service_times", list)?,
                    _ => {
                        return Err(Error::invalid(
                            "tandem",
                            "give either `stages` with `service_time`, or `service_times`",
                        ))
                    }
                };
                ModelBody::Tandem {
                    service_times,
                    prefix: s
                        .get("prefix")?
                        .unwrap_or_else(|| DEFAULT_TANDEM_PREFIX.to_string()),
                }
            }
            "feedback" => {
                let s = section("feedback").expect("present");
                let visits: u32 = s.require("visits")?;
                if visits == 0 {
                    return Err(Error::invalid("visits", "must be >= 1"));
                }
                ModelBody::Feedback {
                    service_time: positive("service_time", s.require("service_time")?)?,
                    visits,
                    name: s
                        .get("name")?
                        .unwrap_or_else(|| DEFAULT_FEEDBACK_NAME.to_string()),
                }
            }
            _ => {
                let s = section("optimize").expect("present");
                let list = s
                    .list("service_times")?
                    .ok_or_else(|| parse_error(s.line, "[optimize] is missing `service_times`"))?;
                ModelBody::Optimize {
                    service_times: positive_list("service_times", list)?,
                }
            }
        };

        let simulate = match section("simulate") {
            None => None,
            Some(s) => {
                let sim = SimulateSection {
                    seed: s.get("seed")?,
                    completions: s.get("completions")?,
                    warmup: s.get("warmup")?,
                };
                if sim.completions.is_some_and(|c| c < crate::sim::MIN_MEASURED) {
                    return Err(Error::invalid(
                        "completions",
                        format!("must be at least {}", crate::sim::MIN_MEASURED),
                    ));
                }
                Some(sim)
            }
        };

        Ok(ModelFile {
            workload,
            arrival_rate,
            body,
            simulate,
        })
    }
}

pub fn parse_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    std::fs::read_to_string(path)?.parse()
}

impl ModelFile {
    /// Network for topology models; `None` for `[optimize]` models.
    pub fn network(&self) -> Result<Option<OpenNetwork>> {
        let net = match &self.body {
            ModelBody::Parallel {
                m,
                service_time,
                method,
                prefix,
            } => OpenNetwork::parallel(self.arrival_rate, *service_time, *m, *method)?
                .with_prefix(prefix.clone()),
            ModelBody::Tandem {
                service_times,
                prefix,
            } => {
                let stages = service_times
                    .iter()
                    .enumerate()
                    .map(|(i, s)| QueueNode::new(format!("{prefix}{}", i + 1), *s))
                    .collect::<Result<Vec<_>>>()?;
                OpenNetwork::tandem(self.arrival_rate, stages)?
            }
            ModelBody::Feedback {
                service_time,
                visits,
                name,
            } => OpenNetwork::feedback(
                self.arrival_rate,
                QueueNode::with_visits(name.clone(), *service_time, *visits)?,
            )?,
            ModelBody::Optimize { .. } => return Ok(None),
        };
        Ok(Some(net.with_workload(self.workload.clone())))
    }

    pub fn array(&self) -> Result<Option<HeterogeneousArray>> {
        match &self.body {
            ModelBody::Optimize { service_times } => Ok(Some(HeterogeneousArray::new(
                self.arrival_rate,
                service_times.clone(),
            )?)),
            _ => Ok(None),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical dump; parses back to an equal [`ModelFile`].
impl fmt::Display for ModelFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[network]")?;
        writeln!(f, "workload = {}", self.workload)?;
        writeln!(f, "arrival_rate = {}", self.arrival_rate)?;
        writeln!(f)?;
        match &self.body {
            ModelBody::Parallel {
                m,
                service_time,
                method,
                prefix,
            } => {
                writeln!(f, "[parallel]")?;
                writeln!(f, "m = {m}")?;
                writeln!(f, "service_time = {service_time}")?;
                let method = match method {
                    Method::A => "a",
                    Method::B => "b",
                };
                writeln!(f, "method = {method}")?;
                writeln!(f, "prefix = {prefix}")?;
            }
            ModelBody::Tandem {
                service_times,
                prefix,
            } => {
                writeln!(f, "[tandem]")?;
                if service_times.iter().all(|s| *s == service_times[0]) {
                    writeln!(f, "stages = {}", service_times.len())?;
                    writeln!(f, "service_time = {}", service_times[0])?;
                } else {
                    writeln!(f, "service_times = {}", join(service_times))?;
                }
                writeln!(f, "prefix = {prefix}")?;
            }
            ModelBody::Feedback {
                service_time,
                visits,
                name,
            } => {
                writeln!(f, "[feedback]")?;
                writeln!(f, "service_time = {service_time}")?;
                writeln!(f, "visits = {visits}")?;
                writeln!(f, "name = {name}")?;
            }
            ModelBody::Optimize { service_times } => {
                writeln!(f, "[optimize]")?;
                writeln!(f, "service_times = {}", join(service_times))?;
            }
        }
        if let Some(sim) = &self.simulate {
            writeln!(f)?;
            writeln!(f, "[simulate]")?;
            if let Some(seed) = sim.seed {
                writeln!(f, "seed = {seed}")?;
            }
            if let Some(c) = sim.completions {
                writeln!(f, "completions = {c}")?;
            }
            if let Some(w) = sim.warmup {
                writeln!(f, "warmup = {w}")?;
            }
        }
        Ok(())
    }
}

/// Model equivalent to the enumerated four-queue array with `λ = 2` and
/// `S = 0.25` declared by name.
pub fn listing_model() -> ModelFile {
    ModelFile {
        workload: DEFAULT_WORKLOAD.to_string(),
        arrival_rate: 2.0,
        body: ModelBody::Parallel {
            m: 4,
            service_time: 0.25,
            method: Method::B,
            prefix: network::DEFAULT_PARALLEL_PREFIX.to_string(),
        },
        simulate: None,
    }
}
