//! Grid and demand-instance data: types, validation, JSON I/O and the
//! randomized instance generator.
//!
//! Units are taken verbatim from the data file: MW for power and flows,
//! per-unit susceptance for lines.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("network is not connected: {0}")]
    Disconnected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A node with one generator and one load. Buses without generation carry
/// `p_min = p_max = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    /// Marginal generation cost (currency/MWh).
    pub cost: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Baseline demand (MW).
    pub d_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: LineId,
    #[serde(rename = "from")]
    pub from_bus: BusId,
    #[serde(rename = "to")]
    pub to_bus: BusId,
    #[serde(rename = "b")]
    pub susceptance: f64,
    pub f_min: f64,
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NetworkFile {
    name: String,
    buses: Vec<Bus>,
    lines: Vec<Line>,
}

/// Validated, immutable grid description.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    name: String,
    buses: Vec<Bus>,
    lines: Vec<Line>,
    bus_pos: HashMap<BusId, usize>,
    line_pos: HashMap<LineId, usize>,
    /// Per line: (from position, to position).
    ends: Vec<(usize, usize)>,
}

impl Network {
    /// Builds a network, checking every bus/line invariant and connectivity.
    pub fn new(name: impl Into<String>, buses: Vec<Bus>, lines: Vec<Line>) -> Result<Self, DataError> {
        let name = name.into();
        if buses.is_empty() {
            return Err(DataError::Validation("network has no buses".into()));
        }
        let mut bus_pos = HashMap::with_capacity(buses.len());
        for (i, b) in buses.iter().enumerate() {
            if bus_pos.insert(b.id, i).is_some() {
                return Err(DataError::Validation(format!("duplicate bus id {}", b.id)));
            }
            let finite = [b.cost, b.p_min, b.p_max, b.d_base].iter().all(|v| v.is_finite());
            if !finite {
                return Err(DataError::Validation(format!("bus {}: non-finite field", b.id)));
            }
            if b.p_min > b.p_max {
                return Err(DataError::Validation(format!(
                    "bus {}: p_min {} exceeds p_max {}",
                    b.id, b.p_min, b.p_max
                )));
            }
            if b.p_min < 0.0 {
                return Err(DataError::Validation(format!("bus {}: negative p_min {}", b.id, b.p_min)));
            }
            if b.d_base < 0.0 {
                return Err(DataError::Validation(format!("bus {}: negative d_base {}", b.id, b.d_base)));
            }
            if b.cost < 0.0 {
                return Err(DataError::Validation(format!("bus {}: negative cost {}", b.id, b.cost)));
            }
        }

        let mut line_pos = HashMap::with_capacity(lines.len());
        let mut ends = Vec::with_capacity(lines.len());
        for (i, l) in lines.iter().enumerate() {
            if line_pos.insert(l.id, i).is_some() {
                return Err(DataError::Validation(format!("duplicate line id {}", l.id)));
            }
            let from = *bus_pos.get(&l.from_bus).ok_or_else(|| {
                DataError::Validation(format!("line {}: unknown from bus {}", l.id, l.from_bus))
            })?;
            let to = *bus_pos.get(&l.to_bus).ok_or_else(|| {
                DataError::Validation(format!("line {}: unknown to bus {}", l.id, l.to_bus))
            })?;
            if from == to {
                return Err(DataError::Validation(format!("line {}: both ends at bus {}", l.id, l.from_bus)));
            }
            if !(l.susceptance > 0.0) || !l.susceptance.is_finite() {
                return Err(DataError::Validation(format!(
                    "line {}: susceptance must be positive, got {}",
                    l.id, l.susceptance
                )));
            }
            if !(l.f_min < 0.0 && 0.0 < l.f_max) || !l.f_min.is_finite() || !l.f_max.is_finite() {
                return Err(DataError::Validation(format!(
                    "line {}: thermal limits must satisfy f_min < 0 < f_max, got [{}, {}]",
                    l.id, l.f_min, l.f_max
                )));
            }
            ends.push((from, to));
        }

        let labels = component_labels(buses.len(), ends.iter().copied());
        if let Some(pos) = labels.iter().position(|&c| c != labels[0]) {
            return Err(DataError::Disconnected(format!(
                "bus {} is not reachable from bus {}",
                buses[pos].id, buses[0].id
            )));
        }

        Ok(Network {
            name,
            buses,
            lines,
            bus_pos,
            line_pos,
            ends,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| DataError::Parse(e.to_string()))?;
        Network::new(file.name, file.buses, file.lines)
    }

    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            name: self.name.clone(),
            buses: self.buses.clone(),
            lines: self.lines.clone(),
        };
        serde_json::to_string_pretty(&file).expect("network serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn num_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn bus_position(&self, id: BusId) -> Option<usize> {
        self.bus_pos.get(&id).copied()
    }

    pub fn line_position(&self, id: LineId) -> Option<usize> {
        self.line_pos.get(&id).copied()
    }

    /// Bus positions (from, to) of the line at position `line`.
    pub fn line_ends(&self, line: usize) -> (usize, usize) {
        self.ends[line]
    }

    /// Position of the angle-reference bus (the lowest bus id).
    pub fn reference_bus(&self) -> usize {
        (0..self.buses.len())
            .min_by_key(|&i| self.buses[i].id)
            .expect("network has buses")
    }

    pub fn total_p_max(&self) -> f64 {
        self.buses.iter().map(|b| b.p_max).sum()
    }

    pub fn max_cost(&self) -> f64 {
        self.buses.iter().map(|b| b.cost).fold(0.0, f64::max)
    }

    pub fn base_demand(&self) -> Vec<f64> {
        self.buses.iter().map(|b| b.d_base).collect()
    }

    /// Connected-component label per bus when only lines with `closed(l)` are kept.
    pub fn components(&self, closed: impl Fn(usize) -> bool) -> Vec<usize> {
        component_labels(
            self.buses.len(),
            self.ends.iter().enumerate().filter(|(l, _)| closed(*l)).map(|(_, e)| *e),
        )
    }
}

/// Union-find labelling; each label is the smallest bus position in its component.
fn component_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Network::from_json(&text)
}

pub fn save_network(path: impl AsRef<Path>, net: &Network) -> Result<(), DataError> {
    let path = path.as_ref();
    fs::write(path, net.to_json()).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub index: u64,
}

/// One demand realization over the buses of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(rename = "network")]
    pub network_name: String,
    #[serde(flatten)]
    pub seed_info: SeedInfo,
    pub demand: Vec<f64>,
}

impl Instance {
    /// The network's baseline demand as an instance.
    pub fn baseline(net: &Network) -> Self {
        Instance {
            network_name: net.name().to_string(),
            seed_info: SeedInfo { seed: 0, index: 0 },
            demand: net.base_demand(),
        }
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn validate_against(&self, net: &Network) -> Result<(), DataError> {
        if self.demand.len() != net.num_buses() {
            return Err(DataError::Validation(format!(
                "instance {} has {} demand entries for {} buses",
                self.seed_info.index,
                self.demand.len(),
                net.num_buses()
            )));
        }
        if let Some((i, d)) = self
            .demand
            .iter()
            .enumerate()
            .find(|(_, d)| !d.is_finite() || **d < 0.0)
        {
            return Err(DataError::Validation(format!(
                "instance {}: bus {} has demand {}",
                self.seed_info.index,
                net.buses()[i].id,
                d
            )));
        }
        let total = self.total_demand();
        if total > net.total_p_max() {
            return Err(DataError::Validation(format!(
                "instance {}: total demand {} exceeds total capacity {}",
                self.seed_info.index,
                total,
                net.total_p_max()
            )));
        }
        Ok(())
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
fn unit_draw(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples `count` demand vectors with `d_n ~ U[(1-spread) d̂_n, (1+spread) d̂_n]`.
///
/// Instance `i` uses ChaCha8 seeded with `seed` on stream `i`, drawing one
/// value per bus in bus order, so every instance is reproducible on its own.
pub fn generate_instances(net: &Network, count: usize, seed: u64, spread: f64) -> Result<Vec<Instance>, DataError> {
    if count == 0 {
        return Err(DataError::Validation("instance count must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spread) {
        return Err(DataError::Validation(format!("spread must lie in [0, 1], got {spread}")));
    }
    (0..count as u64)
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let demand = net
                .buses()
                .iter()
                .map(|b| {
                    let lo = (1.0 - spread) * b.d_base;
                    let hi = (1.0 + spread) * b.d_base;
                    (lo + unit_draw(&mut rng) * (hi - lo)).clamp(lo, hi)
                })
                .collect();
            let inst = Instance {
                network_name: net.name().to_string(),
                seed_info: SeedInfo { seed, index },
                demand,
            };
            inst.validate_against(net)?;
            Ok(inst)
        })
        .collect()
}

pub fn save_instances(path: impl AsRef<Path>, instances: &[Instance]) -> Result<(), DataError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(instances).expect("instances serialize");
    fs::write(path, text).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an instance list and checks every entry against `net`.
pub fn load_instances(path: impl AsRef<Path>, net: &Network) -> Result<Vec<Instance>, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let instances: Vec<Instance> = serde_json::from_str(&text).map_err(|e| DataError::Parse(e.to_string()))?;
    for inst in &instances {
        inst.validate_against(net)?;
    }
    Ok(instances)
}
