//! Line-adjacency graph and the distance-k line neighborhoods used to decide
//! which switching variables stay binary in a bounding problem.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::netmodel::{LineId, Network};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopoError {
    #[error("unknown line {0}")]
    UnknownLine(LineId),
}

/// Graph whose vertices are lines; two lines are adjacent when they share a bus.
/// Lines are addressed by their position in the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraph {
    ids: Vec<LineId>,
    adjacency: Vec<Vec<usize>>,
}

pub fn build_line_graph(net: &Network) -> LineGraph {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); net.num_buses()];
    for l in 0..net.num_lines() {
        let (a, b) = net.line_ends(l);
        incident[a].push(l);
        incident[b].push(l);
    }
    let adjacency = (0..net.num_lines())
        .map(|l| {
            let (a, b) = net.line_ends(l);
            let mut adj: Vec<usize> = incident[a]
                .iter()
                .chain(&incident[b])
                .copied()
                .filter(|&j| j != l)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect();
    LineGraph {
        ids: net.lines().iter().map(|l| l.id).collect(),
        adjacency,
    }
}

impl LineGraph {
    pub fn num_lines(&self) -> usize {
        self.ids.len()
    }

    pub fn line_id(&self, pos: usize) -> LineId {
        self.ids[pos]
    }

    pub fn position(&self, id: LineId) -> Result<usize, TopoError> {
        self.ids.iter().position(|&l| l == id).ok_or(TopoError::UnknownLine(id))
    }

    /// Positions of the lines sharing a bus with `pos`.
    pub fn adjacent(&self, pos: usize) -> &[usize] {
        &self.adjacency[pos]
    }

    /// Positions of all lines within line-graph distance `k` of `pos`,
    /// excluding `pos` itself, in ascending order.
    pub fn neighborhood_positions(&self, pos: usize, k: usize) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        let mut dist = vec![usize::MAX; self.num_lines()];
        dist[pos] = 0;
        let mut queue = VecDeque::from([pos]);
        let mut out = Vec::new();
        while let Some(cur) = queue.pop_front() {
            if dist[cur] == k {
                continue;
            }
            for &next in &self.adjacency[cur] {
                if dist[next] == usize::MAX {
                    dist[next] = dist[cur] + 1;
                    out.push(next);
                    queue.push_back(next);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Neighborhood of every line at level `k`, computed once.
    pub fn all_neighborhoods(&self, k: usize) -> Vec<Vec<usize>> {
        (0..self.num_lines()).map(|l| self.neighborhood_positions(l, k)).collect()
    }

    /// Largest line-graph distance from `pos` to any other line.
    pub fn eccentricity(&self, pos: usize) -> usize {
        let mut k = 0;
        while self.neighborhood_positions(pos, k).len() + 1 < self.num_lines() {
            k += 1;
        }
        k
    }
}

/// Lines at line-graph distance at most `k` from `line`, excluding `line`.
pub fn neighborhood(g: &LineGraph, line: LineId, k: usize) -> Result<BTreeSet<LineId>, TopoError> {
    let pos = g.position(line)?;
    Ok(g.neighborhood_positions(pos, k)
        .into_iter()
        .map(|p| g.line_id(p))
        .collect())
}
