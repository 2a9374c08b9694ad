//! Zachary's karate club network with its two-faction split.

use toporeg_core::Graph;

use crate::error::{Error, Result};

const EDGES: &str = include_str!("../data/karate_edges.txt");
const LABELS: &str = include_str!("../data/karate_labels.csv");

/// The karate network, its node names and community labels (0 for the
/// instructor's faction, 1 for the officer's).
#[derive(Debug, Clone, PartialEq)]
pub struct Karate {
    pub graph: Graph,
    pub names: Vec<String>,
    pub labels: Vec<usize>,
}

pub fn load_karate() -> Result<Karate> {
    let missing = || Error::FixtureMissing("karate");
    let mut names = Vec::new();
    let mut labels = Vec::new();
    for line in LABELS.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let (id, community) = line.split_once(',').ok_or_else(missing)?;
        names.push(id.to_string());
        labels.push(match community {
            "Mr._Hi" => 0,
            "Officer" => 1,
            _ => return Err(missing()),
        });
    }
    let index = |name: &str| names.iter().position(|n| n == name).ok_or_else(missing);
    let mut edges = Vec::new();
    for line in EDGES.lines().filter(|l| !l.trim().is_empty()) {
        let mut it = line.split_whitespace();
        let (u, v) = (it.next().ok_or_else(missing)?, it.next().ok_or_else(missing)?);
        edges.push((index(u)?, index(v)?));
    }
    let graph = Graph::new(names.len(), edges)?;
    if graph.num_nodes() != 34 || graph.num_edges() != 78 {
        return Err(missing());
    }
    Ok(Karate { graph, names, labels })
}
