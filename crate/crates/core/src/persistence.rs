//! Persistent homology of alpha filtrations over GF(2).
//!
//! Columns of the boundary matrix are reduced left to right in filtration
//! order. Column entries are filtration positions kept sorted, so the pivot
//! is the last entry and column addition is a sorted symmetric difference.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::{Filtration, Simplex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dimension: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_simplex: usize,
    pub death_simplex: Option<usize>,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death_simplex.is_none()
    }

    pub fn midlife(&self) -> f64 {
        (self.death + self.birth) / 2.0
    }
}

/// Pairs of one homology dimension, most persistent first.
///
/// Essential pairs lead; ties are broken by birth, then birth simplex index.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn finite(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| !p.is_essential())
    }
}

fn diagram_order(a: &PersistencePair, b: &PersistencePair) -> Ordering {
    b.persistence().total_cmp(&a.persistence()).then(a.birth.total_cmp(&b.birth)).then(a.birth_simplex.cmp(&b.birth_simplex))
}

/// Full output of a reduction: every pairing, including zero-persistence
/// ones, and the diagrams built from the nonzero ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Persistence {
    /// All pairs in order of the death (or birth, if essential) position.
    pub all_pairs: Vec<PersistencePair>,
    pub diagrams: Vec<PersistenceDiagram>,
}

impl Persistence {
    pub fn diagram(&self, dimension: usize) -> &PersistenceDiagram {
        &self.diagrams[dimension]
    }
}

fn add_into(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

struct Reduction {
    /// Death position for every birth position that is paired.
    pairs: Vec<(usize, usize)>,
    /// Positions that are never paired.
    essential: Vec<usize>,
    /// For tracked edge columns: the cycle (as filtration positions) that the
    /// column's simplex closes, i.e. the V column of a zero reduced column.
    cycles: Vec<Option<Vec<usize>>>,
}

fn reduce(filtration: &Filtration, track_cycles: bool) -> Reduction {
    let order = filtration.order();
    let total = order.len();
    let mut position = vec![0usize; total];
    for (pos, &s) in order.iter().enumerate() {
        position[s] = pos;
    }
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(total);
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut pivot_owner: Vec<Option<usize>> = vec![None; total];
    let mut paired = vec![false; total];
    let mut pairs = Vec::new();
    let mut cycles = vec![None; if track_cycles { total } else { 0 }];

    for (pos, &s) in order.iter().enumerate() {
        let mut col: Vec<usize> = filtration.boundary(s).into_iter().map(|f| position[f]).collect();
        col.sort_unstable();
        let is_edge = filtration.simplices()[s].dimension() == 1;
        let mut chain = if track_cycles && is_edge { vec![pos] } else { Vec::new() };
        while let Some(&low) = col.last() {
            match pivot_owner[low] {
                Some(other) => {
                    add_into(&mut col, &columns[other]);
                    if track_cycles && is_edge {
                        add_into(&mut chain, &chains[other]);
                    }
                }
                None => break,
            }
        }
        match col.last() {
            Some(&low) => {
                pivot_owner[low] = Some(pos);
                paired[low] = true;
                paired[pos] = true;
                pairs.push((low, pos));
            }
            None => {
                if track_cycles && is_edge {
                    cycles[pos] = Some(chain.clone());
                }
            }
        }
        columns.push(col);
        chains.push(chain);
    }
    let essential = (0..total).filter(|&p| !paired[p]).collect();
    Reduction { pairs, essential, cycles }
}

/// Persistence diagrams of dimensions `0..=max_dim` (at most 1 is meaningful
/// for planar complexes; higher dimensions come back empty).
pub fn compute_persistence(filtration: &Filtration, max_dim: usize) -> Persistence {
    let red = reduce(filtration, false);
    let order = filtration.order();
    let values = filtration.values();
    let dim_of = |pos: usize| filtration.simplices()[order[pos]].dimension();

    let mut all_pairs: Vec<PersistencePair> = red
        .pairs
        .iter()
        .map(|&(b, d)| PersistencePair {
            dimension: dim_of(b),
            birth: values[order[b]],
            death: values[order[d]],
            birth_simplex: order[b],
            death_simplex: Some(order[d]),
        })
        .collect();
    all_pairs.extend(red.essential.iter().map(|&b| PersistencePair {
        dimension: dim_of(b),
        birth: values[order[b]],
        death: f64::INFINITY,
        birth_simplex: order[b],
        death_simplex: None,
    }));

    let diagrams = (0..=max_dim)
        .map(|dim| {
            let mut pairs: Vec<PersistencePair> = all_pairs.iter().filter(|p| p.dimension == dim && p.death > p.birth).copied().collect();
            pairs.sort_by(diagram_order);
            PersistenceDiagram { dimension: dim, pairs }
        })
        .collect();
    Persistence { all_pairs, diagrams }
}

/// Number of pairs alive at `t`, i.e. with `birth <= t < death`.
pub fn betti(diagram: &PersistenceDiagram, t: f64) -> usize {
    diagram.pairs.iter().filter(|p| p.birth <= t && t < p.death).count()
}

/// Closed vertex loop of the cycle created by the birth edge of a finite
/// 1-dimensional pair. The loop starts at its lowest point index and
/// continues towards the smaller of that vertex's two neighbors.
pub fn representative_cycle(filtration: &Filtration, diagram: &PersistenceDiagram, pair_index: usize) -> Result<Vec<usize>> {
    if diagram.dimension != 1 || diagram.is_empty() {
        return Err(Error::NoCycle);
    }
    let pair = diagram.pairs.get(pair_index).ok_or(Error::InvalidPair { index: pair_index })?;
    if pair.is_essential() {
        return Err(Error::InvalidPair { index: pair_index });
    }
    let birth = pair.birth_simplex;
    if birth >= filtration.len() || filtration.simplices()[birth].dimension() != 1 {
        return Err(Error::InvalidPair { index: pair_index });
    }
    let red = reduce(filtration, true);
    let pos = filtration.order().iter().position(|&s| s == birth).expect("simplex in order");
    let chain = red.cycles[pos].as_ref().ok_or(Error::InvalidPair { index: pair_index })?;
    let edges: Vec<[usize; 2]> = chain
        .iter()
        .map(|&p| match filtration.simplices()[filtration.order()[p]] {
            Simplex::Edge(e) => e,
            _ => unreachable!("cycle chains contain edges only"),
        })
        .collect();
    edges_to_loop(&edges)
}

/// Turns an edge set into a single closed loop, or fails with `NotALoop`.
pub(crate) fn edges_to_loop(edges: &[[usize; 2]]) -> Result<Vec<usize>> {
    if edges.len() < 3 {
        return Err(Error::NotALoop);
    }
    let mut verts: Vec<usize> = edges.iter().flat_map(|e| e.iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    let local = |v: usize| verts.binary_search(&v).expect("vertex listed");
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for e in edges {
        nbrs[local(e[0])].push(e[1]);
        nbrs[local(e[1])].push(e[0]);
    }
    if nbrs.iter().any(|n| n.len() != 2) {
        return Err(Error::NotALoop);
    }
    let start = verts[0];
    let first = nbrs[0][0].min(nbrs[0][1]);
    let mut out = vec![start];
    let (mut prev, mut cur) = (start, first);
    while cur != start {
        out.push(cur);
        let n = &nbrs[local(cur)];
        let next = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = next;
        if out.len() > verts.len() {
            return Err(Error::NotALoop);
        }
    }
    if out.len() != verts.len() {
        return Err(Error::NotALoop);
    }
    Ok(out)
}
