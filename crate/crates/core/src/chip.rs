//! Device connectivity graph and random placement of circuit sections.
//!
//! The default graph is the 16-qubit heavy-hex-like lattice used by the
//! reference device; an alternative graph can be loaded from JSON. Circuits
//! act on *sections*: connected induced subgraphs grown by uniform random
//! neighbor accretion.

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of qubits in the default device graph.
pub const DEVICE_QUBITS: usize = 16;

/// Coupler list of the default 16-qubit device, as unordered pairs with
/// `a < b`, sorted lexicographically.
pub const DEVICE_EDGES: [(usize, usize); 15] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
];

/// Undirected connected graph of physical qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChipGraph {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ChipGraphFile {
    num_qubits: usize,
    edges: Vec<[usize; 2]>,
}

impl ChipGraph {
    /// Builds a graph from an edge list, validating indices, self-loops and
    /// connectivity. Duplicate edges (in either order) are collapsed.
    pub fn new(num_qubits: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyInput);
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a, b));
            }
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(Error::QubitIndex {
                        index: q,
                        num_qubits,
                    });
                }
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let graph = Self {
            num_qubits,
            edges,
            adjacency,
        };
        if !graph.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(graph)
    }

    /// The default 16-qubit device graph.
    pub fn device() -> Self {
        Self::new(DEVICE_QUBITS, &DEVICE_EDGES).expect("built-in graph is valid")
    }

    /// Parses a graph from its JSON description `{num_qubits, edges}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChipGraphFile = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(file.num_qubits, &edges)
    }

    /// Loads a graph from a JSON file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `q`.
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    fn is_connected(&self) -> bool {
        connected_component_size(self.num_qubits, |q| self.adjacency[q].iter().copied(), 0)
            == self.num_qubits
    }
}

/// BFS component size from `start` over an implicit adjacency function.
fn connected_component_size<I, F>(num_vertices: usize, neighbors: F, start: usize) -> usize
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    let mut seen = vec![false; num_vertices];
    let mut queue = vec![start];
    seen[start] = true;
    let mut size = 0;
    while let Some(v) = queue.pop() {
        size += 1;
        for u in neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                queue.push(u);
            }
        }
    }
    size
}

/// Connected induced subgraph on which a circuit runs.
///
/// Qubits are strictly ascending physical indices; edges are the induced
/// couplers `(a, b)` with `a < b` in lexicographic order. The position of a
/// physical qubit inside `qubits` is its simulation index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitSection {
    qubits: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl QubitSection {
    /// Builds the section induced by `qubits` on `graph`.
    ///
    /// Fails when the list is not strictly ascending, indexes out of range,
    /// or the induced subgraph is disconnected.
    pub fn from_qubits(graph: &ChipGraph, qubits: Vec<usize>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !qubits.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::UnsortedSection(qubits));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= graph.num_qubits()) {
            return Err(Error::QubitIndex {
                index: q,
                num_qubits: graph.num_qubits(),
            });
        }
        let edges: Vec<(usize, usize)> = graph
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| qubits.binary_search(&a).is_ok() && qubits.binary_search(&b).is_ok())
            .collect();
        let section = Self { qubits, edges };
        if !section.is_connected() {
            return Err(Error::DisconnectedSection(section.qubits));
        }
        Ok(section)
    }

    /// Number of qubits in the section.
    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Physical qubit indices, strictly ascending.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Induced couplers `(a, b)` with `a < b`, lexicographic.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Simulation index of physical qubit `q`, if present.
    pub fn position_of(&self, q: usize) -> Option<usize> {
        self.qubits.binary_search(&q).ok()
    }

    fn is_connected(&self) -> bool {
        if self.qubits.len() == 1 {
            return true;
        }
        let index_of = |q: usize| self.qubits.binary_search(&q).unwrap();
        let mut adj = vec![Vec::new(); self.qubits.len()];
        for &(a, b) in &self.edges {
            let (ia, ib) = (index_of(a), index_of(b));
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        connected_component_size(self.qubits.len(), |i| adj[i].iter().copied(), 0)
            == self.qubits.len()
    }
}

/// Samples a uniform random connected section of `n` qubits.
///
/// Starting from a uniform random seed vertex, the section repeatedly adds a
/// vertex chosen uniformly from the frontier (vertices outside the current
/// set adjacent to it) until it has `n` members. `n` must lie in
/// `[2, graph.num_qubits()]`.
pub fn sample_section<R: Rng + ?Sized>(
    graph: &ChipGraph,
    n: usize,
    rng: &mut R,
) -> Result<QubitSection> {
    if n < 2 || n > graph.num_qubits() {
        return Err(Error::SectionSize {
            n,
            min: 2,
            max: graph.num_qubits(),
        });
    }
    let mut members = vec![false; graph.num_qubits()];
    members[rng.gen_range(0..graph.num_qubits())] = true;
    for _ in 1..n {
        let frontier: Vec<usize> = (0..graph.num_qubits())
            .filter(|&v| !members[v] && graph.neighbors(v).iter().any(|&u| members[u]))
            .collect();
        // Non-empty because the graph is connected and the set is not yet full.
        members[frontier[rng.gen_range(0..frontier.len())]] = true;
    }
    let qubits: Vec<usize> = (0..graph.num_qubits()).filter(|&v| members[v]).collect();
    QubitSection::from_qubits(graph, qubits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn device_graph_has_expected_shape() {
        let g = ChipGraph::device();
        assert_eq!(g.num_qubits(), 16);
        assert_eq!(g.edges().len(), 15);
        // Spot-check the couplers around the two degree-3 hubs and make sure
        // the often-mistaken (1, 4) pair is absent.
        assert!(g.has_edge(4, 7));
        assert!(g.has_edge(6, 7));
        assert!(g.has_edge(7, 10));
        assert!(g.has_edge(12, 15));
        assert!(!g.has_edge(1, 4));
        assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn device_graph_degrees() {
        let g = ChipGraph::device();
        let degrees: Vec<usize> = (0..16).map(|q| g.degree(q)).collect();
        assert_eq!(degrees, [1, 2, 2, 2, 1, 2, 1, 3, 3, 1, 2, 2, 3, 2, 2, 1]);
        assert_eq!(degrees.iter().sum::<usize>(), 30);
        assert!(degrees.iter().all(|&d| (1..=3).contains(&d)));
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(matches!(
            ChipGraph::new(4, &[(0, 1), (2, 3)]),
            Err(Error::DisconnectedGraph)
        ));
        assert!(matches!(
            ChipGraph::new(4, &[(0, 0)]),
            Err(Error::SelfLoop(0, 0))
        ));
        assert!(matches!(
            ChipGraph::new(2, &[(0, 5)]),
            Err(Error::QubitIndex { index: 5, .. })
        ));
    }

    #[test]
    fn json_round_trip_matches_builtin() {
        let g = ChipGraph::device();
        let text = serde_json::to_string(&ChipGraphFile {
            num_qubits: 16,
            edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
        })
        .unwrap();
        assert_eq!(ChipGraph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn sections_are_connected_and_sized() {
        let g = ChipGraph::device();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=16 {
            for _ in 0..50 {
                let s = sample_section(&g, n, &mut rng).unwrap();
                assert_eq!(s.len(), n);
                assert!(s.qubits().windows(2).all(|w| w[0] < w[1]));
                // from_qubits re-validates connectivity; rebuild to be sure.
                QubitSection::from_qubits(&g, s.qubits().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn full_section_is_whole_device() {
        let g = ChipGraph::device();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sample_section(&g, 16, &mut rng).unwrap();
        assert_eq!(s.qubits(), (0..16).collect::<Vec<_>>());
        assert_eq!(s.edges().len(), 15);
    }

    #[test]
    fn section_size_bounds_are_enforced() {
        let g = ChipGraph::device();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_section(&g, 1, &mut rng),
            Err(Error::SectionSize { n: 1, .. })
        ));
        assert!(matches!(
            sample_section(&g, 17, &mut rng),
            Err(Error::SectionSize { n: 17, .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let g = ChipGraph::device();
        for seed in 0..20 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(
                sample_section(&g, 7, &mut a).unwrap(),
                sample_section(&g, 7, &mut b).unwrap()
            );
        }
    }

    #[test]
    fn disconnected_induced_subset_is_rejected() {
        let g = ChipGraph::device();
        // 0 and 3 are both on the top row but not adjacent.
        assert!(matches!(
            QubitSection::from_qubits(&g, vec![0, 3]),
            Err(Error::DisconnectedSection(_))
        ));
        assert!(matches!(
            QubitSection::from_qubits(&g, vec![1, 0]),
            Err(Error::UnsortedSection(_))
        ));
    }

    #[test]
    fn induced_edges_are_lexicographic() {
        let g = ChipGraph::device();
        let s = QubitSection::from_qubits(&g, vec![4, 6, 7, 10, 12]).unwrap();
        assert_eq!(s.edges(), &[(4, 7), (6, 7), (7, 10), (10, 12)]);
        assert_eq!(s.position_of(7), Some(2));
        assert_eq!(s.position_of(5), None);
    }
}
