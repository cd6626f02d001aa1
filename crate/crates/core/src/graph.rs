//! Simple undirected graphs on the node set `[n] = {1, ..., n}`.
//!
//! The edge set is stored as a dense bitset with one bit per unordered pair
//! `{i, j}`, `i < j`, laid out in lexicographic pair order
//! `(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)`. Edge distance is then a
//! popcount of an XOR and the sampler visits each pair exactly once.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Number of unordered node pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the pair `{i, j}` (1-based, `i < j`) in lexicographic order.
#[inline]
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
}

/// Iterator over all unordered pairs of `[n]` in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            bits: vec![0; pair_count(n).div_ceil(WORD)],
        }
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        Graph::empty(n).complement()
    }

    /// Builds a graph from 1-based node pairs in any orientation.
    ///
    /// Repeated and reversed pairs collapse to one edge. Self-loops and
    /// indices outside `[1, n]` are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) outside node range [1, {n}]"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            g.set_pair(pair_index(n, i, j));
        }
        Ok(g)
    }

    /// Graph whose pair `k` (lexicographic order) is an edge iff bit `k` of
    /// `mask` is set. Requires `n(n-1)/2 <= 64`.
    pub fn from_pair_mask(n: usize, mask: u64) -> Result<Self> {
        let m = pair_count(n);
        if m > WORD {
            return Err(Error::Range(format!(
                "{m} pairs on {n} nodes do not fit a 64-bit mask"
            )));
        }
        if m < WORD && mask >> m != 0 {
            return Err(Error::InvalidGraph(format!(
                "mask {mask:#x} sets bits beyond the {m} pairs of a {n}-node graph"
            )));
        }
        let mut g = Graph::empty(n);
        if m > 0 {
            g.bits[0] = mask;
        }
        Ok(g)
    }

    /// Inverse of [`Graph::from_pair_mask`]; `None` when the graph has more
    /// than 64 pairs.
    pub fn pair_mask(&self) -> Option<u64> {
        if pair_count(self.n) > WORD {
            return None;
        }
        Some(self.bits.first().copied().unwrap_or(0))
    }

    pub(crate) fn from_bits(n: usize, bits: Vec<u64>) -> Self {
        debug_assert_eq!(bits.len(), pair_count(n).div_ceil(WORD));
        Graph { n, bits }
    }

    #[inline]
    pub(crate) fn set_pair(&mut self, k: usize) {
        self.bits[k / WORD] |= 1 << (k % WORD);
    }

    /// Whether the pair at lexicographic position `k` is an edge.
    #[inline]
    pub fn contains_pair(&self, k: usize) -> bool {
        self.bits[k / WORD] >> (k % WORD) & 1 == 1
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether `{i, j}` (1-based, either orientation) is an edge.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j || i == 0 || j == 0 || i > self.n || j > self.n {
            return false;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.contains_pair(pair_index(self.n, i, j))
    }

    /// Edges as 1-based `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        pairs(self.n)
            .enumerate()
            .filter(|&(k, _)| self.contains_pair(k))
            .map(|(_, e)| e)
    }

    /// Degree of every node; entry `i - 1` holds the degree of node `i`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i - 1] += 1;
            deg[j - 1] += 1;
        }
        deg
    }

    /// The graph on the same nodes containing exactly the pairs absent here.
    pub fn complement(&self) -> Graph {
        let m = pair_count(self.n);
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        if let Some(last) = bits.last_mut() {
            let used = m % WORD;
            if used != 0 {
                *last &= (1u64 << used) - 1;
            }
        }
        Graph { n: self.n, bits }
    }

    /// Number of pairs present in exactly one of the two graphs.
    pub fn symmetric_difference_len(&self, other: &Graph) -> Result<usize> {
        check_same_order(self, other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Graph Laplacian `L = D - Z` with integer entries.
    pub fn laplacian(&self) -> DMatrix<i64> {
        let mut lap = DMatrix::<i64>::zeros(self.n, self.n);
        for (i, j) in self.edges() {
            let (a, b) = (i - 1, j - 1);
            lap[(a, b)] = -1;
            lap[(b, a)] = -1;
            lap[(a, a)] += 1;
            lap[(b, b)] += 1;
        }
        lap
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

fn check_same_order(a: &Graph, b: &Graph) -> Result<()> {
    if a.n != b.n {
        return Err(Error::NodeCountMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(())
}

/// Size of the symmetric difference of the two edge sets.
pub fn edge_distance(a: &Graph, b: &Graph) -> Result<usize> {
    a.symmetric_difference_len(b)
}

/// Whether `a` and `b` differ in at most `adjacency` edges.
pub fn is_adjacent(a: &Graph, b: &Graph, adjacency: u32) -> Result<bool> {
    Ok(edge_distance(a, b)? <= adjacency as usize)
}

/// Utility of releasing `h` for the sensitive graph `g`: the negated edge
/// distance. Ranges from `0` at `h = g` down to `-n(n-1)/2` at the complement.
pub fn utility(g: &Graph, h: &Graph) -> Result<i64> {
    Ok(-(edge_distance(g, h)? as i64))
}

pub fn complement(g: &Graph) -> Graph {
    g.complement()
}

/// Privacy budget `ε >= 0` and adjacency parameter `A >= 1`.
///
/// `ε = +∞` is accepted and means no privacy: every mechanism then returns
/// its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    adjacency: u32,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, adjacency: u32) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        if adjacency == 0 {
            return Err(Error::InvalidParams(
                "adjacency parameter must be at least 1".into(),
            ));
        }
        Ok(PrivacyParams { epsilon, adjacency })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn adjacency(&self) -> u32 {
        self.adjacency
    }

    /// `ε / A`, the budget per unit of edge distance.
    pub fn epsilon_per_edge(&self) -> f64 {
        self.epsilon / f64::from(self.adjacency)
    }
}
