use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyKind {
    Line,
    Ring,
    HeavyHex,
    Complete,
}

impl TopologyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TopologyKind::Line => "line",
            TopologyKind::Ring => "ring",
            TopologyKind::HeavyHex => "heavy-hex",
            TopologyKind::Complete => "complete",
        }
    }
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(TopologyKind::Line),
            "ring" => Ok(TopologyKind::Ring),
            "heavy-hex" => Ok(TopologyKind::HeavyHex),
            "complete" => Ok(TopologyKind::Complete),
            other => Err(Error::InvalidArgument(format!("unknown topology '{other}'"))),
        }
    }
}

/// Qubit connectivity graph. Edges are stored as `(i, j)` with `i < j`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_edges(kind: TopologyKind, n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .filter(|(a, b)| a != b)
            .collect();
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Topology {
            kind,
            n,
            edges,
            adjacency,
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Whether `subset` induces a connected subgraph.
    pub fn is_connected_subset(&self, subset: &[usize]) -> bool {
        let Some(&start) = subset.first() else {
            return false;
        };
        let members: BTreeSet<usize> = subset.iter().copied().collect();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if members.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == members.len()
    }
}

/// Build a connectivity graph with deterministic node numbering.
///
/// Heavy-hex is generated as a horizontal chain of `k` hexagons (brick-wall
/// layout) with an extra qubit on every edge, giving `n = 9k + 3`. Numbering:
/// top-row vertices left to right, bottom-row vertices, then one edge qubit
/// per hexagon-lattice edge in sorted edge order.
pub fn build_topology(kind: TopologyKind, n: usize) -> Result<Topology> {
    if n == 0 {
        return Err(Error::InvalidArgument("topology needs at least one qubit".into()));
    }
    let edges: Vec<(usize, usize)> = match kind {
        TopologyKind::Line => (1..n).map(|i| (i - 1, i)).collect(),
        TopologyKind::Ring => {
            let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            if n > 2 {
                e.push((0, n - 1));
            }
            e
        }
        TopologyKind::Complete => (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect(),
        TopologyKind::HeavyHex => return heavy_hex(n),
    };
    Ok(Topology::from_edges(kind, n, edges))
}

fn heavy_hex(n: usize) -> Result<Topology> {
    if n < 12 || !(n - 3).is_multiple_of(9) {
        return Err(Error::HeavyHexSize(n));
    }
    let cells = (n - 3) / 9;
    let width = 2 * cells + 1;
    let top = |c: usize| c;
    let bottom = |c: usize| width + c;
    let mut hex_edges = Vec::new();
    for c in 1..width {
        hex_edges.push((top(c - 1), top(c)));
        hex_edges.push((bottom(c - 1), bottom(c)));
    }
    for c in (0..width).step_by(2) {
        hex_edges.push((top(c), bottom(c)));
    }
    hex_edges.sort_unstable();
    let vertices = 2 * width;
    debug_assert_eq!(vertices + hex_edges.len(), n);
    let edges = hex_edges
        .iter()
        .enumerate()
        .flat_map(|(e, &(a, b))| {
            let mid = vertices + e;
            [(a, mid), (mid, b)]
        })
        .collect::<Vec<_>>();
    Ok(Topology::from_edges(TopologyKind::HeavyHex, n, edges))
}

/// All connected vertex subsets of size `2..=max_locality`, ordered by size
/// and then lexicographically. Each subset is sorted ascending.
pub fn enumerate_subsets(top: &Topology, max_locality: usize) -> Result<Vec<Vec<usize>>> {
    if max_locality < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximum locality must be at least 2, got {max_locality}"
        )));
    }
    let mut out = Vec::new();
    let mut layer: BTreeSet<Vec<usize>> = top.edges.iter().map(|&(a, b)| vec![a, b]).collect();
    for size in 2..=max_locality.min(top.n) {
        if size > 2 {
            let mut next = BTreeSet::new();
            for set in &layer {
                for &v in set {
                    for &w in top.neighbors(v) {
                        if set.binary_search(&w).is_err() {
                            let mut grown = set.clone();
                            let pos = grown.binary_search(&w).unwrap_err();
                            grown.insert(pos, w);
                            next.insert(grown);
                        }
                    }
                }
            }
            layer = next;
        }
        out.extend(layer.iter().cloned());
    }
    Ok(out)
}
