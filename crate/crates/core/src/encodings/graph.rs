use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(u32),
    #[error("pigeon {pigeon} lists {got} holes, expected {expected}")]
    NotLeftRegular { pigeon: usize, got: usize, expected: usize },
    #[error("pigeon {pigeon} lists hole {hole} twice")]
    RepeatedHole { pigeon: usize, hole: u32 },
    #[error("hole {hole} of pigeon {pigeon} out of range")]
    HoleOutOfRange { pigeon: usize, hole: u32 },
}

/// A simple undirected graph on `0..n_vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    /// Normalised `(u, v)` with `u < v`, sorted, no repeats.
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n_vertices: usize,
    edges: Vec<(u32, u32)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;
    fn try_from(r: RawGraph) -> Result<Self, GraphError> {
        Graph::new(r.n_vertices, r.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> RawGraph {
        RawGraph { n_vertices: g.n, edges: g.edges }
    }
}

impl Graph {
    /// Repeated edges are merged; self-loops are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph, GraphError> {
        let mut es = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for x in [u, v] {
                if x as usize >= n {
                    return Err(GraphError::VertexOutOfRange(x));
                }
            }
            es.push((u.min(v), u.max(v)));
        }
        es.sort_unstable();
        es.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &es {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: es, adj })
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n, []).expect("no edges")
    }

    pub fn complete(n: usize) -> Graph {
        let n32 = n as u32;
        Graph::new(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)))).expect("simple")
    }

    pub fn cycle(n: usize) -> Graph {
        let n32 = n as u32;
        Graph::new(n, (0..n32).map(|u| (u, (u + 1) % n32))).expect("n >= 3 gives a simple cycle")
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        (u as usize) < self.n && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Whether `colouring` (one colour per vertex) is proper.
    pub fn is_proper_colouring(&self, colouring: &[usize]) -> bool {
        colouring.len() == self.n && self.edges.iter().all(|&(u, v)| colouring[u as usize] != colouring[v as usize])
    }
}

/// A left-regular bipartite graph: pigeon `i` has the ordered hole list
/// `N(i)` of length `k`, position `c` being its `c`-th edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFphp", into = "RawFphp")]
pub struct FphpInstance {
    n_holes: usize,
    k: usize,
    neighbours: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct RawFphp {
    n_holes: usize,
    k: usize,
    neighbours: Vec<Vec<u32>>,
}

impl TryFrom<RawFphp> for FphpInstance {
    type Error = GraphError;
    fn try_from(r: RawFphp) -> Result<Self, GraphError> {
        FphpInstance::new(r.n_holes, r.k, r.neighbours)
    }
}

impl From<FphpInstance> for RawFphp {
    fn from(b: FphpInstance) -> RawFphp {
        RawFphp { n_holes: b.n_holes, k: b.k, neighbours: b.neighbours }
    }
}

impl FphpInstance {
    pub fn new(n_holes: usize, k: usize, neighbours: Vec<Vec<u32>>) -> Result<FphpInstance, GraphError> {
        for (i, nb) in neighbours.iter().enumerate() {
            if nb.len() != k {
                return Err(GraphError::NotLeftRegular { pigeon: i, got: nb.len(), expected: k });
            }
            for (x, &h) in nb.iter().enumerate() {
                if h as usize >= n_holes {
                    return Err(GraphError::HoleOutOfRange { pigeon: i, hole: h });
                }
                if nb[..x].contains(&h) {
                    return Err(GraphError::RepeatedHole { pigeon: i, hole: h });
                }
            }
        }
        Ok(FphpInstance { n_holes, k, neighbours })
    }

    /// Every pigeon adjacent to every hole, in ascending hole order.
    pub fn complete(n_pigeons: usize, n_holes: usize) -> FphpInstance {
        let row: Vec<u32> = (0..n_holes as u32).collect();
        FphpInstance::new(n_holes, n_holes, vec![row; n_pigeons]).expect("complete bipartite is regular")
    }

    pub fn n_pigeons(&self) -> usize {
        self.neighbours.len()
    }

    pub fn n_holes(&self) -> usize {
        self.n_holes
    }

    /// Left degree.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.neighbours[i]
    }

    pub fn all_neighbours(&self) -> &[Vec<u32>] {
        &self.neighbours
    }

    /// `(pigeon, edge position)` pairs landing in hole `j`, ascending by pigeon.
    pub fn pigeons_at(&self, j: u32) -> Vec<(usize, usize)> {
        self.neighbours.iter().enumerate().filter_map(|(i, nb)| nb.iter().position(|&h| h == j).map(|c| (i, c))).collect()
    }

    pub fn right_degree(&self) -> usize {
        (0..self.n_holes as u32).map(|j| self.pigeons_at(j).len()).max().unwrap_or(0)
    }

    /// Whether `choice[i]` (an edge position per pigeon) is injective on holes.
    pub fn is_valid_mapping(&self, choice: &[usize]) -> bool {
        if choice.len() != self.n_pigeons() || choice.iter().any(|&c| c >= self.k) {
            return false;
        }
        let mut used = vec![false; self.n_holes];
        for (i, &c) in choice.iter().enumerate() {
            let h = self.neighbours[i][c] as usize;
            if used[h] {
                return false;
            }
            used[h] = true;
        }
        true
    }
}
