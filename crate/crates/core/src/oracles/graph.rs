use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::oracle::{validate_query, IndependenceOracle, QueryCounter};
use crate::varset::VarSet;

/// An undirected graph over a ground set: no self-loops, symmetric edges.
#[derive(Debug, Clone)]
pub struct UndirectedGraph {
    ground: GroundSet,
    edges: Vec<(usize, usize)>,
    /// Neighbour bitmask per node.
    adj: Vec<VarSet>,
}

impl UndirectedGraph {
    pub fn new(ground: GroundSet, edges: &[(usize, usize)]) -> Result<UndirectedGraph> {
        let d = ground.size();
        let mut adj = vec![VarSet::EMPTY; d];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            ground.check_node(u)?;
            ground.check_node(v)?;
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
            }
            if !adj[u].contains(v) {
                normalized.push((u.min(v), u.max(v)));
            }
            adj[u] = adj[u].with(v);
            adj[v] = adj[v].with(u);
        }
        normalized.sort_unstable();
        Ok(UndirectedGraph {
            ground,
            edges: normalized,
            adj,
        })
    }

    /// The path graph `1 - 2 - ... - d`.
    pub fn path(d: usize) -> Result<UndirectedGraph> {
        let ground = GroundSet::new(d)?;
        let edges: Vec<_> = (0..d.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        UndirectedGraph::new(ground, &edges)
    }

    /// The complete graph on `d` nodes.
    pub fn complete(d: usize) -> Result<UndirectedGraph> {
        let ground = GroundSet::new(d)?;
        let mut edges = Vec::new();
        for u in 0..d {
            for v in u + 1..d {
                edges.push((u, v));
            }
        }
        UndirectedGraph::new(ground, &edges)
    }

    /// The empty graph on `d` nodes.
    pub fn empty(d: usize) -> Result<UndirectedGraph> {
        UndirectedGraph::new(GroundSet::new(d)?, &[])
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> VarSet {
        self.adj[u]
    }

    /// The subgraph keeping only edges with both endpoints in `keep`.
    /// The ground set is unchanged; removed nodes become isolated.
    pub fn induced(&self, keep: VarSet) -> UndirectedGraph {
        let edges: Vec<_> = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| keep.contains(u) && keep.contains(v))
            .collect();
        UndirectedGraph::new(self.ground.clone(), &edges).expect("induced edges are valid")
    }

    /// Nodes reachable from `start` (a set of sources) in the graph with
    /// `blocked` deleted. Sources inside `blocked` are ignored.
    pub fn reachable(&self, start: VarSet, blocked: VarSet) -> VarSet {
        let allowed = self.ground.all().difference(blocked);
        let mut visited = start.intersection(allowed);
        let mut frontier = visited;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for u in frontier.iter() {
                next = next.union(self.adj[u]);
            }
            next = next.intersection(allowed).difference(visited);
            visited = visited.union(next);
            frontier = next;
        }
        visited
    }

    /// Connected components of the whole graph, each a set of nodes,
    /// ordered by smallest member.
    pub fn components(&self) -> Vec<VarSet> {
        let mut remaining = self.ground.all();
        let mut out = Vec::new();
        while let Some(s) = remaining.min() {
            let comp = self.reachable(VarSet::singleton(s), VarSet::EMPTY);
            out.push(comp);
            remaining = remaining.difference(comp);
        }
        out
    }

    /// The separation oracle: `A ⫫ B | C` iff deleting `C` disconnects
    /// `A` from `B`.
    pub fn separation_oracle(&self) -> SeparationOracle {
        SeparationOracle {
            graph: self.clone(),
            count: QueryCounter::default(),
        }
    }

    /// Parses the plain-text edge-list format: a header line `d=<int>`,
    /// then one edge per line as two 1-indexed integers separated by
    /// whitespace. Blank lines and `#` comments are skipped; isolated
    /// nodes are allowed.
    pub fn parse(text: &str) -> Result<UndirectedGraph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let d: usize = header
            .strip_prefix("d=")
            .ok_or_else(|| Error::Parse(format!("expected header d=<int>, got {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad ground-set size in {header:?}: {e}")))?;
        let ground = GroundSet::new(d)?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(Error::Parse(format!("expected two node numbers, got {line:?}"))),
            };
            let parse_node = |s: &str| -> Result<usize> {
                let n: usize = s
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad node number {s:?}: {e}")))?;
                if n == 0 || n > d {
                    return Err(Error::Parse(format!("node {n} out of range 1..={d}")));
                }
                Ok(n - 1)
            };
            edges.push((parse_node(u)?, parse_node(v)?));
        }
        UndirectedGraph::new(ground, &edges)
    }

    /// Renders the edge-list format accepted by [`UndirectedGraph::parse`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("d={}\n", self.ground.size());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// Graph-separation backend: answers by breadth-first reachability from
/// `A` in the graph with `C` deleted.
pub struct SeparationOracle {
    graph: UndirectedGraph,
    count: QueryCounter,
}

impl SeparationOracle {
    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }
}

impl IndependenceOracle for SeparationOracle {
    fn ground(&self) -> &GroundSet {
        self.graph.ground()
    }

    fn query(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<bool> {
        if let Some(t) = validate_query(self.ground(), a, b, c)? {
            self.count.bump();
            return Ok(t);
        }
        self.count.bump();
        let reached = self.graph.reachable(a, c);
        Ok(reached.is_disjoint(b))
    }

    fn query_count(&self) -> u64 {
        self.count.get()
    }
}
