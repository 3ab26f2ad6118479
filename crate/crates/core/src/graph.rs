//! Graph ingestion, path-length distances and distance-regularity
//! certification.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, RegularityWitness, Result};

/// Finite, undirected, connected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, repeated edges,
    /// out-of-range endpoints and disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        let mut seen = BTreeSet::new();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("repeated edge ({a}, {b})")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let g = Graph { n, neighbors };
        let dist = g.bfs(0);
        if let Some(v) = dist.iter().position(|d| d.is_none()) {
            return Err(Error::Disconnected(v));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].expect("queued vertices have a distance");
            for &w in &self.neighbors[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Parse(format!("cycle:n needs n >= 4, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn hypercube(d: u32) -> Result<Self> {
        if !(1..=16).contains(&d) {
            return Err(Error::Parse(format!("hypercube:d needs 1 <= d <= 16, got {d}")));
        }
        let n = 1usize << d;
        let mut edges = Vec::new();
        for v in 0..n {
            for bit in 0..d {
                let w = v ^ (1 << bit);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, &edges)
    }
}

/// Parses a generator spec `name:integer` (`cycle`, `hypercube`, `path`,
/// `complete`).
pub fn parse_generator(spec: &str) -> Result<Graph> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("generator spec '{spec}' is not of the form name:integer")))?;
    let k: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("generator argument '{arg}' is not an integer")))?;
    match name.trim() {
        "cycle" => Graph::cycle(k),
        "hypercube" => Graph::hypercube(u32::try_from(k).unwrap_or(u32::MAX)),
        "path" => Graph::path(k),
        "complete" => Graph::complete(k),
        other => Err(Error::Parse(format!("unknown generator '{other}'"))),
    }
}

/// Parses whitespace-separated edge lines of 0-based vertex ids. Lines
/// starting with `#` and blank lines are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ids: Vec<&str> = line.split_whitespace().collect();
        if ids.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected two vertex ids", lineno + 1)));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {}: '{s}' is not a vertex id", lineno + 1)))
        };
        let (a, b) = (parse(ids[0])?, parse(ids[1])?);
        n = n.max(a + 1).max(b + 1);
        edges.push((a, b));
    }
    Graph::from_edges(n, &edges)
}

/// Either a generator spec (contains `:`) or edge-list text.
pub fn load_graph(source: &str) -> Result<Graph> {
    let trimmed = source.trim();
    if !trimmed.contains('\n') && trimmed.contains(':') {
        parse_generator(trimmed)
    } else {
        parse_edge_list(source)
    }
}

/// Symmetric all-pairs path-length distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    n: usize,
    d: Vec<usize>,
}

impl Distances {
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.d[x * self.n + y]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// Vertices at distance `i` from `x`, ascending.
    pub fn sphere(&self, x: usize, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.get(x, y) == i).collect()
    }
}

pub fn distances(g: &Graph) -> Distances {
    let n = g.n();
    let mut d = vec![0; n * n];
    for x in 0..n {
        for (y, dy) in g.bfs(x).into_iter().enumerate() {
            d[x * n + y] = dy.expect("graph is connected");
        }
    }
    Distances { n, d }
}

/// Intersection numbers `p^h_{ij}` of a distance-regular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionData {
    pub diameter: usize,
    p: Vec<usize>,
    pub c: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub k: usize,
}

impl IntersectionData {
    pub fn p(&self, h: usize, i: usize, j: usize) -> usize {
        let s = self.diameter + 1;
        self.p[(h * s + i) * s + j]
    }

    /// Number of vertices at distance `i` from any vertex.
    pub fn k_i(&self, i: usize) -> usize {
        self.p(0, i, i)
    }

    /// `{b_0, …, b_{D-1}; c_1, …, c_D}`.
    pub fn intersection_array(&self) -> (Vec<usize>, Vec<usize>) {
        let dd = self.diameter;
        (self.b[..dd].to_vec(), self.c[1..=dd].to_vec())
    }
}

/// One of `h`, `i`, `j` strictly exceeds the sum of the other two.
pub fn triangle_exceeds(h: usize, i: usize, j: usize) -> bool {
    h > i + j || i > h + j || j > h + i
}

/// One of `h`, `i`, `j` equals the sum of the other two.
pub fn triangle_equals(h: usize, i: usize, j: usize) -> bool {
    h == i + j || i == h + j || j == h + i
}

/// Exhaustively verifies that `p^h_{ij}` is independent of the vertex pair
/// and returns the full tensor.
pub fn check_distance_regular(g: &Graph) -> Result<IntersectionData> {
    let dist = distances(g);
    let n = g.n();
    let dd = dist.diameter();
    let s = dd + 1;
    let mut p: Vec<Option<(usize, (usize, usize))>> = vec![None; s * s * s];
    let mut counts = vec![0usize; s * s];
    for x in 0..n {
        for y in 0..n {
            let h = dist.get(x, y);
            counts.iter_mut().for_each(|c| *c = 0);
            for z in 0..n {
                counts[dist.get(x, z) * s + dist.get(z, y)] += 1;
            }
            for i in 0..s {
                for j in 0..s {
                    let slot = &mut p[(h * s + i) * s + j];
                    let count = counts[i * s + j];
                    match slot {
                        None => *slot = Some((count, (x, y))),
                        Some((expected, first)) if *expected != count => {
                            return Err(Error::NotDistanceRegular(RegularityWitness {
                                h,
                                i,
                                j,
                                first: (first.0, first.1, *expected),
                                second: (x, y, count),
                            }));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    let p: Vec<usize> = p.into_iter().map(|v| v.map_or(0, |(c, _)| c)).collect();
    let at = |h: usize, i: usize, j: usize| p[(h * s + i) * s + j];
    let c = (0..s).map(|i| if i == 0 { 0 } else { at(i, 1, i - 1) }).collect();
    let a = (0..s).map(|i| at(i, 1, i)).collect();
    let b = (0..s).map(|i| if i == dd { 0 } else { at(i, 1, i + 1) }).collect();
    let k = at(0, 1, 1);
    Ok(IntersectionData { diameter: dd, p, c, a, b, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_generator() {
        let g = load_graph("cycle:8").unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 8);
    }

    #[test]
    fn triangle_from_edge_list() {
        let g = load_graph("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn disconnected_edge_list() {
        assert!(matches!(load_graph("0 1\n2 3"), Err(Error::Disconnected(2))));
    }

    #[test]
    fn loops_and_repeats_rejected() {
        assert!(matches!(load_graph("0 1\n1 1"), Err(Error::InvalidGraph(_))));
        assert!(matches!(load_graph("0 1\n1 0"), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn comments_are_skipped() {
        let g = load_graph("# a path\n0 1\n\n# more\n1 2\n").unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn bad_generators() {
        assert!(matches!(load_graph("cycle:3"), Err(Error::Parse(_))));
        assert!(matches!(load_graph("wheel:5"), Err(Error::Parse(_))));
        assert!(matches!(load_graph("cycle:x"), Err(Error::Parse(_))));
        assert!(matches!(load_graph("0 a"), Err(Error::Parse(_))));
    }

    #[test]
    fn diameters() {
        assert_eq!(distances(&Graph::cycle(8).unwrap()).diameter(), 4);
        assert_eq!(distances(&Graph::cycle(9).unwrap()).diameter(), 4);
        assert_eq!(distances(&Graph::hypercube(4).unwrap()).diameter(), 4);
    }

    #[test]
    fn cycle_intersection_numbers() {
        let d8 = check_distance_regular(&Graph::cycle(8).unwrap()).unwrap();
        assert_eq!(d8.c, vec![0, 1, 1, 1, 2]);
        assert_eq!(d8.b, vec![2, 1, 1, 1, 0]);
        assert_eq!(d8.a, vec![0; 5]);
        let d9 = check_distance_regular(&Graph::cycle(9).unwrap()).unwrap();
        assert_eq!(d9.c, vec![0, 1, 1, 1, 1]);
        assert_eq!(d9.b, vec![2, 1, 1, 1, 0]);
        assert_eq!(d9.a, vec![0, 0, 0, 0, 1]);
        assert_eq!(d9.intersection_array(), (vec![2, 1, 1, 1], vec![1, 1, 1, 1]));
    }

    #[test]
    fn path_is_not_distance_regular() {
        let err = check_distance_regular(&Graph::path(4).unwrap()).unwrap_err();
        let Error::NotDistanceRegular(w) = err else { panic!("wrong error") };
        assert_ne!(w.first.2, w.second.2);
    }
}
