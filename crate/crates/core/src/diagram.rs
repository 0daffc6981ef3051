//! Weighted directed diagrams and diagram mutation in integer arithmetic.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{is_perfect_square, isqrt_exact, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("edge {0} -> {1} has zero weight")]
    ZeroWeight(usize, usize),
    #[error("more than one edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("weight product along a cycle through edge {0} -- {1} is not a perfect square")]
    CycleNotSquare(usize, usize),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("malformed diagram text: {0}")]
    Parse(String),
}

/// A directed graph on vertices `0..n` with positive integer edge weights,
/// no loops, at most one edge per vertex pair, and the perfect-square
/// condition on every cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    n: usize,
    // weights[i * n + j] > 0 iff there is an edge i -> j
    weights: Vec<Nat>,
}

impl Diagram {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, DiagramError>
    where
        I: IntoIterator<Item = (usize, usize, Nat)>,
    {
        let mut weights = vec![Nat::zero(); n * n];
        for (src, dst, w) in edges {
            for v in [src, dst] {
                if v >= n {
                    return Err(DiagramError::VertexOutOfRange { vertex: v, n });
                }
            }
            if src == dst {
                return Err(DiagramError::Loop(src));
            }
            if w.is_zero() {
                return Err(DiagramError::ZeroWeight(src, dst));
            }
            if !weights[src * n + dst].is_zero() || !weights[dst * n + src].is_zero() {
                return Err(DiagramError::ParallelEdge(src.min(dst), src.max(dst)));
            }
            weights[src * n + dst] = w;
        }
        let g = Diagram { n, weights };
        g.check_cycle_condition()?;
        Ok(g)
    }

    /// Builds from small integer triples `(src, dst, weight)`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self, DiagramError> {
        Diagram::new(n, edges.iter().map(|&(s, d, w)| (s, d, Nat::from(w))))
    }

    pub fn edgeless(n: usize) -> Self {
        Diagram {
            n,
            weights: vec![Nat::zero(); n * n],
        }
    }

    pub(crate) fn from_weights_unchecked(n: usize, weights: Vec<Nat>) -> Self {
        debug_assert_eq!(weights.len(), n * n);
        Diagram { n, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of the directed edge `i → j`, zero if absent.
    pub fn weight(&self, i: usize, j: usize) -> &Nat {
        &self.weights[i * self.n + j]
    }

    /// Weight on the unordered pair `{i, j}`, zero if absent.
    pub fn pair_weight(&self, i: usize, j: usize) -> &Nat {
        let w = self.weight(i, j);
        if w.is_zero() {
            self.weight(j, i)
        } else {
            w
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        !self.weight(i, j).is_zero()
    }

    /// Edges as `(src, dst, weight)` in lexicographic `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Nat)> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (!w.is_zero()).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|w| !w.is_zero()).count()
    }

    pub fn max_weight(&self) -> Nat {
        self.weights.iter().max().cloned().unwrap_or_default()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u) || self.has_edge(u, v))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Checks the perfect-square condition on a fundamental cycle basis.
    ///
    /// With `P(v)` the weight product along the spanning-tree path from the
    /// root to `v`, the fundamental cycle of a non-tree edge `{u, v}` of
    /// weight `w` has product `P(u)·P(v)·w` divided by a square.
    pub fn check_cycle_condition(&self) -> Result<(), DiagramError> {
        let n = self.n;
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut prefix: Vec<Option<Nat>> = vec![None; n];
        for root in 0..n {
            if prefix[root].is_some() {
                continue;
            }
            prefix[root] = Some(Nat::from(1u32));
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v).collect::<Vec<_>>() {
                    if prefix[u].is_none() {
                        let p = prefix[v].as_ref().expect("visited") * self.pair_weight(u, v);
                        prefix[u] = Some(p);
                        parent[u] = Some(v);
                        queue.push_back(u);
                    }
                }
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let w = self.pair_weight(u, v);
                if w.is_zero() || parent[u] == Some(v) || parent[v] == Some(u) {
                    continue;
                }
                let prod = prefix[u].as_ref().expect("visited")
                    * prefix[v].as_ref().expect("visited")
                    * w;
                if !is_perfect_square(&prod) {
                    return Err(DiagramError::CycleNotSquare(u, v));
                }
            }
        }
        Ok(())
    }

    /// Diagram mutation at `k`.
    ///
    /// Edges at `k` are reversed. For every oriented path `i → k → j` with
    /// weights `α, β` and weight `γ` on `{i, j}`, the new weight is
    /// `γ' = αβ + γ ∓ 2√(αβγ)`, with `−` exactly when `i, j, k` form an oriented
    /// cycle. The new edge runs `i → j` unless the cycle had `γ > αβ`, in
    /// which case `j → i` survives with the smaller weight.
    pub fn mutate(&self, k: usize) -> Result<Diagram, DiagramError> {
        let n = self.n;
        if k >= n {
            return Err(DiagramError::VertexOutOfRange { vertex: k, n });
        }
        let mut weights = self.weights.clone();
        for v in 0..n {
            weights.swap(k * n + v, v * n + k);
        }
        for i in 0..n {
            let alpha = self.weight(i, k);
            if alpha.is_zero() {
                continue;
            }
            for j in 0..n {
                let beta = self.weight(k, j);
                if beta.is_zero() || i == j {
                    continue;
                }
                let ab = alpha * beta;
                let forward = self.weight(i, j);
                let backward = self.weight(j, i);
                let (gamma, cyclic) = if !backward.is_zero() {
                    (backward, true)
                } else {
                    (forward, false)
                };
                let root = isqrt_exact(&(&ab * gamma)).map_err(|e| {
                    DiagramError::InvalidDiagram(format!("{} -> {k} -> {j}: {e}", i))
                })? << 1;
                weights[i * n + j] = Nat::zero();
                weights[j * n + i] = Nat::zero();
                if !cyclic {
                    weights[i * n + j] = ab + gamma + root;
                } else if *gamma < ab {
                    weights[i * n + j] = ab + gamma - root;
                } else if *gamma > ab {
                    weights[j * n + i] = ab + gamma - root;
                }
            }
        }
        Ok(Diagram { n, weights })
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, seq: &[usize]) -> Result<Diagram, DiagramError> {
        let mut g = self.clone();
        for &k in seq {
            g = g.mutate(k)?;
        }
        Ok(g)
    }

    /// True iff there is no oriented cycle (Kahn's algorithm).
    pub fn is_acyclic(&self) -> bool {
        let n = self.n;
        let mut indegree: Vec<usize> = (0..n)
            .map(|j| (0..n).filter(|&i| self.has_edge(i, j)).count())
            .collect();
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for (j, deg) in indegree.iter_mut().enumerate() {
                if self.has_edge(v, j) {
                    *deg -= 1;
                    if *deg == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        removed == n
    }

    pub fn is_source(&self, k: usize) -> bool {
        (0..self.n).all(|i| !self.has_edge(i, k))
    }

    pub fn is_sink(&self, k: usize) -> bool {
        (0..self.n).all(|j| !self.has_edge(k, j))
    }

    /// Vertices at which mutation is a reflection.
    pub fn sources_and_sinks(&self) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|&k| self.is_source(k) || self.is_sink(k))
            .collect()
    }

    /// The diagram with every edge reversed.
    pub fn reversed(&self) -> Diagram {
        let n = self.n;
        let mut weights = vec![Nat::zero(); n * n];
        for (i, j, w) in self.edges() {
            weights[j * n + i] = w.clone();
        }
        Diagram { n, weights }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Diagram {
        let n = self.n;
        assert_eq!(perm.len(), n);
        let mut weights = vec![Nat::zero(); n * n];
        for (i, j, w) in self.edges() {
            weights[perm[i] * n + perm[j]] = w.clone();
        }
        Diagram { n, weights }
    }

    /// Writes the diagram on one line: `n m src dst w ...`.
    pub fn to_inline(&self) -> String {
        let mut parts = vec![self.n.to_string(), self.edge_count().to_string()];
        for (i, j, w) in self.edges() {
            parts.push(format!("{i} {j} {w}"));
        }
        parts.join(" ")
    }

    /// Parses the whitespace-token form produced by [`Diagram::to_inline`].
    pub fn from_tokens<'a, I: Iterator<Item = &'a str>>(tokens: I) -> Result<Diagram, DiagramError> {
        let toks: Vec<&str> = tokens.collect();
        if toks.len() < 2 {
            return Err(DiagramError::Parse("missing \"n m\" header".into()));
        }
        let n = parse_usize(toks[0])?;
        let m = parse_usize(toks[1])?;
        if toks.len() != 2 + 3 * m {
            return Err(DiagramError::Parse(format!(
                "expected {m} edges, found {} tokens",
                toks.len() - 2
            )));
        }
        let mut edges = Vec::with_capacity(m);
        for e in toks[2..].chunks(3) {
            let w: Nat = e[2]
                .parse()
                .map_err(|_| DiagramError::Parse(format!("bad weight {:?}", e[2])))?;
            edges.push((parse_usize(e[0])?, parse_usize(e[1])?, w));
        }
        Diagram::new(n, edges)
    }
}

fn parse_usize(tok: &str) -> Result<usize, DiagramError> {
    tok.parse()
        .map_err(|_| DiagramError::Parse(format!("bad integer {tok:?}")))
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.edge_count())?;
        for (i, j, w) in self.edges() {
            writeln!(f, "{i} {j} {w}")?;
        }
        Ok(())
    }
}

impl FromStr for Diagram {
    type Err = DiagramError;

    /// Parses `n m` followed by `m` lines `src dst weight`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| DiagramError::Parse("empty input".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(DiagramError::Parse(format!("bad header {header:?}")));
        }
        let m = parse_usize(head[1])?;
        let mut tokens = head.clone();
        for e in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| DiagramError::Parse(format!("missing edge line {e}")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(DiagramError::Parse(format!("bad edge line {line:?}")));
            }
            tokens.extend(parts);
        }
        if let Some(extra) = lines.next() {
            return Err(DiagramError::Parse(format!("trailing line {extra:?}")));
        }
        Diagram::from_tokens(tokens.into_iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(w: [u64; 3]) -> Diagram {
        Diagram::from_edges(3, &[(0, 1, w[0]), (1, 2, w[1]), (2, 0, w[2])]).unwrap()
    }

    #[test]
    fn path_mutation_creates_triangle() {
        let g = Diagram::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let h = g.mutate(1).unwrap();
        assert_eq!(h, Diagram::from_edges(3, &[(1, 0, 1), (2, 1, 1), (0, 2, 1)]).unwrap());
        assert!(!h.is_acyclic());
    }

    #[test]
    fn markov_triangle_is_fixed() {
        // radical (2,2,2): ab - c = 2
        let g = triangle([4, 4, 4]);
        for k in 0..3 {
            let h = g.mutate(k).unwrap();
            assert_eq!(h, g.reversed());
        }
    }

    #[test]
    fn cyclic_mutation_can_delete_or_flip_edge() {
        // radical (1,1,1): 1·1 - 1 = 0, the opposite edge disappears
        let h = triangle([1, 1, 1]).mutate(0).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(h.is_acyclic());
        // radical (1,1,5) cyclic with c = 5 >= ab = 1 at the vertex off c
        // edge 2 -> 0 carries weight 25, vertex 1 is off it
        let h = triangle([1, 1, 25]).mutate(1).unwrap();
        assert_eq!(h.weight(2, 0), &Nat::from(16u32));
        assert!(h.is_acyclic());
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert_eq!(
            Diagram::from_edges(2, &[(0, 0, 1)]),
            Err(DiagramError::Loop(0))
        );
        assert_eq!(
            Diagram::from_edges(2, &[(0, 1, 1), (1, 0, 2)]),
            Err(DiagramError::ParallelEdge(0, 1))
        );
        assert_eq!(
            Diagram::from_edges(2, &[(0, 1, 0)]),
            Err(DiagramError::ZeroWeight(0, 1))
        );
        assert!(matches!(
            Diagram::from_edges(3, &[(0, 1, 2), (1, 2, 1), (2, 0, 1)]),
            Err(DiagramError::CycleNotSquare(_, _))
        ));
        assert!(Diagram::from_edges(3, &[(0, 1, 2), (1, 2, 3), (2, 0, 6)]).is_ok());
        assert!(matches!(
            Diagram::from_edges(2, &[(0, 2, 1)]),
            Err(DiagramError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn cycle_condition_on_square_with_chord() {
        // 4-cycle 0-1-2-3 plus chord 0-2; both fundamental cycles checked
        let ok = Diagram::from_edges(4, &[(0, 1, 2), (1, 2, 2), (2, 3, 3), (3, 0, 3), (0, 2, 1)]);
        assert!(ok.is_ok());
        let bad = Diagram::from_edges(4, &[(0, 1, 2), (1, 2, 2), (2, 3, 3), (3, 0, 3), (0, 2, 2)]);
        assert!(bad.is_err());
    }

    #[test]
    fn acyclicity() {
        assert!(Diagram::edgeless(3).is_acyclic());
        assert!(!triangle([1, 1, 1]).is_acyclic());
        let flipped = Diagram::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(flipped.is_acyclic());
    }

    #[test]
    fn sources_and_sinks_examples() {
        assert_eq!(Diagram::edgeless(3).sources_and_sinks(), BTreeSet::from([0, 1, 2]));
        let path = Diagram::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(path.sources_and_sinks(), BTreeSet::from([0, 2]));
        assert!(triangle([1, 1, 1]).sources_and_sinks().is_empty());
    }

    #[test]
    fn reflection_only_reverses() {
        let g = Diagram::from_edges(4, &[(0, 1, 2), (0, 2, 8), (2, 3, 5)]).unwrap();
        let h = g.mutate(0).unwrap();
        assert_eq!(h.weight(1, 0), &Nat::from(2u32));
        assert_eq!(h.weight(2, 0), &Nat::from(8u32));
        assert_eq!(h.weight(2, 3), &Nat::from(5u32));
        assert_eq!(h.edge_count(), 3);
    }

    #[test]
    fn text_format() {
        let text = "3 2\n0 1 4\n1 2 9\n";
        let g: Diagram = text.parse().unwrap();
        assert_eq!(g.to_string(), text);
        assert_eq!(Diagram::from_tokens(g.to_inline().split_whitespace()).unwrap(), g);
        assert!("3 2\n0 1 4\n".parse::<Diagram>().is_err());
        assert!("3 1\n0 1\n".parse::<Diagram>().is_err());
        assert!("3 1\n0 1 4\n1 2 9\n".parse::<Diagram>().is_err());
    }

    #[test]
    fn bad_vertex_for_mutation() {
        assert!(matches!(
            Diagram::edgeless(2).mutate(2),
            Err(DiagramError::VertexOutOfRange { .. })
        ));
    }
}
