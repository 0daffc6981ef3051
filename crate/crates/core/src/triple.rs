//! Three-vertex diagrams in radical-weight form, the `s` functional and the
//! descent to the unique minimal representative of a mutation class.
//!
//! Edge `e ∈ {0, 1, 2}` joins vertices `e` and `e + 1 (mod 3)`, so the vertex
//! not incident to edge `e` is `e + 2 (mod 3)`. Weights are stored squared;
//! an absent edge has weight zero.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::diagram::Diagram;
use crate::exactnum::{is_perfect_square, isqrt_exact, Nat, RadicalSum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("expected a 3-vertex diagram, found {0} vertices")]
    WrongSize(usize),
    #[error("diagram is disconnected")]
    Disconnected,
    #[error("weight product is not a perfect square")]
    NotSquare,
    #[error("a cyclic triple needs three nonzero weights")]
    CyclicWithAbsentEdge,
    #[error("malformed triple text: {0}")]
    Parse(String),
}

/// The vertex off edge `e`.
pub const fn opposite_vertex(e: usize) -> usize {
    (e + 2) % 3
}

/// The edge off vertex `k`.
pub const fn opposite_edge(k: usize) -> usize {
    (k + 1) % 3
}

/// A connected 3-vertex diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadicalTriple {
    weights: [Nat; 3],
    // forward[e]: edge e points e -> e+1; normalized to true when absent
    forward: [bool; 3],
}

/// Sorted squared weights plus the cyclic flag: a mutation-class minimum up
/// to relabeling, reversal and source/sink reflections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub cyclic: bool,
    /// Descending.
    pub weights: [Nat; 3],
}

impl CanonicalForm {
    pub fn new(cyclic: bool, mut weights: [Nat; 3]) -> Self {
        weights.sort_by(|a, b| b.cmp(a));
        CanonicalForm { cyclic, weights }
    }

    pub fn s_value(&self) -> RadicalSum {
        RadicalSum::new(self.weights.iter().cloned())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.cyclic { "cyclic" } else { "acyclic" };
        let [a, b, c] = &self.weights;
        write!(f, "{kind} {a} {b} {c}")
    }
}

/// Result of [`RadicalTriple::descend_to_minimum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descent {
    pub minimum: RadicalTriple,
    pub canonical: CanonicalForm,
    /// Vertices mutated, in order; `s` strictly decreases at each step.
    pub path: Vec<usize>,
    /// The strictly decreasing vertices available before each step.
    pub choices: Vec<Vec<usize>>,
}

fn check_square(w: &[Nat; 3]) -> Result<(), TripleError> {
    if is_perfect_square(&(&w[0] * &w[1] * &w[2])) {
        Ok(())
    } else {
        Err(TripleError::NotSquare)
    }
}

impl RadicalTriple {
    /// The oriented cycle `0 → 1 → 2 → 0` with squared weights on edges
    /// `{0,1}, {1,2}, {2,0}`.
    pub fn cyclic(weights: [Nat; 3]) -> Result<Self, TripleError> {
        if weights.iter().any(Zero::is_zero) {
            return Err(TripleError::CyclicWithAbsentEdge);
        }
        check_square(&weights)?;
        Ok(RadicalTriple {
            weights,
            forward: [true; 3],
        })
    }

    /// The acyclic diagram `0 → 1`, `1 → 2`, `0 → 2` with squared weights on
    /// edges `{0,1}, {1,2}, {2,0}`; at most one may be zero.
    pub fn acyclic(weights: [Nat; 3]) -> Result<Self, TripleError> {
        if weights.iter().filter(|w| w.is_zero()).count() > 1 {
            return Err(TripleError::Disconnected);
        }
        check_square(&weights)?;
        let mut t = RadicalTriple {
            weights,
            forward: [true, true, false],
        };
        t.normalize();
        Ok(t)
    }

    pub fn from_u64(cyclic: bool, w: [u64; 3]) -> Result<Self, TripleError> {
        let w = w.map(Nat::from);
        if cyclic {
            Self::cyclic(w)
        } else {
            Self::acyclic(w)
        }
    }

    /// A representative diagram for a canonical form.
    pub fn from_canonical(c: &CanonicalForm) -> Result<Self, TripleError> {
        if c.cyclic {
            Self::cyclic(c.weights.clone())
        } else {
            Self::acyclic(c.weights.clone())
        }
    }

    pub fn from_diagram(g: &Diagram) -> Result<Self, TripleError> {
        if g.n() != 3 {
            return Err(TripleError::WrongSize(g.n()));
        }
        if !g.is_connected() {
            return Err(TripleError::Disconnected);
        }
        let mut weights: [Nat; 3] = Default::default();
        let mut forward = [true; 3];
        for e in 0..3 {
            let (u, v) = (e, (e + 1) % 3);
            weights[e] = g.pair_weight(u, v).clone();
            forward[e] = !g.has_edge(v, u);
        }
        check_square(&weights)?;
        Ok(RadicalTriple { weights, forward })
    }

    pub fn to_diagram(&self) -> Diagram {
        let mut weights = vec![Nat::zero(); 9];
        for e in 0..3 {
            if let Some((u, v)) = self.edge_direction(e) {
                weights[u * 3 + v] = self.weights[e].clone();
            }
        }
        Diagram::from_weights_unchecked(3, weights)
    }

    fn normalize(&mut self) {
        for e in 0..3 {
            if self.weights[e].is_zero() {
                self.forward[e] = true;
            }
        }
    }

    /// Squared weight of edge `e`.
    pub fn weight(&self, e: usize) -> &Nat {
        &self.weights[e]
    }

    pub fn weights(&self) -> &[Nat; 3] {
        &self.weights
    }

    /// The squared weights of the two edges incident to vertex `v`.
    pub fn incidence(&self, v: usize) -> (&Nat, &Nat) {
        (&self.weights[v], &self.weights[(v + 2) % 3])
    }

    /// `(from, to)` of edge `e`, or `None` if absent.
    pub fn edge_direction(&self, e: usize) -> Option<(usize, usize)> {
        if self.weights[e].is_zero() {
            None
        } else if self.forward[e] {
            Some((e, (e + 1) % 3))
        } else {
            Some(((e + 1) % 3, e))
        }
    }

    pub fn is_cyclic(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
            && (self.forward.iter().all(|&f| f) || self.forward.iter().all(|&f| !f))
    }

    /// In- and out-neighbours of `k` over its present edges.
    fn neighbours(&self, k: usize) -> (Vec<usize>, Vec<usize>) {
        let mut into = Vec::new();
        let mut out = Vec::new();
        for e in [k, (k + 2) % 3] {
            if let Some((u, v)) = self.edge_direction(e) {
                if v == k {
                    into.push(u);
                } else {
                    out.push(v);
                }
            }
        }
        (into, out)
    }

    pub fn is_source_or_sink(&self, k: usize) -> bool {
        let (into, out) = self.neighbours(k);
        into.is_empty() || out.is_empty()
    }

    /// For a vertex `k` that is neither source nor sink: the new squared
    /// weight of the edge off `k` and whether it then points `i → j`, where
    /// `i → k → j` is the path through `k`.
    fn transformed_edge(&self, k: usize) -> Option<(Nat, usize, usize)> {
        let (into, out) = self.neighbours(k);
        if into.is_empty() || out.is_empty() {
            return None;
        }
        let (i, j) = (into[0], out[0]);
        let alpha = self.pair(i, k);
        let beta = self.pair(k, j);
        let e = opposite_edge(k);
        let gamma = &self.weights[e];
        let ab = alpha * beta;
        let root = isqrt_exact(&(&ab * gamma)).expect("validated triple") << 1;
        let cyclic = self.edge_direction(e) == Some((j, i));
        let (w, from, to) = if !cyclic {
            (ab + gamma + root, i, j)
        } else if *gamma <= ab {
            (ab + gamma - root, i, j)
        } else {
            (ab + gamma - root, j, i)
        };
        Some((w, from, to))
    }

    fn pair(&self, u: usize, v: usize) -> &Nat {
        // edges are {e, e+1}; the pair {u, v} is the edge whose off-vertex is the third one
        let third = 3 - u - v;
        &self.weights[opposite_edge(third)]
    }

    /// Mutation at vertex `k`.
    pub fn mutate(&self, k: usize) -> RadicalTriple {
        assert!(k < 3, "vertex {k} out of range");
        let mut t = self.clone();
        if let Some((w, from, _)) = self.transformed_edge(k) {
            let e = opposite_edge(k);
            t.forward[e] = from == e;
            t.weights[e] = w;
        }
        for e in [k, (k + 2) % 3] {
            t.forward[e] = !t.forward[e];
        }
        t.normalize();
        t
    }

    pub fn mutate_sequence(&self, seq: &[usize]) -> RadicalTriple {
        seq.iter().fold(self.clone(), |t, &k| t.mutate(k))
    }

    /// `s`: the sum of square roots of the weights.
    pub fn s_value(&self) -> RadicalSum {
        RadicalSum::new(self.weights.iter().cloned())
    }

    /// `s(μₖ(T))` against `s(T)`. Only the edge off `k` can change, so this is
    /// a single integer comparison.
    pub fn compare_adjacent(&self, k: usize) -> Ordering {
        match self.transformed_edge(k) {
            None => Ordering::Equal,
            Some((w, _, _)) => w.cmp(&self.weights[opposite_edge(k)]),
        }
    }

    pub fn decreasing_vertices(&self) -> Vec<usize> {
        (0..3)
            .filter(|&k| self.compare_adjacent(k) == Ordering::Less)
            .collect()
    }

    /// No mutation strictly decreases `s`.
    pub fn is_local_minimum(&self) -> bool {
        self.decreasing_vertices().is_empty()
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm::new(self.is_cyclic(), self.weights.clone())
    }

    /// Mutates at a strictly decreasing vertex until none is left, taking the
    /// smallest such vertex when several exist. Moves that keep `s` equal are
    /// never taken. Each step lowers one integer weight, so this terminates.
    pub fn descend_to_minimum(&self) -> Descent {
        let mut current = self.clone();
        let mut path = Vec::new();
        let mut choices = Vec::new();
        loop {
            let dec = current.decreasing_vertices();
            let Some(&k) = dec.first() else { break };
            choices.push(dec);
            current = current.mutate(k);
            path.push(k);
        }
        Descent {
            canonical: current.canonical_form(),
            minimum: current,
            path,
            choices,
        }
    }
}

impl FromStr for RadicalTriple {
    type Err = TripleError;

    /// `cyclic a2 b2 c2` or `acyclic a2 b2 c2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(TripleError::Parse(format!("expected 4 tokens, found {}", toks.len())));
        }
        let mut w: [Nat; 3] = Default::default();
        for (slot, tok) in w.iter_mut().zip(&toks[1..]) {
            *slot = tok
                .parse()
                .map_err(|_| TripleError::Parse(format!("bad weight {tok:?}")))?;
        }
        match toks[0] {
            "cyclic" => RadicalTriple::cyclic(w),
            "acyclic" => RadicalTriple::acyclic(w),
            other => Err(TripleError::Parse(format!("unknown kind {other:?}"))),
        }
    }
}

impl FromStr for CanonicalForm {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: RadicalTriple = s.parse()?;
        Ok(t.canonical_form())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering::*;

    fn cyc(w: [u64; 3]) -> RadicalTriple {
        RadicalTriple::from_u64(true, w).unwrap()
    }

    fn acyc(w: [u64; 3]) -> RadicalTriple {
        RadicalTriple::from_u64(false, w).unwrap()
    }

    fn nat3(w: [u64; 3]) -> [Nat; 3] {
        w.map(Nat::from)
    }

    #[test]
    fn from_diagram_examples() {
        let g = Diagram::from_edges(3, &[(0, 1, 4), (1, 2, 4), (2, 0, 4)]).unwrap();
        let t = RadicalTriple::from_diagram(&g).unwrap();
        assert!(t.is_cyclic());
        assert_eq!(t.canonical_form(), CanonicalForm::new(true, nat3([4, 4, 4])));

        let p = Diagram::from_edges(3, &[(0, 1, 4), (1, 2, 1)]).unwrap();
        let t = RadicalTriple::from_diagram(&p).unwrap();
        assert!(!t.is_cyclic());
        assert_eq!(t.weights(), &nat3([4, 1, 0]));
        assert_eq!(t.to_diagram(), p);

        assert_eq!(
            RadicalTriple::from_diagram(&Diagram::edgeless(4)),
            Err(TripleError::WrongSize(4))
        );
        let d = Diagram::from_edges(3, &[(0, 1, 1)]).unwrap();
        assert_eq!(RadicalTriple::from_diagram(&d), Err(TripleError::Disconnected));
    }

    #[test]
    fn tree_middle_mutation() {
        // (a,1,0)⁻ mutated at the middle vertex gives (a,a,1); here a = 3
        let t = acyc([9, 1, 0]);
        let u = t.mutate(1);
        assert!(u.is_cyclic());
        assert_eq!(u.canonical_form(), CanonicalForm::new(true, nat3([9, 9, 1])));
    }

    #[test]
    fn markov_triple_fixed() {
        let t = cyc([4, 4, 4]);
        for k in 0..3 {
            let u = t.mutate(k);
            assert!(u.is_cyclic());
            assert_eq!(u.weights(), t.weights());
            assert_eq!(t.compare_adjacent(k), Equal);
        }
        assert!(t.is_local_minimum());
        let d = t.descend_to_minimum();
        assert!(d.path.is_empty());
        assert_eq!(d.canonical, CanonicalForm::new(true, nat3([4, 4, 4])));
    }

    #[test]
    fn cyclic_becomes_acyclic_when_c_at_least_ab() {
        // radical (1,2,3) cyclic: c = 3 >= ab = 2 gives (1,2,1)⁻
        let t = cyc([1, 4, 9]);
        // edge 2 has weight 9, off vertex 1
        let u = t.mutate(opposite_vertex(2));
        assert!(!u.is_cyclic());
        assert_eq!(u.weights(), &nat3([1, 4, 1]));
    }

    #[test]
    fn compare_adjacent_examples() {
        // radical (1,3,5): off the 5-edge, |3 - 5| = 2 < 5
        let t = cyc([1, 9, 25]);
        assert_eq!(t.compare_adjacent(opposite_vertex(2)), Less);
        for k in 0..3 {
            let a = acyc([4, 9, 36]);
            if a.is_source_or_sink(k) {
                assert_eq!(a.compare_adjacent(k), Equal);
            } else {
                assert_eq!(a.compare_adjacent(k), Greater);
            }
        }
    }

    #[test]
    fn s_value_examples() {
        assert_eq!(cyc([1, 1, 1]).s_value(), RadicalSum::new(nat3([1, 1, 1])));
        assert_eq!(cyc([4, 4, 4]).s_value().approx(), 6.0);
        assert_eq!(cyc([2, 2, 1]).s_value(), RadicalSum::new(nat3([2, 2, 1])));
        assert_eq!(acyc([4, 1, 0]).s_value().terms().len(), 2);
    }

    #[test]
    fn local_minimum_examples() {
        assert!(acyc([4, 9, 36]).is_local_minimum());
        assert!(acyc([16, 1, 0]).is_local_minimum());
        assert!(cyc([4, 4, 4]).is_local_minimum());
        // radical (2,2,5): 4 - 5 = -1 so the off vertex drops to weight 1
        assert!(!cyc([4, 4, 25]).is_local_minimum());
    }

    #[test]
    fn descent_of_one_three_five() {
        let d = cyc([1, 9, 25]).descend_to_minimum();
        assert!(!d.path.is_empty());
        assert!(!d.canonical.cyclic);
        assert!(d.minimum.is_local_minimum());
        assert_eq!(cyc([1, 9, 25]).mutate_sequence(&d.path), d.minimum);
    }

    #[test]
    fn acyclic_descent_is_empty() {
        let d = acyc([4, 9, 36]).descend_to_minimum();
        assert!(d.path.is_empty());
        assert_eq!(d.canonical, CanonicalForm::new(false, nat3([36, 9, 4])));
    }

    #[test]
    fn mutation_is_involutive() {
        for t in [cyc([1, 9, 25]), acyc([4, 9, 36]), acyc([2, 8, 0]), cyc([6, 6, 4])] {
            for k in 0..3 {
                assert_eq!(t.mutate(k).mutate(k), t);
            }
        }
    }

    #[test]
    fn agrees_with_diagram_mutation() {
        for t in [cyc([1, 9, 25]), acyc([4, 9, 36]), acyc([2, 8, 0]), cyc([3, 12, 1])] {
            for k in 0..3 {
                let via_diagram = t.to_diagram().mutate(k).unwrap();
                assert_eq!(t.mutate(k).to_diagram(), via_diagram);
            }
        }
    }

    #[test]
    fn parse_and_validate() {
        let t: RadicalTriple = "cyclic 4 9 36".parse().unwrap();
        assert!(t.is_cyclic());
        assert_eq!("cyclic 4 9 0".parse::<RadicalTriple>(), Err(TripleError::CyclicWithAbsentEdge));
        assert_eq!("acyclic 2 3 1".parse::<RadicalTriple>(), Err(TripleError::NotSquare));
        assert_eq!("acyclic 2 0 0".parse::<RadicalTriple>(), Err(TripleError::Disconnected));
        assert!("acyclic 2 3".parse::<RadicalTriple>().is_err());
        let c: CanonicalForm = "acyclic 1 9 4".parse().unwrap();
        assert_eq!(c.to_string(), "acyclic 9 4 1");
    }
}
