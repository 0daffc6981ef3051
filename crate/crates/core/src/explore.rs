//! Bounded breadth-first exploration of mutation classes up to isomorphism.
//!
//! This is the brute-force oracle for the 3-vertex minimality results: it
//! enumerates every diagram reachable without raising a weight above the
//! bound, then checks the descent's answer against what it saw.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::exactnum::{compare_radical_sums, Nat, RadicalSum};
use crate::triple::{CanonicalForm, Descent, RadicalTriple, TripleError};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("exploration budget of {0} nodes exceeded")]
    BudgetExceeded(usize),
    #[error("malformed exploration file: {0}")]
    Format(String),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A diagram up to vertex relabeling, optionally also up to reversing every
/// edge: the lexicographically least signed pair encoding over all
/// relabelings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoKey {
    modulo_reversal: bool,
    n: usize,
    // one entry per pair i < j: +w for i -> j, -w for j -> i, 0 if absent
    code: Vec<num_bigint::BigInt>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn encode(g: &Diagram, perm: &[usize], negate: bool) -> Vec<num_bigint::BigInt> {
    let n = g.n();
    // inverse: new label -> old vertex
    let mut inv = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let mut code = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (inv[i], inv[j]);
            let fwd = g.weight(a, b);
            let mut x = if fwd.is_zero() {
                -num_bigint::BigInt::from(g.weight(b, a).clone())
            } else {
                num_bigint::BigInt::from(fwd.clone())
            };
            if negate {
                x = -x;
            }
            code.push(x);
        }
    }
    code
}

impl IsoKey {
    pub fn of(g: &Diagram, modulo_reversal: bool) -> IsoKey {
        let perms = permutations(g.n());
        let mut best: Option<Vec<num_bigint::BigInt>> = None;
        for p in &perms {
            for negate in [false, true] {
                if negate && !modulo_reversal {
                    continue;
                }
                let c = encode(g, p, negate);
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        IsoKey {
            modulo_reversal,
            n: g.n(),
            code: best.unwrap_or_default(),
        }
    }

    pub fn modulo_reversal(&self) -> bool {
        self.modulo_reversal
    }

    /// A diagram with this key.
    pub fn representative(&self) -> Diagram {
        let n = self.n;
        let mut weights = vec![Nat::zero(); n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = &self.code[idx];
                idx += 1;
                let w = x.magnitude().clone();
                if x.sign() == num_bigint::Sign::Plus {
                    weights[i * n + j] = w;
                } else if x.sign() == num_bigint::Sign::Minus {
                    weights[j * n + i] = w;
                }
            }
        }
        Diagram::from_weights_unchecked(n, weights)
    }

    /// Byte layout: reversal flag, `n`, then per pair a sign byte
    /// (0 absent, 1 forward, 2 backward) and for present edges a 4-byte
    /// big-endian length followed by the big-endian weight.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![u8::from(self.modulo_reversal), self.n as u8];
        for x in &self.code {
            match x.sign() {
                num_bigint::Sign::NoSign => out.push(0),
                s => {
                    out.push(if s == num_bigint::Sign::Plus { 1 } else { 2 });
                    let mag = x.magnitude().to_bytes_be();
                    out.extend_from_slice(&(mag.len() as u32).to_be_bytes());
                    out.extend_from_slice(&mag);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<IsoKey, ExploreError> {
        let bad = |m: &str| ExploreError::Format(format!("bad iso key: {m}"));
        if bytes.len() < 2 || bytes[0] > 1 {
            return Err(bad("header"));
        }
        let modulo_reversal = bytes[0] == 1;
        let n = bytes[1] as usize;
        let mut code = Vec::new();
        let mut pos = 2;
        for _ in 0..n * n.saturating_sub(1) / 2 {
            let tag = *bytes.get(pos).ok_or_else(|| bad("truncated"))?;
            pos += 1;
            if tag == 0 {
                code.push(num_bigint::BigInt::zero());
                continue;
            }
            if tag > 2 {
                return Err(bad("sign tag"));
            }
            let len_bytes: [u8; 4] = bytes
                .get(pos..pos + 4)
                .ok_or_else(|| bad("truncated"))?
                .try_into()
                .expect("4 bytes");
            pos += 4;
            let len = u32::from_be_bytes(len_bytes) as usize;
            let mag = bytes.get(pos..pos + len).ok_or_else(|| bad("truncated"))?;
            pos += len;
            let w = Nat::from_bytes_be(mag);
            if w.is_zero() {
                return Err(bad("zero weight"));
            }
            let x = num_bigint::BigInt::from(w);
            code.push(if tag == 1 { x } else { -x });
        }
        if pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(IsoKey {
            modulo_reversal,
            n,
            code,
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<IsoKey, ExploreError> {
        let bytes = hex::decode(s).map_err(|e| ExploreError::Format(e.to_string()))?;
        IsoKey::from_bytes(&bytes)
    }
}

/// `s` for a diagram of any size.
pub fn diagram_s_value(g: &Diagram) -> RadicalSum {
    RadicalSum::new(g.edges().map(|(_, _, w)| w.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitedNode {
    pub key: IsoKey,
    /// Mutations from the seed, shortest.
    pub path: Vec<usize>,
    /// The labeled diagram the path produces.
    pub diagram: Diagram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExploreOptions {
    pub weight_bound: Nat,
    pub modulo_reversal: bool,
    pub max_nodes: usize,
}

impl ExploreOptions {
    pub fn new(weight_bound: Nat, modulo_reversal: bool) -> Self {
        ExploreOptions {
            weight_bound,
            modulo_reversal,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassExploration {
    pub seed: Diagram,
    pub weight_bound: Nat,
    pub modulo_reversal: bool,
    /// In discovery order; the seed comes first.
    pub nodes: Vec<VisitedNode>,
    index: HashMap<IsoKey, usize>,
    pub frontier_exhausted: bool,
    /// Some mutation was cut off for raising a weight above the bound.
    pub truncated: bool,
    pub pruned: usize,
    /// Smallest `s` among the cut-off diagrams.
    pub pruned_min_s: Option<RadicalSum>,
    /// Indices of visited diagrams where no single mutation lowers `s`.
    pub local_minima: Vec<usize>,
    /// Canonical forms of the local minima (3-vertex connected diagrams).
    pub minima: BTreeSet<CanonicalForm>,
}

struct Child {
    key: IsoKey,
    diagram: Diagram,
    vertex: usize,
    raised_above_bound: bool,
}

fn expand(g: &Diagram, bound: &Nat, modulo_reversal: bool) -> Result<Vec<Child>, DiagramError> {
    let n = g.n();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let h = g.mutate(k)?;
        let mut raised = false;
        'pairs: for i in 0..n {
            for j in (i + 1)..n {
                let new = h.pair_weight(i, j);
                if new > bound && new > g.pair_weight(i, j) {
                    raised = true;
                    break 'pairs;
                }
            }
        }
        out.push(Child {
            key: IsoKey::of(&h, modulo_reversal),
            diagram: h,
            vertex: k,
            raised_above_bound: raised,
        });
    }
    Ok(out)
}

fn is_general_local_minimum(g: &Diagram) -> Result<bool, DiagramError> {
    let s = diagram_s_value(g);
    for k in 0..g.n() {
        let h = g.mutate(k)?;
        if compare_radical_sums(&diagram_s_value(&h), &s) == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

impl ClassExploration {
    pub fn get(&self, key: &IsoKey) -> Option<&VisitedNode> {
        self.index.get(key).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, key: &IsoKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Re-derives pruning statistics and minima from the visited nodes,
    /// checking closure: every admissible mutation of a visited node must land
    /// on a visited key.
    fn finish(&mut self) -> Result<(), ExploreError> {
        let bound = self.weight_bound.clone();
        let rev = self.modulo_reversal;
        let expansions: Vec<Result<Vec<Child>, DiagramError>> = self
            .nodes
            .par_iter()
            .map(|node| expand(&node.diagram, &bound, rev))
            .collect();
        let mut pruned_keys: HashMap<IsoKey, RadicalSum> = HashMap::new();
        for children in expansions {
            for c in children? {
                if self.index.contains_key(&c.key) {
                    continue;
                }
                if !c.raised_above_bound {
                    return Err(ExploreError::Format(format!(
                        "visited set not closed: missing {}",
                        c.key.to_hex()
                    )));
                }
                pruned_keys
                    .entry(c.key)
                    .or_insert_with(|| diagram_s_value(&c.diagram));
            }
        }
        self.pruned = pruned_keys.len();
        self.truncated = self.pruned > 0;
        self.pruned_min_s = pruned_keys
            .into_values()
            .min_by(compare_radical_sums);
        self.local_minima.clear();
        self.minima.clear();
        for (i, node) in self.nodes.iter().enumerate() {
            if is_general_local_minimum(&node.diagram)? {
                self.local_minima.push(i);
            }
            if let Ok(t) = RadicalTriple::from_diagram(&node.diagram) {
                if t.is_local_minimum() {
                    self.minima.insert(t.canonical_form());
                }
            }
        }
        self.frontier_exhausted = true;
        Ok(())
    }

    /// Writes the line-oriented exploration record.
    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), ExploreError> {
        writeln!(sink, "seed {}", self.seed.to_inline())?;
        writeln!(sink, "bound {}", self.weight_bound)?;
        writeln!(sink, "truncated {}", u8::from(self.truncated))?;
        for node in &self.nodes {
            let mut line = node.key.to_hex();
            for k in &node.path {
                let _ = write!(line, " {k}");
            }
            writeln!(sink, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    /// Reads a record written by [`ClassExploration::save`], replaying every
    /// path and re-deriving the pruning and minima data.
    pub fn load<R: BufRead>(source: R) -> Result<ClassExploration, ExploreError> {
        let fmt_err = |m: String| ExploreError::Format(m);
        let mut lines = source.lines();
        let mut header = |name: &str| -> Result<String, ExploreError> {
            let line = lines
                .next()
                .ok_or_else(|| fmt_err(format!("missing {name} line")))??;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| fmt_err(format!("expected {name:?} line, found {line:?}")))
        };
        let seed = Diagram::from_tokens(header("seed")?.split_whitespace())
            .map_err(|e| fmt_err(format!("seed: {e}")))?;
        let bound_text = header("bound")?;
        let weight_bound: Nat = bound_text
            .trim()
            .parse()
            .map_err(|_| fmt_err(format!("bad bound {bound_text:?}")))?;
        let truncated = match header("truncated")?.trim() {
            "0" => false,
            "1" => true,
            other => return Err(fmt_err(format!("bad truncated flag {other:?}"))),
        };

        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut modulo_reversal = None;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let key = IsoKey::from_hex(toks.next().expect("nonempty line"))?;
            let path: Vec<usize> = toks
                .map(|t| t.parse().map_err(|_| fmt_err(format!("bad vertex {t:?}"))))
                .collect::<Result<_, _>>()?;
            let rev = *modulo_reversal.get_or_insert(key.modulo_reversal);
            if rev != key.modulo_reversal {
                return Err(fmt_err("mixed key kinds".into()));
            }
            let diagram = seed
                .mutate_sequence(&path)
                .map_err(|e| fmt_err(format!("path {path:?}: {e}")))?;
            if IsoKey::of(&diagram, rev) != key {
                return Err(fmt_err(format!("path {path:?} does not reach its key")));
            }
            if index.insert(key.clone(), nodes.len()).is_some() {
                return Err(fmt_err("duplicate node".into()));
            }
            nodes.push(VisitedNode { key, path, diagram });
        }
        if nodes.is_empty() || !nodes[0].path.is_empty() {
            return Err(fmt_err("the first node must be the seed".into()));
        }
        let mut e = ClassExploration {
            seed,
            weight_bound,
            modulo_reversal: modulo_reversal.unwrap_or(false),
            nodes,
            index,
            frontier_exhausted: false,
            truncated: false,
            pruned: 0,
            pruned_min_s: None,
            local_minima: Vec::new(),
            minima: BTreeSet::new(),
        };
        e.finish()?;
        if e.truncated != truncated {
            return Err(fmt_err("truncated flag disagrees with the visited set".into()));
        }
        Ok(e)
    }
}

/// Breadth-first search over all mutations, deduplicated by [`IsoKey`].
///
/// A mutation that raises some weight to a value above the bound is cut off
/// and recorded as pruned. Frontier levels are expanded in parallel and
/// merged in order, so the result is deterministic.
pub fn explore(
    seed: &Diagram,
    weight_bound: Nat,
    modulo_reversal: bool,
) -> Result<ClassExploration, ExploreError> {
    explore_with(seed, &ExploreOptions::new(weight_bound, modulo_reversal))
}

pub fn explore_with(seed: &Diagram, opts: &ExploreOptions) -> Result<ClassExploration, ExploreError> {
    let rev = opts.modulo_reversal;
    let seed_key = IsoKey::of(seed, rev);
    let mut nodes = vec![VisitedNode {
        key: seed_key.clone(),
        path: Vec::new(),
        diagram: seed.clone(),
    }];
    let mut index = HashMap::from([(seed_key, 0)]);
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expansions: Vec<Result<Vec<Child>, DiagramError>> = frontier
            .par_iter()
            .map(|&i| expand(&nodes[i].diagram, &opts.weight_bound, rev))
            .collect();
        let mut next = Vec::new();
        for (&parent, children) in frontier.iter().zip(expansions) {
            for c in children? {
                if c.raised_above_bound || index.contains_key(&c.key) {
                    continue;
                }
                if nodes.len() >= opts.max_nodes {
                    return Err(ExploreError::BudgetExceeded(opts.max_nodes));
                }
                let mut path = nodes[parent].path.clone();
                path.push(c.vertex);
                index.insert(c.key.clone(), nodes.len());
                next.push(nodes.len());
                nodes.push(VisitedNode {
                    key: c.key,
                    path,
                    diagram: c.diagram,
                });
            }
        }
        frontier = next;
    }
    let mut e = ClassExploration {
        seed: seed.clone(),
        weight_bound: opts.weight_bound.clone(),
        modulo_reversal: rev,
        nodes,
        index,
        frontier_exhausted: false,
        truncated: false,
        pruned: 0,
        pruned_min_s: None,
        local_minima: Vec::new(),
        minima: BTreeSet::new(),
    };
    e.finish()?;
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub verdict: Verdict,
    pub descent: Descent,
    pub minimum_s: RadicalSum,
    /// Canonical forms of the `s`-minimal visited diagrams.
    pub global_minima: BTreeSet<CanonicalForm>,
    /// Canonical forms of the visited local minima.
    pub local_minima: BTreeSet<CanonicalForm>,
    /// Number of `s`-minimal visited diagrams up to relabeling.
    pub minimal_diagrams: usize,
    /// Classes of `s`-minimal diagrams under `s`-preserving mutations, and
    /// under full reversal for cyclic ones. Uniqueness means exactly one.
    pub minimal_components: usize,
    pub explored: usize,
    pub truncated: bool,
    pub reasons: Vec<String>,
}

/// A bound large enough that anything cut off has `s` above twice the seed's:
/// `12·Σw ≥ 4·s²` by Cauchy–Schwarz.
pub fn default_verify_bound(seed: &Diagram) -> Nat {
    let sum: Nat = seed.edges().map(|(_, _, w)| w.clone()).sum();
    (sum * 12u32).max(Nat::from(1u32))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Checks on a bounded exploration that the descent's endpoint is the unique
/// `s`-minimal diagram of the class.
///
/// Refuted on any concrete counterexample among the visited diagrams: a
/// smaller or second minimum, a local minimum of another shape, or minimal
/// diagrams not related by the allowed symmetries. Inconclusive when
/// something with `s` under twice the minimum was cut off.
pub fn verify_unique_minimum(seed: &Diagram, weight_bound: Nat) -> Result<Verification, ExploreError> {
    let triple = RadicalTriple::from_diagram(seed)?;
    let descent = triple.descend_to_minimum();
    let e = explore(seed, weight_bound, false)?;

    let s_values: Vec<RadicalSum> = e.nodes.iter().map(|n| diagram_s_value(&n.diagram)).collect();
    let mut minimal: Vec<usize> = vec![0];
    for i in 1..e.nodes.len() {
        match compare_radical_sums(&s_values[i], &s_values[minimal[0]]) {
            Ordering::Less => minimal = vec![i],
            Ordering::Equal => minimal.push(i),
            Ordering::Greater => {}
        }
    }
    let minimum_s = s_values[minimal[0]].clone();
    let global_minima: BTreeSet<CanonicalForm> = minimal
        .iter()
        .map(|&i| {
            RadicalTriple::from_diagram(&e.nodes[i].diagram)
                .map(|t| t.canonical_form())
                .map_err(ExploreError::from)
        })
        .collect::<Result<_, _>>()?;

    // union-find over minimal diagrams
    let pos: HashMap<usize, usize> = minimal.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut parent: Vec<usize> = (0..minimal.len()).collect();
    for (p, &i) in minimal.iter().enumerate() {
        let g = &e.nodes[i].diagram;
        let t = RadicalTriple::from_diagram(g)?;
        let mut related = Vec::new();
        for k in 0..3 {
            if t.compare_adjacent(k) == Ordering::Equal {
                related.push(IsoKey::of(&g.mutate(k)?, false));
            }
        }
        if t.is_cyclic() {
            related.push(IsoKey::of(&g.reversed(), false));
        }
        for key in related {
            if let Some(&q) = e.index.get(&key).and_then(|j| pos.get(j)) {
                let (a, b) = (find(&mut parent, p), find(&mut parent, q));
                parent[a] = b;
            }
        }
    }
    let minimal_components = (0..minimal.len())
        .filter(|&p| find(&mut parent, p) == p)
        .count();

    let expected = BTreeSet::from([descent.canonical.clone()]);
    let mut reasons = Vec::new();
    if global_minima != expected {
        reasons.push(format!(
            "s-minimal diagrams have forms {:?}, descent reached {}",
            global_minima.iter().map(ToString::to_string).collect::<Vec<_>>(),
            descent.canonical
        ));
    }
    if e.minima != expected {
        reasons.push(format!(
            "local minima have forms {:?}, descent reached {}",
            e.minima.iter().map(ToString::to_string).collect::<Vec<_>>(),
            descent.canonical
        ));
    }
    if minimal_components != 1 {
        reasons.push(format!(
            "{minimal_components} unrelated s-minimal diagrams with equal weights"
        ));
    }
    let verdict = if !reasons.is_empty() {
        Verdict::Refuted
    } else if e
        .pruned_min_s
        .as_ref()
        .is_some_and(|p| compare_radical_sums(p, &minimum_s.scaled(2)) == Ordering::Less)
    {
        reasons.push("a diagram with s below twice the minimum was cut off".into());
        Verdict::Inconclusive
    } else {
        Verdict::Confirmed
    };
    Ok(Verification {
        verdict,
        descent,
        minimum_s,
        global_minima,
        local_minima: e.minima.clone(),
        minimal_diagrams: minimal.len(),
        minimal_components,
        explored: e.nodes.len(),
        truncated: e.truncated,
        reasons,
    })
}
