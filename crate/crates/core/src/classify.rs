//! Mutation-acyclicity of rank-3 matrices through admissible quasi-Cartan
//! companions, and the Markov-constant criterion for the skew-symmetric case.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::diagram::Diagram;
use crate::exactnum::{isqrt_exact, Nat};
use crate::matrix::SkewSymmetrizableMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("expected size 3, found {0}")]
    WrongSize(usize),
    #[error("Markov criterion applies only to skew-symmetric matrices with a cyclic diagram")]
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationClassKind {
    /// `det A > 0` and `A` positive: mutation-equivalent to a Dynkin diagram.
    Finite,
    /// `det A = 0` and `A` semipositive of corank 1: extended Dynkin.
    Affine,
    /// `det A < 0`.
    MutationAcyclicIndefinite,
    MutationCyclic,
}

impl MutationClassKind {
    pub fn is_mutation_acyclic(self) -> bool {
        self != MutationClassKind::MutationCyclic
    }

    pub fn label(self) -> &'static str {
        match self {
            MutationClassKind::Finite => "finite",
            MutationClassKind::Affine => "affine",
            MutationClassKind::MutationAcyclicIndefinite => "indefinite-acyclic",
            MutationClassKind::MutationCyclic => "mutation-cyclic",
        }
    }
}

impl fmt::Display for MutationClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A symmetrizable matrix with diagonal 2 whose off-diagonal entries match
/// `B` up to sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiCartanCompanion {
    n: usize,
    entries: Vec<BigInt>,
    symmetrizer: Vec<Nat>,
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl QuasiCartanCompanion {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn symmetrizer(&self) -> &[Nat] {
        &self.symmetrizer
    }

    fn with_signs(b: &SkewSymmetrizableMatrix, positive: [bool; 3]) -> Self {
        let mut entries = vec![BigInt::zero(); 9];
        for i in 0..3 {
            entries[i * 3 + i] = BigInt::from(2);
        }
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let sign = if positive[p] { 1 } else { -1 };
            entries[i * 3 + j] = BigInt::from(sign) * b.get(i, j).abs();
            entries[j * 3 + i] = BigInt::from(sign) * b.get(j, i).abs();
        }
        QuasiCartanCompanion {
            n: 3,
            entries,
            symmetrizer: b.symmetrizer().to_vec(),
        }
    }

    /// `D·A`, symmetric.
    pub fn symmetrized(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let d = BigInt::from(self.symmetrizer[i].clone());
            for j in 0..n {
                out.push(&d * self.get(i, j));
            }
        }
        out
    }

    pub fn is_symmetrizable(&self) -> bool {
        let da = self.symmetrized();
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| da[i * n + j] == da[j * n + i]))
    }

    pub fn determinant(&self) -> BigInt {
        det3(&self.entries)
    }
}

fn det3(m: &[BigInt]) -> BigInt {
    let a = |i: usize, j: usize| &m[i * 3 + j];
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

fn principal_minor2(m: &[BigInt], i: usize, j: usize) -> BigInt {
    &m[i * 3 + i] * &m[j * 3 + j] - &m[i * 3 + j] * &m[j * 3 + i]
}

fn require_size3(n: usize) -> Result<(), ClassifyError> {
    if n == 3 {
        Ok(())
    } else {
        Err(ClassifyError::WrongSize(n))
    }
}

/// True iff the sign vector (positive per pair `01, 02, 12`) satisfies the
/// cycle rule: over a triangle, `∏(−Aᵢⱼ)` is negative when the triangle is
/// oriented and positive otherwise. Without a triangle every choice passes.
fn admissible(b: &SkewSymmetrizableMatrix, positive: [bool; 3]) -> bool {
    let present = PAIRS.map(|(i, j)| !b.get(i, j).is_zero());
    if !present.iter().all(|&p| p) {
        return true;
    }
    let oriented = !b.diagram().is_acyclic();
    // each factor −A_ij is negative exactly when A_ij is positive
    let negative_factors = positive.iter().filter(|&&p| p).count();
    let product_negative = negative_factors % 2 == 1;
    product_negative == oriented
}

/// An admissible quasi-Cartan companion of a 3×3 matrix.
///
/// All-negative signs when they pass, otherwise the lexicographically first
/// admissible sign vector over pairs `01, 02, 12` with `−` before `+`.
/// Absent pairs always take `−`.
pub fn admissible_companion(
    b: &SkewSymmetrizableMatrix,
) -> Result<QuasiCartanCompanion, ClassifyError> {
    require_size3(b.n())?;
    let present = PAIRS.map(|(i, j)| !b.get(i, j).is_zero());
    for bits in 0u8..8 {
        let positive = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
        if positive.iter().zip(&present).any(|(&p, &e)| p && !e) {
            continue;
        }
        if admissible(b, positive) {
            return Ok(QuasiCartanCompanion::with_signs(b, positive));
        }
    }
    unreachable!("a rank-3 matrix always has an admissible companion")
}

/// Full output of the quasi-Cartan test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kind: MutationClassKind,
    pub det: BigInt,
    /// `C(x, y, z)` when the matrix is skew-symmetric with a cyclic diagram.
    pub markov: Option<BigInt>,
}

fn kind_from_minors(det: &BigInt, leading2: &BigInt, minors2: &[BigInt; 3]) -> MutationClassKind {
    if det.is_positive() {
        // Sylvester; the first leading minor is 2·d₀ > 0
        if leading2.is_positive() {
            MutationClassKind::Finite
        } else {
            MutationClassKind::MutationCyclic
        }
    } else if det.is_zero() {
        let semipositive = minors2.iter().all(|m| !m.is_negative());
        let rank_two = minors2.iter().any(|m| m.is_positive());
        if semipositive && rank_two {
            MutationClassKind::Affine
        } else {
            MutationClassKind::MutationCyclic
        }
    } else {
        MutationClassKind::MutationAcyclicIndefinite
    }
}

pub fn analyze(b: &SkewSymmetrizableMatrix) -> Result<Classification, ClassifyError> {
    let a = admissible_companion(b)?;
    let det = a.determinant();
    let da = a.symmetrized();
    let minors2 = [
        principal_minor2(&da, 0, 1),
        principal_minor2(&da, 0, 2),
        principal_minor2(&da, 1, 2),
    ];
    let kind = kind_from_minors(&det, &minors2[0], &minors2);
    let markov = if b.is_skew_symmetric() && is_cyclic_triangle(&b.diagram()) {
        let [x, y, z] = radical_weights(b);
        Some(markov_constant(&x, &y, &z))
    } else {
        None
    };
    Ok(Classification { kind, det, markov })
}

/// Mutation class kind of a 3×3 skew-symmetrizable matrix.
pub fn classify(b: &SkewSymmetrizableMatrix) -> Result<MutationClassKind, ClassifyError> {
    Ok(analyze(b)?.kind)
}

fn is_cyclic_triangle(g: &Diagram) -> bool {
    g.edge_count() == 3 && !g.is_acyclic()
}

/// The same test computed from a 3-vertex diagram alone.
///
/// `HAH⁻¹` is symmetric with diagonal 2 and off-diagonal entries `±√w`, and
/// `DA = H·(HAH⁻¹)·H` is congruent to it, so
/// `det A = 8 − 2(α+β+γ) ± 2√(αβγ)` (`+` for an oriented triangle) and the
/// 2×2 principal minors are `4 − w`.
pub fn classify_diagram(g: &Diagram) -> Result<Classification, ClassifyError> {
    require_size3(g.n())?;
    let w = [g.pair_weight(0, 1), g.pair_weight(0, 2), g.pair_weight(1, 2)];
    let sum: Nat = w.iter().copied().sum();
    let product = w[0] * w[1] * w[2];
    let root = BigInt::from(isqrt_exact(&product).expect("validated diagram"));
    let cyclic = is_cyclic_triangle(g);
    let cross = if cyclic { root } else { -root };
    let det = BigInt::from(8) - BigInt::from(sum) * 2 + cross * 2;
    let minors2 = w.map(|x| BigInt::from(4) - BigInt::from(x.clone()));
    let kind = kind_from_minors(&det, &minors2[0], &minors2);
    let markov = if cyclic {
        let roots: Option<Vec<Nat>> = w.iter().map(|x| isqrt_exact(x).ok()).collect();
        roots.map(|r| markov_constant(&r[0], &r[1], &r[2]))
    } else {
        None
    };
    Ok(Classification { kind, det, markov })
}

/// Positive entries of a skew-symmetric 3×3 matrix on pairs `01, 12, 02`.
fn radical_weights(b: &SkewSymmetrizableMatrix) -> [Nat; 3] {
    [(0, 1), (1, 2), (0, 2)].map(|(i, j)| b.get(i, j).magnitude().clone())
}

/// `C(x, y, z) = x² + y² + z² − xyz`.
pub fn markov_constant(x: &Nat, y: &Nat, z: &Nat) -> BigInt {
    BigInt::from(x * x + y * y + z * z) - BigInt::from(x * y * z)
}

/// Mutation-acyclicity of a cyclic skew-symmetric triangle with radical
/// weights `x, y, z`: `C > 4` or `min < 2`.
pub fn is_mutation_acyclic_markov(
    x: &Nat,
    y: &Nat,
    z: &Nat,
    cyclic: bool,
) -> Result<bool, ClassifyError> {
    if !cyclic {
        return Err(ClassifyError::NotApplicable);
    }
    let c = markov_constant(x, y, z);
    let min = x.min(y).min(z);
    Ok(c > BigInt::from(4) || *min < Nat::from(2u32))
}

/// The triples with `C ≤ 4` that are still mutation-acyclic, sorted descending.
pub const MARKOV_EXCEPTIONS: [[u32; 3]; 6] =
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1], [2, 0, 0], [2, 1, 1]];

/// The list form of the Markov criterion: `C > 4` or the sorted triple is one
/// of [`MARKOV_EXCEPTIONS`].
pub fn is_mutation_acyclic_markov_list(x: &Nat, y: &Nat, z: &Nat) -> bool {
    if markov_constant(x, y, z) > BigInt::from(4) {
        return true;
    }
    let mut t = [x.clone(), y.clone(), z.clone()];
    t.sort_by(|a, b| b.cmp(a));
    MARKOV_EXCEPTIONS
        .iter()
        .any(|e| e.iter().zip(&t).all(|(&a, b)| Nat::from(a) == *b))
}

/// `det A = 2(4 − C(B))` for a skew-symmetric 3×3 matrix with cyclic diagram.
pub fn det_markov_consistency(b: &SkewSymmetrizableMatrix) -> Result<bool, ClassifyError> {
    require_size3(b.n())?;
    if !b.is_skew_symmetric() || !is_cyclic_triangle(&b.diagram()) {
        return Err(ClassifyError::NotApplicable);
    }
    let det = admissible_companion(b)?.determinant();
    let [x, y, z] = radical_weights(b);
    Ok(det == (BigInt::from(4) - markov_constant(&x, &y, &z)) * 2)
}

/// The skew-symmetric matrix of the oriented cycle `0 → 1 → 2 → 0` with
/// radical weights `x` on `01`, `y` on `12`, `z` on `20`.
pub fn markov_matrix(x: i64, y: i64, z: i64) -> SkewSymmetrizableMatrix {
    SkewSymmetrizableMatrix::from_rows(&[[0, x, -z], [-x, 0, y], [z, -y, 0]])
        .expect("skew-symmetric")
}
