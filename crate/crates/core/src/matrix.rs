//! Skew-symmetrizable integer matrices and their mutation.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::diagram::Diagram;
use crate::exactnum::{add_signed_radicals, Nat, NotAPerfectSquare};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("not skew-symmetrizable: {0}")]
    NotSkewSymmetrizable(String),
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

/// An `n × n` integer matrix `B` together with a positive diagonal `D` such
/// that `D·B` is skew-symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkewSymmetrizableMatrix {
    n: usize,
    entries: Vec<BigInt>,
    symmetrizer: Vec<Nat>,
}

fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl SkewSymmetrizableMatrix {
    /// Validates a square matrix given row-major and finds its normalized
    /// symmetrizer.
    ///
    /// Ratios `dⱼ/dᵢ = |Bᵢⱼ|/|Bⱼᵢ|` are propagated along a spanning tree of each
    /// connected component, every edge is then checked, and each component's
    /// `D` is scaled to coprime integers.
    pub fn validate_and_symmetrize(n: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::Parse(format!(
                "expected {} entries, found {}",
                n * n,
                entries.len()
            )));
        }
        let at = |i: usize, j: usize| &entries[i * n + j];
        for i in 0..n {
            if !at(i, i).is_zero() {
                return Err(MatrixError::NotSkewSymmetrizable(format!(
                    "nonzero diagonal entry at ({i},{i})"
                )));
            }
            for j in (i + 1)..n {
                if sign_of(at(i, j)) != -sign_of(at(j, i)) {
                    return Err(MatrixError::NotSkewSymmetrizable(format!(
                        "sign pattern violated at ({i},{j})"
                    )));
                }
            }
        }

        // d as reduced fractions num/den
        let mut ratio: Vec<Option<(Nat, Nat)>> = vec![None; n];
        let mut symmetrizer = vec![Nat::zero(); n];
        for root in 0..n {
            if ratio[root].is_some() {
                continue;
            }
            ratio[root] = Some((Nat::one(), Nat::one()));
            let mut component = vec![root];
            let mut stack = vec![root];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if at(i, j).is_zero() || ratio[j].is_some() {
                        continue;
                    }
                    let (num, den) = ratio[i].clone().expect("visited");
                    // d_j = d_i |B_ij| / |B_ji|
                    let num = num * at(i, j).magnitude();
                    let den = den * at(j, i).magnitude();
                    let g = num.gcd(&den);
                    ratio[j] = Some((num / &g, den / g));
                    component.push(j);
                    stack.push(j);
                }
            }
            let lcm = component.iter().fold(Nat::one(), |acc, &v| {
                acc.lcm(&ratio[v].as_ref().expect("visited").1)
            });
            for &v in &component {
                let (num, den) = ratio[v].as_ref().expect("visited");
                symmetrizer[v] = num * (&lcm / den);
            }
            let g = component
                .iter()
                .fold(Nat::zero(), |acc, &v| acc.gcd(&symmetrizer[v]));
            for &v in &component {
                symmetrizer[v] /= &g;
            }
        }

        let m = SkewSymmetrizableMatrix {
            n,
            entries,
            symmetrizer,
        };
        if let Some((i, j)) = m.skew_violation() {
            return Err(MatrixError::NotSkewSymmetrizable(format!(
                "inconsistent ratio cycle through ({i},{j})"
            )));
        }
        Ok(m)
    }

    /// Accepts `B` with a caller-supplied `D`, checking `D·B` is skew-symmetric.
    pub fn with_symmetrizer(
        n: usize,
        entries: Vec<BigInt>,
        symmetrizer: Vec<Nat>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != n * n || symmetrizer.len() != n {
            return Err(MatrixError::Parse("dimension mismatch".into()));
        }
        if symmetrizer.iter().any(|d| d.is_zero()) {
            return Err(MatrixError::NotSkewSymmetrizable(
                "symmetrizer entries must be positive".into(),
            ));
        }
        let m = SkewSymmetrizableMatrix {
            n,
            entries,
            symmetrizer,
        };
        match m.skew_violation() {
            Some((i, j)) => Err(MatrixError::NotSkewSymmetrizable(format!(
                "D·B not skew-symmetric at ({i},{j})"
            ))),
            None => Ok(m),
        }
    }

    /// Convenience constructor from nested rows of small integers.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(MatrixError::Parse("ragged rows".into()));
            }
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self::validate_and_symmetrize(n, entries)
    }

    fn skew_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i..self.n {
                let lhs = BigInt::from(self.symmetrizer[i].clone()) * self.get(i, j);
                let rhs = BigInt::from(self.symmetrizer[j].clone()) * self.get(j, i);
                if lhs != -rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn symmetrizer(&self) -> &[Nat] {
        &self.symmetrizer
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    /// Matrix mutation at `k`. The result carries the same symmetrizer.
    ///
    /// Panics if `k >= n`.
    pub fn mutate(&self, k: usize) -> SkewSymmetrizableMatrix {
        assert!(k < self.n, "mutation index {k} out of range for size {}", self.n);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                let e = if i == k || j == k {
                    -b
                } else {
                    let bik = self.get(i, k);
                    let prod = bik * self.get(k, j);
                    if prod.is_positive() {
                        b + BigInt::from(sign_of(bik)) * prod
                    } else {
                        b.clone()
                    }
                };
                entries.push(e);
            }
        }
        SkewSymmetrizableMatrix {
            n,
            entries,
            symmetrizer: self.symmetrizer.clone(),
        }
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, seq: &[usize]) -> SkewSymmetrizableMatrix {
        seq.iter().fold(self.clone(), |m, &k| m.mutate(k))
    }

    /// The skew-symmetric companion `S(B)` with `Sᵢⱼ = sgn(Bᵢⱼ)·√|BᵢⱼBⱼᵢ|`.
    pub fn companion(&self) -> CompanionMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                let square = (b * self.get(j, i)).magnitude().clone();
                entries.push(SignedRadical::new(b.is_negative(), square));
            }
        }
        CompanionMatrix { n, entries }
    }

    /// The diagram `Γ(B)`: an edge `i → j` of weight `|BᵢⱼBⱼᵢ|` whenever `Bᵢⱼ > 0`.
    pub fn diagram(&self) -> Diagram {
        let n = self.n;
        let mut weights = vec![Nat::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                if b.is_positive() {
                    weights[i * n + j] = (b * self.get(j, i)).magnitude().clone();
                }
            }
        }
        Diagram::from_weights_unchecked(n, weights)
    }
}

impl fmt::Display for SkewSymmetrizableMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for SkewSymmetrizableMatrix {
    type Err = MatrixError;

    /// Parses `n` on the first line followed by `n` rows of `n` integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Parse("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| MatrixError::Parse(format!("bad size line {header:?}")))?;
        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| MatrixError::Parse(format!("missing row {row}")))?;
            let before = entries.len();
            for tok in line.split_whitespace() {
                let x: BigInt = tok
                    .parse()
                    .map_err(|_| MatrixError::Parse(format!("bad entry {tok:?}")))?;
                entries.push(x);
            }
            if entries.len() - before != n {
                return Err(MatrixError::Parse(format!(
                    "row {row} has {} entries, expected {n}",
                    entries.len() - before
                )));
            }
        }
        if let Some(extra) = lines.next() {
            return Err(MatrixError::Parse(format!("trailing line {extra:?}")));
        }
        Self::validate_and_symmetrize(n, entries)
    }
}

/// A real number `±√square`, kept exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedRadical {
    negative: bool,
    square: Nat,
}

impl SignedRadical {
    pub fn new(negative: bool, square: Nat) -> Self {
        let negative = negative && !square.is_zero();
        SignedRadical { negative, square }
    }

    pub fn zero() -> Self {
        SignedRadical::new(false, Nat::zero())
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn is_positive(&self) -> bool {
        !self.negative && !self.square.is_zero()
    }

    /// The square of the magnitude.
    pub fn square(&self) -> &Nat {
        &self.square
    }

    pub fn neg(&self) -> SignedRadical {
        SignedRadical::new(!self.negative, self.square.clone())
    }

    fn mul(&self, other: &SignedRadical) -> SignedRadical {
        SignedRadical::new(self.negative != other.negative, &self.square * &other.square)
    }

    fn try_add(&self, other: &SignedRadical) -> Result<SignedRadical, NotAPerfectSquare> {
        let (negative, square) =
            add_signed_radicals(self.negative, &self.square, other.negative, &other.square)?;
        Ok(SignedRadical::new(negative, square))
    }
}

/// The skew-symmetric real matrix `S(B) = H·B·H⁻¹`, entries stored as
/// [`SignedRadical`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompanionMatrix {
    n: usize,
    entries: Vec<SignedRadical>,
}

impl CompanionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &SignedRadical {
        &self.entries[i * self.n + j]
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| *self.get(i, j) == self.get(j, i).neg()))
    }

    /// The mutation rule applied to `S` as a real matrix.
    ///
    /// Fails only if some `Sᵢⱼ + sgn(Sᵢₖ)[SᵢₖSₖⱼ]₊` leaves the form `±√m`, which
    /// cannot happen for a companion of a skew-symmetrizable matrix.
    pub fn mutate(&self, k: usize) -> Result<CompanionMatrix, NotAPerfectSquare> {
        assert!(k < self.n, "mutation index {k} out of range for size {}", self.n);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let s = self.get(i, j);
                let e = if i == k || j == k {
                    s.neg()
                } else {
                    let sik = self.get(i, k);
                    let prod = sik.mul(self.get(k, j));
                    if prod.is_positive() {
                        let delta = SignedRadical::new(sik.is_negative(), prod.square);
                        s.try_add(&delta)?
                    } else {
                        s.clone()
                    }
                };
                entries.push(e);
            }
        }
        Ok(CompanionMatrix { n, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SkewSymmetrizableMatrix {
        SkewSymmetrizableMatrix::from_rows(rows).unwrap()
    }

    fn d(v: &[u32]) -> Vec<Nat> {
        v.iter().map(|&x| Nat::from(x)).collect()
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(m(&[&[0, 1], &[-1, 0]]).symmetrizer(), &d(&[1, 1])[..]);
        // d0·1 = d1·2
        assert_eq!(m(&[&[0, 1], &[-2, 0]]).symmetrizer(), &d(&[2, 1])[..]);
        assert!(matches!(
            SkewSymmetrizableMatrix::from_rows(&[[0, 1], [1, 0]]),
            Err(MatrixError::NotSkewSymmetrizable(_))
        ));
    }

    #[test]
    fn symmetrizer_rejects_inconsistent_cycle() {
        // ratios around the triangle multiply to 2, not 1
        let r = SkewSymmetrizableMatrix::from_rows(&[[0, 1, -1], [-1, 0, 1], [2, -1, 0]]);
        assert!(matches!(r, Err(MatrixError::NotSkewSymmetrizable(_))));
    }

    #[test]
    fn symmetrizer_per_component() {
        let b = m(&[&[0, 1, 0, 0], &[-3, 0, 0, 0], &[0, 0, 0, 2], &[0, 0, -1, 0]]);
        assert_eq!(b.symmetrizer(), &d(&[3, 1, 1, 2])[..]);
    }

    #[test]
    fn nonzero_diagonal_rejected() {
        assert!(SkewSymmetrizableMatrix::from_rows(&[[1, 0], [0, 0]]).is_err());
    }

    #[test]
    fn mutate_zero_matrix() {
        let z = m(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        for k in 0..3 {
            assert_eq!(z.mutate(k), z);
        }
    }

    #[test]
    fn mutate_path_at_middle() {
        let b = m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        let expected = m(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]);
        assert_eq!(b.mutate(1), expected);
        assert_eq!(b.mutate(1).mutate(1), b);
    }

    #[test]
    fn companion_examples() {
        let c = m(&[&[0, 1], &[-2, 0]]).companion();
        assert_eq!(c.get(0, 1), &SignedRadical::new(false, Nat::from(2u32)));
        assert_eq!(c.get(1, 0), &SignedRadical::new(true, Nat::from(2u32)));
        assert!(c.is_skew_symmetric());

        let s = m(&[&[0, 3, -1], &[-3, 0, 2], &[1, -2, 0]]).companion();
        assert_eq!(s.get(0, 1).square(), &Nat::from(9u32));
        assert_eq!(s.get(1, 2).square(), &Nat::from(4u32));
    }

    #[test]
    fn diagram_examples() {
        let g = m(&[&[0, 2], &[-1, 0]]).diagram();
        assert_eq!(g.weight(0, 1), &Nat::from(2u32));
        assert!(g.weight(1, 0).is_zero());
        assert_eq!(m(&[&[0, 0], &[0, 0]]).diagram().edge_count(), 0);
    }

    #[test]
    fn text_round_trip_and_ragged() {
        let text = "3\n0 2 -1\n-1 0 1\n1 -2 0\n";
        let b: SkewSymmetrizableMatrix = text.parse().unwrap();
        assert_eq!(b.to_string(), text);
        assert!(matches!(
            "3\n0 1 0\n-1 0\n0 0 0\n".parse::<SkewSymmetrizableMatrix>(),
            Err(MatrixError::Parse(_))
        ));
        assert!("2\n0 1\n".parse::<SkewSymmetrizableMatrix>().is_err());
    }
}
