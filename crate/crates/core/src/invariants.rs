//! The sorted vector of per-vertex gcds of incident edge weights, a mutation
//! invariant for diagrams of any size.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError};
use crate::exactnum::{isqrt_exact, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("radical flavor needs square weights; edge {0} -> {1} has weight {2}")]
    RadicalFlavorInvalid(usize, usize, Nat),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// gcd of the weights.
    Weight,
    /// gcd of the square roots of the weights (skew-symmetric diagrams).
    Radical,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GcdInvariant {
    /// Descending; isolated vertices contribute 0.
    pub values: Vec<Nat>,
    pub flavor: Flavor,
}

impl fmt::Display for GcdInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn gcd_invariant(g: &Diagram, flavor: Flavor) -> Result<GcdInvariant, InvariantError> {
    let n = g.n();
    let mut values = vec![Nat::zero(); n];
    for (i, j, w) in g.edges() {
        let w = match flavor {
            Flavor::Weight => w.clone(),
            Flavor::Radical => isqrt_exact(w)
                .map_err(|_| InvariantError::RadicalFlavorInvalid(i, j, w.clone()))?,
        };
        values[i] = values[i].gcd(&w);
        values[j] = values[j].gcd(&w);
    }
    values.sort_by(|a, b| b.cmp(a));
    Ok(GcdInvariant { values, flavor })
}

/// Whether the invariant is the same before and after mutating along `seq`.
pub fn check_invariance(g: &Diagram, seq: &[usize], flavor: Flavor) -> Result<bool, InvariantError> {
    let before = gcd_invariant(g, flavor)?;
    let after = gcd_invariant(&g.mutate_sequence(seq)?, flavor)?;
    Ok(before == after)
}
