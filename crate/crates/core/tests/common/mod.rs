//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use skewmut::matrix::SkewSymmetrizableMatrix;
use skewmut::{Diagram, RadicalTriple};

/// Random skew-symmetrizable matrix: pick `d_i ∈ {1,2,3}`, then for each
/// pair set `B_ij = s·c·d_j/g`, `B_ji = −s·c·d_i/g` with `g = gcd(d_i, d_j)`.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, max_c: i64, density: f64) -> SkewSymmetrizableMatrix {
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if !rng.gen_bool(density) {
                continue;
            }
            let c = rng.gen_range(1..=max_c);
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            let g = d[i].gcd(&d[j]);
            rows[i][j] = s * c * d[j] / g;
            rows[j][i] = -s * c * d[i] / g;
        }
    }
    SkewSymmetrizableMatrix::from_rows(&rows).expect("DB is skew by construction")
}

#[allow(clippy::needless_range_loop)]
pub fn random_skew_symmetric<R: Rng>(rng: &mut R, n: usize, max_c: i64, density: f64) -> SkewSymmetrizableMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let c = if rng.gen_bool(density) { rng.gen_range(-max_c..=max_c) } else { 0 };
            rows[i][j] = c;
            rows[j][i] = -c;
        }
    }
    SkewSymmetrizableMatrix::from_rows(&rows).expect("skew-symmetric")
}

/// A diagram of a random skew-symmetrizable matrix, so the cycle condition
/// holds automatically.
pub fn random_diagram<R: Rng>(rng: &mut R, n: usize, max_c: i64) -> Diagram {
    random_matrix(rng, n, max_c, 0.7).diagram()
}

/// Random cyclic skew-symmetric 3×3 with radical weights in `1..=max`.
pub fn random_cyclic_skew<R: Rng>(rng: &mut R, max: i64) -> SkewSymmetrizableMatrix {
    let (x, y, z) = (rng.gen_range(1..=max), rng.gen_range(1..=max), rng.gen_range(1..=max));
    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
    SkewSymmetrizableMatrix::from_rows(&[[0, s * x, -s * z], [-s * x, 0, s * y], [s * z, -s * y, 0]])
        .expect("skew-symmetric")
}

/// Newton iteration floor square root, independent of the library's.
pub fn oracle_isqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

pub fn oracle_is_square(n: &BigUint) -> bool {
    let r = oracle_isqrt(n);
    &r * &r == *n
}

/// Compares `Σ√x` with `Σ√y` using 100 decimal digits of fixed point.
/// `None` when the two agree to within the truncation error.
pub fn oracle_compare(x: &[u64], y: &[u64]) -> Option<Ordering> {
    let scale = BigUint::from(10u32).pow(200);
    let floor_sum = |v: &[u64]| -> BigUint {
        v.iter()
            .map(|&t| oracle_isqrt(&(BigUint::from(t) * &scale)))
            .sum()
    };
    let (sx, sy) = (floor_sum(x), floor_sum(y));
    // true value lies in [s, s + len), exactly s when there are no terms
    let below = |s: &BigUint, len: usize, other: &BigUint| {
        let hi = s + BigUint::from(len);
        hi < *other || (hi == *other && len > 0)
    };
    if below(&sx, x.len(), &sy) {
        Some(Ordering::Less)
    } else if below(&sy, y.len(), &sx) {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// 3×3 determinant by cofactor expansion.
pub fn det3(a: &[[BigInt; 3]; 3]) -> BigInt {
    &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1])
        - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
        + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
}

/// All connected 3-vertex diagrams with weights in `0..=max` satisfying the
/// cycle condition, each orientation listed once per labeling.
pub fn all_three_vertex_diagrams(max: u64) -> Vec<Diagram> {
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut out = Vec::new();
    // per pair: 0 absent, +w forward, -w backward
    let range: Vec<i64> = (-(max as i64)..=(max as i64)).collect();
    for &p in &range {
        for &q in &range {
            for &r in &range {
                let signed = [p, q, r];
                let nonzero = signed.iter().filter(|&&v| v != 0).count();
                if nonzero < 2 {
                    continue;
                }
                let edges: Vec<(usize, usize, u64)> = pairs
                    .iter()
                    .zip(signed)
                    .filter(|(_, v)| *v != 0)
                    .map(|(&(i, j), v)| if v > 0 { (i, j, v as u64) } else { (j, i, (-v) as u64) })
                    .collect();
                if let Ok(g) = Diagram::from_edges(3, &edges) {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Cyclic triples (squared weights, all nonzero, in `1..=max`) with square
/// product.
pub fn cyclic_triples(max: u64) -> Vec<RadicalTriple> {
    let mut out = Vec::new();
    for a in 1..=max {
        for b in 1..=max {
            for c in 1..=max {
                if oracle_is_square(&BigUint::from(a * b * c)) {
                    out.push(RadicalTriple::from_u64(true, [a, b, c]).expect("valid"));
                }
            }
        }
    }
    out
}
