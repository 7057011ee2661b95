//! Permutations of `{1..n}` in one-line notation.

use std::fmt;

use crate::error::AlgebraError;

/// A permutation `σ` of `{1..n}`, stored as `[σ(1), …, σ(n)]`. Points
/// beyond `n` are fixed, so a permutation acts on all of ℕ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, AlgebraError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(AlgebraError::InvalidPermutation(images));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// Product of disjoint or overlapping cycles, applied right to left.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, AlgebraError> {
        let mut acc = Permutation::identity(n);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<usize> = (1..=n).collect();
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n {
                    return Err(AlgebraError::InvalidPermutation(cycle.to_vec()));
                }
                images[a - 1] = b;
            }
            let c = Permutation::new(images)?;
            acc = c.compose(&acc);
        }
        Ok(acc)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self, AlgebraError> {
        Permutation::from_cycles(n, &[&[a, b]])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(i)`, with `i` fixed when it lies outside `1..=n`.
    pub fn apply(&self, i: usize) -> usize {
        if i >= 1 && i <= self.images.len() {
            self.images[i - 1]
        } else {
            i
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let n = self.degree().max(other.degree());
        Permutation {
            images: (1..=n).map(|i| self.apply(other.apply(i))).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Position pairs `(i, j)` with `i < j` and `σ(i) > σ(j)`, 1-based.
    pub fn inversions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.images.len();
        (0..n).flat_map(move |i| {
            ((i + 1)..n)
                .filter(move |&j| self.images[i] > self.images[j])
                .map(move |j| (i + 1, j + 1))
        })
    }

    /// All of `S_n` in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}
