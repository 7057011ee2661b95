//! Exact linear algebra over ℤ, ℚ and ℤ/p: incremental rank, rational
//! solving and Smith normal form with transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row-echelon basis over ℚ kept fraction-free: every stored row is a
/// primitive integer vector. Uses `i128` and falls back to `BigInt` on
/// overflow.
pub struct IntEchelon {
    width: usize,
    small: Option<Vec<(usize, Vec<i128>)>>,
    big: Vec<(usize, Vec<BigInt>)>,
}

impl IntEchelon {
    pub fn new(width: usize) -> Self {
        IntEchelon {
            width,
            small: Some(Vec::new()),
            big: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        match &self.small {
            Some(rows) => rows.len(),
            None => self.big.len(),
        }
    }

    /// Adds a row; returns whether it was independent of the stored ones.
    pub fn insert(&mut self, row: &[i64]) -> bool {
        assert_eq!(row.len(), self.width, "row width");
        if let Some(rows) = &mut self.small {
            let r: Vec<i128> = row.iter().map(|&v| v as i128).collect();
            match reduce_small(rows, r) {
                Some(Some((p, r))) => {
                    rows.push((p, r));
                    return true;
                }
                Some(None) => return false,
                None => {
                    self.big = rows
                        .iter()
                        .map(|(p, r)| (*p, r.iter().map(|&v| BigInt::from(v)).collect()))
                        .collect();
                    self.small = None;
                }
            }
        }
        let r: Vec<BigInt> = row.iter().map(|&v| BigInt::from(v)).collect();
        match reduce_big(&self.big, r) {
            Some((p, r)) => {
                self.big.push((p, r));
                true
            }
            None => false,
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn make_primitive_small(r: &mut [i128]) {
    let g = r.iter().fold(0, |g, &v| gcd_i128(g, v));
    if g > 1 {
        r.iter_mut().for_each(|v| *v /= g);
    }
}

/// Outer `None` signals overflow; inner `None` a dependent row.
#[allow(clippy::type_complexity)]
fn reduce_small(rows: &[(usize, Vec<i128>)], mut r: Vec<i128>) -> Option<Option<(usize, Vec<i128>)>> {
    for (p, b) in rows {
        let a = r[*p];
        if a == 0 {
            continue;
        }
        let g = gcd_i128(a, b[*p]);
        let (fa, fb) = (b[*p] / g, a / g);
        for k in 0..r.len() {
            let x = r[k].checked_mul(fa)?;
            let y = b[k].checked_mul(fb)?;
            r[k] = x.checked_sub(y)?;
        }
        make_primitive_small(&mut r);
    }
    Some(r.iter().position(|&v| v != 0).map(|p| (p, r)))
}

fn make_primitive_big(r: &mut [BigInt]) {
    let g = r.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g > BigInt::one() {
        r.iter_mut().for_each(|v| *v = &*v / &g);
    }
}

fn reduce_big(rows: &[(usize, Vec<BigInt>)], mut r: Vec<BigInt>) -> Option<(usize, Vec<BigInt>)> {
    for (p, b) in rows {
        if r[*p].is_zero() {
            continue;
        }
        let g = r[*p].gcd(&b[*p]);
        let fa = &b[*p] / &g;
        let fb = &r[*p] / &g;
        for k in 0..r.len() {
            r[k] = &r[k] * &fa - &b[k] * &fb;
        }
        make_primitive_big(&mut r);
    }
    r.iter().position(|v| !v.is_zero()).map(|p| (p, r))
}

/// Rank over ℚ (equal to the rank over ℤ).
pub fn rank_rational(rows: &[Vec<i64>], width: usize) -> usize {
    let mut e = IntEchelon::new(width);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Rank over the prime field `ℤ/p`.
pub fn rank_mod_p(rows: &[Vec<i64>], width: usize, p: u64) -> usize {
    let p128 = p as i128;
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for row in rows {
        let mut r: Vec<u64> = row
            .iter()
            .map(|&v| (v as i128).rem_euclid(p128) as u64)
            .collect();
        for (piv, b) in &basis {
            let a = r[*piv];
            if a == 0 {
                continue;
            }
            // b is normalized with b[piv] = 1
            for k in 0..width {
                let t = (a as u128 * b[k] as u128 % p as u128) as u64;
                r[k] = (r[k] + p - t) % p;
            }
        }
        if let Some(piv) = r.iter().position(|&v| v != 0) {
            let inv = mod_inverse(r[piv], p).expect("prime modulus");
            for v in r.iter_mut() {
                *v = (*v as u128 * inv as u128 % p as u128) as u64;
            }
            basis.push((piv, r));
        }
    }
    basis.len()
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Finds `x` with `x·M = y` over ℚ, where `M` has the given rows.
/// Returns `None` when `y` is outside the row space; free variables are
/// set to zero, and the flag reports whether the solution is unique.
pub fn solve_left(rows: &[Vec<BigRational>], y: &[BigRational]) -> Option<(Vec<BigRational>, bool)> {
    let r = rows.len();
    let c = y.len();
    // Augmented system Mᵀ x = y: c equations in r unknowns.
    let mut a: Vec<Vec<BigRational>> = (0..c)
        .map(|j| {
            let mut eq: Vec<BigRational> = rows.iter().map(|row| row[j].clone()).collect();
            eq.push(y[j].clone());
            eq
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(pr) = (row..c).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..c {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for k in col..=r {
                    let t = &a[row][k] * &f;
                    a[i][k] = &a[i][k] - t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == c {
            break;
        }
    }
    if a[row..].iter().any(|eq| !eq[r].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); r];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][r].clone();
    }
    Some((x, pivots.len() == r))
}

/// Smith normal form `U·M·V = D` over ℤ with unimodular `U`, `V`.
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl Smith {
    /// Whether `D = [I 0]`, i.e. the rows span a direct summand freely.
    pub fn is_unimodular_rows(&self, rows: usize) -> bool {
        self.diagonal.len() == rows && self.diagonal.iter().all(|d| d.is_one())
    }

    /// `R` with `M·R = I`, available when [`Smith::is_unimodular_rows`].
    pub fn right_inverse(&self) -> Vec<Vec<BigInt>> {
        let r = self.u.len();
        let c = self.v.len();
        let mut out = vec![vec![BigInt::zero(); r]; c];
        for i in 0..c {
            for j in 0..r {
                let mut acc = BigInt::zero();
                for k in 0..r {
                    if !self.v[i][k].is_zero() && !self.u[k][j].is_zero() {
                        acc += &self.v[i][k] * &self.u[k][j];
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

pub fn smith_normal_form(m: &[Vec<BigInt>], cols: usize) -> Smith {
    let rows = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut changed = false;
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    changed = true;
                }
            }
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    swap_cols(&mut v, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility of the remaining block
            let bad = ((t + 1)..rows).find(|&i| ((t + 1)..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    row_axpy(&mut a, t, i, &BigInt::from(-1));
                    row_axpy(&mut u, t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        diagonal.push(a[t][t].clone());
        t += 1;
    }
    Smith { diagonal, u, v }
}

/// `row[i] -= q·row[k]`
fn row_axpy(a: &mut [Vec<BigInt>], i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = a[k].clone();
    for (x, s) in a[i].iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *x -= q * s;
        }
    }
}

/// `col[j] -= q·col[k]`
fn col_axpy(a: &mut [Vec<BigInt>], j: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[k].is_zero() {
            let d = q * &row[k];
            row[j] -= d;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn rank_over_q_and_fp() {
        let rows = vec![vec![2, 4], vec![1, 2], vec![0, 3]];
        assert_eq!(rank_rational(&rows, 2), 2);
        assert_eq!(rank_mod_p(&rows, 2, 3), 1);
        assert_eq!(rank_mod_p(&rows, 2, 2), 2);
    }

    #[test]
    fn rank_survives_i128_overflow() {
        let big_v = 1i64 << 62;
        let rows = vec![vec![big_v, 1, 0], vec![1, big_v, 1], vec![3, 5, big_v]];
        assert_eq!(rank_rational(&rows, 3), 3);
    }

    #[test]
    fn smith_of_small_matrices() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m, 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let m = big(&[&[1, 1, 0], &[0, 1, 1]]);
        let s = smith_normal_form(&m, 3);
        assert!(s.is_unimodular_rows(2));
        let r = s.right_inverse();
        for i in 0..2 {
            for j in 0..2 {
                let v: BigInt = (0..3).map(|k| &m[i][k] * &r[k][j]).sum();
                assert_eq!(v, BigInt::from((i == j) as i32));
            }
        }
    }

    #[test]
    fn left_solve() {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        let rows = vec![vec![q(1), q(1)], vec![q(0), q(2)]];
        let (x, unique) = solve_left(&rows, &[q(3), q(7)]).unwrap();
        assert!(unique);
        assert_eq!(x, vec![q(3), BigRational::new(BigInt::from(2), BigInt::from(1))]);
        assert!(solve_left(&[vec![q(1), q(1)]], &[q(1), q(2)]).is_none());
    }
}
