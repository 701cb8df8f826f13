//! Square matrices over commutative rings: determinant and products.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Minimal commutative-ring interface used by the generic routines.
pub trait Ring: Clone + Zero + One + Neg<Output = Self> + Sub<Output = Self> + PartialEq {}

impl<T> Ring for T where T: Clone + Zero + One + Neg<Output = T> + Sub<Output = T> + PartialEq {}

/// Determinant by cofactor expansion along rows, memoised on the set of used
/// columns. Division-free, so it works for polynomial entries.
pub fn determinant<T: Ring>(m: &[Vec<T>]) -> T {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    assert!(n < 64, "matrix too large for bitmask expansion");
    let mut memo: HashMap<u64, T> = HashMap::new();
    minor(m, 0, &mut memo)
}

fn minor<T: Ring>(m: &[Vec<T>], used: u64, memo: &mut HashMap<u64, T>) -> T {
    let n = m.len();
    let row = used.count_ones() as usize;
    if row == n {
        return T::one();
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = T::zero();
    let mut sign_flip = false;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let entry = &m[row][col];
        if !entry.is_zero() {
            let sub = minor(m, used | (1 << col), memo);
            let term = entry.clone() * sub;
            acc = if sign_flip { acc - term } else { acc + term };
        }
        sign_flip = !sign_flip;
    }
    memo.insert(used, acc.clone());
    acc
}

pub fn mat_mul<T>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(T::zero(), |acc, l| acc + a[i][l].clone() * b[l][j].clone())
                })
                .collect()
        })
        .collect()
}

/// Inverse over a field by Gauss-Jordan elimination; `None` when singular.
pub fn inverse<T>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>>
where
    T: Ring + std::ops::Div<Output = T>,
{
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                    a[r][c] = v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
