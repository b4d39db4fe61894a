//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduces `m` to row echelon form in place and returns the pivot columns.
pub(crate) fn echelon(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / &m[row][col];
        for x in &mut m[row][col..] {
            *x *= &inv;
        }
        let (top, rest) = m.split_at_mut(row + 1);
        let pivot_row = &top[row];
        for other in rest.iter_mut() {
            if other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * p;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Pivot columns of `m` (the matrix itself is left untouched).
pub(crate) fn pivot_columns(m: &[Vec<Rational>]) -> Vec<usize> {
    let mut copy = m.to_vec();
    echelon(&mut copy)
}

/// Solves the square system `m x = rhs`; `None` if `m` is singular.
pub(crate) fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() < n || pivots.last().is_some_and(|&p| p >= n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut v = aug[i][n].clone();
        for j in i + 1..n {
            if !aug[i][j].is_zero() {
                v -= &aug[i][j] * &x[j];
            }
        }
        x[i] = v;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn solves_small_system() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve(&m, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
    }

    #[test]
    fn detects_rank_deficiency() {
        let m = vec![vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)], vec![int(0), int(1), int(1)]];
        assert_eq!(pivot_columns(&m), vec![0, 1]);
        assert!(solve(&m, &[int(1), int(2), int(3)]).is_none());
    }
}
