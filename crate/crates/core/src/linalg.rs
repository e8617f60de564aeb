//! Exact row reduction over the rationals.

use num::{One, Zero};

use crate::scalar::Rational;

/// Reduced row echelon form of `rows`; returns the nonzero rows.
pub(crate) fn row_reduce(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// Inverse of a square matrix, `None` when singular.
pub(crate) fn inverse(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return None;
    }
    let augmented: Vec<Vec<Rational>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let reduced = row_reduce(augmented);
    if reduced.len() < n {
        return None;
    }
    for (i, row) in reduced.iter().enumerate() {
        if !row[i].is_one() || row[..n].iter().enumerate().any(|(j, v)| j != i && !v.is_zero()) {
            return None;
        }
    }
    Some(reduced.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub(crate) fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn rank_and_inverse() {
        let m = vec![vec![int(2), int(1)], vec![int(4), int(2)]];
        assert_eq!(row_reduce(m.clone()).len(), 1);
        assert!(inverse(&m).is_none());
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&m).unwrap();
        let id = mat_mul(&m, &inv);
        assert_eq!(id, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
    }
}
