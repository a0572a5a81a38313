//! Hermite and Smith normal forms over `Z` with the transforms the lattice
//! code needs. Entries are `BigInt`; dimensions here are small (≤ ~30) so the
//! straightforward Euclidean row/column reductions are adequate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n).map(|j| row.iter().zip(b).fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])).collect()
        })
        .collect()
}

pub fn vec_mat_mul(v: &[BigInt], b: &IntMat) -> Vec<BigInt> {
    let n = b.first().map_or(0, Vec::len);
    (0..n).map(|j| v.iter().zip(b).fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])).collect()
}

fn row_axpy(m: &mut IntMat, target: usize, src: usize, q: &BigInt) {
    // row_target -= q * row_src
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn negate_row(m: &mut IntMat, i: usize) {
    for x in m[i].iter_mut() {
        *x = -&*x;
    }
}

/// Row-style Hermite normal form: returns `(H, U, rank)` with `U·A = H`, `U`
/// unimodular, the first `rank` rows of `H` in echelon form with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`, and the
/// remaining rows zero.
pub fn hnf_with_transform(a: &IntMat) -> (IntMat, IntMat, usize) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u = identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero |entry| among rows r.. in column c
            let pick = (r..m).filter(|&i| !h[i][c].is_zero()).min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = pick else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        r += 1;
    }
    (h, u, r)
}

pub fn hnf(a: &IntMat) -> (IntMat, usize) {
    let (h, _, r) = hnf_with_transform(a);
    (h, r)
}

/// Solves `y·H = x` for an upper-triangular full-rank `H` (row HNF); `None` if
/// the solution is not integral.
pub fn solve_upper(h: &IntMat, x: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut y = Vec::with_capacity(n);
    for c in 0..n {
        let mut rest = x[c].clone();
        for (r, yr) in y.iter().enumerate() {
            rest -= yr * &h[r][c];
        }
        let (q, rem) = rest.div_rem(&h[c][c]);
        if !rem.is_zero() {
            return None;
        }
        y.push(q);
    }
    Some(y)
}

/// Smith normal form of a square nonsingular matrix.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Diagonal `d_1 | d_2 | … | d_n`, all positive.
    pub diagonal: Vec<BigInt>,
    /// Column transform `V` with `U·C·V = D`.
    pub v: IntMat,
    /// `V⁻¹`.
    pub v_inv: IntMat,
}

pub fn smith(c: &IntMat) -> Smith {
    let n = c.len();
    let mut a = c.clone();
    let mut v = identity(n);
    let mut v_inv = identity(n);

    // col_j -= q * col_t  (V ← V·E, V⁻¹ ← E⁻¹·V⁻¹ i.e. row_t(V⁻¹) += q·row_j(V⁻¹))
    fn col_axpy(a: &mut IntMat, v: &mut IntMat, v_inv: &mut IntMat, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in a.iter_mut() {
            let s = q * &row[t];
            row[j] -= s;
        }
        for row in v.iter_mut() {
            let s = q * &row[t];
            row[j] -= s;
        }
        let rj = v_inv[j].clone();
        for (x, y) in v_inv[t].iter_mut().zip(rj.iter()) {
            *x += q * y;
        }
    }

    fn col_swap(a: &mut IntMat, v: &mut IntMat, v_inv: &mut IntMat, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    }

    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            col_swap(&mut a, &mut v, &mut v_inv, t, bj);

            let mut clean = true;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, &mut v, &mut v_inv, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let pivot = a[t][t].clone();
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    // row_t += row_i brings a non-multiple into row t
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            negate_row(&mut a, t);
        }
    }
    let diagonal = (0..n).map(|i| a[i][i].clone()).collect();
    Smith { diagonal, v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = m(&[&[4, 6, 2], &[2, 8, 0], &[6, 2, 10], &[1, 1, 1]]);
        let (h, u, r) = hnf_with_transform(&a);
        assert_eq!(r, 3);
        assert_eq!(mat_mul(&u, &a), h);
        for i in 0..r {
            let c = (0..3).find(|&c| !h[i][c].is_zero()).unwrap();
            assert!(h[i][c].is_positive());
            for k in 0..i {
                assert!(!h[k][c].is_negative() && h[k][c] < h[i][c]);
            }
        }
        assert!(h[3].iter().all(Zero::is_zero));
    }

    #[test]
    fn smith_of_diag_2_3_is_1_6() {
        let s = smith(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(2));
    }

    #[test]
    fn smith_invariants_and_inverse() {
        let c = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&c);
        // elementary divisors of this classic example: 2, 6, 12
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(3));
    }

    #[test]
    fn solve_upper_detects_non_membership() {
        let h = m(&[&[2, 1], &[0, 3]]);
        let x = vec![BigInt::from(4), BigInt::from(5)];
        assert_eq!(solve_upper(&h, &x), Some(vec![BigInt::from(2), BigInt::from(1)]));
        assert_eq!(solve_upper(&h, &[BigInt::from(1), BigInt::from(0)]), None);
    }
}
