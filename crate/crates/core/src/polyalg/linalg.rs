//! Small dense linear algebra over [`Scalar`], exact in rational mode.

use super::multipoly::MultiPoly;
use super::scalar::Scalar;

fn pivot_row<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        (from..m.len())
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()))
    }
}

pub fn det<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut sign = S::one();
    let mut acc = S::one();
    for col in 0..n {
        let Some(p) = pivot_row(&m, col, col) else {
            return S::zero();
        };
        if p != col {
            m.swap(p, col);
            sign = -sign;
        }
        let piv = m[col][col].clone();
        acc = acc * piv.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / piv.clone();
            for c in col..n {
                m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
            }
        }
    }
    sign * acc
}

/// Solves the square system `a·x = b`; `None` when singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = pivot_row(&m, col, col)?;
        m.swap(p, col);
        let piv = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / piv.clone();
            for c in col..=n {
                m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
            }
        }
    }
    Some((0..n).map(|k| m[k][n].clone() / m[k][k].clone()).collect())
}

/// Basis of the right nullspace of `rows` (each of length `ncols`).
///
/// Exact in rational mode. In float mode entries below `1e-12` times the
/// largest entry are treated as zero.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let scale = m.iter().flat_map(|r| r.iter().map(|x| x.magnitude())).fold(0.0, f64::max);
    let negligible = |x: &S| !S::EXACT && x.magnitude() <= 1e-12 * scale;
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        for r in row..m.len() {
            if negligible(&m[r][col]) {
                m[r][col] = S::zero();
            }
        }
        let Some(p) = pivot_row(&m, col, row) else {
            continue;
        };
        m.swap(p, row);
        let piv = m[row][col].clone();
        for c in col..ncols {
            m[row][c] = m[row][c].clone() / piv.clone();
        }
        for r in 0..m.len() {
            if r == row || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..ncols {
                m[r][c] = m[r][c].clone() - f.clone() * m[row][c].clone();
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square matrix of polynomials by Laplace expansion over
/// row subsets (no division needed). Practical up to about 16×16.
pub fn det_poly<S: Scalar>(m: &[Vec<MultiPoly<S>>]) -> MultiPoly<S> {
    let n = m.len();
    assert!(n > 0 && n <= 20, "det_poly supports 1..=20 rows");
    let vars = m[0][0].vars().clone();
    // minors[mask] = det(rows in mask, first popcount(mask) columns)
    let mut prev: std::collections::BTreeMap<u32, MultiPoly<S>> = std::collections::BTreeMap::new();
    prev.insert(0, MultiPoly::constant(vars.clone(), S::one()));
    for col in 0..n {
        let mut next = std::collections::BTreeMap::new();
        for (&mask, minor) in &prev {
            if minor.is_zero() {
                continue;
            }
            for r in 0..n {
                if mask & (1 << r) != 0 || m[r][col].is_zero() {
                    continue;
                }
                // expansion along the last column: parity reduces to the rows below r
                let below = (mask >> r).count_ones() as usize;
                let term = &m[r][col] * minor;
                let term = if below % 2 == 1 { -&term } else { term };
                let entry = next.entry(mask | (1 << r)).or_insert_with(|| MultiPoly::zero(vars.clone()));
                *entry = &*entry + &term;
            }
        }
        prev = next;
    }
    prev.remove(&((1u32 << n) - 1)).unwrap_or_else(|| MultiPoly::zero(vars))
}
