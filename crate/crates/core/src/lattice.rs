//! Exact integer linear algebra on small dense matrices: determinants,
//! adjugates, Hermite and Smith forms, kernels and characteristic polynomials.

pub type IMat = Vec<Vec<i128>>;

pub fn to_imat(rows: &[Vec<i64>]) -> IMat {
    rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub fn transpose(a: &IMat) -> IMat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn matmul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &IMat, v: &[i128]) -> Vec<i128> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Determinant by Bareiss fraction-free elimination.
pub fn det<T: Copy + Into<i128>>(rows: &[Vec<T>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut a: IMat = rows.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Adjugate matrix, so that `a * adj(a) = det(a) I`.
pub fn adjugate(a: &IMat) -> IMat {
    let n = a.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: IMat = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            out[i][j] = s * det(&minor);
        }
    }
    out
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `gens`.
/// Returns the nonzero rows (a basis of the lattice), pivots strictly increasing.
pub fn hermite_rows(gens: &IMat) -> IMat {
    if gens.is_empty() {
        return Vec::new();
    }
    let cols = gens[0].len();
    let mut a = gens.clone();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if a[i][c] != 0 && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut clean = true;
            for i in r + 1..a.len() {
                if a[i][c] != 0 {
                    let q = a[i][c] / a[r][c];
                    for k in 0..cols {
                        a[i][k] -= q * a[r][k];
                    }
                    if a[i][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if r < a.len() && a[r][c] != 0 {
            if a[r][c] < 0 {
                for k in 0..cols {
                    a[r][k] = -a[r][k];
                }
            }
            for i in 0..r {
                let q = a[i][c].div_euclid(a[r][c]);
                if q != 0 {
                    for k in 0..cols {
                        a[i][k] -= q * a[r][k];
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Smith invariant factors `d_1 | d_2 | ...` of an integer matrix (nonzero ones only).
pub fn smith_diagonal(m: &IMat) -> Vec<i128> {
    let mut a = m.clone();
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pick the smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let mut dirty = false;
        for i in t + 1..rows {
            let q = a[i][t] / a[t][t];
            if q != 0 {
                for k in t..cols {
                    a[i][k] -= q * a[t][k];
                }
            }
            if a[i][t] != 0 {
                dirty = true;
            }
        }
        for j in t + 1..cols {
            let q = a[t][j] / a[t][t];
            if q != 0 {
                for row in a.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
            }
            if a[t][j] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // divisibility condition: fold offending rows into row t
        let p = a[t][t];
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
        if let Some(i) = bad {
            for k in t..cols {
                a[t][k] += a[i][k];
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag
}

/// Saturated Z-basis (as columns of the returned `n x k` data, given as k vectors)
/// of `{x in Z^n : a x = 0}`.
pub fn kernel_basis(a: &IMat, n: usize) -> Vec<Vec<i128>> {
    // column operations on a, tracked in u: a * u = [h | 0]
    let rows = a.len();
    let mut h: IMat = a.clone();
    let mut u = identity(n);
    let mut c = 0;
    for r in 0..rows {
        if c == n {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in c..n {
                if h[r][j] != 0 && best.is_none_or(|b| h[r][j].abs() < h[r][b].abs()) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            swap_cols(&mut h, c, b);
            swap_cols(&mut u, c, b);
            let mut clean = true;
            for j in c + 1..n {
                if h[r][j] != 0 {
                    let q = h[r][j] / h[r][c];
                    add_col(&mut h, j, c, -q);
                    add_col(&mut u, j, c, -q);
                    if h[r][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                c += 1;
                break;
            }
        }
    }
    (c..n).map(|j| u.iter().map(|row| row[j]).collect()).collect()
}

fn swap_cols(m: &mut IMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn add_col(m: &mut IMat, dst: usize, src: usize, k: i128) {
    for row in m.iter_mut() {
        row[dst] += k * row[src];
    }
}

/// Characteristic polynomial `det(xI - a)`, coefficients from the constant term up.
pub fn charpoly(a: &IMat) -> Vec<i128> {
    let n = a.len();
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let tr: i128 = (0..n).map(|i| am[i][i]).sum();
        debug_assert_eq!(tr % k as i128, 0);
        coeffs[n - k] = -tr / k as i128;
    }
    coeffs
}

pub fn eval_poly(coeffs: &[i128], x: i128) -> i128 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
}
