//! Exact integer linear algebra: Hermite normal form, integer kernels, ranks and
//! determinants. All routines work on row vectors of `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntVec = Vec<BigInt>;

pub fn to_big(rows: &[Vec<i64>]) -> Vec<IntVec> {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[BigInt]) -> BigInt {
    a.iter().map(|x| x * x).sum()
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Row echelon form by unimodular row operations, pivoting only on the first `pivot_cols`
/// columns. Returns the number of pivot rows; pivots are positive and entries above each
/// pivot are reduced into `[0, pivot)`.
fn echelon(rows: &mut [IntVec], pivot_cols: usize) -> usize {
    let m = rows.len();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == m {
            break;
        }
        // fold every row below r into row r with extended gcd steps
        for i in r + 1..m {
            if rows[i][c].is_zero() {
                continue;
            }
            if rows[r][c].is_zero() {
                rows.swap(r, i);
                continue;
            }
            let a = rows[r][c].clone();
            let b = rows[i][c].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let a_g = &a / &g;
            let b_g = &b / &g;
            let len = rows[r].len();
            for j in 0..len {
                let u = rows[r][j].clone();
                let v = rows[i][j].clone();
                rows[r][j] = &x * &u + &y * &v;
                rows[i][j] = &a_g * &v - &b_g * &u;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for v in rows[r].iter_mut() {
                *v = -v.clone();
            }
        }
        let p = rows[r][c].clone();
        for i in 0..r {
            if rows[i][c].is_zero() {
                continue;
            }
            let q = rows[i][c].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let pivot_row = rows[r].clone();
            for (dst, src) in rows[i].iter_mut().zip(&pivot_row) {
                *dst -= &q * src;
            }
        }
        r += 1;
    }
    r
}

/// Hermite normal form of the lattice spanned by `rows` (zero rows dropped).
pub fn hnf(rows: &[IntVec]) -> Vec<IntVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let d = rows[0].len();
    let mut m: Vec<IntVec> = rows.to_vec();
    let rank = echelon(&mut m, d);
    m.truncate(rank);
    m
}

/// A Z-basis (in Hermite form) of `{ y in Z^d : row . y = 0 for every row }`.
pub fn integer_kernel(rows: &[IntVec], d: usize) -> Vec<IntVec> {
    let nonzero: Vec<&IntVec> = rows.iter().filter(|r| !is_zero_vec(r)).collect();
    if nonzero.is_empty() {
        return identity(d);
    }
    let m = nonzero.len();
    // augmented [A^T | I_d]; row ops on it are unimodular column ops on A
    let mut aug: Vec<IntVec> = (0..d)
        .map(|j| {
            let mut row: IntVec = nonzero.iter().map(|r| r[j].clone()).collect();
            row.extend((0..d).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = echelon(&mut aug, m);
    let kernel: Vec<IntVec> = aug[rank..].iter().map(|row| row[m..].to_vec()).collect();
    hnf(&kernel)
}

pub fn identity(d: usize) -> Vec<IntVec> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Rank over Q, by fraction-free elimination.
pub fn rank(rows: &[IntVec]) -> usize {
    let mut basis = EchelonBasis::new();
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}

/// Determinant of a square matrix by Bareiss elimination.
pub fn det(rows: &[IntVec]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<IntVec> = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Determinant of the Gram matrix `B B^T`.
pub fn gram_det(rows: &[IntVec]) -> BigInt {
    let gram: Vec<IntVec> = rows.iter().map(|a| rows.iter().map(|b| dot(a, b)).collect()).collect();
    det(&gram)
}

/// Sum of squares of all maximal minors (squared norm of the wedge of the rows).
pub fn plucker_norm_sq(rows: &[IntVec]) -> BigInt {
    let k = rows.len();
    if k == 0 {
        return BigInt::one();
    }
    let d = rows[0].len();
    let mut total = BigInt::zero();
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let minor: Vec<IntVec> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        let m = det(&minor);
        total += &m * &m;
        // next k-subset of 0..d in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if cols[i] < d - k + i {
                break;
            }
            if i == 0 {
                return total;
            }
        }
        cols[i] += 1;
        for j in i + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Divide a vector by the gcd of its entries.
pub fn primitive(v: &[BigInt]) -> IntVec {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Incremental row-echelon basis over Q with primitive integer rows.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, IntVec)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[BigInt]) -> IntVec {
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let a = row[*p].clone();
            let b = w[*p].clone();
            let g = a.gcd(&b);
            let (fa, fb) = (&a / &g, &b / &g);
            for (x, r) in w.iter_mut().zip(row) {
                *x = &fa * &*x - &fb * r;
            }
            w = primitive(&w);
        }
        w
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        let w = self.reduce(v);
        match w.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

/// Membership of `x` in the lattice spanned by rows already in Hermite form.
pub fn in_lattice(hnf_rows: &[IntVec], x: &[BigInt]) -> bool {
    let mut w = x.to_vec();
    let mut r = 0;
    for c in 0..w.len() {
        let is_pivot = r < hnf_rows.len() && !hnf_rows[r][c].is_zero() && hnf_rows[r][..c].iter().all(|v| v.is_zero());
        if is_pivot {
            let p = &hnf_rows[r][c];
            if !(&w[c] % p).is_zero() {
                return false;
            }
            let q = &w[c] / p;
            for (dst, src) in w.iter_mut().zip(&hnf_rows[r]) {
                *dst -= &q * src;
            }
            r += 1;
        } else if !w[c].is_zero() {
            return false;
        }
    }
    true
}
