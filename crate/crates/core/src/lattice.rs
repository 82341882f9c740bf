//! Integer matrices, Hermite and Smith normal forms, and lattices of
//! exponent vectors.
//!
//! Row conventions throughout: a lattice is the Z-span of matrix rows and
//! the Hermite form is row-style with positive pivots and reduced entries
//! above each pivot.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("rows are linearly dependent (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ragged matrix rows")]
    Ragged,
    #[error("lattice is not full rank in Z^{0}")]
    NotFullRank(usize),
    #[error("moduli must be positive")]
    NonPositiveModulus,
    #[error("lattice is not contained in the reference lattice")]
    NotContained,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows; `cols` is needed to describe a matrix with no rows.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LatticeError> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LatticeError::Ragged);
        }
        let n = rows.len();
        Ok(IntMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Panics on ragged input; meant for literals.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(rows, cols).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_i64()).collect()).collect()
    }

    pub fn to_i32_rows(&self) -> Option<Vec<Vec<i32>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_i32()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != rhs.rows {
            return Err(LatticeError::DimensionMismatch(self.cols, rhs.rows));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.rows {
            return Err(LatticeError::DimensionMismatch(v.len(), self.rows));
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * self.get(i, j);
            }
        }
        Ok(out)
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::DimensionMismatch(self.rows, self.cols));
        }
        Ok(bareiss_det(self))
    }

    /// Number of nonzero rows of the Hermite form.
    pub fn rank(&self) -> usize {
        let (h, _) = hermite_normal_form(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += k * row_b
    fn add_row(&mut self, a: usize, b: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(a, j) + k * self.get(b, j);
            self.set(a, j, v);
        }
    }

    /// col_a += k * col_b
    fn add_col(&mut self, a: usize, b: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, a) + k * self.get(i, b);
            self.set(i, a, v);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j);
            self.set(a, j, v);
        }
    }

    /// (row_a, row_b) <- (x row_a + y row_b, s row_a + t row_b)
    fn combine_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, s: &BigInt, t: &BigInt) {
        for j in 0..self.cols {
            let ra = self.get(a, j).clone();
            let rb = self.get(b, j).clone();
            self.set(a, j, x * &ra + y * &rb);
            self.set(b, j, s * &ra + t * &rb);
        }
    }
}

fn bareiss_det(u: &IntMatrix) -> BigInt {
    let n = u.rows;
    let mut m = u.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                Some(i) => {
                    m.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * prev
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(","))?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `H = U * M`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        for i in r + 1..m.rows {
            if h.get(i, c).is_zero() {
                continue;
            }
            let a = h.get(r, c).clone();
            let b = h.get(i, c).clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let s = -(&b / &g);
            let t = &a / &g;
            h.combine_rows(r, i, &x, &y, &s, &t);
            u.combine_rows(r, i, &x, &y, &s, &t);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h.get(r, c).clone();
        for i in 0..r {
            let q = -h.get(i, c).div_floor(&p);
            if !q.is_zero() {
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U * M * V` diagonal and
/// each diagonal entry dividing the next.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    for t in 0..m.rows.min(m.cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m.rows {
                for j in t..m.cols {
                    let x = s.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return (s, u, v);
            };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let p = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m.rows {
                let q = -s.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    s.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                }
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..m.cols {
                let q = -s.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    s.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                }
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m.rows).find(|&i| (t + 1..m.cols).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Diagonal entries of the Smith form.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (s, _, _) = smith_normal_form(m);
    (0..m.rows.min(m.cols)).map(|i| s.get(i, i).clone()).filter(|x| !x.is_zero()).collect()
}

/// A Z-basis of a lattice: linearly independent rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LatticeBasis {
    m: IntMatrix,
}

impl LatticeBasis {
    pub fn new(m: IntMatrix) -> Result<Self, LatticeError> {
        let rank = m.rank();
        if rank < m.rows {
            return Err(LatticeError::RankDeficient { rank, rows: m.rows });
        }
        Ok(LatticeBasis { m })
    }

    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, LatticeError> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn standard(n: usize) -> Self {
        LatticeBasis { m: IntMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.m.rows
    }

    pub fn dim(&self) -> usize {
        self.m.cols
    }

    pub fn is_full_rank(&self) -> bool {
        self.m.rows == self.m.cols
    }

    /// Canonical basis of the same lattice.
    pub fn hnf(&self) -> LatticeBasis {
        let (h, _) = hermite_normal_form(&self.m);
        LatticeBasis { m: h }
    }

    /// Index in Z^k of a full-rank lattice.
    pub fn index(&self) -> Result<BigInt, LatticeError> {
        if !self.is_full_rank() {
            return Err(LatticeError::NotFullRank(self.dim()));
        }
        Ok(self.m.det()?.abs())
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        solve_in_lattice(self, v).is_some()
    }

    pub fn contains_lattice(&self, other: &LatticeBasis) -> bool {
        other.dim() == self.dim() && (0..other.rank()).all(|i| self.contains(other.m.row(i)))
    }
}

impl fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.m.fmt(f)
    }
}

/// Integer coefficients `c` with `sum c_i B_i = target`, if they exist.
pub fn solve_in_lattice(b: &LatticeBasis, target: &[BigInt]) -> Option<Vec<BigInt>> {
    if target.len() != b.dim() {
        return None;
    }
    let (h, u) = hermite_normal_form(&b.m);
    let mut residual = target.to_vec();
    let mut y = vec![BigInt::zero(); b.rank()];
    let mut col = 0;
    for (i, yi) in y.iter_mut().enumerate() {
        while col < h.cols && h.get(i, col).is_zero() {
            if !residual[col].is_zero() {
                return None;
            }
            col += 1;
        }
        if col == h.cols {
            break;
        }
        let p = h.get(i, col);
        let (q, r) = residual[col].div_rem(p);
        if !r.is_zero() {
            return None;
        }
        for (j, res) in residual.iter_mut().enumerate().skip(col) {
            *res -= &q * h.get(i, j);
        }
        *yi = q;
        col += 1;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    u.left_mul_vec(&y).ok()
}

pub fn solve_in_lattice_i64(b: &LatticeBasis, target: &[i64]) -> Option<Vec<i64>> {
    let t: Vec<BigInt> = target.iter().map(|&x| BigInt::from(x)).collect();
    solve_in_lattice(b, &t).and_then(|c| c.iter().map(|x| x.to_i64()).collect())
}

/// Basis of `{a in Z^N : W a = 0 mod orders}`, rows of `W` taken modulo
/// the matching entry of `orders`.
pub fn congruence_kernel(w: &IntMatrix, orders: &[u64]) -> Result<LatticeBasis, LatticeError> {
    let (k, n) = (w.rows(), w.cols());
    if orders.len() != k {
        return Err(LatticeError::DimensionMismatch(orders.len(), k));
    }
    if orders.contains(&0) {
        return Err(LatticeError::NonPositiveModulus);
    }
    let mut stacked = IntMatrix::zeros(n + k, k + n);
    for j in 0..n {
        for i in 0..k {
            stacked.set(j, i, w.get(i, j).clone());
        }
        stacked.set(j, k + j, BigInt::one());
    }
    for (i, &o) in orders.iter().enumerate() {
        stacked.set(n + i, i, BigInt::from(o));
    }
    let (h, _) = hermite_normal_form(&stacked);
    let rows: Vec<Vec<BigInt>> = (0..h.rows())
        .map(|i| h.row(i))
        .filter(|r| r[..k].iter().all(Zero::is_zero) && r[k..].iter().any(|x| !x.is_zero()))
        .map(|r| r[k..].to_vec())
        .collect();
    let kernel = IntMatrix::from_rows(rows, n)?;
    Ok(LatticeBasis::new(kernel)?.hnf())
}

/// True iff the two bases span the same lattice.
pub fn spans_same_lattice(a: &LatticeBasis, b: &LatticeBasis) -> Result<bool, LatticeError> {
    if a.dim() != b.dim() {
        return Err(LatticeError::DimensionMismatch(a.dim(), b.dim()));
    }
    for l in [a, b] {
        if !l.is_full_rank() {
            return Err(LatticeError::RankDeficient { rank: l.rank(), rows: l.dim() });
        }
    }
    Ok(a.hnf() == b.hnf())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(hermite_normal_form(&id), (id.clone(), id.clone()));
        let d = IntMatrix::from_i64(&[[2, 0], [0, 3]]);
        assert_eq!(hermite_normal_form(&d), (d.clone(), IntMatrix::identity(2)));
        let m = IntMatrix::from_i64(&[[1, 1], [-1, 2]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, IntMatrix::from_i64(&[[1, 1], [0, 3]]));
        assert_eq!(u.mul(&m).unwrap(), h);
    }

    #[test]
    fn snf_examples() {
        let s = |rows: &[&[i64]]| smith_normal_form(&IntMatrix::from_i64(rows)).0;
        assert_eq!(s(&[&[1, 2]]), IntMatrix::from_i64(&[[1, 0]]));
        assert_eq!(s(&[&[3]]), IntMatrix::from_i64(&[[3]]));
        assert_eq!(s(&[&[2, 4], &[6, 8]]), IntMatrix::from_i64(&[[2, 0], [0, 4]]));
    }

    #[test]
    fn solve_examples() {
        let b = LatticeBasis::from_i64(&[[1, 1], [-1, 2]]).unwrap();
        assert_eq!(solve_in_lattice_i64(&b, &[3, 0]), Some(vec![2, -1]));
        let b = LatticeBasis::from_i64(&[[0, 1, 0, 1], [0, 0, 0, 3]]).unwrap();
        assert_eq!(solve_in_lattice_i64(&b, &[0, 3, 0, 0]), Some(vec![3, -1]));
        assert_eq!(solve_in_lattice_i64(&b, &[1, 0, 0, 0]), None);
        let id = LatticeBasis::standard(3);
        assert_eq!(solve_in_lattice_i64(&id, &[4, -2, 7]), Some(vec![4, -2, 7]));
    }

    #[test]
    fn congruence_kernel_examples() {
        let l = congruence_kernel(&IntMatrix::from_i64(&[[1, 2, 0, 0]]), &[3]).unwrap();
        assert_eq!(l.index().unwrap(), BigInt::from(3));
        assert!(l.contains(&big(&[1, 1, 0, 0])));
        assert!(!l.contains(&big(&[1, 0, 0, 0])));

        let w = IntMatrix::from_i64(&[[1, 0, 2, 0], [0, 1, 2, 2]]);
        let l = congruence_kernel(&w, &[3, 3]).unwrap();
        assert_eq!(l.index().unwrap(), BigInt::from(9));
        let expected = LatticeBasis::from_i64(&[[1, 0, 1, -1], [0, 1, 0, 1], [0, 0, 3, 0], [0, 0, 0, 3]]).unwrap();
        assert_eq!(expected.index().unwrap(), BigInt::from(9));
        assert!(spans_same_lattice(&l, &expected).unwrap());

        let l = congruence_kernel(&IntMatrix::from_i64(&[[0, 0, 0]]), &[1]).unwrap();
        assert_eq!(l, LatticeBasis::standard(3));
    }

    #[test]
    fn same_lattice_examples() {
        let a = LatticeBasis::from_i64(&[[1, 1], [-1, 2]]).unwrap();
        let b = LatticeBasis::from_i64(&[[1, 1], [0, 3]]).unwrap();
        assert!(spans_same_lattice(&a, &b).unwrap());
        let c = LatticeBasis::from_i64(&[[2, 0], [0, 1]]).unwrap();
        assert!(!spans_same_lattice(&LatticeBasis::standard(2), &c).unwrap());
        assert!(spans_same_lattice(&a, &a).unwrap());
        let thin = LatticeBasis::from_i64(&[[1, 0]]).unwrap();
        assert!(spans_same_lattice(&a, &thin).is_err());
        assert!(LatticeBasis::from_i64(&[[1, 2], [2, 4]]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(IntMatrix::from_i64(&[[0, 1], [1, 0]]).det().unwrap(), BigInt::from(-1));
        assert_eq!(IntMatrix::from_i64(&[[2, 1], [1, 3]]).det().unwrap(), BigInt::from(5));
        assert_eq!(IntMatrix::from_i64(&[[1, 2], [2, 4]]).det().unwrap(), BigInt::zero());
    }
}
