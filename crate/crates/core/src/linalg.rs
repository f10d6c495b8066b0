//! Dense exact linear algebra over any [`Field`].

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Field;

/// Largest dimension accepted by the total positivity tests, which
/// enumerate every minor.
pub const MAX_TNN_DIM: usize = 8;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        self.select_columns(&(0..k).collect::<Vec<_>>())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Concatenates matrices with equal row counts side by side.
    pub fn hstack(blocks: &[&Matrix<T>]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let columns: Vec<Vec<T>> = blocks.iter().flat_map(|b| b.columns()).collect();
        Self::from_columns(rows, &columns)
    }

    pub fn mul(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    acc.plus(&a.times(b))
                }
            })
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, k| acc.plus(&self.get(i, k).times(&v[k])))
            })
            .collect()
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|x| x.times(k))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination with full pivoting.
    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = T::one();
        for k in 0..n {
            let Some((pi, pj)) = m.cheapest_pivot(k, k) else {
                return Ok(T::zero());
            };
            if pi != k {
                m.swap_rows(pi, k);
                negate = !negate;
            }
            if pj != k {
                m.swap_cols(pj, k);
                negate = !negate;
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                let lead = m.get(i, k).clone();
                for j in k + 1..n {
                    let mut v = m.get(i, j).times(&pivot);
                    if !lead.is_zero() {
                        v = v.minus(&lead.times(m.get(k, j)));
                    }
                    let v = v.divide(&prev).expect("Bareiss divisor is a nonzero pivot");
                    m.set(i, j, v);
                }
                m.set(i, k, T::zero());
            }
            prev = pivot;
        }
        let det = m.get(n - 1, n - 1).clone();
        Ok(if negate { det.negate() } else { det })
    }

    fn cheapest_pivot(&self, r0: usize, c0: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in r0..self.rows {
            for j in c0..self.cols {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let w = x.weight();
                if best.is_none_or(|(_, _, bw)| w < bw) {
                    best = Some((i, j, w));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).weight());
            let Some(p) = best else { continue };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inverse().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..self.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).minus(&f.times(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns spanning the null space `{x : Mx = 0}`; zero columns when the
    /// matrix has full column rank.
    pub fn kernel_basis(&self) -> Matrix<T> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let columns: Vec<Vec<T>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(row, f).negate();
                }
                v
            })
            .collect();
        Matrix::from_columns(self.cols, &columns)
    }

    /// Rows spanning the covectors that vanish on every column, i.e. the
    /// annihilator of the column span.
    pub fn annihilator(&self) -> Matrix<T> {
        if self.cols == 0 {
            return Matrix::identity(self.rows);
        }
        self.transpose().kernel_basis().transpose()
    }

    /// For `d x (d-1)` input, the covector `u_i = (-1)^i det(M without row i)`,
    /// which vanishes on every column. It is zero iff the columns are
    /// dependent. Polynomial entries give a polynomial result.
    pub fn complementary_covector(&self) -> Result<Vec<T>> {
        if self.cols + 1 != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "complement of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let all: Vec<usize> = (0..self.cols).collect();
        (0..self.rows)
            .map(|i| {
                let rest: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
                let minor = self.submatrix(&rest, &all).determinant()?;
                Ok(if i % 2 == 0 { minor } else { minor.negate() })
            })
            .collect()
    }

    /// Each column multiplied by the positive factor that clears its
    /// denominators, with those factors.
    pub fn clear_column_denominators(&self) -> (Matrix<T>, Vec<T>) {
        let (cols, scales): (Vec<Vec<T>>, Vec<T>) =
            self.columns().iter().map(|c| clear_denominators(c)).unzip();
        (Matrix::from_columns(self.rows, &cols), scales)
    }

    /// The unique solution of `Mx = b`.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = Matrix::hstack(&[self, &Matrix::from_columns(self.rows, &[b.to_vec()])]);
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        if pivots.len() < self.cols {
            return Err(Error::Singular);
        }
        Ok((0..self.cols).map(|i| r.get(i, self.cols).clone()).collect())
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        let (c, x) = self.scaled_inverse()?;
        Ok(x.map(|v| v.divide(&c).expect("scale is nonzero")))
    }

    /// `(c, c A^{-1})` for a nonzero `c`, by fraction-free Gauss-Jordan
    /// elimination. Every intermediate entry is a minor of `[A | I]`, so
    /// over polynomial entries no fractions appear.
    pub fn scaled_inverse(&self) -> Result<(T, Matrix<T>)> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m = Matrix::hstack(&[self, &Matrix::identity(n)]);
        let mut prev = T::one();
        for k in 0..n {
            let pivot_row = (k..n)
                .filter(|&i| !m.get(i, k).is_zero())
                .min_by_key(|&i| m.get(i, k).weight())
                .ok_or(Error::Singular)?;
            m.swap_rows(pivot_row, k);
            let pivot = m.get(k, k).clone();
            for i in (0..n).filter(|&i| i != k) {
                let lead = m.get(i, k).clone();
                for j in (0..2 * n).filter(|&j| j != k) {
                    let mut v = m.get(i, j).times(&pivot);
                    if !lead.is_zero() {
                        v = v.minus(&lead.times(m.get(k, j)));
                    }
                    let v = v.divide(&prev).expect("divisor is a nonzero pivot");
                    m.set(i, j, v);
                }
                m.set(i, k, T::zero());
            }
            prev = pivot;
        }
        Ok((prev, Matrix::from_fn(n, n, |i, j| m.get(i, n + j).clone())))
    }

    /// Calls `f(rows, cols, minor)` for every `k x k` minor.
    pub fn for_each_minor(&self, k: usize, mut f: impl FnMut(&[usize], &[usize], T) -> bool) {
        let row_sets = combinations(self.rows, k);
        let col_sets = combinations(self.cols, k);
        for rs in &row_sets {
            for cs in &col_sets {
                let det = self
                    .submatrix(rs, cs)
                    .determinant()
                    .expect("minors are square");
                if !f(rs, cs, det) {
                    return;
                }
            }
        }
    }

    /// Number of minors of all sizes, `sum_k C(rows,k) C(cols,k)`.
    pub fn minor_count(&self) -> usize {
        (1..=self.rows.min(self.cols))
            .map(|k| binomial(self.rows, k) * binomial(self.cols, k))
            .sum()
    }

    fn all_minors(&self, accept: impl Fn(Ordering) -> bool) -> Result<bool> {
        if self.rows.max(self.cols) > MAX_TNN_DIM {
            return Err(Error::Precondition(format!(
                "total positivity test limited to dimension {MAX_TNN_DIM}"
            )));
        }
        // Positive row scalings preserve every minor's sign, so clear
        // denominators first and keep the determinants polynomial.
        let rows: Vec<Vec<T>> = (0..self.rows).map(|i| clear_denominators(&self.row(i)).0).collect();
        let scaled = Matrix::from_rows(rows)?;
        let mut ok = true;
        for k in 1..=self.rows.min(self.cols) {
            scaled.for_each_minor(k, |_, _, m| {
                ok = accept(m.sign());
                ok
            });
            if !ok {
                break;
            }
        }
        Ok(ok)
    }

    /// Every minor is `>= 0`. Exponential in the dimension.
    pub fn is_totally_nonnegative(&self) -> Result<bool> {
        self.all_minors(|s| s != Ordering::Less)
    }

    /// Every minor is `> 0`. Exponential in the dimension.
    pub fn is_totally_positive(&self) -> Result<bool> {
        self.all_minors(|s| s == Ordering::Greater)
    }
}

/// `(q v, q)` for a positive `q` that clears the denominators of `v`.
pub fn clear_denominators<T: Field>(v: &[T]) -> (Vec<T>, T) {
    let mut dens: Vec<T> = Vec::new();
    for x in v {
        let q = x.positive_denominator();
        if !q.is_one() && !dens.contains(&q) {
            dens.push(q);
        }
    }
    let scale = dens.iter().fold(T::one(), |acc, q| acc.times(q));
    (v.iter().map(|x| x.times(&scale)).collect(), scale)
}

/// All increasing `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Field + Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Field + Deserialize<'de>> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<T>::deserialize(deserializer)?;
        Matrix::new(repr.rows, repr.cols, repr.entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::valfield::ValuedScalar;

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn cofactor_det<T: Field>(m: &Matrix<T>) -> T {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = T::zero();
        for j in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = cofactor_det(&m.submatrix(&(1..n).collect::<Vec<_>>(), &rest));
            let term = m.get(0, j).times(&minor);
            acc = if j % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
        }
        acc
    }

    #[test]
    fn determinant_small() {
        assert_eq!(
            Matrix::<Rational>::identity(4).determinant().unwrap(),
            Rational::one()
        );
        assert_eq!(
            q(&[&[3, 5], &[7, 11]]).determinant().unwrap(),
            Rational::from_int(3 * 11 - 5 * 7)
        );
        assert!(q(&[&[1, 2, 3]]).determinant().is_err());
        assert_eq!(
            q(&[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]]).determinant().unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn determinant_matches_cofactor_over_valued_field() {
        let t = ValuedScalar::t();
        let c = |n: i64| ValuedScalar::from_int(n);
        let m = Matrix::from_fn(5, 5, |i, j| {
            let base = c((i * 7 + j * 3) as i64 % 5 - 2);
            let tp = t.pow(((i + 2 * j) % 3) as u32);
            &base + &(&tp * &c((i as i64) - (j as i64)))
        });
        assert_eq!(m.determinant().unwrap(), cofactor_det(&m));
    }

    #[test]
    fn scaled_inverse_stays_polynomial() {
        let t = ValuedScalar::t();
        let c = |n: i64| ValuedScalar::from_int(n);
        let m = Matrix::from_fn(4, 4, |i, j| {
            &c(((i * 5 + j * 2) % 7) as i64 - 3) + &(&t.pow(((i * j + i) % 3) as u32) * &c(i as i64 - j as i64 + 1))
        });
        let (k, x) = m.scaled_inverse().unwrap();
        assert!(x.entries().iter().all(|v| v.is_polynomial()));
        assert_eq!(m.mul(&x), Matrix::identity(4).scale(&k));
        let det = m.determinant().unwrap();
        assert!(k == det || k == det.negate());
    }

    #[test]
    fn rank_kernel_solve() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).entries().iter().all(|x| x.is_zero()));
        assert_eq!(
            m.solve(&[Rational::one(), Rational::one(), Rational::one()]),
            Err(Error::Inconsistent)
        );
        let a = q(&[&[2, 1], &[1, 3], &[1, 1]]);
        let x = a
            .solve(&[Rational::from_int(5), Rational::from_int(10), Rational::from_int(4)])
            .unwrap();
        assert_eq!(x, vec![Rational::from_int(1), Rational::from_int(3)]);
        assert_eq!(q(&[&[1, 1], &[1, 1]]).inverse(), Err(Error::Singular));
        let b = q(&[&[2, 1], &[7, 4]]);
        assert_eq!(b.mul(&b.inverse().unwrap()), Matrix::identity(2));
    }

    #[test]
    fn total_positivity_examples() {
        let x = 2;
        let m = q(&[&[1, 1, 1], &[0, 1, 1 + x], &[0, 0, x]]);
        assert!(m.is_totally_nonnegative().unwrap());
        let t = ValuedScalar::t();
        let one = ValuedScalar::one();
        let zero = ValuedScalar::zero();
        let g = Matrix::from_rows(vec![
            vec![one.clone(), one.clone(), t],
            vec![zero.clone(), one.clone(), one.clone()],
            vec![zero.clone(), zero, one],
        ])
        .unwrap();
        assert!(!g.is_totally_nonnegative().unwrap());
        let id = Matrix::<Rational>::identity(3);
        assert!(id.is_totally_nonnegative().unwrap());
        assert!(!id.is_totally_positive().unwrap());
        assert!(Matrix::<Rational>::identity(9).is_totally_nonnegative().is_err());
    }

    #[test]
    fn minor_count_matches_enumeration() {
        let m = q(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 1, 2, 3]]);
        let mut n = 0;
        for k in 1..=3 {
            m.for_each_minor(k, |_, _, _| {
                n += 1;
                true
            });
        }
        assert_eq!(n, m.minor_count());
        assert_eq!(n, 3 * 4 + 3 * 6 + 4);
    }
}
