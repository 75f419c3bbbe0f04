//! Dense integer matrices, Smith normal form and lattice membership.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::IntegerScalar;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntegerScalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        Self { rows: n, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column has wrong length");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a[(i, j)].clone() * a[(k, k)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone())
                        / prev.clone();
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
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

    /// `row[target] += q · row[source]`
    fn add_row_multiple(&mut self, target: usize, source: usize, q: &T) {
        for j in 0..self.cols {
            let v = self[(target, j)].clone() + q.clone() * self[(source, j)].clone();
            self[(target, j)] = v;
        }
    }

    /// `col[target] += q · col[source]`
    fn add_col_multiple(&mut self, target: usize, source: usize, q: &T) {
        for i in 0..self.rows {
            let v = self[(i, target)].clone() + q.clone() * self[(i, source)].clone();
            self[(i, target)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

/// Result of a Smith reduction `u · m · v = d`.
#[derive(Clone)]
pub struct SmithForm<T> {
    /// Unimodular row transform.
    pub u: Matrix<T>,
    /// Unimodular column transform.
    pub v: Matrix<T>,
    /// Diagonal matrix with `d₁ | d₂ | …` and nonnegative entries.
    pub d: Matrix<T>,
}

impl<T: IntegerScalar> SmithForm<T> {
    /// Diagonal entries `d₁, …, d_min(r,c)`, zeros included at the end.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero invariant factors.
    pub fn invariant_factors(&self) -> Vec<T> {
        self.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivoting picks the entry of least absolute value, clears its row and
/// column by Euclidean steps, and folds in any remaining entry the pivot does
/// not divide, which yields the divisibility chain on the diagonal.
pub fn smith_normal_form<T: IntegerScalar>(m: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !d[(i, t)].is_zero() {
                    let q = -(d[(i, t)].div_floor(&d[(t, t)]));
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d[(t, j)].is_zero() {
                    let q = -(d[(t, j)].div_floor(&d[(t, t)]));
                    d.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let (pi, pj) = smallest_in_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => {
                    let one = T::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { u, v, d }
}

fn smallest_nonzero<T: IntegerScalar>(d: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => d[(i, j)].abs() < d[(bi, bj)].abs(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross<T: IntegerScalar>(d: &Matrix<T>, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let consider = |i: usize, j: usize, best: &mut (usize, usize)| {
        let x = &d[(i, j)];
        if !x.is_zero() && (d[*best].is_zero() || x.abs() < d[*best].abs()) {
            *best = (i, j);
        }
    };
    for i in t..d.rows() {
        consider(i, t, &mut best);
    }
    for j in t..d.cols() {
        consider(t, j, &mut best);
    }
    best
}

/// Solves `m · x = b` over the integers, if a solution exists.
pub fn solve_integer<T: IntegerScalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(m.rows(), b.len(), "right-hand side has wrong length");
    let snf = smith_normal_form(m);
    solve_with(&snf, b)
}

/// Solves `m · x = b` using a precomputed Smith form of `m`.
pub fn solve_with<T: IntegerScalar>(snf: &SmithForm<T>, b: &[T]) -> Option<Vec<T>> {
    let c = snf.u.mul_vec(b);
    let cols = snf.v.rows();
    let diag = snf.diagonal();
    let mut y = vec![T::zero(); cols];
    for (i, ci) in c.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(T::zero);
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            if !ci.is_multiple_of(&di) {
                return None;
            }
            y[i] = ci.clone() / di;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// A basis of the integer kernel `{x : m·x = 0}`, as vectors.
pub fn integer_kernel<T: IntegerScalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    (r..m.cols()).map(|j| snf.v.column(j)).collect()
}

/// True when `b` lies in the lattice spanned by the columns of `m`.
pub fn in_column_span<T: IntegerScalar>(m: &Matrix<T>, b: &[T]) -> bool {
    solve_integer(m, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn check_snf(m: &Matrix<Int>) -> SmithForm<Int> {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d, "transforms do not reproduce the diagonal");
        assert_eq!(s.u.determinant().abs(), 1);
        assert_eq!(s.v.determinant().abs(), 1);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(w[0] >= 0);
            if w[0] == 0 {
                assert_eq!(w[1], 0);
            } else {
                assert_eq!(w[1] % w[0], 0, "divisibility chain broken: {diag:?}");
            }
        }
        s
    }

    fn gcd_of_entries(m: &Matrix<Int>) -> Int {
        m.to_rows().into_iter().flatten().fold(0, |g, x| g.gcd(&x))
    }

    #[test]
    fn column_vector_gives_gcd() {
        for n in -6..=6 {
            for k in -6..=6 {
                let m = Matrix::from_rows(vec![vec![n], vec![k]], 1);
                let s = check_snf(&m);
                let expected = gcd_of_entries(&m);
                let got = s.diagonal()[0];
                assert_eq!(got, expected, "({n},{k})");
            }
        }
    }

    #[test]
    fn identity_and_diagonal_examples() {
        let s = check_snf(&Matrix::<Int>::identity(4));
        assert_eq!(s.invariant_factors(), vec![1, 1, 1, 1]);
        let s = check_snf(&Matrix::from_rows(vec![vec![2, 0], vec![0, 3]], 2));
        assert_eq!(s.invariant_factors(), vec![1, 6]);
        let s = check_snf(&Matrix::<Int>::zeros(0, 0));
        assert!(s.invariant_factors().is_empty());
        let s = check_snf(&Matrix::<Int>::zeros(2, 3));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn bareiss_determinant() {
        let m = Matrix::from_rows(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]], 3);
        assert_eq!(m.determinant(), 4);
        let m = Matrix::from_rows(vec![vec![0, 1], vec![1, 0]], 2);
        assert_eq!(m.determinant(), -1);
    }

    #[test]
    fn solve_and_kernel() {
        let m = Matrix::from_rows(vec![vec![2, 4], vec![0, 6]], 2);
        assert!(in_column_span(&m, &[2, 0]));
        assert!(!in_column_span(&m, &[1, 0]));
        assert!(in_column_span(&m, &[4, 6]));
        assert!(!in_column_span(&m, &[0, 3]));
        let k = integer_kernel(&Matrix::from_rows(vec![vec![1, 2, 3]], 3));
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v[0] + 2 * v[1] + 3 * v[2], 0);
        }
    }

    /// Determinantal divisors: the product d₁⋯dₖ equals the gcd of all
    /// k×k minors. Checked for k = 1, 2 on small matrices.
    fn minors_gcd(m: &Matrix<Int>, k: usize) -> Int {
        let rows: Vec<usize> = (0..m.rows()).collect();
        let cols: Vec<usize> = (0..m.cols()).collect();
        let mut g = 0;
        for rs in subsets(&rows, k) {
            for cs in subsets(&cols, k) {
                let sub = Matrix::from_rows(
                    rs.iter().map(|&i| cs.iter().map(|&j| m[(i, j)]).collect()).collect(),
                    k,
                );
                g = g.gcd(&sub.determinant());
            }
        }
        g
    }

    fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (idx, &x) in items.iter().enumerate() {
            for mut rest in subsets(&items[idx + 1..], k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn snf_properties(rows in 0usize..5, cols in 0usize..5,
                          entries in prop::collection::vec(-9i64..=9, 25)) {
            let m = Matrix::from_rows(
                (0..rows).map(|i| (0..cols).map(|j| entries[i * 5 + j]).collect()).collect(),
                cols,
            );
            let s = check_snf(&m);
            let diag = s.diagonal();
            let mut prod = 1;
            for k in 1..=rows.min(cols).min(3) {
                prod *= diag[k - 1];
                prop_assert_eq!(prod, minors_gcd(&m, k));
            }
        }

        #[test]
        fn solve_recovers_images(entries in prop::collection::vec(-6i64..=6, 12),
                                 x in prop::collection::vec(-5i64..=5, 4)) {
            let m = Matrix::from_rows(
                (0..3).map(|i| (0..4).map(|j| entries[i * 4 + j]).collect()).collect(), 4);
            let b = m.mul_vec(&x);
            let sol = solve_integer(&m, &b).expect("image vector must be solvable");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }
    }
}
