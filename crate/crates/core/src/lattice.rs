//! Integer lattices, integer matrices and the Smith normal form.
//!
//! Everything here is exact. Matrices act on column vectors of coordinates,
//! so a [`LatticeMap`] from a rank-`n` lattice to a rank-`m` lattice is an
//! `m × n` matrix.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("map is not surjective (elementary divisors {divisors:?})")]
    NotSurjective { divisors: Vec<i64> },
    #[error("generator {index} does not commute with the map")]
    IncompatibleAction { index: usize },
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: i128 },
}

/// A dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from its rows. An empty slice gives a `0 × 0` matrix.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LatticeError::Ragged);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds an `rows × columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LatticeError::DimensionMismatch {
                    expected: format!("column of length {rows}"),
                    found: format!("length {}", c.len()),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
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

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The rows with the given indices, in order.
    pub fn select_rows(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<Vec<i64>> = indices.into_iter().map(|i| self.row(i).to_vec()).collect();
        let cols = self.cols;
        let mut m = Self::from_rows(&rows).expect("rows of one matrix have equal length");
        m.cols = cols;
        m
    }

    /// The columns with the given indices, in order.
    pub fn select_columns(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let cols: Vec<Vec<i64>> = indices.into_iter().map(|j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols).expect("columns of one matrix have equal length")
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows) && self.is_square()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> i128 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
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

    /// Inverse of a unimodular matrix, computed through its Smith form.
    pub fn inverse_unimodular(&self) -> Result<Self, LatticeError> {
        let det = self.determinant();
        if det.abs() != 1 {
            return Err(LatticeError::NotUnimodular { det });
        }
        // U A V = D with D = diag(±1) here, so A⁻¹ = V D U.
        let snf = smith_normal_form(self);
        Ok(&(&snf.v * &snf.d) * &snf.u)
    }

    /// Greatest common divisor of all entries (0 for the zero matrix).
    pub fn content(&self) -> i64 {
        self.data.iter().fold(0, |g, &x| gcd(g, x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: i64) {
        for j in 0..self.cols {
            let s = self[(source, j)];
            self[(target, j)] += factor * s;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: i64) {
        for i in 0..self.rows {
            let s = self[(i, source)];
            self[(i, target)] += factor * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Result of [`smith_normal_form`]: `u · m · v = d`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The nonzero elementary divisors, in order (each divides the next).
    pub fn divisors(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)])
            .take_while(|&x| x != 0)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

/// Smith normal form by integer row and column reduction, always pivoting on
/// the smallest nonzero entry. `u` and `v` are unimodular and the diagonal
/// of `d` is nonnegative with `d[i] | d[i+1]`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a[(i, j)].abs();
                if x != 0 && best.map_or(true, |(bi, bj)| x < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let p = a[(t, t)];
            for i in t + 1..rows {
                let q = a[(i, t)] / p;
                if q != 0 {
                    a.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
            }
            for j in t + 1..cols {
                let q = a[(t, j)] / p;
                if q != 0 {
                    a.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                }
            }
            // remainders smaller than the pivot become the new pivot
            let mut smaller: Option<(usize, usize)> = None;
            for i in t + 1..rows {
                if a[(i, t)] != 0 && smaller.map_or(true, |(si, sj)| a[(i, t)].abs() < a[(si, sj)].abs()) {
                    smaller = Some((i, t));
                }
            }
            for j in t + 1..cols {
                if a[(t, j)] != 0 && smaller.map_or(true, |(si, sj)| a[(t, j)].abs() < a[(si, sj)].abs()) {
                    smaller = Some((t, j));
                }
            }
            if let Some((si, sj)) = smaller {
                if sj == t {
                    a.swap_rows(t, si);
                    u.swap_rows(t, si);
                } else {
                    a.swap_cols(t, sj);
                    v.swap_cols(t, sj);
                }
                continue;
            }
            // divisibility of the trailing block by the pivot
            let p = a[(t, t)];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[(i, j)] % p != 0));
            match bad {
                Some(i) => {
                    a.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d: a, v }
}

/// One integer solution of `a · x = b`, or `None` if there is none over Z.
pub fn solve_integer_system(a: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    assert_eq!(a.rows, b.len(), "right-hand side length does not match");
    let snf = smith_normal_form(a);
    let c = snf.u.apply(b);
    let divisors = snf.divisors();
    let mut y = vec![0i64; a.cols];
    for (i, &ci) in c.iter().enumerate() {
        match divisors.get(i) {
            Some(&d) => {
                if ci % d != 0 {
                    return None;
                }
                y[i] = ci / d;
            }
            None if ci != 0 => return None,
            None => {}
        }
    }
    Some(snf.v.apply(&y))
}

/// A basis of the integer kernel of `a`, as the columns of the result.
/// The kernel lattice is saturated, so this is a basis over Z.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.select_columns(r..a.cols)
}

/// A left inverse `l` (with `l · b = 1`) of a matrix whose columns span a
/// saturated sublattice, i.e. all elementary divisors equal 1.
pub fn left_inverse(b: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let snf = smith_normal_form(b);
    let divisors = snf.divisors();
    if divisors.len() != b.cols || divisors.iter().any(|&d| d != 1) {
        return Err(LatticeError::NotSurjective { divisors });
    }
    // u b v = [1; 0]  =>  (v [1 0] u) b = 1
    let head = snf.u.select_rows(0..b.cols);
    Ok(&snf.v * &head)
}

/// A named free abelian group of finite rank with labelled basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub name: String,
    pub basis_labels: Vec<String>,
}

impl Lattice {
    pub fn new(name: impl Into<String>, basis_labels: Vec<String>) -> Self {
        Lattice { name: name.into(), basis_labels }
    }

    /// A lattice whose basis is labelled `prefix1, prefix2, …`.
    pub fn with_prefix(name: impl Into<String>, prefix: &str, rank: usize) -> Self {
        Self::new(name, (1..=rank).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }
}

/// A homomorphism of lattices given by its matrix in the chosen bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMap {
    pub source: Arc<Lattice>,
    pub target: Arc<Lattice>,
    pub matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(source: Arc<Lattice>, target: Arc<Lattice>, matrix: IntMatrix) -> Result<Self, LatticeError> {
        if matrix.rows != target.rank() || matrix.cols != source.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: format!("{} x {}", target.rank(), source.rank()),
                found: format!("{} x {}", matrix.rows, matrix.cols),
            });
        }
        Ok(LatticeMap { source, target, matrix })
    }

    pub fn identity(lattice: Arc<Lattice>) -> Self {
        let n = lattice.rank();
        LatticeMap { source: lattice.clone(), target: lattice, matrix: IntMatrix::identity(n) }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.apply(v)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LatticeMap) -> Result<LatticeMap, LatticeError> {
        if inner.target != self.source {
            return Err(LatticeError::DimensionMismatch {
                expected: self.source.name.clone(),
                found: inner.target.name.clone(),
            });
        }
        Ok(LatticeMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn is_surjective(&self) -> bool {
        let snf = smith_normal_form(&self.matrix);
        let d = snf.divisors();
        d.len() == self.matrix.rows && d.iter().all(|&x| x == 1)
    }
}

/// A group element acting compatibly on the source and target of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAction {
    pub on_source: IntMatrix,
    pub on_target: IntMatrix,
}

/// A section `s` of a surjection `q`, i.e. `q ∘ s = 1`.
///
/// The section is read off the Smith form of `q`, so it is deterministic.
pub fn split_surjection(q: &LatticeMap) -> Result<LatticeMap, LatticeError> {
    let snf = smith_normal_form(&q.matrix);
    let divisors = snf.divisors();
    let m = q.matrix.rows;
    if divisors.len() != m || divisors.iter().any(|&d| d != 1) {
        return Err(LatticeError::NotSurjective { divisors });
    }
    // q = u⁻¹ [1 0] v⁻¹, so s = v [1; 0] u.
    let head = snf.v.select_columns(0..m);
    let s = &head * &snf.u;
    Ok(LatticeMap { source: q.target.clone(), target: q.source.clone(), matrix: s })
}

/// For a surjection `q` and an automorphism `g` of its source that preserves
/// `ker q`, the unique `h` with `q g = h q`.
pub fn induced_action(q: &LatticeMap, g: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let s = split_surjection(q)?;
    let h = &(&q.matrix * g) * &s.matrix;
    if &q.matrix * g != &h * &q.matrix {
        return Err(LatticeError::IncompatibleAction { index: 0 });
    }
    Ok(h)
}

/// A section `s` of `q` commuting with every action, if one exists.
///
/// The entries of `s` are the unknowns of an integer linear system
/// (`q s = 1` and `g s = s h` for every action `(g, h)`), which is decided
/// exactly through the Smith form.
pub fn equivariant_section(q: &LatticeMap, actions: &[LatticeAction]) -> Result<Option<LatticeMap>, LatticeError> {
    let (m, n) = (q.matrix.rows, q.matrix.cols);
    for (index, act) in actions.iter().enumerate() {
        if act.on_source.rows != n || !act.on_source.is_square() || act.on_target.rows != m || !act.on_target.is_square() {
            return Err(LatticeError::IncompatibleAction { index });
        }
        if &q.matrix * &act.on_source != &act.on_target * &q.matrix {
            return Err(LatticeError::IncompatibleAction { index });
        }
    }
    // fail early with NotSurjective
    split_surjection(q)?;

    // unknown s[i][j] sits at position i * m + j
    let unknowns = n * m;
    let var = |i: usize, j: usize| i * m + j;
    let mut equations: Vec<Vec<i64>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    // (q s)[a][b] = δ_ab
    for a in 0..m {
        for b in 0..m {
            let mut row = vec![0; unknowns];
            for i in 0..n {
                row[var(i, b)] += q.matrix[(a, i)];
            }
            equations.push(row);
            rhs.push(i64::from(a == b));
        }
    }
    // (g s − s h)[a][b] = 0
    for act in actions {
        for a in 0..n {
            for b in 0..m {
                let mut row = vec![0; unknowns];
                for i in 0..n {
                    row[var(i, b)] += act.on_source[(a, i)];
                }
                for k in 0..m {
                    row[var(a, k)] -= act.on_target[(k, b)];
                }
                equations.push(row);
                rhs.push(0);
            }
        }
    }
    let system = IntMatrix::from_rows(&equations)?;
    let system = if equations.is_empty() { IntMatrix::zeros(0, unknowns) } else { system };
    Ok(solve_integer_system(&system, &rhs).map(|x| {
        let mut s = IntMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                s[(i, j)] = x[var(i, j)];
            }
        }
        LatticeMap { source: q.target.clone(), target: q.source.clone(), matrix: s }
    }))
}

pub fn equivariant_section_exists(q: &LatticeMap, actions: &[LatticeAction]) -> Result<bool, LatticeError> {
    Ok(equivariant_section(q, actions)?.is_some())
}
