//! Dense integer matrices with Smith and Hermite normal forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl Serialize for IntegerMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.data.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl IntegerMatrix {
    /// `cols` is needed for matrices without rows.
    pub fn new(cols: usize, data: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(r) = data.iter().find(|r| r.len() != cols) {
            return Err(Error::Arity { expected: cols, got: r.len() });
        }
        Ok(IntegerMatrix {
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn data(&self) -> &[Vec<BigInt>] {
        &self.data
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::Arity {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                if self.data[i][t].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][t] * &other.data[t][j];
                }
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Invalid("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in &mut self.data {
            r.swap(a, b);
        }
    }

    /// `row[dst] -= q * row[src]`
    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        let src_row = self.data[src].clone();
        for (x, y) in self.data[dst].iter_mut().zip(&src_row) {
            *x -= q * y;
        }
    }

    /// `col[dst] -= q * col[src]`
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in &mut self.data {
            let y = r[src].clone();
            r[dst] -= q * y;
        }
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal with `d_1 | d_2 | ..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfDecomposition {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.data[i][i].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Re-checks the product, unimodularity, diagonal shape and divisibility.
    pub fn verify(&self, m: &IntegerMatrix) -> bool {
        let prod = self.u.mul(m).and_then(|x| x.mul(&self.v));
        if prod.as_ref() != Ok(&self.d) {
            return false;
        }
        let unit = |x: &IntegerMatrix| x.determinant().map(|d| d.abs().is_one()).unwrap_or(false);
        if !unit(&self.u) || !unit(&self.v) {
            return false;
        }
        for i in 0..self.d.rows {
            for j in 0..self.d.cols {
                if i != j && !self.d.data[i][j].is_zero() {
                    return false;
                }
            }
        }
        let diag: Vec<BigInt> = (0..self.d.rows.min(self.d.cols)).map(|i| self.d.data[i][i].clone()).collect();
        if diag.iter().any(|x| x.is_negative()) {
            return false;
        }
        diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        })
    }
}

/// Smith normal form, pivoting on the smallest nonzero entry.
pub fn smith_normal_form(m: &IntegerMatrix) -> SnfDecomposition {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(r);
    let mut v = IntegerMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &a.data[i][j];
                    if !x.is_zero() && pivot.map_or(true, |(pi, pj)| x.abs() < a.data[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(a, u, v);
            };
            a.data.swap(t, pi);
            u.data.swap(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if a.data[i][t].is_zero() {
                    continue;
                }
                let q = a.data[i][t].div_floor(&a.data[t][t]);
                a.sub_row(i, t, &q);
                u.sub_row(i, t, &q);
                clean &= a.data[i][t].is_zero();
            }
            for j in t + 1..c {
                if a.data[t][j].is_zero() {
                    continue;
                }
                let q = a.data[t][j].div_floor(&a.data[t][t]);
                a.sub_col(j, t, &q);
                v.sub_col(j, t, &q);
                clean &= a.data[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let p = a.data[t][t].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(&a.data[i][j] % &p).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    a.sub_row(t, i, &minus_one);
                    u.sub_row(t, i, &minus_one);
                }
                None => break,
            }
        }
        if a.data[t][t].is_negative() {
            for x in a.data[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u.data[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    finish(a, u, v)
}

fn finish(d: IntegerMatrix, u: IntegerMatrix, v: IntegerMatrix) -> SnfDecomposition {
    SnfDecomposition { d, u, v }
}

/// Row-style Hermite normal form of the row lattice: echelon rows with positive pivots
/// and entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(m: &IntegerMatrix) -> IntegerMatrix {
    let mut a = m.data.clone();
    let cols = m.cols;
    let mut top = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if top >= a.len() {
            break;
        }
        // gcd elimination in this column among rows top..
        loop {
            let mut best: Option<usize> = None;
            for i in top..a.len() {
                if !a[i][col].is_zero() && best.map_or(true, |b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(top, b);
            let mut done = true;
            for i in top + 1..a.len() {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[top][col]);
                let src = a[top].clone();
                for (x, y) in a[i].iter_mut().zip(&src) {
                    *x -= &q * y;
                }
                done &= a[i][col].is_zero();
            }
            if done {
                break;
            }
        }
        if a[top][col].is_zero() {
            continue;
        }
        if a[top][col].is_negative() {
            for x in a[top].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..top {
            let q = a[i][col].div_floor(&a[top][col]);
            if q.is_zero() {
                continue;
            }
            let src = a[top].clone();
            for (x, y) in a[i].iter_mut().zip(&src) {
                *x -= &q * y;
            }
        }
        pivots.push(col);
        top += 1;
    }
    a.truncate(top);
    IntegerMatrix {
        rows: top,
        cols,
        data: a,
    }
}

/// Whether `v` lies in the row lattice of `basis`.
pub fn lattice_membership(basis: &IntegerMatrix, v: &[BigInt]) -> Result<bool> {
    if v.len() != basis.cols {
        return Err(Error::Arity {
            expected: basis.cols,
            got: v.len(),
        });
    }
    Ok(HermiteSolver::new(basis).contains(v))
}

/// Reusable membership test against one lattice.
pub(crate) struct HermiteSolver {
    h: IntegerMatrix,
}

impl HermiteSolver {
    pub(crate) fn new(basis: &IntegerMatrix) -> Self {
        HermiteSolver {
            h: hermite_normal_form(basis),
        }
    }

    pub(crate) fn contains(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        for row in &self.h.data {
            let p = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            // entries left of this pivot must already be cleared
            if w[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, rem) = w[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return false;
            }
            for (x, y) in w.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        w.iter().all(Zero::is_zero)
    }
}
