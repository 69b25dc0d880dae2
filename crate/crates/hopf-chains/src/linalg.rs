//! Dense exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{big, lcm_of_denominators, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * self.get(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// `self - c I`.
    pub fn shift(&self, c: &Rational) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i) - c;
            m.set(i, i, v);
        }
        m
    }

    pub fn pow(&self, t: usize) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..t {
            acc = acc.mul(self);
        }
        acc
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = lcm_of_denominators(row);
                row.iter().map(|a| (a * big(l.clone())).to_integer()).collect()
            })
            .collect()
    }

    /// Reduced echelon form with integer rows: each pivot column is zero
    /// outside its pivot row. Returns rows and pivot columns.
    fn integer_echelon(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a = self.integer_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == a.len() {
                break;
            }
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let piv = a[r][c].clone();
            for i in 0..a.len() {
                if i == r || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                let (head, tail) = if i < r { a.split_at_mut(r) } else { a.split_at_mut(i) };
                let (row_i, row_r) = if i < r { (&mut head[i], &tail[0]) } else { (&mut tail[0], &head[r]) };
                for (x, y) in row_i.iter_mut().zip(row_r.iter()) {
                    *x = &*x * &piv - &f * y;
                }
                reduce_content(row_i);
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.integer_echelon().1.len()
    }

    /// A basis of the right kernel `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (a, pivots) = self.integer_echelon();
        let mut free = vec![true; self.cols];
        for &p in &pivots {
            free[p] = false;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| free[c]) {
            let mut x = vec![Rational::zero(); self.cols];
            x[f] = Rational::one();
            for (row, &p) in a.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    x[p] = -Rational::new(row[f].clone(), row[p].clone());
                }
            }
            basis.push(x);
        }
        basis
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let mut scale = Rational::one();
        let mut a = self.integer_rows();
        for i in 0..n {
            let l = lcm_of_denominators(self.row(i));
            scale /= big(l);
        }
        let mut sign = 1;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Rational::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        big(a[n - 1][n - 1].clone()) * scale * Rational::from_integer(sign.into())
    }

    /// Characteristic polynomial `det(x I - A)`, coefficients from `x^0` upward.
    pub fn charpoly(&self) -> Vec<Rational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut h = self.clone();
        // similarity reduction to upper Hessenberg form
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for j in 0..n {
                    h.data.swap(j * n + i, j * n + m);
                }
            }
            let t = h.get(m, m - 1).clone();
            for i in m + 1..n {
                let u = h.get(i, m - 1) / &t;
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h.get(i, j) - &u * h.get(m, j);
                    h.set(i, j, v);
                }
                for j in 0..n {
                    let v = h.get(j, m) + &u * h.get(j, i);
                    h.set(j, m, v);
                }
            }
        }
        let mut p: Vec<Vec<Rational>> = vec![vec![Rational::one()]];
        for m in 1..=n {
            let hmm = h.get(m - 1, m - 1);
            let mut pm = poly_mul_linear(&p[m - 1], hmm);
            let mut t = Rational::one();
            for i in (1..m).rev() {
                t *= h.get(i, i - 1);
                let c = h.get(i - 1, m - 1) * &t;
                if !c.is_zero() {
                    for (k, a) in p[i - 1].iter().enumerate() {
                        pm[k] -= &c * a;
                    }
                }
            }
            p.push(pm);
        }
        p.pop().expect("nonempty")
    }
}

fn reduce_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g > BigInt::one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// `(x - c) p(x)`.
fn poly_mul_linear(p: &[Rational], c: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.len() + 1];
    for (k, a) in p.iter().enumerate() {
        out[k + 1] += a;
        out[k] -= c * a;
    }
    out
}

pub fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
}

/// How many times `(x - root)` divides `p`.
pub fn root_multiplicity(p: &[Rational], root: &Rational) -> usize {
    let mut q = p.to_vec();
    let mut m = 0;
    while q.len() > 1 {
        // synthetic division
        let d = q.len() - 1;
        let mut quot = vec![Rational::zero(); d];
        let mut carry = Rational::zero();
        for k in (0..=d).rev() {
            let v = &q[k] + &carry * root;
            if k == 0 {
                if !v.is_zero() {
                    return m;
                }
            } else {
                quot[k - 1] = v.clone();
            }
            carry = v;
        }
        q = quot;
        m += 1;
    }
    m
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn is_nonnegative_vec(v: &[Rational]) -> bool {
    v.iter().all(|a| !a.is_negative())
}
