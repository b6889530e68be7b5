//! Dense matrices over the rationals, and a small prime-field kernel used by
//! the brute-force module search.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-2"` or `"3/4"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols, "value count does not match shape");
        QMatrix {
            rows,
            cols,
            data: values.iter().map(|&v| rat(v)).collect(),
        }
    }

    /// A 1x1 matrix.
    pub fn scalar(x: Rational) -> Self {
        QMatrix {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rational) {
        self.data[r * self.cols + c] = x;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &QMatrix) -> QMatrix {
        QMatrix::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |r, c| match (r < self.rows, c < self.cols) {
                (true, true) => self.get(r, c).clone(),
                (false, false) => other.get(r - self.rows, c - self.cols).clone(),
                _ => Rational::zero(),
            },
        )
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self.get(row, col).recip();
            for c in col..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || self.get(r, col).is_zero() {
                    continue;
                }
                let factor = self.get(r, col).clone();
                for c in col..self.cols {
                    let v = self.get(r, c) - &factor * self.get(row, c);
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in (col + 1)..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col) / &pivot;
                for c in col..n {
                    let v = m.get(r, c) - &factor * m.get(col, c);
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(QMatrix::zeros(0, 0));
        }
        let mut aug = QMatrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else if c - n == r {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(QMatrix::from_fn(n, n, |r, c| aug.get(r, n + c).clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && (self.rows == 0 || !self.determinant().is_zero())
    }

    /// Entries as strings, row-major; used for canonical ordering.
    pub fn encode(&self) -> String {
        let parts: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        format!("{}x{}[{}]", self.rows, self.cols, parts.join(","))
    }

    /// Entries as strings, one `Vec` per row.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_string()).collect())
            .collect()
    }

    pub fn max_abs_entry(&self) -> Rational {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        out.data[r * rhs.cols + c] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;

    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in matrix sum");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;

    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in matrix difference");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Row-major matrices over the prime field `GF(p)` with small `p`.
pub mod modp {
    #[derive(Debug, Clone, Copy)]
    pub struct Field {
        pub p: u32,
    }

    impl Field {
        pub fn new(p: u32) -> Self {
            assert!(p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)), "{p} is not prime");
            Field { p }
        }

        pub fn inv(&self, a: u32) -> u32 {
            let (mut r, mut e, mut b) = (1u64, self.p as u64 - 2, a as u64 % self.p as u64);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % self.p as u64;
                }
                b = b * b % self.p as u64;
                e >>= 1;
            }
            r as u32
        }

        /// `a (r x k) * b (k x c)`.
        pub fn mul(&self, a: &[u32], b: &[u32], r: usize, k: usize, c: usize, out: &mut Vec<u32>) {
            out.clear();
            out.resize(r * c, 0);
            for i in 0..r {
                for j in 0..c {
                    let mut acc = 0u32;
                    for t in 0..k {
                        acc = (acc + a[i * k + t] * b[t * c + j]) % self.p;
                    }
                    out[i * c + j] = acc;
                }
            }
        }

        /// Rank of a `rows x cols` matrix; destroys `m`.
        pub fn rank(&self, m: &mut [u32], rows: usize, cols: usize) -> usize {
            let p = self.p;
            let mut rank = 0;
            for col in 0..cols {
                if rank == rows {
                    break;
                }
                let Some(piv) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                    continue;
                };
                for c in 0..cols {
                    m.swap(piv * cols + c, rank * cols + c);
                }
                let inv = self.inv(m[rank * cols + col]);
                for c in col..cols {
                    m[rank * cols + c] = m[rank * cols + c] * inv % p;
                }
                for r in 0..rows {
                    let f = m[r * cols + col];
                    if r != rank && f != 0 {
                        for c in col..cols {
                            m[r * cols + c] = (m[r * cols + c] + (p - f) * m[rank * cols + c]) % p;
                        }
                    }
                }
                rank += 1;
            }
            rank
        }

        /// Symmetric lift of a residue to `(-p/2, p/2]`.
        pub fn lift(&self, a: u32) -> i64 {
            let a = a as i64;
            let p = self.p as i64;
            if a > p / 2 {
                a - p
            } else {
                a
            }
        }
    }
}
