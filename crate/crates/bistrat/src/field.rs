//! Exact dense linear algebra over prime fields GF(p).
//!
//! Every linear map in this crate (restriction, extension, vertical) is a
//! [`FieldMatrix`]: a dense row-major matrix of residues modulo a prime `p`.
//! All arithmetic is exact; invertibility questions reduce to Gaussian
//! elimination over GF(p).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: left is {0}x{1}, right is {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("entry count {found} does not match shape {rows}x{cols}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },
}

/// Trial-division primality check; moduli here are small by design.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A dense matrix over GF(p), stored row-major with entries in `[0, p)`.
///
/// A `rows x cols` matrix represents a linear map from a `cols`-dimensional
/// space to a `rows`-dimensional one (column-vector convention). Zero-row and
/// zero-column matrices are legal and represent maps to or from the zero
/// space; the `0x0` matrix is the identity on the zero space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    /// Builds a matrix from row-major entries, reducing each entry mod `p`.
    /// Negative inputs are mapped to their least nonnegative residue.
    pub fn from_entries(
        p: u64,
        rows: usize,
        cols: usize,
        entries: &[i64],
    ) -> Result<Self, LinAlgError> {
        if !is_prime(p) {
            return Err(LinAlgError::NotPrime(p));
        }
        if entries.len() != rows * cols {
            return Err(LinAlgError::BadEntryCount {
                rows,
                cols,
                found: entries.len(),
            });
        }
        let m = p as i64;
        let entries = entries.iter().map(|&e| (e.rem_euclid(m)) as u64).collect();
        Ok(Self {
            p,
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::BadEntryCount {
                rows: r,
                cols: c,
                found: rows.iter().map(Vec::len).sum(),
            });
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_entries(p, r, c, &flat)
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self, LinAlgError> {
        Self::from_entries(p, rows, cols, &vec![0; rows * cols])
    }

    pub fn identity(p: u64, n: usize) -> Result<Self, LinAlgError> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Exact product `self * rhs` mod p.
    pub fn multiply(&self, rhs: &Self) -> Result<Self, LinAlgError> {
        if self.p != rhs.p {
            return Err(LinAlgError::ModulusMismatch(self.p, rhs.p));
        }
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch(
                self.rows, self.cols, rhs.rows, rhs.cols,
            ));
        }
        let p = u128::from(self.p);
        let mut out = Self::zeros(self.p, self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc = (acc + u128::from(self.get(i, k)) * u128::from(rhs.get(k, j))) % p;
                }
                out.set(i, j, acc as u64);
            }
        }
        Ok(out)
    }

    /// Rank over GF(p) by Gaussian elimination. The pivot in each column is
    /// the first row (lowest index) with a nonzero entry, which keeps the
    /// elimination fully deterministic.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let p = self.p;
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            let Some(r) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if r != pivot_row {
                for j in 0..m.cols {
                    let a = m.get(r, j);
                    let b = m.get(pivot_row, j);
                    m.set(r, j, b);
                    m.set(pivot_row, j, a);
                }
            }
            let inv = mod_inverse(m.get(pivot_row, col), p);
            for j in 0..m.cols {
                let v = mulmod(m.get(pivot_row, j), inv, p);
                m.set(pivot_row, j, v);
            }
            for r2 in 0..m.rows {
                if r2 != pivot_row && m.get(r2, col) != 0 {
                    let factor = m.get(r2, col);
                    for j in 0..m.cols {
                        let v = submod(m.get(r2, j), mulmod(factor, m.get(pivot_row, j), p), p);
                        m.set(r2, j, v);
                    }
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    /// True iff the matrix represents an isomorphism: square with full rank.
    /// Non-square matrices are never isomorphisms; the 0x0 matrix is one.
    pub fn is_isomorphism(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Inverse by Gauss-Jordan elimination on the augmented matrix.
    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotInvertible);
        }
        let n = self.rows;
        let p = self.p;
        let mut m = self.clone();
        let mut inv = Self::identity(p, n)?;
        for col in 0..n {
            let Some(r) = (col..n).find(|&r| m.get(r, col) != 0) else {
                return Err(LinAlgError::NotInvertible);
            };
            if r != col {
                for j in 0..n {
                    let (a, b) = (m.get(r, j), m.get(col, j));
                    m.set(r, j, b);
                    m.set(col, j, a);
                    let (a, b) = (inv.get(r, j), inv.get(col, j));
                    inv.set(r, j, b);
                    inv.set(col, j, a);
                }
            }
            let scale = mod_inverse(m.get(col, col), p);
            for j in 0..n {
                m.set(col, j, mulmod(m.get(col, j), scale, p));
                inv.set(col, j, mulmod(inv.get(col, j), scale, p));
            }
            for r2 in 0..n {
                if r2 != col && m.get(r2, col) != 0 {
                    let factor = m.get(r2, col);
                    for j in 0..n {
                        let v = submod(m.get(r2, j), mulmod(factor, m.get(col, j), p), p);
                        m.set(r2, j, v);
                        let v = submod(inv.get(r2, j), mulmod(factor, inv.get(col, j), p), p);
                        inv.set(r2, j, v);
                    }
                }
            }
        }
        Ok(inv)
    }
}

impl std::fmt::Display for FieldMatrix {
    /// Rendered as nested row lists, e.g. `[[1, 0], [0, 1]]`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

/// Multiplicative inverse mod prime p via Fermat's little theorem.
fn mod_inverse(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}
