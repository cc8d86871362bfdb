//! Exact arithmetic over `F_p` and small dense linear algebra.
//!
//! Residues are stored as canonical least nonnegative representatives, so
//! equality and hashing are plain value comparisons. All arithmetic is exact;
//! there are no tolerances anywhere in this crate.

use crate::{Error, Result};

/// Modular addition of canonical residues.
#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// Modular subtraction of canonical residues.
#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Modular product; intermediate in u128 so any `p < 2^63` is safe.
#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse mod a prime via Fermat; the caller guarantees `a != 0 mod p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic trial-division primality test (moduli here are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n > 2 && is_prime(n)
}

/// One residue of `F_p` in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn new(value: i64, p: u64) -> Self {
        let v = value.rem_euclid(p as i64) as u64;
        FieldElement { value: v, modulus: p }
    }

    pub fn from_residue(value: u64, p: u64) -> Self {
        FieldElement { value: value % p, modulus: p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        FieldElement { value: add_mod(self.value, other.value, self.modulus), modulus: self.modulus }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        FieldElement { value: sub_mod(self.value, other.value, self.modulus), modulus: self.modulus }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        FieldElement { value: mul_mod(self.value, other.value, self.modulus), modulus: self.modulus }
    }

    pub fn neg(&self) -> Self {
        FieldElement { value: sub_mod(0, self.value, self.modulus), modulus: self.modulus }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::SingularMatrix { p: self.modulus });
        }
        Ok(FieldElement { value: inv_mod(self.value, self.modulus), modulus: self.modulus })
    }
}

/// The two distinct roots of `x^2 + x + 2` over `F_p`, in ascending residue
/// order, or `None` when no two distinct roots exist. Brute-force scan of all
/// residues; the moduli in scope are small enough that this is the most
/// transparent correct method.
pub fn quadratic_roots_x2_x_2(p: u64) -> Result<Option<(FieldElement, FieldElement)>> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let mut roots = Vec::new();
    for x in 0..p {
        let v = add_mod(add_mod(mul_mod(x, x, p), x, p), 2 % p, p);
        if v == 0 {
            roots.push(x);
        }
    }
    match roots.as_slice() {
        [a, b] => {
            // sanity: Vieta for x^2 + x + 2
            debug_assert_eq!(add_mod(*a, *b, p), p - 1);
            debug_assert_eq!(mul_mod(*a, *b, p), 2 % p);
            Ok(Some((FieldElement::from_residue(*a, p), FieldElement::from_residue(*b, p))))
        }
        _ => Ok(None),
    }
}

/// An odd prime is admissible when it does not divide `168 = 2^3·3·7` and
/// `x^2 + x + 2` has two distinct roots mod p. The root criterion is asserted
/// to agree with the congruence criterion `p ≡ 1, 2, 4 (mod 7)`.
pub fn admissible_prime(p: u64) -> bool {
    if !is_odd_prime(p) || 168 % p == 0 {
        return false;
    }
    let has_roots = quadratic_roots_x2_x_2(p)
        .expect("p is an odd prime here")
        .is_some();
    let congruence = matches!(p % 7, 1 | 2 | 4);
    assert_eq!(
        has_roots, congruence,
        "root criterion and congruence criterion disagree at p = {p}"
    );
    has_roots
}

/// Column vector over `F_p` with canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    p: u64,
    entries: Vec<u64>,
}

impl FieldVector {
    pub fn zero(n: usize, p: u64) -> Self {
        FieldVector { p, entries: vec![0; n] }
    }

    pub fn from_residues(entries: Vec<u64>, p: u64) -> Self {
        FieldVector { p, entries: entries.into_iter().map(|e| e % p).collect() }
    }

    pub fn basis(i: usize, n: usize, p: u64) -> Self {
        let mut v = Self::zero(n, p);
        v.entries[i] = 1 % p;
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn residues(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement::from_residue(self.entries[i], self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, self.p))
            .collect();
        FieldVector { p: self.p, entries }
    }

    pub fn neg(&self) -> Self {
        FieldVector {
            p: self.p,
            entries: self.entries.iter().map(|&a| sub_mod(0, a, self.p)).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        FieldVector {
            p: self.p,
            entries: self.entries.iter().map(|&a| mul_mod(a, c, self.p)).collect(),
        }
    }
}

/// Square matrix over `F_p`, row-major canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldMatrix {
    p: u64,
    n: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zero(n, p);
        for i in 0..n {
            m.entries[i * n + i] = 1 % p;
        }
        m
    }

    pub fn zero(n: usize, p: u64) -> Self {
        FieldMatrix { p, n, entries: vec![0; n * n] }
    }

    /// Row-major construction from signed integer entries.
    pub fn from_rows(rows: &[&[i64]], p: u64) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            for &e in *row {
                entries.push(e.rem_euclid(p as i64) as u64);
            }
        }
        FieldMatrix { p, n, entries }
    }

    pub fn from_residues(entries: Vec<u64>, n: usize, p: u64) -> Self {
        assert_eq!(entries.len(), n * n);
        FieldMatrix { p, n, entries: entries.into_iter().map(|e| e % p).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn residues(&self) -> &[u64] {
        &self.entries
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.n + j] = value % self.p;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.p)
    }

    /// Scalar matrices are the center of `GL_n`.
    pub fn is_scalar(&self) -> bool {
        let c = self.entries[0];
        for i in 0..self.n {
            for j in 0..self.n {
                let want = if i == j { c } else { 0 };
                if self.at(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn scalar(c: u64, n: usize, p: u64) -> Self {
        let mut m = Self::zero(n, p);
        for i in 0..n {
            m.entries[i * n + i] = c % p;
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        debug_assert_eq!(self.n, other.n);
        let (n, p) = (self.n, self.p);
        let mut entries = vec![0u64; n * n];
        if p < (1 << 28) && n <= 64 {
            // squares plus a dimension of headroom stay inside u64
            for i in 0..n {
                for j in 0..n {
                    let mut acc: u64 = 0;
                    for k in 0..n {
                        acc += self.entries[i * n + k] * other.entries[k * n + j];
                    }
                    entries[i * n + j] = acc % p;
                }
            }
            return FieldMatrix { p, n, entries };
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * other.entries[k * n + j] as u128;
                }
                entries[i * n + j] = (acc % p as u128) as u64;
            }
        }
        FieldMatrix { p, n, entries }
    }

    pub fn mat_vec(&self, v: &FieldVector) -> FieldVector {
        debug_assert_eq!(self.p, v.p);
        debug_assert_eq!(self.n, v.entries.len());
        let (n, p) = (self.n, self.p);
        let mut entries = vec![0u64; n];
        if p < (1 << 28) && n <= 64 {
            for (i, e) in entries.iter_mut().enumerate() {
                let mut acc: u64 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] * v.entries[k];
                }
                *e = acc % p;
            }
            return FieldVector { p, entries };
        }
        for (i, e) in entries.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc += self.entries[i * n + k] as u128 * v.entries[k] as u128;
            }
            *e = (acc % p as u128) as u64;
        }
        FieldVector { p, entries }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        FieldMatrix { p: self.p, n, entries }
    }

    pub fn scale(&self, c: u64) -> Self {
        FieldMatrix {
            p: self.p,
            n: self.n,
            entries: self.entries.iter().map(|&e| mul_mod(e, c, self.p)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| add_mod(a, b, self.p))
            .collect();
        FieldMatrix { p: self.p, n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| sub_mod(a, b, self.p))
            .collect();
        FieldMatrix { p: self.p, n: self.n, entries }
    }

    pub fn trace(&self) -> FieldElement {
        let mut t = 0u64;
        for i in 0..self.n {
            t = add_mod(t, self.entries[i * self.n + i], self.p);
        }
        FieldElement::from_residue(t, self.p)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.n, self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Gauss–Jordan inverse with exact modular pivot inverses.
    pub fn inverse(&self) -> Result<Self> {
        let (n, p) = (self.n, self.p);
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n, p).entries;
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| a[r * n + col] != 0)
                .ok_or(Error::SingularMatrix { p })?;
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pinv = inv_mod(a[col * n + col], p);
            for j in 0..n {
                a[col * n + j] = mul_mod(a[col * n + j], pinv, p);
                inv[col * n + j] = mul_mod(inv[col * n + j], pinv, p);
            }
            for r in 0..n {
                if r != col && a[r * n + col] != 0 {
                    let f = a[r * n + col];
                    for j in 0..n {
                        a[r * n + j] = sub_mod(a[r * n + j], mul_mod(f, a[col * n + j], p), p);
                        inv[r * n + j] = sub_mod(inv[r * n + j], mul_mod(f, inv[col * n + j], p), p);
                    }
                }
            }
        }
        Ok(FieldMatrix { p, n, entries: inv })
    }

    pub fn det(&self) -> FieldElement {
        let (n, p) = (self.n, self.p);
        let mut a = self.entries.clone();
        let mut det = 1u64;
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| a[r * n + col] != 0) {
                Some(r) => r,
                None => return FieldElement::from_residue(0, p),
            };
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                det = sub_mod(0, det, p);
            }
            det = mul_mod(det, a[col * n + col], p);
            let pinv = inv_mod(a[col * n + col], p);
            for r in col + 1..n {
                if a[r * n + col] != 0 {
                    let f = mul_mod(a[r * n + col], pinv, p);
                    for j in col..n {
                        a[r * n + j] = sub_mod(a[r * n + j], mul_mod(f, a[col * n + j], p), p);
                    }
                }
            }
        }
        FieldElement::from_residue(det, p)
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }
}

/// Rectangular systems for rank and nullspace computation.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl LinearSystem {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        LinearSystem { p, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.entries[i * self.cols + j] = value.rem_euclid(self.p as i64) as u64;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: i64) {
        let v = value.rem_euclid(self.p as i64) as u64;
        let e = &mut self.entries[i * self.cols + j];
        *e = add_mod(*e, v, self.p);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, v: &FieldVector) -> FieldVector {
        debug_assert_eq!(v.len(), self.cols);
        let p = self.p;
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc: u128 = 0;
            for j in 0..self.cols {
                acc += self.entries[i * self.cols + j] as u128 * v.entries[j] as u128;
            }
            out[i] = (acc % p as u128) as u64;
        }
        FieldVector { p, entries: out }
    }

    /// Reduced row echelon form; returns the pivot column list.
    fn rref(&mut self) -> Vec<usize> {
        let (rows, cols, p) = (self.rows, self.cols, self.p);
        let a = &mut self.entries;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    a.swap(r * cols + j, pr * cols + j);
                }
            }
            let pinv = inv_mod(a[r * cols + c], p);
            for j in 0..cols {
                a[r * cols + j] = mul_mod(a[r * cols + j], pinv, p);
            }
            for i in 0..rows {
                if i != r && a[i * cols + c] != 0 {
                    let f = a[i * cols + c];
                    for j in 0..cols {
                        a[i * cols + j] =
                            sub_mod(a[i * cols + j], mul_mod(f, a[r * cols + j], p), p);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// Solve `A·x = b`: a particular solution plus a nullspace basis, or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[u64]) -> Option<(FieldVector, Vec<FieldVector>)> {
        assert_eq!(rhs.len(), self.rows);
        let (rows, cols, p) = (self.rows, self.cols, self.p);
        let mut aug = LinearSystem::zero(rows, cols + 1, p);
        for i in 0..rows {
            for j in 0..cols {
                aug.entries[i * (cols + 1) + j] = self.entries[i * cols + j];
            }
            aug.entries[i * (cols + 1) + cols] = rhs[i] % p;
        }
        let pivots = aug.rref();
        if pivots.contains(&cols) {
            return None; // a pivot in the augmented column
        }
        let mut particular = vec![0u64; cols];
        for (row, &pc) in pivots.iter().enumerate() {
            particular[pc] = aug.entries[row * (cols + 1) + cols];
        }
        let basis = self.nullspace();
        Some((FieldVector { p, entries: particular }, basis))
    }

    /// Basis of the right nullspace, one vector per free column, ordered by
    /// ascending free-column index.
    pub fn nullspace(&self) -> Vec<FieldVector> {
        let mut work = self.clone();
        let pivots = work.rref();
        let (cols, p) = (self.cols, self.p);
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![0u64; cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                // pivot variable = -(coefficient of the free column)
                v[pc] = sub_mod(0, work.entries[row * cols + free], p);
            }
            basis.push(FieldVector { p, entries: v });
        }
        basis
    }
}

/// Stack matrices row-wise into a linear system acting on flattened matrices.
/// Used for spans inside the `n^2`-dimensional matrix space.
pub fn matrix_span_rank(mats: &[FieldMatrix]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let n = mats[0].dim();
    let p = mats[0].modulus();
    let mut sys = LinearSystem::zero(mats.len(), n * n, p);
    for (i, m) in mats.iter().enumerate() {
        for (j, &e) in m.residues().iter().enumerate() {
            sys.entries[i * n * n + j] = e;
        }
    }
    sys.rank()
}
