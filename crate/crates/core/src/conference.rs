//! Symmetric conference matrices from the Paley construction, and the
//! equiangular tight frames they determine.
//!
//! A conference matrix `S` of order `n` has zero diagonal, `±1` off the
//! diagonal and satisfies `SᵀS = (n-1)I`. For a prime `q ≡ 1 (mod 4)` the
//! Paley matrix of order `q + 1` is the circulant of quadratic characters
//! mod `q`, bordered by a row and column of ones (index 0).

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::symmetric_eigen;

/// Entrywise absolute tolerance for spectral frame constructions of order `n`.
pub fn frame_tolerance(n: usize) -> f64 {
    1e-10 * n as f64
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1 % m;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(x/q)` by Euler's criterion `x^((q-1)/2) mod q`.
pub fn legendre_symbol(x: i64, q: u64) -> Result<i8> {
    if q == 2 || !is_prime(q) {
        return Err(invalid(format!("{q} is not an odd prime")));
    }
    let r = x.rem_euclid(q as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    match mod_pow(r, (q - 1) / 2, q) {
        1 => Ok(1),
        v if v == q - 1 => Ok(-1),
        v => Err(Error::Numeric(format!("Euler criterion gave {v} mod {q}"))),
    }
}

/// A symmetric conference matrix stored row-major as `i8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConferenceMatrix {
    n: usize,
    q: Option<u64>,
    entries: Vec<i8>,
}

impl ConferenceMatrix {
    /// Builds a matrix from rows, checking every conference-matrix invariant
    /// (including symmetry and `S·S = (n-1)I`) exactly.
    pub fn from_rows(rows: &[Vec<i8>], q: Option<u64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n % 2 != 0 {
            return Err(invalid(format!("order {n} must be a positive even integer")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Format(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        let m = ConferenceMatrix { n, q, entries };
        if !m.is_symmetric() {
            return Err(invalid("matrix is not symmetric"));
        }
        if !is_conference_dense(n, &m.entries) {
            return Err(invalid("matrix is not a conference matrix"));
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// The prime used by the Paley construction, when known.
    pub fn q(&self) -> Option<u64> {
        self.q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| ((i + 1)..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Re-runs the exact conference check.
    pub fn verify(&self) -> bool {
        is_conference_dense(self.n, &self.entries)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Integer product `S·S`, row-major.
    pub fn square(&self) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let ri = self.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                // S symmetric: column j of S equals row j
                *slot = dot_i8(ri, self.row(j));
            }
        });
        out
    }

    // ---- file formats ----

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            q: Option<u64>,
            entries: Vec<&'a [i8]>,
        }
        let repr = Repr {
            n: self.n,
            q: self.q,
            entries: self.rows().collect(),
        };
        serde_json::to_writer(w, &repr).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read_json<R: std::io::Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            q: Option<u64>,
            entries: Vec<Vec<i8>>,
        }
        let repr: Repr = serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))?;
        if repr.entries.len() != repr.n {
            return Err(Error::Format(format!(
                "header says n={} but found {} rows",
                repr.n,
                repr.entries.len()
            )));
        }
        if let Some(q) = repr.q {
            if q + 1 != repr.n as u64 {
                return Err(Error::Format(format!("q={q} inconsistent with n={}", repr.n)));
            }
        }
        Self::from_rows(&repr.entries, repr.q)
    }

    /// Compact text: one row per line, characters `0`, `+`, `-`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = Vec::with_capacity(self.n + 1);
        for row in self.rows() {
            line.clear();
            line.extend(row.iter().map(|&v| match v {
                1 => b'+',
                -1 => b'-',
                _ => b'0',
            }));
            line.push(b'\n');
            w.write_all(&line).map_err(|e| Error::Format(e.to_string()))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let row = line
                .bytes()
                .map(|b| match b {
                    b'0' => Ok(0),
                    b'+' => Ok(1),
                    b'-' => Ok(-1),
                    other => Err(Error::Format(format!(
                        "line {}: unexpected character {:?}",
                        lineno + 1,
                        other as char
                    ))),
                })
                .collect::<Result<Vec<i8>>>()?;
            rows.push(row);
        }
        let q = (rows.len() as u64).checked_sub(1).filter(|&q| is_prime(q));
        Self::from_rows(&rows, q)
    }
}

#[inline]
fn dot_i8(a: &[i8], b: &[i8]) -> i64 {
    // |partial| <= len < 2^31 for every order we can store, so i32 is exact
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as i32) * (y as i32))
        .sum::<i32>() as i64
}

/// Paley conference matrix of order `q + 1` for a prime `q ≡ 1 (mod 4)`.
pub fn paley_conference(q: u64) -> Result<ConferenceMatrix> {
    if !is_prime(q) {
        return Err(invalid(format!("q = {q} is not prime")));
    }
    if q % 4 != 1 {
        return Err(invalid(format!(
            "q = {q} is not 1 mod 4; the Legendre circulant would not be symmetric"
        )));
    }
    let qs = q as usize;
    let chi: Vec<i8> = (0..q as i64)
        .map(|x| legendre_symbol(x, q))
        .collect::<Result<_>>()?;
    let n = qs + 1;
    let mut entries = vec![0i8; n * n];
    for j in 1..n {
        entries[j] = 1;
        entries[j * n] = 1;
    }
    for a in 0..qs {
        let row = &mut entries[(a + 1) * n + 1..(a + 2) * n];
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = chi[(b + qs - a) % qs];
        }
    }
    Ok(ConferenceMatrix {
        n,
        q: Some(q),
        entries,
    })
}

/// Checks zero diagonal, `±1` off the diagonal and `MᵀM = (n-1)I` exactly.
pub fn is_conference(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let mut dense = Vec::with_capacity(n * n);
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return false;
        }
        for (j, &v) in row.iter().enumerate() {
            let ok = if i == j { v == 0 } else { v == 1 || v == -1 };
            if !ok {
                return false;
            }
            dense.push(v as i8);
        }
    }
    is_conference_dense(n, &dense)
}

/// Exact conference check on a row-major `i8` matrix.
pub fn is_conference_dense(n: usize, entries: &[i8]) -> bool {
    if entries.len() != n * n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let v = entries[i * n + j];
            let ok = if i == j { v == 0 } else { v == 1 || v == -1 };
            if !ok {
                return false;
            }
        }
    }
    // columns contiguous so MᵀM is a table of column dot products
    let mut cols = vec![0i8; n * n];
    for i in 0..n {
        for j in 0..n {
            cols[j * n + i] = entries[i * n + j];
        }
    }
    let target = n as i64 - 1;
    (0..n).into_par_iter().all(|i| {
        let ci = &cols[i * n..(i + 1) * n];
        (i..n).all(|j| {
            let d = dot_i8(ci, &cols[j * n..(j + 1) * n]);
            if i == j {
                d == target
            } else {
                d == 0
            }
        })
    })
}

/// Synthesis operator of the equiangular tight frame whose Gram matrix is
/// `I + S/√(n-1)`: `d = n/2` rows, one unit-norm frame vector per column.
#[derive(Debug, Clone)]
pub struct FrameSynthesis {
    pub d: usize,
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl FrameSynthesis {
    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.transpose() * &self.matrix
    }

    pub fn frame_operator(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }

    /// Entrywise max of `|Gram - (I + S/√(n-1))|`.
    pub fn gram_error(&self, s: &ConferenceMatrix) -> f64 {
        let g = self.gram();
        let c = 1.0 / ((self.n - 1) as f64).sqrt();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { c * s.get(i, j) as f64 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

pub fn etf_synthesis(s: &ConferenceMatrix) -> Result<FrameSynthesis> {
    let n = s.order();
    let d = n / 2;
    let eig = symmetric_eigen(&s.to_f64())?;
    let positive: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    if positive.len() != d {
        return Err(Error::Numeric(format!(
            "expected {d} positive eigenvalues, found {}",
            positive.len()
        )));
    }
    let root2 = std::f64::consts::SQRT_2;
    let matrix = DMatrix::from_fn(d, n, |r, c| root2 * eig.eigenvectors[(c, positive[r])]);
    Ok(FrameSynthesis { d, n, matrix })
}

/// Symmetric square root `F` of `I + S/√n`, so that `FᵀF = I + S/√n`.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

impl GramFactor {
    pub fn target(s: &ConferenceMatrix) -> DMatrix<f64> {
        let n = s.order();
        let c = 1.0 / (n as f64).sqrt();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0
            } else {
                c * s.get(i, j) as f64
            }
        })
    }

    /// Entrywise max of `|FᵀF - (I + S/√n)|`.
    pub fn reconstruction_error(&self, s: &ConferenceMatrix) -> f64 {
        let ftf = self.matrix.transpose() * &self.matrix;
        (ftf - Self::target(s)).amax()
    }
}

pub fn gram_factor(s: &ConferenceMatrix) -> Result<GramFactor> {
    let n = s.order();
    let eig = symmetric_eigen(&s.to_f64())?;
    let inv_root_n = 1.0 / (n as f64).sqrt();
    let roots = DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| (1.0 + l * inv_root_n).max(0.0).sqrt()),
    );
    let v = &eig.eigenvectors;
    let matrix = v * DMatrix::from_diagonal(&roots) * v.transpose();
    Ok(GramFactor { n, matrix })
}
