//! Pauli products in symplectic `(x, z)` encoding.
//!
//! Bit `k` of `x`/`z` refers to qubit `k`. The string `(x, z)` denotes
//! `i^{|x∧z|} X^x Z^z`, so a position with both bits set is exactly `Y`
//! and no phase is hidden in the encoding. In text form the leftmost
//! character is qubit 0.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard limit imposed by the 64-bit encoding.
pub const MAX_QUBITS: usize = 64;

/// Default absolute threshold below which coefficients are dropped.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

/// `i^k` for `k` taken mod 4.
#[inline]
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn single(qubit: usize, op: char) -> Self {
        let bit = 1u64 << qubit;
        match op {
            'X' => Self::new(bit, 0),
            'Y' => Self::new(bit, bit),
            'Z' => Self::new(0, bit),
            _ => Self::IDENTITY,
        }
    }

    pub fn z_string(mask: u64) -> Self {
        Self::new(0, mask)
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity positions.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    #[inline]
    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `self · other = phase · result`.
    #[inline]
    pub fn mul(&self, other: &PauliString) -> (C64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        (i_pow(k), PauliString { x, z })
    }

    pub fn char_at(&self, k: usize) -> char {
        match ((self.x >> k) & 1, (self.z >> k) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|k| self.char_at(k)).collect()
    }

    /// Lexicographic order of the text labels (qubit 0 most significant).
    pub fn cmp_label(&self, other: &PauliString, n_qubits: usize) -> Ordering {
        for k in 0..n_qubits {
            let o = self.char_at(k).cmp(&other.char_at(k));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    pub fn parse(label: &str) -> Result<Self> {
        if label.len() > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "Pauli string longer than {MAX_QUBITS} qubits"
            )));
        }
        let mut s = Self::IDENTITY;
        for (k, c) in label.chars().enumerate() {
            let bit = 1u64 << k;
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => s.x |= bit,
                'Y' => {
                    s.x |= bit;
                    s.z |= bit
                }
                'Z' => s.z |= bit,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "bad Pauli character `{other}`"
                    )))
                }
            }
        }
        Ok(s)
    }
}

/// A single Pauli product with its coefficient and register size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub n_qubits: usize,
    pub string: PauliString,
    pub coeff: C64,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, string: PauliString, coeff: C64) -> Self {
        Self {
            n_qubits,
            string,
            coeff,
        }
    }

    pub fn parse(label: &str, coeff: f64) -> Result<Self> {
        Ok(Self::new(
            label.len(),
            PauliString::parse(label)?,
            C64::new(coeff, 0.0),
        ))
    }
}

fn same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// True iff the symplectic form of the two strings is even.
pub fn pauli_commutes(a: &PauliTerm, b: &PauliTerm) -> Result<bool> {
    same_size(a.n_qubits, b.n_qubits)?;
    Ok(a.string.commutes(&b.string))
}

/// Product with exact phase bookkeeping.
pub fn pauli_multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    same_size(a.n_qubits, b.n_qubits)?;
    let (phase, s) = a.string.mul(&b.string);
    Ok(PauliTerm::new(a.n_qubits, s, phase * a.coeff * b.coeff))
}

/// `Σ_n c_n P_n` keyed by string; iteration order is the `(x, z)` integer order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    pub n_qubits: usize,
    terms: BTreeMap<PauliString, C64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(
            n_qubits <= MAX_QUBITS,
            "at most {MAX_QUBITS} qubits are supported"
        );
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, c: f64) -> Self {
        let mut s = Self::new(n_qubits);
        s.add_term(PauliString::IDENTITY, C64::new(c, 0.0));
        s
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, C64)>,
    ) -> Self {
        let mut s = Self::new(n_qubits);
        for (p, c) in terms {
            s.add_term(p, c);
        }
        s
    }

    pub fn add_term(&mut self, p: PauliString, c: C64) {
        *self.terms.entry(p).or_insert(C64::new(0.0, 0.0)) += c;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.terms.iter()
    }

    pub fn get(&self, p: &PauliString) -> C64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn identity_coeff(&self) -> C64 {
        self.get(&PauliString::IDENTITY)
    }

    /// Terms other than the identity.
    pub fn non_identity(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.terms.iter().filter(|(p, _)| !p.is_identity())
    }

    pub fn add(&mut self, other: &PauliSum) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        for (p, c) in &other.terms {
            self.add_term(*p, *c);
        }
    }

    pub fn add_scaled(&mut self, other: &PauliSum, s: C64) {
        for (p, c) in &other.terms {
            self.add_term(*p, *c * s);
        }
    }

    pub fn scale(&mut self, s: C64) {
        for c in self.terms.values_mut() {
            *c *= s;
        }
    }

    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits.max(other.n_qubits));
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (ph, s) = a.mul(b);
                out.add_term(s, ph * ca * cb);
            }
        }
        out
    }

    /// `[self, other]`, only anticommuting pairs contribute.
    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits.max(other.n_qubits));
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if !a.commutes(b) {
                    let (ph, s) = a.mul(b);
                    out.add_term(s, ph * ca * cb * 2.0);
                }
            }
        }
        out.prune(PRUNE_TOL);
        out
    }

    /// True iff every term of `self` commutes with every term of `other`.
    pub fn commutes_termwise(&self, other: &PauliSum) -> bool {
        self.terms
            .keys()
            .all(|a| other.terms.keys().all(|b| a.commutes(b)))
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Σ|c| over non-identity terms.
    pub fn l1_norm(&self) -> f64 {
        self.non_identity().map(|(_, c)| c.norm()).sum()
    }

    /// Term count excluding the identity.
    pub fn non_identity_len(&self) -> usize {
        self.non_identity().count()
    }

    /// Lines `coeff label` (real) or `re im label` (complex).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.terms {
            if c.im == 0.0 {
                out.push_str(&format!("{:e} {}\n", c.re, p.label(self.n_qubits)));
            } else {
                out.push_str(&format!(
                    "{:e} {:e} {}\n",
                    c.re,
                    c.im,
                    p.label(self.n_qubits)
                ));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut parsed = Vec::new();
        let mut n = None;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = |m: &str| Error::Malformed {
                line: no + 1,
                msg: m.to_string(),
            };
            let (coeff, label) = match toks.as_slice() {
                [c, l] => (
                    C64::new(c.parse().map_err(|_| bad("bad coefficient"))?, 0.0),
                    *l,
                ),
                [re, im, l] => (
                    C64::new(
                        re.parse().map_err(|_| bad("bad coefficient"))?,
                        im.parse().map_err(|_| bad("bad coefficient"))?,
                    ),
                    *l,
                ),
                _ => return Err(bad("expected `coeff pauli-string`")),
            };
            match n {
                None => n = Some(label.len()),
                Some(k) if k != label.len() => return Err(bad("inconsistent string length")),
                _ => {}
            }
            parsed.push((
                PauliString::parse(label).map_err(|e| bad(&e.to_string()))?,
                coeff,
            ));
        }
        Ok(PauliSum::from_terms(n.unwrap_or(0), parsed))
    }

    pub fn to_json(&self) -> PauliSumJson {
        PauliSumJson {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| PauliTermJson {
                    string: p.label(self.n_qubits),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PauliSumJson) -> Result<PauliSum> {
        let mut s = PauliSum::new(j.n_qubits);
        for t in &j.terms {
            if t.string.len() != j.n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "string `{}` does not have {} qubits",
                    t.string, j.n_qubits
                )));
            }
            s.add_term(PauliString::parse(&t.string)?, C64::new(t.re, t.im));
        }
        Ok(s)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTermJson {
    pub string: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSumJson {
    pub n_qubits: usize,
    pub terms: Vec<PauliTermJson>,
}
