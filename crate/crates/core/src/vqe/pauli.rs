//! Pauli strings in symplectic form.
//!
//! A string is stored as two masks `(x, z)`; qubit `k` carries
//! `I, X, Z, Y` for `(x_k, z_k) = (0,0), (1,0), (0,1), (1,1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

/// `i^k` for `k mod 4`.
pub(crate) fn i_pow<T: Real>(k: u32) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn x(q: usize) -> Self {
        Self { x: 1 << q, z: 0 }
    }

    pub fn y(q: usize) -> Self {
        Self {
            x: 1 << q,
            z: 1 << q,
        }
    }

    pub fn z(q: usize) -> Self {
        Self { x: 0, z: 1 << q }
    }

    /// `Z` on every qubit below `q`.
    pub fn z_chain(q: usize) -> Self {
        Self {
            x: 0,
            z: (1u64 << q) - 1,
        }
    }

    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// `self · other = i^k · result`, returning `(k mod 4, result)`.
    pub fn multiply(self, other: Self) -> (u32, Self) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        (k % 4, Self { x, z })
    }

    /// `P|b⟩ = phase · |b'⟩`.
    #[inline]
    pub fn apply<T: Real>(self, b: u64) -> (u64, Complex<T>) {
        let k = (self.x & self.z).count_ones() + 2 * (b & self.z).count_ones();
        (b ^ self.x, i_pow(k))
    }

    pub fn symbol(self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in 0..64 {
            let s = self.symbol(q);
            if s != 'I' {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{s}{q}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A complex linear combination of Pauli strings, merged by string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum<T> {
    pub(crate) terms: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Real> Default for PauliSum<T> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<T: Real> PauliSum<T> {
    pub fn single(p: PauliString, c: Complex<T>) -> Self {
        let mut s = Self::default();
        s.add(p, c);
        s
    }

    pub fn add(&mut self, p: PauliString, c: Complex<T>) {
        let slot = self
            .terms
            .entry(p)
            .or_insert_with(|| Complex::new(T::zero(), T::zero()));
        *slot = *slot + c;
    }

    pub fn add_scaled(&mut self, other: &Self, scale: Complex<T>) {
        for (&p, &c) in &other.terms {
            self.add(p, c * scale);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&p, &a) in &self.terms {
            for (&q, &b) in &other.terms {
                let (k, r) = p.multiply(q);
                out.add(r, a * b * i_pow(k));
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, Complex<T>)> + '_ {
        self.terms.iter().map(|(&p, &c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm<T> {
    pub coefficient: T,
    pub string: PauliString,
}

/// Real-weighted Pauli sum over `n_qubits`, one term per distinct string,
/// sorted by string.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian<T> {
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm<T>>,
}

impl<T: Real> QubitHamiltonian<T> {
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm<T>>) -> Self {
        let mut merged: BTreeMap<PauliString, T> = BTreeMap::new();
        for t in terms {
            let slot = merged.entry(t.string).or_insert_with(T::zero);
            *slot = *slot + t.coefficient;
        }
        Self {
            n_qubits,
            terms: merged
                .into_iter()
                .map(|(string, coefficient)| PauliTerm {
                    coefficient,
                    string,
                })
                .collect(),
        }
    }

    pub fn constant(&self) -> T {
        self.terms
            .iter()
            .find(|t| t.string.is_identity())
            .map_or_else(T::zero, |t| t.coefficient)
    }

    pub fn coefficient(&self, string: PauliString) -> T {
        self.terms
            .binary_search_by(|t| t.string.cmp(&string))
            .map_or_else(|_| T::zero(), |i| self.terms[i].coefficient)
    }
}
