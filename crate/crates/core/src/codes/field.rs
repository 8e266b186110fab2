//! Small finite fields GF(p^n) as F_p[x] / (f).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial over F_p, coefficients from the constant term up.
type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic `g`.
fn poly_rem(a: &[u64], g: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let dg = g.len() - 1;
    while a.len() > dg {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dg;
        for (k, &c) in g.iter().enumerate() {
            let t = &mut a[shift + k];
            *t = (*t + p - lead * c % p) % p;
        }
        a = trim(a);
    }
    a
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Monic polynomials of degree `d`, ordered by `(c_{d-1}, ..., c_0)`.
fn monic_of_degree(p: u64, d: usize) -> impl Iterator<Item = Poly> {
    let count = p.pow(d as u32);
    (0..count).map(move |mut code| {
        let mut poly = vec![0; d + 1];
        for c in poly.iter_mut().take(d) {
            *c = code % p;
            code /= p;
        }
        poly[d] = 1;
        poly
    })
}

/// No monic factor of degree between 1 and `deg / 2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    (1..=deg / 2).all(|d| monic_of_degree(p, d).all(|g| !poly_rem(f, &g, p).is_empty()))
}

/// GF(p^n) with a monic irreducible modulus of degree `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: usize,
    /// `n + 1` coefficients, constant term first, leading coefficient 1.
    pub modulus: Vec<u64>,
}

/// Field element: `n` coefficients over F_p, constant term first.
pub type FieldElem = Vec<u64>;

impl FieldSpec {
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameters(format!("{p} is not a prime")));
        }
        if modulus.len() < 2 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameters(
                "modulus must be monic of degree at least 1 with coefficients in [0, p)".into(),
            ));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidParameters(format!(
                "{modulus:?} is reducible over F_{p}"
            )));
        }
        Ok(FieldSpec {
            p,
            n: modulus.len() - 1,
            modulus,
        })
    }

    /// The least monic irreducible of degree `n` in the order of
    /// `(c_{n-1}, ..., c_0)`.
    pub fn least_irreducible(p: u64, n: usize) -> Result<Self> {
        if !is_prime(p) || n == 0 {
            return Err(Error::InvalidParameters(format!(
                "need a prime p and n >= 1, got p={p} n={n}"
            )));
        }
        let f = monic_of_degree(p, n)
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        Ok(FieldSpec { p, n, modulus: f })
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.n as u32)
    }

    pub fn zero(&self) -> FieldElem {
        vec![0; self.n]
    }

    /// `x^e` reduced modulo the field polynomial.
    pub fn x_pow(&self, e: usize) -> FieldElem {
        let mut mono = vec![0; e + 1];
        mono[e] = 1;
        self.pad(poly_rem(&mono, &self.modulus, self.p))
    }

    fn pad(&self, mut a: Poly) -> FieldElem {
        a.resize(self.n, 0);
        a
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> FieldElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> FieldElem {
        let mut prod = vec![0; 2 * self.n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.pad(poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> FieldElem {
        let mut base = a.to_vec();
        let mut acc = self.pad(vec![1]);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^{p^l}`.
    pub fn frobenius(&self, a: &[u64], l: usize) -> FieldElem {
        (0..l).fold(a.to_vec(), |acc, _| self.pow(&acc, self.p))
    }
}
