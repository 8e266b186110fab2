//! Arithmetic in the residue class ring Z_h.
//!
//! Elements are canonical residues in `[0, h)` stored as `u64`; every
//! operation reduces eagerly, so equality and hashing are plain integer
//! comparisons. The ring itself carries the prime-power factorization
//! `h = p_1^{s_1} ... p_t^{s_t}` (primes ascending), computed once by trial
//! division. Products go through `u128`, so any `h < 2^64` is supported.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One prime-power component `p^s` of the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub s: u32,
    /// `p^s`
    pub q: u64,
}

/// The ring Z_h together with its prime-power decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    h: u64,
    components: Vec<PrimePower>,
    /// CRT idempotents: `idempotents[i] = 1 mod q_i`, `0 mod q_j` for `j != i`.
    idempotents: Vec<u64>,
}

/// Canonical factorization `x = unit * prod p_i^{exponents[i]}` of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemFactorization {
    pub unit: u64,
    pub exponents: Vec<u32>,
    pub is_zero: bool,
}

/// The principal ideal `(prod p_i^{exponents[i]})`; every ideal of Z_h has
/// exactly one such label with `0 <= exponents[i] <= s_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealLabel {
    pub exponents: Vec<u32>,
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let eg = (a as i128).extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return None;
    }
    Some(eg.x.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of a nonzero integer.
#[inline]
pub(crate) fn valuation(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn factorize(mut h: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= h {
        if h.is_multiple_of(d) {
            let mut s = 0;
            let mut q = 1;
            while h.is_multiple_of(d) {
                h /= d;
                s += 1;
                q *= d;
            }
            out.push(PrimePower { p: d, s, q });
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if h > 1 {
        out.push(PrimePower { p: h, s: 1, q: h });
    }
    out
}

impl Ring {
    pub fn new(h: u64) -> Result<Self> {
        if h < 2 {
            return Err(Error::InvalidModulus(h));
        }
        let components = factorize(h);
        let idempotents = components
            .iter()
            .map(|c| {
                let rest = h / c.q;
                // rest * (rest^{-1} mod q) is 1 mod q and 0 mod every other q_j
                let inv = inv_mod(rest % c.q, c.q).expect("coprime cofactors");
                mul_mod(rest, inv, h)
            })
            .collect();
        Ok(Ring {
            h,
            components,
            idempotents,
        })
    }

    #[inline]
    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn components(&self) -> &[PrimePower] {
        &self.components
    }

    /// Number of distinct primes `t`.
    pub fn t(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> Result<&PrimePower> {
        self.components.get(i).ok_or(Error::ComponentOutOfRange {
            index: i,
            count: self.components.len(),
        })
    }

    /// The exponent vector `(s_1, ..., s_t)`, i.e. the label of the zero ideal.
    pub fn saturated_exponents(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.s).collect()
    }

    /// The ring Z_{p_i^{s_i}}.
    pub fn prime_power_ring(&self, i: usize) -> Result<Ring> {
        Ring::new(self.component(i)?.q)
    }

    /// `h_i = h / p_i^{s_i}`, the modulus of the coprojection target.
    pub fn coprojection_modulus(&self, i: usize) -> Result<u64> {
        Ok(self.h / self.component(i)?.q)
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.h
    }

    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.h as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.h)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.h)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        sub_mod(0, a, self.h)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.h)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.h)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        x.gcd(&self.h) == 1
    }

    pub fn inverse(&self, x: u64) -> Option<u64> {
        inv_mod(x % self.h, self.h)
    }

    /// `|Z_h^*| = h * prod (1 - 1/p_i)`.
    pub fn unit_count(&self) -> u64 {
        self.components
            .iter()
            .fold(self.h, |acc, c| acc / c.p * (c.p - 1))
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.h).filter(move |&x| self.is_unit(x))
    }

    /// Exponent vector `alpha_i = min(v_{p_i}(x), s_i)` of the canonical lift.
    /// Zero maps to `(s_1, ..., s_t)`.
    pub fn exponents(&self, x: u64) -> Vec<u32> {
        let x = x % self.h;
        self.components
            .iter()
            .map(|c| {
                if x == 0 {
                    c.s
                } else {
                    valuation(x, c.p).min(c.s)
                }
            })
            .collect()
    }

    /// `prod p_i^{alpha_i}` reduced into Z_h.
    pub fn exponent_product(&self, alpha: &[u32]) -> u64 {
        self.components
            .iter()
            .zip(alpha)
            .fold(1 % self.h, |acc, (c, &a)| {
                self.mul(acc, pow_mod(c.p, a as u64, self.h))
            })
    }

    /// Smallest unit `u >= 1` with `u = y (mod modulus)`. `modulus` must divide
    /// `h` and `y` must be a unit modulo `modulus`.
    fn least_unit_congruent(&self, y: u64, modulus: u64) -> u64 {
        let mut u = y % modulus;
        if u == 0 {
            u = modulus;
        }
        while !self.is_unit(u) {
            u += modulus;
        }
        u
    }

    /// Writes `x = u * prod p_i^{alpha_i}` with `u` a unit.
    ///
    /// The exponent vector is unique; the unit is only unique modulo
    /// `prod p_i^{s_i - alpha_i}`, and the smallest valid representative is
    /// returned.
    pub fn factor_element(&self, x: u64) -> ElemFactorization {
        let x = x % self.h;
        let exponents = self.exponents(x);
        if x == 0 {
            return ElemFactorization {
                unit: 1 % self.h,
                exponents,
                is_zero: true,
            };
        }
        let g = self.exponent_product(&exponents);
        // g divides x as integers: a capped exponent means p^s | x already.
        let y = x / g;
        let unit_modulus = self.h / g;
        ElemFactorization {
            unit: self.least_unit_congruent(y, unit_modulus),
            exponents,
            is_zero: false,
        }
    }

    /// Given `beta` with some `beta_j < s_j`, returns a unit `u` and
    /// `alpha_i = min(beta_i, s_i)` such that
    /// `u * prod p_i^{beta_i} = prod p_i^{alpha_i}` in Z_h.
    pub fn absorb_saturated_exponents(&self, beta: &[u32]) -> Result<(u64, Vec<u32>)> {
        if beta.len() != self.t() {
            return Err(Error::DimensionMismatch(format!(
                "exponent vector has length {}, ring has {} components",
                beta.len(),
                self.t()
            )));
        }
        if self.components.iter().zip(beta).all(|(c, &b)| b >= c.s) {
            return Err(Error::ZeroElement);
        }
        let alpha: Vec<u32> = self
            .components
            .iter()
            .zip(beta)
            .map(|(c, &b)| b.min(c.s))
            .collect();
        let x = self
            .components
            .iter()
            .zip(beta)
            .fold(1 % self.h, |acc, (c, &b)| {
                self.mul(acc, pow_mod(c.p, b as u64, self.h))
            });
        let g = self.exponent_product(&alpha);
        // x = g * y with y a unit modulo h/g; we need u * y = 1 there.
        let modulus = self.h / g;
        let y = x / g;
        let target = inv_mod(y % modulus, modulus).expect("y is a unit modulo h/g");
        Ok((self.least_unit_congruent(target, modulus), alpha))
    }

    pub fn are_associates(&self, a: u64, b: u64) -> bool {
        self.exponents(a) == self.exponents(b)
    }

    pub fn ideal_of(&self, x: u64) -> IdealLabel {
        IdealLabel {
            exponents: self.exponents(x),
        }
    }

    /// `pi_i(x) = x mod p_i^{s_i}` (0-based component index).
    pub fn project(&self, x: u64, i: usize) -> Result<u64> {
        Ok(x % self.component(i)?.q)
    }

    /// `theta_i(x) = x mod h / p_i^{s_i}` (0-based component index).
    pub fn coproject(&self, x: u64, i: usize) -> Result<u64> {
        Ok(x % self.coprojection_modulus(i)?)
    }

    /// The unique element with the given residue in each component.
    pub fn crt_lift(&self, residues: &[u64]) -> Result<u64> {
        if residues.len() != self.t() {
            return Err(Error::DimensionMismatch(format!(
                "{} residues for {} components",
                residues.len(),
                self.t()
            )));
        }
        Ok(self.crt_lift_unchecked(residues))
    }

    #[inline]
    pub(crate) fn crt_lift_unchecked(&self, residues: &[u64]) -> u64 {
        residues
            .iter()
            .zip(&self.idempotents)
            .fold(0, |acc, (&r, &e)| self.add(acc, self.mul(r, e)))
    }
}

impl IdealLabel {
    /// A generator `prod p_i^{alpha_i}` of the ideal.
    pub fn generator(&self, ring: &Ring) -> u64 {
        ring.exponent_product(&self.exponents)
    }

    /// `y` lies in the ideal iff its exponent vector dominates the label.
    pub fn contains(&self, ring: &Ring, y: u64) -> bool {
        ring.exponents(y)
            .iter()
            .zip(&self.exponents)
            .all(|(a, b)| a >= b)
    }

    /// Number of elements, `prod p_i^{s_i - alpha_i}`.
    pub fn cardinality(&self, ring: &Ring) -> u64 {
        ring.h() / self.generator(ring).gcd(&ring.h())
    }

    /// All members of the ideal in increasing order.
    pub fn members(&self, ring: &Ring) -> Vec<u64> {
        let step = self.generator(ring).gcd(&ring.h());
        (0..ring.h()).step_by(step as usize).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    fn z(h: u64) -> Ring {
        Ring::new(h).unwrap()
    }

    #[test]
    fn factorization_of_modulus() {
        let r = z(360);
        let got: Vec<_> = r.components().iter().map(|c| (c.p, c.s)).collect();
        assert_eq!(got, vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(z(97).t(), 1);
        assert!(Ring::new(1).is_err());
        assert!(Ring::new(0).is_err());
    }

    #[test]
    fn units_of_z12() {
        let r = z(12);
        assert!(r.is_unit(5));
        assert!(!r.is_unit(0));
        assert_eq!(r.unit_count(), 4);
        assert_eq!(r.units().count(), 4);
    }

    #[test]
    fn unit_count_formula_matches_enumeration() {
        for h in 2..=200 {
            let r = z(h);
            assert_eq!(r.unit_count() as usize, r.units().count(), "h={h}");
        }
    }

    #[test]
    fn factor_element_examples() {
        let r = z(12);
        let f = r.factor_element(8);
        assert_eq!((f.unit, f.exponents.clone(), f.is_zero), (5, vec![2, 0], false));
        let one = r.factor_element(1);
        assert_eq!((one.unit, one.exponents), (1, vec![0, 0]));
        let zero = r.factor_element(0);
        assert!(zero.is_zero);
        assert_eq!(zero.exponents, vec![2, 1]);
    }

    #[test]
    fn factor_element_unit_is_least_valid() {
        // exhaustive: the returned unit is the smallest u in Z_h^* with u*g = x
        for h in 2..=60 {
            let r = z(h);
            for x in 1..h {
                let f = r.factor_element(x);
                let g = r.exponent_product(&f.exponents);
                let least = r.units().find(|&u| r.mul(u, g) == x).unwrap();
                assert_eq!(f.unit, least, "h={h} x={x}");
            }
        }
    }

    #[test]
    fn exponent_vector_is_unique() {
        // every representation x = u * prod p^a with a_i <= s_i has the same a
        for h in 2..=60 {
            let r = z(h);
            let mut labels: Vec<Vec<u32>> = vec![vec![]];
            for c in r.components() {
                labels = labels
                    .into_iter()
                    .flat_map(|l| {
                        (0..=c.s).map(move |a| {
                            let mut l = l.clone();
                            l.push(a);
                            l
                        })
                    })
                    .collect();
            }
            for x in 1..h {
                let found: BTreeSet<Vec<u32>> = labels
                    .iter()
                    .filter(|a| {
                        let g = r.exponent_product(a);
                        r.units().any(|u| r.mul(u, g) == x)
                    })
                    .cloned()
                    .collect();
                assert_eq!(found.len(), 1, "h={h} x={x}");
                assert_eq!(found.into_iter().next().unwrap(), r.exponents(x));
            }
        }
    }

    #[test]
    fn absorb_examples() {
        let r = z(12);
        assert_eq!(r.absorb_saturated_exponents(&[3, 0]).unwrap(), (5, vec![2, 0]));
        assert_eq!(r.absorb_saturated_exponents(&[1, 0]).unwrap(), (1, vec![1, 0]));
        assert_eq!(r.absorb_saturated_exponents(&[2, 1]), Err(Error::ZeroElement));
        assert!(r.absorb_saturated_exponents(&[1]).is_err());
    }

    #[test]
    fn absorb_identity_holds() {
        for h in [12u64, 18, 36, 60, 72, 100] {
            let r = z(h);
            for b0 in 0..6 {
                for b1 in 0..6 {
                    let mut beta = vec![b0, b1];
                    beta.extend(std::iter::repeat_n(0, r.t().saturating_sub(2)));
                    beta.truncate(r.t());
                    match r.absorb_saturated_exponents(&beta) {
                        Ok((u, alpha)) => {
                            assert!(r.is_unit(u));
                            let lhs = r.components().iter().zip(&beta).fold(1, |acc, (c, &b)| {
                                r.mul(acc, r.pow(c.p, b as u64))
                            });
                            assert_eq!(r.mul(u, lhs), r.exponent_product(&alpha));
                        }
                        Err(e) => assert_eq!(e, Error::ZeroElement),
                    }
                }
            }
        }
    }

    #[test]
    fn associates_examples() {
        let r = z(12);
        assert!(r.are_associates(8, 4));
        assert!(r.are_associates(7, 7));
        assert!(!r.are_associates(2, 3));
    }

    #[test]
    fn associate_classes_match_exponent_labels() {
        for h in 2..=60 {
            let r = z(h);
            // brute force: classes of the relation a = u b
            let mut classes: Vec<BTreeSet<u64>> = Vec::new();
            let mut seen = HashSet::new();
            for a in 0..h {
                if seen.contains(&a) {
                    continue;
                }
                let class: BTreeSet<u64> = r.units().map(|u| r.mul(u, a)).chain([a]).collect();
                for &b in &class {
                    seen.insert(b);
                    assert!(r.are_associates(a, b));
                }
                classes.push(class);
            }
            let expected: u64 = r.components().iter().map(|c| c.s as u64 + 1).product();
            assert_eq!(classes.len() as u64, expected, "h={h}");
            for (i, ci) in classes.iter().enumerate() {
                for cj in &classes[i + 1..] {
                    let (a, b) = (*ci.iter().next().unwrap(), *cj.iter().next().unwrap());
                    assert!(!r.are_associates(a, b));
                }
            }
        }
    }

    #[test]
    fn ideal_membership_by_domination() {
        for h in 2..=60 {
            let r = z(h);
            for x in 0..h {
                let ideal: BTreeSet<u64> = (0..h).map(|c| r.mul(c, x)).collect();
                let label = r.ideal_of(x);
                for y in 0..h {
                    assert_eq!(ideal.contains(&y), label.contains(&r, y), "h={h} x={x} y={y}");
                }
                assert_eq!(label.cardinality(&r) as usize, ideal.len());
                assert_eq!(label.members(&r), ideal.into_iter().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn projections() {
        let r = z(12);
        assert_eq!(r.project(8, 0).unwrap(), 0);
        assert_eq!(r.project(8, 1).unwrap(), 2);
        assert_eq!(r.coproject(8, 0).unwrap(), 2);
        assert_eq!(r.coproject(8, 1).unwrap(), 0);
        for i in 0..2 {
            assert_eq!(r.project(0, i).unwrap(), 0);
            assert_eq!(r.coproject(1, i).unwrap(), 1);
        }
        assert!(matches!(
            r.project(1, 2),
            Err(Error::ComponentOutOfRange { index: 2, count: 2 })
        ));
        assert!(r.coproject(1, 5).is_err());
    }

    #[test]
    fn crt_examples() {
        let r = z(12);
        assert_eq!(r.crt_lift(&[0, 2]).unwrap(), 8);
        assert_eq!(r.crt_lift(&[0, 0]).unwrap(), 0);
        assert_eq!(r.crt_lift(&[1, 1]).unwrap(), 1);
        assert!(r.crt_lift(&[1]).is_err());
    }

    #[test]
    fn crt_is_inverse_of_projections() {
        for h in 2..=60 {
            let r = z(h);
            for x in 0..h {
                let res: Vec<u64> = (0..r.t()).map(|i| r.project(x, i).unwrap()).collect();
                assert_eq!(r.crt_lift(&res).unwrap(), x);
            }
            // the other direction: every residue tuple is hit exactly once
            let mut tuples = BTreeSet::new();
            for x in 0..h {
                tuples.insert((0..r.t()).map(|i| r.project(x, i).unwrap()).collect::<Vec<_>>());
            }
            assert_eq!(tuples.len() as u64, h);
        }
    }

    #[test]
    fn large_modulus_arithmetic() {
        let h = (1u64 << 61) - 1; // prime
        let r = z(h);
        assert_eq!(r.t(), 1);
        let a = h - 2;
        assert_eq!(r.mul(a, a), 4);
        assert_eq!(r.mul(a, r.inverse(a).unwrap()), 1);
    }
}
