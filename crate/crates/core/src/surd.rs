//! Coefficient fields for the Fock-space engine.
//!
//! Creation operators carry factors `sqrt(b)`. With rational covariances every
//! coefficient that can appear is a finite sum `sum_s a_s * sqrt(s)` over
//! squarefree integers `s` with rational `a_s`; [`Surd`] stores exactly that, so
//! vacuum expectations come out as exact rationals. `f64` is the fast inexact
//! alternative.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{self, Rational};

/// Arithmetic the Fock engine needs from a coefficient type.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Square root of a nonnegative rational.
    fn sqrt_of(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn sqrt_of(r: &Rational) -> Self {
        rational::to_f64(r).sqrt()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Exact element of the rational span of square roots of squarefree integers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    // radicand (squarefree, >= 1) -> coefficient; no zero coefficients stored
    terms: BTreeMap<BigUint, Rational>,
}

impl Surd {
    pub fn rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(BigUint::one(), r);
        }
        Surd { terms }
    }

    /// `coeff * sqrt(radicand)`, normalizing the radicand to its squarefree part.
    pub fn term(coeff: Rational, radicand: BigUint) -> Self {
        if coeff.is_zero() || radicand.is_zero() {
            return Surd::default();
        }
        let (square_root, free) = squarefree_split(radicand);
        let coeff = coeff * Rational::from_integer(BigInt::from(square_root));
        let mut terms = BTreeMap::new();
        terms.insert(free, coeff);
        Surd { terms }
    }

    /// The value as a rational, if it has no irrational part.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }
}

/// Splits `n = s^2 * f` with `f` squarefree; returns `(s, f)`.
fn squarefree_split(mut n: BigUint) -> (BigUint, BigUint) {
    let mut root = BigUint::one();
    let mut free = BigUint::one();
    let mut p = 2u64;
    while p <= 1_000_000 {
        let pb = BigUint::from(p);
        if &pb * &pb > n {
            break;
        }
        let mut count = 0u32;
        while (&n % &pb).is_zero() {
            n /= &pb;
            count += 1;
        }
        if count > 0 {
            root *= num_traits::pow(pb.clone(), (count / 2) as usize);
            if count % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // any leftover has no prime factor below the trial bound
    let s = n.sqrt();
    if &s * &s == n && !n.is_one() {
        root *= s;
    } else {
        free *= n;
    }
    (root, free)
}

impl Scalar for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn one() -> Self {
        Surd::rational(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (s, a) in &other.terms {
            let entry = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
            *entry += a;
            if entry.is_zero() {
                self.terms.remove(s);
            }
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Surd::default();
        for (s1, a1) in &self.terms {
            for (s2, a2) in &other.terms {
                let g = s1.gcd(s2);
                let radicand = (s1 / &g) * (s2 / &g);
                let coeff = a1 * a2 * Rational::from_integer(BigInt::from(g));
                out.add_assign_ref(&Surd {
                    terms: BTreeMap::from([(radicand, coeff)]),
                });
            }
        }
        out
    }
    fn from_rational(r: &Rational) -> Self {
        Surd::rational(r.clone())
    }
    fn sqrt_of(r: &Rational) -> Self {
        assert!(!r.is_negative(), "square root of negative rational {r}");
        // sqrt(p/q) = sqrt(p*q) / q
        let den = r.denom().magnitude().clone();
        let num = r.numer().magnitude().clone();
        Surd::term(
            Rational::new(BigInt::one(), BigInt::from(den.clone())),
            num * den,
        )
    }
    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, a)| rational::to_f64(a) * s.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if s.is_one() {
                write!(f, "{}", rational::render_rational(a))?;
            } else {
                write!(f, "{}*sqrt({s})", rational::render_rational(a))?;
            }
        }
        Ok(())
    }
}
