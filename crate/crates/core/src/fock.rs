//! Exact action of matricially free creation, annihilation and projection
//! operators on the matricially free Fock space, with one-dimensional
//! `H_{p,q}(u) = C e_{p,q}(u)`.
//!
//! A basis word `e_{p1,p2}(u1) ⊗ ... ⊗ e_{pm,q}(um)` lives in sector `q`, the
//! right index of its last factor; the vacuum `Ω_q` is the empty word of
//! sector `q`. Indices are 1-based.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::block_model::check_index;
use crate::rational::{self, Rational};
use crate::surd::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Plain,
    Prime,
    DoublePrime,
}

/// A user label, possibly doubled into `u'` / `u''` by the non-Hermitian families.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub base: String,
    pub variant: Variant,
}

impl Label {
    pub fn plain(base: impl Into<String>) -> Self {
        Label { base: base.into(), variant: Variant::Plain }
    }
    pub fn prime(base: impl Into<String>) -> Self {
        Label { base: base.into(), variant: Variant::Prime }
    }
    pub fn double_prime(base: impl Into<String>) -> Self {
        Label { base: base.into(), variant: Variant::DoublePrime }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marks = match self.variant {
            Variant::Plain => "",
            Variant::Prime => "'",
            Variant::DoublePrime => "''",
        };
        write!(f, "{}{marks}", self.base)
    }
}

/// One tensor factor `e_{left,right}(label)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub left: usize,
    pub right: usize,
    pub label: Label,
}

impl Factor {
    pub fn new(left: usize, right: usize, label: Label) -> Self {
        Factor { left, right, label }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisWord {
    Vacuum(usize),
    /// Nonempty, with `factors[i].right == factors[i + 1].left`.
    Chain(Vec<Factor>),
}

impl BasisWord {
    pub fn chain(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty chain; use a vacuum".into()));
        }
        if let Some(w) = factors.windows(2).find(|w| w[0].right != w[1].left) {
            return Err(Error::InvalidParameter(format!(
                "chain mismatch: e[{},{}] followed by e[{},{}]",
                w[0].left, w[0].right, w[1].left, w[1].right
            )));
        }
        Ok(BasisWord::Chain(factors))
    }

    pub fn sector(&self) -> usize {
        match self {
            BasisWord::Vacuum(q) => *q,
            BasisWord::Chain(f) => f.last().map(|x| x.right).unwrap_or(0),
        }
    }

    /// Number of tensor factors; the vacuum has none.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        match self {
            BasisWord::Vacuum(_) => 0,
            BasisWord::Chain(f) => f.len(),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, BasisWord::Vacuum(_))
    }

    pub fn factors(&self) -> &[Factor] {
        match self {
            BasisWord::Vacuum(_) => &[],
            BasisWord::Chain(f) => f,
        }
    }

    /// Left index of the leading factor; for a vacuum, its sector.
    fn leading_index(&self) -> usize {
        match self {
            BasisWord::Vacuum(q) => *q,
            BasisWord::Chain(f) => f[0].left,
        }
    }
}

// canonical order: sector, then length, then factors lexicographically
impl Ord for BasisWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sector()
            .cmp(&other.sector())
            .then(self.len().cmp(&other.len()))
            .then_with(|| self.factors().cmp(other.factors()))
    }
}

impl PartialOrd for BasisWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisWord::Vacuum(q) => write!(f, "Ω_{q}"),
            BasisWord::Chain(factors) => {
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{},{},{}", x.left, x.right, x.label)?;
                }
                Ok(())
            }
        }
    }
}

/// Finitely supported vector over orthonormal basis words.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<C> {
    coeffs: BTreeMap<BasisWord, C>,
}

impl<C: Scalar> Default for FockVector<C> {
    fn default() -> Self {
        FockVector { coeffs: BTreeMap::new() }
    }
}

impl<C: Scalar> FockVector<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum(q: usize) -> Self {
        Self::basis(BasisWord::Vacuum(q))
    }

    pub fn basis(word: BasisWord) -> Self {
        let mut v = Self::zero();
        v.coeffs.insert(word, C::one());
        v
    }

    pub fn add_term(&mut self, word: BasisWord, c: C) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, scale: &C) {
        for (w, c) in &other.coeffs {
            self.add_term(w.clone(), c.mul_ref(scale));
        }
    }

    pub fn coefficient(&self, word: &BasisWord) -> C {
        self.coeffs.get(word).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisWord, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Canonical inner product; coefficients are real.
    pub fn inner(&self, other: &Self) -> C {
        let mut acc = C::zero();
        for (w, c) in &self.coeffs {
            if let Some(d) = other.coeffs.get(w) {
                acc.add_assign_ref(&c.mul_ref(d));
            }
        }
        acc
    }

    pub fn max_len(&self) -> usize {
        self.coeffs.keys().map(BasisWord::len).max().unwrap_or(0)
    }

    fn retain_len(&mut self, max: usize) {
        self.coeffs.retain(|w, _| w.len() <= max);
    }

    /// One line per word: `coeff TAB sector TAB p1,q1,l1 | p2,q2,l2 | ...`.
    pub fn dump(&self) -> String
    where
        C: fmt::Display,
    {
        let mut out = String::new();
        for (w, c) in &self.coeffs {
            out.push_str(&format!("{c}\t{}\t{w}\n", w.sector()));
        }
        out
    }
}

/// Covariances `b_{p,q}(label) >= 0` together with their square roots.
#[derive(Debug, Clone)]
pub struct CovarianceTable<C> {
    r: usize,
    entries: BTreeMap<(usize, usize, Label), (Rational, C)>,
}

impl<C: Scalar> CovarianceTable<C> {
    pub fn new(r: usize) -> Self {
        CovarianceTable { r, entries: BTreeMap::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn insert(&mut self, p: usize, q: usize, label: Label, b: Rational) -> Result<()> {
        check_index(p, self.r)?;
        check_index(q, self.r)?;
        if b.is_negative() {
            return Err(Error::NegativeEntry {
                location: format!("b[{p},{q}]({label})"),
                value: rational::render_rational(&b),
            });
        }
        let amp = C::sqrt_of(&b);
        self.entries.insert((p, q, label), (b, amp));
        Ok(())
    }

    pub fn get(&self, p: usize, q: usize, label: &Label) -> Option<&Rational> {
        self.entries.get(&(p, q, label.clone())).map(|(b, _)| b)
    }

    fn amplitude(&self, p: usize, q: usize, label: &Label) -> Result<&C> {
        check_index(p, self.r)?;
        check_index(q, self.r)?;
        self.entries
            .get(&(p, q, label.clone()))
            .map(|(_, a)| a)
            .ok_or_else(|| Error::MissingCovariance(format!("b[{p},{q}]({label})")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, Label), &Rational)> {
        self.entries.iter().map(|(k, (b, _))| (k, b))
    }
}

/// Primitive operator symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Create { p: usize, q: usize, label: Label },
    Annihilate { p: usize, q: usize, label: Label },
    Project(usize),
    Identity,
}

impl Symbol {
    pub fn create(p: usize, q: usize, label: Label) -> Self {
        Symbol::Create { p, q, label }
    }

    pub fn annihilate(p: usize, q: usize, label: Label) -> Self {
        Symbol::Annihilate { p, q, label }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Symbol::Create { p, q, label } => Symbol::annihilate(*p, *q, label.clone()),
            Symbol::Annihilate { p, q, label } => Symbol::create(*p, *q, label.clone()),
            other => other.clone(),
        }
    }

    /// How much the symbol can shorten a word.
    pub fn lowering(&self) -> usize {
        matches!(self, Symbol::Annihilate { .. }) as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Create { p, q, label } => write!(f, "℘[{p},{q}]({label})"),
            Symbol::Annihilate { p, q, label } => write!(f, "℘*[{p},{q}]({label})"),
            Symbol::Project(q) => write!(f, "P[{q}]"),
            Symbol::Identity => write!(f, "1"),
        }
    }
}

pub fn create<C: Scalar>(
    p: usize,
    q: usize,
    label: &Label,
    v: &FockVector<C>,
    tbl: &CovarianceTable<C>,
) -> Result<FockVector<C>> {
    let amp = tbl.amplitude(p, q, label)?;
    let mut out = FockVector::zero();
    if amp.is_zero() {
        return Ok(out);
    }
    let head = Factor::new(p, q, label.clone());
    for (w, c) in v.iter() {
        if w.leading_index() != q {
            continue;
        }
        let word = match w {
            BasisWord::Vacuum(_) => BasisWord::Chain(vec![head.clone()]),
            BasisWord::Chain(f) => {
                let mut factors = Vec::with_capacity(f.len() + 1);
                factors.push(head.clone());
                factors.extend_from_slice(f);
                BasisWord::Chain(factors)
            }
        };
        out.add_term(word, c.mul_ref(amp));
    }
    Ok(out)
}

pub fn annihilate<C: Scalar>(
    p: usize,
    q: usize,
    label: &Label,
    v: &FockVector<C>,
    tbl: &CovarianceTable<C>,
) -> Result<FockVector<C>> {
    let amp = tbl.amplitude(p, q, label)?;
    let mut out = FockVector::zero();
    if amp.is_zero() {
        return Ok(out);
    }
    for (w, c) in v.iter() {
        let BasisWord::Chain(f) = w else { continue };
        let head = &f[0];
        if head.left != p || head.right != q || head.label != *label {
            continue;
        }
        let word = if f.len() == 1 {
            BasisWord::Vacuum(q)
        } else {
            BasisWord::Chain(f[1..].to_vec())
        };
        out.add_term(word, c.mul_ref(amp));
    }
    Ok(out)
}

/// `P_q`: keeps `Ω_q` and the words whose leading factor starts at `q`.
pub fn project<C: Scalar>(q: usize, v: &FockVector<C>, r: usize) -> Result<FockVector<C>> {
    check_index(q, r)?;
    let mut out = FockVector::zero();
    for (w, c) in v.iter() {
        if w.leading_index() == q {
            out.add_term(w.clone(), c.clone());
        }
    }
    Ok(out)
}

pub fn apply_symbol<C: Scalar>(
    sym: &Symbol,
    v: &FockVector<C>,
    tbl: &CovarianceTable<C>,
) -> Result<FockVector<C>> {
    match sym {
        Symbol::Create { p, q, label } => create(*p, *q, label, v, tbl),
        Symbol::Annihilate { p, q, label } => annihilate(*p, *q, label, v, tbl),
        Symbol::Project(q) => project(*q, v, tbl.r()),
        Symbol::Identity => Ok(v.clone()),
    }
}

/// Anything that acts linearly on Fock vectors.
pub trait FockOperator<C: Scalar> {
    fn apply(&self, v: &FockVector<C>, tbl: &CovarianceTable<C>) -> Result<FockVector<C>>;
    /// Upper bound on how much one application can shorten a word.
    fn max_lowering(&self) -> usize;
}

impl<C: Scalar> FockOperator<C> for Symbol {
    fn apply(&self, v: &FockVector<C>, tbl: &CovarianceTable<C>) -> Result<FockVector<C>> {
        apply_symbol(self, v, tbl)
    }
    fn max_lowering(&self) -> usize {
        self.lowering()
    }
}

/// `Ψ_q(X_1 ⋯ X_m) = <Ω_q, X_1 ⋯ X_m Ω_q>`.
///
/// Words too long to be brought back to the vacuum by the remaining
/// operators are dropped along the way, which does not change the result.
pub fn vacuum_expectation<C: Scalar, O: FockOperator<C>>(
    ops: &[O],
    q: usize,
    tbl: &CovarianceTable<C>,
) -> Result<C> {
    check_index(q, tbl.r())?;
    let mut budget: usize = ops.iter().map(|o| o.max_lowering()).sum();
    let mut v = FockVector::vacuum(q);
    for op in ops.iter().rev() {
        budget -= op.max_lowering();
        v = op.apply(&v, tbl)?;
        v.retain_len(budget);
        if v.is_empty() {
            break;
        }
    }
    Ok(v.coefficient(&BasisWord::Vacuum(q)))
}

/// `Ψ_q` of a product of primitive symbols.
pub fn evaluate_word<C: Scalar>(ops: &[Symbol], q: usize, tbl: &CovarianceTable<C>) -> Result<C> {
    vacuum_expectation(ops, q, tbl)
}

/// `Ψ = sum_q d_q Ψ_q`; `d` must sum to one.
pub fn weighted_state<C: Scalar, O: FockOperator<C>>(
    d: &[Rational],
    ops: &[O],
    tbl: &CovarianceTable<C>,
) -> Result<C> {
    if d.len() != tbl.r() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} sectors",
            d.len(),
            tbl.r()
        )));
    }
    let total: Rational = d.iter().cloned().sum();
    if total != rational::int(1) {
        return Err(Error::InvalidParameter(format!(
            "state weights sum to {}, expected 1",
            rational::render_rational(&total)
        )));
    }
    let mut acc = C::zero();
    for (i, dq) in d.iter().enumerate() {
        if dq.is_zero() {
            continue;
        }
        let value = vacuum_expectation(ops, i + 1, tbl)?;
        acc.add_assign_ref(&value.mul_ref(&C::from_rational(dq)));
    }
    Ok(acc)
}
