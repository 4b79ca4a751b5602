//! The operator families that realize limits of Gaussian blocks, built as
//! formal expressions over the primitive Fock symbols.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::block_model::{check_index, CovarianceProfile, EnsembleKind};
use crate::fock::{self, CovarianceTable, FockOperator, FockVector, Label, Symbol};
use crate::rational::{self, Rational};
use crate::surd::{Scalar, Surd};
use crate::word::{BlockSymbol, BlockWord, Term};
use crate::{Error, Result};

/// Formal linear combination of products of primitive symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<Vec<Symbol>, Rational>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::symbol(Symbol::Identity)
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::monomial(Rational::one(), vec![s])
    }

    pub fn monomial(coeff: Rational, symbols: Vec<Symbol>) -> Self {
        let mut e = Self::zero();
        e.add_monomial(symbols, coeff);
        e
    }

    pub fn create(p: usize, q: usize, label: Label) -> Self {
        Self::symbol(Symbol::create(p, q, label))
    }

    pub fn annihilate(p: usize, q: usize, label: Label) -> Self {
        Self::symbol(Symbol::annihilate(p, q, label))
    }

    pub fn project(q: usize) -> Self {
        Self::symbol(Symbol::Project(q))
    }

    fn add_monomial(&mut self, mut symbols: Vec<Symbol>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        // identities are only kept for the bare identity monomial
        if symbols.len() > 1 {
            symbols.retain(|s| *s != Symbol::Identity);
        }
        if symbols.is_empty() {
            symbols.push(Symbol::Identity);
        }
        let entry = self.terms.entry(symbols.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&symbols);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Symbol>, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_monomial(m.clone(), a * c);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.add_monomial(m.clone(), a.clone());
        }
        out
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, a1) in &self.terms {
            for (m2, a2) in &other.terms {
                let mut m = m1.clone();
                m.extend(m2.iter().cloned());
                out.add_monomial(m, a1 * a2);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc.times(self))
    }

    /// Reverses products and swaps creation with annihilation; coefficients are real.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_monomial(m.iter().rev().map(Symbol::adjoint).collect(), a.clone());
        }
        out
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a OperatorExpr>) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc.plus(x))
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, a)) in self.terms.iter().enumerate() {
            if a.is_negative() {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let mag = a.abs();
            if !mag.is_one() {
                write!(f, "{}*", rational::render_rational(&mag))?;
            }
            for (j, s) in m.iter().enumerate() {
                if j > 0 {
                    write!(f, "·")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl<C: Scalar> FockOperator<C> for OperatorExpr {
    fn apply(&self, v: &FockVector<C>, tbl: &CovarianceTable<C>) -> Result<FockVector<C>> {
        let mut out = FockVector::zero();
        for (m, a) in &self.terms {
            let mut w = v.clone();
            for s in m.iter().rev() {
                w = fock::apply_symbol(s, &w, tbl)?;
                if w.is_empty() {
                    break;
                }
            }
            out.add_scaled(&w, &C::from_rational(a));
        }
        Ok(out)
    }

    fn max_lowering(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(Symbol::lowering).sum())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    /// `ω_{p,q}(u) = ℘_{p,q}(u) + ℘_{p,q}(u)*`
    MfGaussian,
    /// `℘_{p,q}(u) + ℘_{q,p}(u)` for `p < q`, `℘_{q,q}(u)` on the diagonal
    SymCreation,
    /// symmetrized creation plus its adjoint
    SymGaussian,
    /// `ζ_{p,q}(u) = ℘_{p,q}(u') + ℘_{q,p}(u'')*`
    RCircular,
    /// `η_{p,q}(u)`: symmetrized creation on `u'` plus symmetrized annihilation on `u''`
    Circular,
}

impl FamilyTag {
    fn symmetric(self) -> bool {
        matches!(self, FamilyTag::SymCreation | FamilyTag::SymGaussian | FamilyTag::Circular)
    }

    fn doubled(self) -> bool {
        matches!(self, FamilyTag::RCircular | FamilyTag::Circular)
    }
}

fn sym_creation(p: usize, q: usize, label: &Label) -> OperatorExpr {
    if p == q {
        OperatorExpr::create(q, q, label.clone())
    } else {
        OperatorExpr::create(p, q, label.clone()).plus(&OperatorExpr::create(q, p, label.clone()))
    }
}

pub fn family_operator(tag: FamilyTag, p: usize, q: usize, u: &str) -> Result<OperatorExpr> {
    if tag.symmetric() && p > q {
        return Err(Error::InvalidParameter(format!(
            "symmetric family needs p <= q, got ({p},{q})"
        )));
    }
    let plain = Label::plain(u);
    let (lp, ldp) = (Label::prime(u), Label::double_prime(u));
    Ok(match tag {
        FamilyTag::MfGaussian => {
            OperatorExpr::create(p, q, plain.clone()).plus(&OperatorExpr::annihilate(p, q, plain))
        }
        FamilyTag::SymCreation => sym_creation(p, q, &plain),
        FamilyTag::SymGaussian => {
            let c = sym_creation(p, q, &plain);
            c.plus(&c.adjoint())
        }
        FamilyTag::RCircular => {
            OperatorExpr::create(p, q, lp).plus(&OperatorExpr::annihilate(q, p, ldp))
        }
        FamilyTag::Circular => sym_creation(p, q, &lp).plus(&sym_creation(p, q, &ldp).adjoint()),
    })
}

/// `ς_{p,q}(u) = ℘_{p,q}(u) + ℘_{q,p}(u)*`, the limit of a rectangular block of a
/// Hermitian matrix.
pub fn hermitian_block(p: usize, q: usize, u: &str) -> OperatorExpr {
    OperatorExpr::create(p, q, Label::plain(u)).plus(&OperatorExpr::annihilate(q, p, Label::plain(u)))
}

/// Covariance entries a family needs for one label, over the whole `r x r` array.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyAssignment {
    pub entries: Vec<(usize, usize, Label, Rational)>,
}

impl FamilyAssignment {
    pub fn extend_table<C: Scalar>(&self, tbl: &mut CovarianceTable<C>) -> Result<()> {
        for (p, q, l, b) in &self.entries {
            tbl.insert(*p, *q, l.clone(), b.clone())?;
        }
        Ok(())
    }
}

/// Hermitian families use `b_{p,q}(u) = d_p v_{p,q}(u)`. The doubled families use
/// `b_{p,q}(u') = d_p v_{p,q}(u)` and `b_{p,q}(u'') = d_p v_{q,p}(u)`, so that
/// `ζ_{p,q}` carries the variance of block `(p,q)` on both of its parts.
pub fn assign_covariances(
    tag: FamilyTag,
    d: &[Rational],
    profile: &CovarianceProfile,
    u: &str,
) -> Result<FamilyAssignment> {
    let r = profile.r();
    if d.len() != r {
        return Err(Error::DimensionMismatch(format!("{} dimensions for {r} blocks", d.len())));
    }
    let mut entries = Vec::new();
    for p in 1..=r {
        for q in 1..=r {
            let dp = &d[p - 1];
            if tag.doubled() {
                entries.push((p, q, Label::prime(u), dp * profile.get(u, p, q)?));
                entries.push((p, q, Label::double_prime(u), dp * profile.get(u, q, p)?));
            } else {
                entries.push((p, q, Label::plain(u), dp * profile.get(u, p, q)?));
            }
        }
    }
    Ok(FamilyAssignment { entries })
}

/// Covariance table for every label of `profile` under the limit model of `kind`.
pub fn limit_table<C: Scalar>(
    kind: EnsembleKind,
    d: &[Rational],
    profile: &CovarianceProfile,
) -> Result<CovarianceTable<C>> {
    let tag = match kind {
        EnsembleKind::Hermitian => FamilyTag::SymGaussian,
        EnsembleKind::Ginibre => FamilyTag::Circular,
    };
    let mut tbl = CovarianceTable::new(profile.r());
    for u in profile.labels() {
        assign_covariances(tag, d, profile, u)?.extend_table(&mut tbl)?;
    }
    Ok(tbl)
}

/// Limit operator of one block term.
pub fn term_operator(kind: EnsembleKind, term: &Term) -> Result<OperatorExpr> {
    let (p, q, u) = (term.p, term.q, term.label.as_str());
    let op = match (kind, term.symbol) {
        (EnsembleKind::Hermitian, BlockSymbol::S) => hermitian_block(p, q, u),
        // T = T* for Hermitian matrices
        (EnsembleKind::Hermitian, BlockSymbol::T) => {
            return family_operator(FamilyTag::SymGaussian, p, q, u)
        }
        (EnsembleKind::Ginibre, BlockSymbol::S) => family_operator(FamilyTag::RCircular, p, q, u)?,
        (EnsembleKind::Ginibre, BlockSymbol::T) => family_operator(FamilyTag::Circular, p, q, u)?,
    };
    Ok(if term.star { op.adjoint() } else { op })
}

pub fn word_operators(kind: EnsembleKind, word: &BlockWord) -> Result<Vec<OperatorExpr>> {
    word.terms.iter().map(|t| term_operator(kind, t)).collect()
}

/// Limit of `τ_q(n)` of a block word: `Ψ_q` of the corresponding operators.
pub fn limit_moment(
    word: &BlockWord,
    q: usize,
    kind: EnsembleKind,
    d: &[Rational],
    profile: &CovarianceProfile,
) -> Result<Rational> {
    let value: Surd = limit_moment_with(word, q, kind, d, profile)?;
    value
        .to_rational()
        .ok_or_else(|| Error::Numerical(format!("irrational limit moment {value}")))
}

/// Same as [`limit_moment`] over an arbitrary coefficient type.
pub fn limit_moment_with<C: Scalar>(
    word: &BlockWord,
    q: usize,
    kind: EnsembleKind,
    d: &[Rational],
    profile: &CovarianceProfile,
) -> Result<C> {
    check_index(q, profile.r())?;
    word.bind(profile.r(), |l| profile.matrix(l).is_some())?;
    let ops = word_operators(kind, word)?;
    let tbl = limit_table::<C>(kind, d, profile)?;
    fock::vacuum_expectation(&ops, q, &tbl)
}

/// `γ(u) = ω_{2,1}(u) + ω_{2,2}(u) + α_1 P_1 + α_2 P_2` on two blocks with
/// `d = (0, 1)`, together with its covariance table.
#[derive(Debug, Clone)]
pub struct MeixnerModel<C> {
    pub gamma: OperatorExpr,
    pub table: CovarianceTable<C>,
}

pub fn meixner_gamma<C: Scalar>(
    u: &str,
    alpha1: &Rational,
    alpha2: &Rational,
    beta1: &Rational,
    beta2: &Rational,
) -> Result<MeixnerModel<C>> {
    if !beta1.is_positive() || !beta2.is_positive() {
        return Err(Error::InvalidParameter("Meixner model needs beta1, beta2 > 0".into()));
    }
    let label = Label::plain(u);
    let mut table = CovarianceTable::new(2);
    // d_1 = 0 turns the first row into trivial operators
    table.insert(1, 1, label.clone(), Rational::zero())?;
    table.insert(1, 2, label.clone(), Rational::zero())?;
    table.insert(2, 1, label.clone(), beta1.clone())?;
    table.insert(2, 2, label, beta2.clone())?;
    let gamma = OperatorExpr::sum(&[
        family_operator(FamilyTag::MfGaussian, 2, 1, u)?,
        family_operator(FamilyTag::MfGaussian, 2, 2, u)?,
        OperatorExpr::project(1).scale(alpha1),
        OperatorExpr::project(2).scale(alpha2),
    ]);
    Ok(MeixnerModel { gamma, table })
}

impl MeixnerModel<Surd> {
    /// `Ψ_1(γ^k)`.
    pub fn moment(&self, k: usize) -> Result<Rational> {
        let ops = vec![self.gamma.clone(); k];
        let v = fock::vacuum_expectation(&ops, 1, &self.table)?;
        v.to_rational()
            .ok_or_else(|| Error::Numerical(format!("irrational Meixner moment {v}")))
    }
}
