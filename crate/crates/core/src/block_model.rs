//! Block structures, covariance profiles and the scaled covariances `B(u) = D V(u)`.
//!
//! Block indices in the public API are 1-based, matching how blocks are written
//! in words such as `S[1,2]`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Block count, asymptotic dimensions and (optionally) a concrete partition of `[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure {
    d: Vec<Rational>,
    finite_dims: Option<Vec<usize>>,
    normalized: bool,
}

impl BlockStructure {
    /// Dimensions that must sum to one (square-matrix regime, `n = n_1 + ... + n_r`).
    pub fn normalized(d: Vec<Rational>) -> Result<Self> {
        let s = Self::ratios(d)?;
        let total: Rational = s.d.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "normalized dimensions sum to {}, expected 1",
                rational::render_rational(&total)
            )));
        }
        Ok(BlockStructure {
            normalized: true,
            ..s
        })
    }

    /// Free nonnegative ratios `d_j = lim n_j / n` against a separate normalizer.
    pub fn ratios(d: Vec<Rational>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidParameter("at least one block required".into()));
        }
        check_nonnegative(&d, "d")?;
        Ok(BlockStructure {
            d,
            finite_dims: None,
            normalized: false,
        })
    }

    pub fn with_finite_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != self.d.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} finite block sizes for {} blocks",
                dims.len(),
                self.d.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidParameter("every block needs at least one row".into()));
        }
        self.finite_dims = Some(dims);
        Ok(self)
    }

    pub fn r(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn finite_dims(&self) -> Option<&[usize]> {
        self.finite_dims.as_deref()
    }

    /// `n = sum n_q` when a finite partition is attached.
    pub fn n(&self) -> Option<usize> {
        self.finite_dims.as_ref().map(|dims| dims.iter().sum())
    }

    /// Half-open row range `N_q` (1-based `q`) of the finite partition.
    pub fn block_range(&self, q: usize) -> Option<std::ops::Range<usize>> {
        let dims = self.finite_dims.as_ref()?;
        if q == 0 || q > dims.len() {
            return None;
        }
        let start: usize = dims[..q - 1].iter().sum();
        Some(start..start + dims[q - 1])
    }
}

fn check_nonnegative(values: &[Rational], what: &str) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if v.is_negative() {
            return Err(Error::NegativeEntry {
                location: format!("{what}[{}]", i + 1),
                value: rational::render_rational(v),
            });
        }
    }
    Ok(())
}

/// Square matrix of rationals, row-major.
pub type RationalMatrix = Vec<Vec<Rational>>;

/// Per-label block variances `v_{p,q}(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceProfile {
    r: usize,
    v: BTreeMap<String, RationalMatrix>,
    hermitian: bool,
}

impl CovarianceProfile {
    pub fn new(r: usize, v: BTreeMap<String, RationalMatrix>, hermitian: bool) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidParameter("covariance profile has no labels".into()));
        }
        for (label, m) in &v {
            if m.len() != r || m.iter().any(|row| row.len() != r) {
                return Err(Error::DimensionMismatch(format!(
                    "V({label}) is not {r}x{r}"
                )));
            }
            for (p, row) in m.iter().enumerate() {
                for (q, x) in row.iter().enumerate() {
                    if x.is_negative() {
                        return Err(Error::NegativeEntry {
                            location: format!("V({label})[{},{}]", p + 1, q + 1),
                            value: rational::render_rational(x),
                        });
                    }
                    if hermitian && *x != m[q][p] {
                        return Err(Error::InvalidParameter(format!(
                            "hermitian profile needs V({label}) symmetric, entry [{},{}] differs",
                            p + 1,
                            q + 1
                        )));
                    }
                }
            }
        }
        Ok(CovarianceProfile { r, v, hermitian })
    }

    /// Every entry of every label equal to `value`.
    pub fn uniform(r: usize, labels: &[&str], value: Rational, hermitian: bool) -> Result<Self> {
        let m = vec![vec![value; r]; r];
        let v = labels.iter().map(|l| (l.to_string(), m.clone())).collect();
        Self::new(r, v, hermitian)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.v.keys().map(String::as_str)
    }

    /// Position of a label in the sorted label list.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.v.keys().position(|l| l == label)
    }

    pub fn matrix(&self, label: &str) -> Option<&RationalMatrix> {
        self.v.get(label)
    }

    /// `v_{p,q}(u)` with 1-based indices.
    pub fn get(&self, label: &str, p: usize, q: usize) -> Result<&Rational> {
        let m = self
            .v
            .get(label)
            .ok_or_else(|| Error::MissingCovariance(format!("label {label:?}")))?;
        check_index(p, self.r)?;
        check_index(q, self.r)?;
        Ok(&m[p - 1][q - 1])
    }
}

pub(crate) fn check_index(i: usize, r: usize) -> Result<()> {
    if i == 0 || i > r {
        Err(Error::IndexOutOfRange { index: i, max: r })
    } else {
        Ok(())
    }
}

/// `b_{p,q}(u) = d_p v_{p,q}(u)` for every label.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCovariance {
    b: BTreeMap<String, RationalMatrix>,
}

impl ScaledCovariance {
    pub fn get(&self, label: &str, p: usize, q: usize) -> Option<&Rational> {
        self.b.get(label)?.get(p.checked_sub(1)?)?.get(q.checked_sub(1)?)
    }

    pub fn matrix(&self, label: &str) -> Option<&RationalMatrix> {
        self.b.get(label)
    }
}

pub fn scaled_covariance(d: &[Rational], profile: &CovarianceProfile) -> Result<ScaledCovariance> {
    if d.len() != profile.r() {
        return Err(Error::DimensionMismatch(format!(
            "{} dimensions for a {}-block profile",
            d.len(),
            profile.r()
        )));
    }
    check_nonnegative(d, "d")?;
    let b = profile
        .v
        .iter()
        .map(|(label, m)| {
            let scaled = m
                .iter()
                .zip(d)
                .map(|(row, dp)| row.iter().map(|v| dp * v).collect())
                .collect();
            (label.clone(), scaled)
        })
        .collect();
    Ok(ScaledCovariance { b })
}

/// Hermitian (Wigner-type) or non-Hermitian (Ginibre-type) ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Hermitian,
    Ginibre,
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnsembleKind::Hermitian => "hermitian",
            EnsembleKind::Ginibre => "ginibre",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Balanced,
    Unbalanced,
    Evanescent,
}

pub fn classify_block(d: &[Rational], p: usize, q: usize) -> Result<BlockKind> {
    check_index(p, d.len())?;
    check_index(q, d.len())?;
    let positive = |x: &Rational| x.is_positive();
    Ok(match (positive(&d[p - 1]), positive(&d[q - 1])) {
        (true, true) => BlockKind::Balanced,
        (false, false) => BlockKind::Evanescent,
        _ => BlockKind::Unbalanced,
    })
}

/// Rate at which blocks with `d_q = 0` grow: `n_q = max(1, floor(n^alpha))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvanescentSchedule {
    pub alpha: f64,
}

impl Default for EvanescentSchedule {
    fn default() -> Self {
        EvanescentSchedule { alpha: 0.5 }
    }
}

impl EvanescentSchedule {
    pub fn size(&self, n: usize) -> usize {
        // nudge so exact powers such as 100^(1/2) are not floored to 9
        let x = (n as f64).powf(self.alpha) * (1.0 + 1e-12);
        (x.floor() as usize).max(1)
    }
}

/// Splits `[n]` into `r` intervals with `n_q / n -> d_q`.
///
/// Evanescent blocks get `schedule.size(n)` rows; the rest of `n` goes to the
/// positive blocks in proportion to `d`, rounded by largest remainder with ties
/// to the lowest index.
pub fn finite_partition(
    n: usize,
    d: &[Rational],
    schedule: EvanescentSchedule,
) -> Result<Vec<usize>> {
    let r = d.len();
    check_nonnegative(d, "d")?;
    if n < r {
        return Err(Error::TooSmall {
            n,
            reason: format!("fewer rows than the {r} blocks"),
        });
    }
    let positive_total: Rational = d.iter().filter(|x| x.is_positive()).cloned().sum();
    if positive_total.is_zero() {
        return Err(Error::InvalidParameter(
            "at least one positive dimension required".into(),
        ));
    }
    if !(schedule.alpha >= 0.0 && schedule.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "evanescent alpha {} outside [0, 1)",
            schedule.alpha
        )));
    }
    let mut dims = vec![0usize; r];
    let mut used = 0usize;
    for (q, x) in d.iter().enumerate() {
        if x.is_zero() {
            dims[q] = schedule.size(n);
            used += dims[q];
        }
    }
    if used >= n {
        return Err(Error::TooSmall {
            n,
            reason: "evanescent blocks consume every row".into(),
        });
    }
    let mass = n - used;
    let mut remainders = Vec::new();
    let mut assigned = 0usize;
    for (q, x) in d.iter().enumerate() {
        if x.is_positive() {
            let share = Rational::from_integer(BigInt::from(mass)) * x / &positive_total;
            let floor = share.floor();
            dims[q] = floor.to_integer().to_usize().unwrap_or(0);
            assigned += dims[q];
            remainders.push((share - floor, q));
        }
    }
    // largest remainder first, lowest index on ties
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, q) in remainders.iter().take(mass - assigned) {
        dims[*q] += 1;
    }
    if let Some(q) = dims.iter().position(|&x| x == 0) {
        return Err(Error::TooSmall {
            n,
            reason: format!("block {} would be empty", q + 1),
        });
    }
    Ok(dims)
}
