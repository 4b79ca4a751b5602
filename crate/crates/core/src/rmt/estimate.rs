use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{sample_matrix, term_pieces, CMatrix, EnsembleSpec};
use crate::word::BlockWord;
use crate::{Error, Execution, Result};

/// Monte Carlo mean of a complex observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: Complex64,
    /// Sample standard deviation of `|X - mean|` over `sqrt(trials)`.
    pub std_error: f64,
    pub trials: usize,
    pub n: usize,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentAccumulator {
    count: usize,
    mean: Complex64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn push(&mut self, x: Complex64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += (delta.conj() * (x - self.mean)).re;
    }

    /// Count-weighted combination of two partial accumulators.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        MomentAccumulator {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta.norm_sqr() * self.count as f64 * w,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(&self, n: usize) -> Result<MomentEstimate> {
        if self.count < 2 {
            return Err(Error::InvalidParameter(format!(
                "standard error needs at least 2 trials, got {}",
                self.count
            )));
        }
        let var = self.m2 / (self.count - 1) as f64;
        Ok(MomentEstimate {
            mean: self.mean,
            std_error: (var / self.count as f64).sqrt(),
            trials: self.count,
            n,
        })
    }
}

impl FromIterator<Complex64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = MomentAccumulator::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// `τ_q` of the word for one trial, multiplying only the nonzero rectangular pieces.
fn trial_value(spec: &EnsembleSpec, word: &BlockWord, q: usize, trial: u64) -> Result<Complex64> {
    let mut samples: BTreeMap<&str, CMatrix> = BTreeMap::new();
    for t in &word.terms {
        if !samples.contains_key(t.label.as_str()) {
            samples.insert(&t.label, sample_matrix(spec, &t.label, trial)?);
        }
    }
    let mut block = q;
    let mut acc: Option<CMatrix> = None;
    for t in &word.terms {
        let pieces = term_pieces(spec, &samples[t.label.as_str()], t)?;
        let Some((_, col, m)) = pieces.into_iter().find(|(row, _, _)| *row == block) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        acc = Some(match acc {
            None => m,
            Some(a) => a * m,
        });
        block = col;
    }
    if block != q {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = acc.expect("word is nonempty");
    Ok(a.trace() / spec.dims()[q - 1] as f64)
}

/// Monte Carlo estimate of `E τ_q(word)` over trials `0..trials`.
pub fn estimate_moment(
    spec: &EnsembleSpec,
    word: &BlockWord,
    q: usize,
    trials: usize,
    exec: Execution,
) -> Result<MomentEstimate> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("empty block word".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 trials, got {trials}")));
    }
    crate::block_model::check_index(q, spec.r())?;
    word.bind(spec.r(), |l| spec.profile.matrix(l).is_some())?;
    let values = exec.try_map(trials, |t| trial_value(spec, word, q, t as u64))?;
    values.into_iter().collect::<MomentAccumulator>().finish(spec.n())
}
