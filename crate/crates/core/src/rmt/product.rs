//! Products `B = X_1 ... X_p` of independent rectangular Gaussian matrices.

use num_complex::Complex64;

use super::{normal, stream_rng, CMatrix, MomentAccumulator, MomentEstimate, MAX_N};
use crate::{Error, Execution, Result};

/// `X_j` is `n_{j-1} x n_j` with independent complex entries, `E|X_ij|^2 = 1 / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpec {
    pub dims: Vec<usize>,
    pub n: usize,
    pub seed: u64,
}

impl ProductSpec {
    pub fn new(dims: Vec<usize>, n: usize, seed: u64) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidParameter("need dims n_0, ..., n_p with p >= 1".into()));
        }
        if dims.contains(&0) || n == 0 {
            return Err(Error::InvalidParameter("dimensions must be positive".into()));
        }
        if let Some(&d) = dims.iter().chain([&n]).find(|&&d| d > MAX_N) {
            return Err(Error::SizeLimit(format!("dimension {d} exceeds {MAX_N}")));
        }
        Ok(ProductSpec { dims, n, seed })
    }

    pub fn p(&self) -> usize {
        self.dims.len() - 1
    }

    fn factor(&self, j: usize, trial: u64) -> CMatrix {
        let (rows, cols) = (self.dims[j - 1], self.dims[j]);
        let mut rng = stream_rng(self.seed, &format!("X{j}"), trial);
        let s = (0.5 / self.n as f64).sqrt();
        CMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(&mut rng), normal(&mut rng)) * s)
    }

    /// `τ_0((B B*)^k)` for `k = 1..=max_k` in one trial.
    fn trial(&self, trial: u64, max_k: usize) -> Vec<Complex64> {
        let b = (2..=self.p()).fold(self.factor(1, trial), |acc, j| acc * self.factor(j, trial));
        let w = &b * b.adjoint();
        let n0 = self.dims[0] as f64;
        let mut power = w.clone();
        let mut out = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            if k > 1 {
                power = &power * &w;
            }
            out.push(power.trace() / n0);
        }
        out
    }
}

/// Estimates of `τ_0((B B*)^k)` for every `k` in `1..=max_k`, from shared samples.
pub fn product_ensemble_moments(
    spec: &ProductSpec,
    trials: usize,
    max_k: usize,
    exec: Execution,
) -> Result<Vec<MomentEstimate>> {
    if max_k == 0 {
        return Err(Error::InvalidParameter("moment order k must be at least 1".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 trials, got {trials}")));
    }
    let values = exec.map(trials, |t| spec.trial(t as u64, max_k));
    (0..max_k)
        .map(|k| {
            values
                .iter()
                .map(|v| v[k])
                .collect::<MomentAccumulator>()
                .finish(spec.n)
        })
        .collect()
}

/// Estimate of `τ_0((B B*)^k) = E Tr((B B*)^k) / n_0`.
pub fn product_ensemble(spec: &ProductSpec, trials: usize, k: usize, exec: Execution) -> Result<MomentEstimate> {
    let mut all = product_ensemble_moments(spec, trials, k, exec)?;
    Ok(all.pop().expect("k >= 1"))
}
