//! Finite-size block Gaussian matrices.
//!
//! A sample `Y(u)` is drawn per label `u` and trial; blocks `S_{p,q} = D_p Y D_q`
//! and symmetric blocks `T_{p,q}` are cut from it, and moments are taken under the
//! partial traces `τ_q(A) = Tr(D_q A D_q) / n_q`.

mod estimate;
mod product;
mod wick;

pub use estimate::{estimate_moment, MomentAccumulator, MomentEstimate};
pub use product::{product_ensemble, product_ensemble_moments, ProductSpec};
pub use wick::{exact_moment_wick, WICK_MAX_LEN, WICK_MAX_N};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::block_model::{BlockStructure, CovarianceProfile, EnsembleKind};
use crate::rational;
use crate::word::{BlockSymbol, Term};
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest matrix size the sampler accepts.
pub const MAX_N: usize = 1024;

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub structure: BlockStructure,
    pub profile: CovarianceProfile,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(
        kind: EnsembleKind,
        structure: BlockStructure,
        profile: CovarianceProfile,
        seed: u64,
    ) -> Result<Self> {
        let dims = structure
            .finite_dims()
            .ok_or_else(|| Error::Config("ensemble needs finite block sizes".into()))?;
        if structure.r() != profile.r() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks but a {}-block covariance profile",
                structure.r(),
                profile.r()
            )));
        }
        if kind == EnsembleKind::Hermitian && !profile.is_hermitian() {
            return Err(Error::Config(
                "hermitian ensemble needs a hermitian covariance profile".into(),
            ));
        }
        let n: usize = dims.iter().sum();
        if n > MAX_N {
            return Err(Error::SizeLimit(format!("n = {n} exceeds {MAX_N}")));
        }
        Ok(EnsembleSpec { kind, structure, profile, seed })
    }

    pub fn n(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn dims(&self) -> &[usize] {
        self.structure.finite_dims().expect("checked in new")
    }

    pub fn r(&self) -> usize {
        self.structure.r()
    }

    fn range(&self, q: usize) -> Result<std::ops::Range<usize>> {
        self.structure
            .block_range(q)
            .ok_or(Error::IndexOutOfRange { index: q, max: self.r() })
    }

    /// Block (1-based) of each row.
    fn row_blocks(&self) -> Vec<usize> {
        self.dims()
            .iter()
            .enumerate()
            .flat_map(|(q, &m)| std::iter::repeat_n(q + 1, m))
            .collect()
    }
}

pub(crate) fn label_hash(label: &str) -> u64 {
    // FNV-1a, so a label's stream does not depend on which other labels exist
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one `(seed, stream name, trial)` triple.
pub(crate) fn stream_rng(seed: u64, name: &str, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(label_hash(name))));
    rng.set_stream(trial);
    rng
}

pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `Y(u)` for one trial.
///
/// Hermitian: off-diagonal entries complex Gaussian with real and imaginary parts
/// of variance `v_{p,q}(u) / 2n` each, `Y_ji = conj(Y_ij)`, real diagonal of
/// variance `v_{q,q}(u) / n`. Ginibre: independent complex entries with
/// `E|Y_ij|^2 = v_{p,q}(u) / n`.
pub fn sample_matrix(spec: &EnsembleSpec, u: &str, trial: u64) -> Result<CMatrix> {
    let v = spec
        .profile
        .matrix(u)
        .ok_or_else(|| Error::MissingCovariance(format!("label {u:?}")))?;
    let n = spec.n();
    let blocks = spec.row_blocks();
    let sd: Vec<Vec<f64>> = v
        .iter()
        .map(|row| row.iter().map(|x| (rational::to_f64(x) / n as f64).sqrt()).collect())
        .collect();
    let mut rng = stream_rng(spec.seed, u, trial);
    let mut y = CMatrix::zeros(n, n);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    match spec.kind {
        EnsembleKind::Hermitian => {
            for i in 0..n {
                for j in i..n {
                    let s = sd[blocks[i] - 1][blocks[j] - 1];
                    if i == j {
                        y[(i, i)] = Complex64::new(s * normal(&mut rng), 0.0);
                    } else {
                        let z = Complex64::new(normal(&mut rng), normal(&mut rng)) * (s * half);
                        y[(i, j)] = z;
                        y[(j, i)] = z.conj();
                    }
                }
            }
        }
        EnsembleKind::Ginibre => {
            for i in 0..n {
                for j in 0..n {
                    let s = sd[blocks[i] - 1][blocks[j] - 1];
                    y[(i, j)] = Complex64::new(normal(&mut rng), normal(&mut rng)) * (s * half);
                }
            }
        }
    }
    Ok(y)
}

/// `S_{p,q} = D_p Y D_q`, or `T_{p,q}`, as an `n x n` matrix.
pub fn block_extract(
    spec: &EnsembleSpec,
    y: &CMatrix,
    symbol: BlockSymbol,
    p: usize,
    q: usize,
) -> Result<CMatrix> {
    let n = spec.n();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} sample for n = {n}",
            y.nrows(),
            y.ncols()
        )));
    }
    let (rp, rq) = (spec.range(p)?, spec.range(q)?);
    let mut out = CMatrix::zeros(n, n);
    let mut copy = |rows: &std::ops::Range<usize>, cols: &std::ops::Range<usize>| {
        let src = y.view((rows.start, cols.start), (rows.len(), cols.len()));
        out.view_mut((rows.start, cols.start), (rows.len(), cols.len()))
            .copy_from(&src);
    };
    match symbol {
        BlockSymbol::S => copy(&rp, &rq),
        BlockSymbol::T => {
            if p > q {
                return Err(Error::InvalidParameter(format!("T[{p},{q}] needs p <= q")));
            }
            copy(&rp, &rq);
            if p != q {
                copy(&rq, &rp);
            }
        }
    }
    Ok(out)
}

/// `τ_q(A) = Tr(D_q A D_q) / n_q`.
pub fn partial_trace(structure: &BlockStructure, q: usize, a: &CMatrix) -> Result<Complex64> {
    let range = structure
        .block_range(q)
        .ok_or(Error::IndexOutOfRange { index: q, max: structure.r() })?;
    let n = structure.n().unwrap_or(0);
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for n = {n}",
            a.nrows(),
            a.ncols()
        )));
    }
    let len = range.len();
    let tr: Complex64 = range.map(|i| a[(i, i)]).sum();
    Ok(tr / len as f64)
}

/// Rectangular nonzero pieces of a term: `(row block, column block, matrix)`.
///
/// Every term has at most one piece per row block, which is what lets a word be
/// evaluated as a single chain of products.
pub(crate) fn term_pieces(
    spec: &EnsembleSpec,
    y: &CMatrix,
    term: &Term,
) -> Result<Vec<(usize, usize, CMatrix)>> {
    let cut = |a: usize, b: usize| -> Result<CMatrix> {
        let (ra, rb) = (spec.range(a)?, spec.range(b)?);
        Ok(y.view((ra.start, rb.start), (ra.len(), rb.len())).into_owned())
    };
    let (p, q) = (term.p, term.q);
    let mut plain = vec![(p, q)];
    if term.symbol == BlockSymbol::T && p != q {
        plain.push((q, p));
    }
    plain
        .into_iter()
        .map(|(a, b)| {
            let m = cut(a, b)?;
            Ok(if term.star { (b, a, m.adjoint()) } else { (a, b, m) })
        })
        .collect()
}
