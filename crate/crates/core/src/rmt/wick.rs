//! Exact finite-size expectations by Wick's theorem.
//!
//! The trace of a word is a sum over cyclic index tuples `i_0, ..., i_{m-1}` of
//! products of entries. Each pairing of the entries forces some indices equal;
//! what remains is a count of free index classes, one factor `n_block` per class,
//! so the cost does not grow with `n`.

use num_traits::Zero;

use super::EnsembleSpec;
use crate::block_model::{check_index, EnsembleKind};
use crate::rational::{self, Rational};
use crate::word::{BlockSymbol, BlockWord};
use crate::{Error, Result};

pub const WICK_MAX_LEN: usize = 8;
pub const WICK_MAX_N: usize = 1024;

/// Entry `Y(label)[i_row, i_col]`, conjugated when `conj`; positions index the cycle.
#[derive(Debug, Clone, Copy)]
struct Factor<'a> {
    label: &'a str,
    row: usize,
    col: usize,
    conj: bool,
}

/// `E τ_q(word)` at the ensemble's finite block sizes, exactly.
pub fn exact_moment_wick(spec: &EnsembleSpec, word: &BlockWord, q: usize) -> Result<Rational> {
    if word.is_empty() {
        return Err(Error::InvalidParameter("empty block word".into()));
    }
    if word.len() > WICK_MAX_LEN {
        return Err(Error::SizeLimit(format!(
            "Wick expansion supports words up to length {WICK_MAX_LEN}, got {}",
            word.len()
        )));
    }
    if spec.n() > WICK_MAX_N {
        return Err(Error::SizeLimit(format!("Wick expansion supports n <= {WICK_MAX_N}")));
    }
    check_index(q, spec.r())?;
    word.bind(spec.r(), |l| spec.profile.matrix(l).is_some())?;
    let m = word.len();
    if m % 2 == 1 {
        return Ok(Rational::zero());
    }
    let mut total = Rational::zero();
    let mut blocks = vec![0usize; m];
    let mut factors = Vec::with_capacity(m);
    choose_pieces(spec, word, q, 0, q, &mut blocks, &mut factors, &mut total)?;
    Ok(total / rational::int(spec.dims()[q - 1] as i64))
}

/// Walks the chain of nonzero pieces; `blocks[k]` is the block of index `i_k`.
#[allow(clippy::too_many_arguments)]
fn choose_pieces<'a>(
    spec: &EnsembleSpec,
    word: &'a BlockWord,
    q: usize,
    k: usize,
    block: usize,
    blocks: &mut Vec<usize>,
    factors: &mut Vec<Factor<'a>>,
    total: &mut Rational,
) -> Result<()> {
    let m = word.len();
    if k == m {
        if block == q {
            *total += pairings_sum(spec, blocks, factors)?;
        }
        return Ok(());
    }
    blocks[k] = block;
    let t = &word.terms[k];
    let mut plain = vec![(t.p, t.q)];
    if t.symbol == BlockSymbol::T && t.p != t.q {
        plain.push((t.q, t.p));
    }
    let next = (k + 1) % m;
    for (a, b) in plain {
        // X = Y on N_a x N_b, or X* on N_b x N_a with entries conj(Y[i_{k+1}, i_k])
        let (from, to, f) = if t.star {
            (b, a, Factor { label: &t.label, row: next, col: k, conj: true })
        } else {
            (a, b, Factor { label: &t.label, row: k, col: next, conj: false })
        };
        if from != block {
            continue;
        }
        factors.push(f);
        choose_pieces(spec, word, q, k + 1, to, blocks, factors, total)?;
        factors.pop();
    }
    Ok(())
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn pairings_sum(spec: &EnsembleSpec, blocks: &[usize], factors: &[Factor]) -> Result<Rational> {
    let hermitian = spec.kind == EnsembleKind::Hermitian;
    // for Hermitian matrices conj(Y_ab) = Y_ba
    let fs: Vec<Factor> = factors
        .iter()
        .map(|f| {
            if hermitian && f.conj {
                Factor { label: f.label, row: f.col, col: f.row, conj: false }
            } else {
                *f
            }
        })
        .collect();
    let n = rational::int(spec.n() as i64);
    let mut total = Rational::zero();
    let mut pairs = Vec::with_capacity(fs.len() / 2);
    let mut used = vec![false; fs.len()];
    enumerate_pairings(&mut used, &mut pairs, &mut |pairs| {
        let mut uf = UnionFind((0..blocks.len()).collect());
        let mut weight = Rational::from_integer(1.into());
        for &(x, y) in pairs {
            let (f, g) = (&fs[x], &fs[y]);
            if f.label != g.label {
                return Ok(());
            }
            if hermitian {
                // E[Y_ab Y_cd] = δ_ad δ_bc v / n
                uf.union(f.row, g.col);
                uf.union(f.col, g.row);
            } else {
                // E[Y_ab conj(Y_cd)] = δ_ac δ_bd v / n, all other pairs vanish
                if f.conj == g.conj {
                    return Ok(());
                }
                uf.union(f.row, g.row);
                uf.union(f.col, g.col);
            }
            let v = spec.profile.get(f.label, blocks[f.row], blocks[f.col])?;
            weight *= v / &n;
        }
        let mut class_block = vec![0usize; blocks.len()];
        for (pos, &b) in blocks.iter().enumerate() {
            let root = uf.find(pos);
            if class_block[root] == 0 {
                class_block[root] = b;
            } else if class_block[root] != b {
                return Ok(());
            }
        }
        for &b in class_block.iter().filter(|&&b| b != 0) {
            weight *= rational::int(spec.dims()[b - 1] as i64);
        }
        total += weight;
        Ok(())
    })?;
    Ok(total)
}

fn enumerate_pairings(
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]) -> Result<()>,
) -> Result<()> {
    let Some(first) = used.iter().position(|u| !u) else {
        return f(pairs);
    };
    used[first] = true;
    for other in first + 1..used.len() {
        if used[other] {
            continue;
        }
        used[other] = true;
        pairs.push((first, other));
        enumerate_pairings(used, pairs, f)?;
        pairs.pop();
        used[other] = false;
    }
    used[first] = false;
    Ok(())
}
