//! Non-crossing partitions, Kreweras complements, free cumulants and the
//! moment form of free multiplicative convolution.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use super::poly::Ring;
use crate::{Error, Result};

pub const MAX_NC_SIZE: usize = 12;

/// Partition of `{0, .., n-1}`; blocks sorted internally and by least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        let mut seen = vec![false; n];
        for &x in blocks.iter().flatten() {
            if x >= n || seen[x] {
                return Err(Error::InvalidParameter(format!("not a partition of {n} points")));
            }
            seen[x] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(format!("not a partition of {n} points")));
        }
        let p = NCPartition { n, blocks };
        if !p.is_noncrossing() {
            return Err(Error::InvalidParameter(format!("{p} is crossing")));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block sizes, largest first.
    pub fn block_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let mut owner = vec![0usize; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                owner[x] = i;
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if owner[b] == owner[a] {
                    continue;
                }
                for c in b + 1..self.n {
                    if owner[c] != owner[a] {
                        continue;
                    }
                    if (c + 1..self.n).any(|d| owner[d] == owner[b]) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let items: Vec<String> = b.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        write!(f, "}}")
    }
}

type BlockList = Vec<Vec<usize>>;

/// All non-crossing partitions of an interval of length `len`, points `0..len`.
///
/// The block holding point 0 splits the rest into gaps that are filled
/// independently.
fn build_interval(len: usize, memo: &mut HashMap<usize, Vec<BlockList>>) -> Vec<BlockList> {
    if len == 0 {
        return vec![Vec::new()];
    }
    if let Some(v) = memo.get(&len) {
        return v.clone();
    }
    let mut out = Vec::new();
    // subsets of 1..len joining point 0
    for mask in 0u32..(1u32 << (len - 1)) {
        let mut first = vec![0usize];
        first.extend((1..len).filter(|&i| mask & (1 << (i - 1)) != 0));
        let mut partial: Vec<BlockList> = vec![vec![first.clone()]];
        let mut bounds: Vec<usize> = first.clone();
        bounds.push(len);
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0] + 1, w[1]);
            if hi <= lo {
                continue;
            }
            let fillings = build_interval(hi - lo, memo);
            let mut next = Vec::with_capacity(partial.len() * fillings.len());
            for base in &partial {
                for fill in &fillings {
                    let mut blocks = base.clone();
                    blocks.extend(fill.iter().map(|b| b.iter().map(|x| x + lo).collect()));
                    next.push(blocks);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    memo.insert(len, out.clone());
    out
}

fn nc_cache() -> &'static [OnceLock<Vec<NCPartition>>] {
    static CACHE: OnceLock<Vec<OnceLock<Vec<NCPartition>>>> = OnceLock::new();
    CACHE.get_or_init(|| (0..=MAX_NC_SIZE).map(|_| OnceLock::new()).collect())
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_NC_SIZE {
        Err(Error::SizeLimit(format!(
            "non-crossing partitions supported for 1 <= n <= {MAX_NC_SIZE}, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Every non-crossing partition of `n` points, in canonical order. Cached.
pub fn enumerate_nc(n: usize) -> Result<&'static [NCPartition]> {
    check_size(n)?;
    Ok(nc_cache()[n].get_or_init(|| {
        let mut memo = HashMap::new();
        let mut all: Vec<NCPartition> = build_interval(n, &mut memo)
            .into_iter()
            .map(|blocks| {
                let mut p = NCPartition { n, blocks };
                for b in &mut p.blocks {
                    b.sort_unstable();
                }
                p.blocks.sort();
                p
            })
            .collect();
        all.sort();
        all
    }))
}

/// Kreweras complement, computed as the cycles of `π^{-1} ∘ γ` with
/// `γ = (0 1 ... n-1)` and each block of `π` read as an increasing cycle.
pub fn kreweras(p: &NCPartition) -> NCPartition {
    let n = p.n;
    let mut inv = vec![0usize; n];
    for b in &p.blocks {
        for (i, &x) in b.iter().enumerate() {
            let next = b[(i + 1) % b.len()];
            inv[next] = x;
        }
    }
    let perm: Vec<usize> = (0..n).map(|i| inv[(i + 1) % n]).collect();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        cycle.sort_unstable();
        blocks.push(cycle);
    }
    blocks.sort();
    NCPartition { n, blocks }
}

type TypePair = (Vec<usize>, Vec<usize>);
type TypeCounts = Vec<(TypePair, u64)>;

/// Counts of `(type(π), type(K(π)))` over `NC(n)`.
fn type_pairs(n: usize) -> Result<&'static [(TypePair, u64)]> {
    check_size(n)?;
    static CACHE: OnceLock<Vec<OnceLock<TypeCounts>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=MAX_NC_SIZE).map(|_| OnceLock::new()).collect());
    let all = enumerate_nc(n)?;
    Ok(cache[n].get_or_init(|| {
        let mut counts: BTreeMap<TypePair, u64> = BTreeMap::new();
        for p in all {
            *counts.entry((p.block_type(), kreweras(p).block_type())).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }))
}

fn multiplicative<R: Ring>(seq: &[R], block_type: &[usize]) -> R {
    block_type.iter().fold(R::one(), |acc, &s| acc * seq[s].clone())
}

fn count<R: Ring>(c: u64) -> R {
    R::from_rational(&crate::rational::int(c as i64))
}

/// `m_0 = 1, m_1, ..., m_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<R>(Vec<R>);

impl<R: Ring> MomentSequence<R> {
    pub fn new(m: Vec<R>) -> Result<Self> {
        match m.first() {
            Some(m0) if m0.is_one() => Ok(MomentSequence(m)),
            _ => Err(Error::InvalidParameter("moment sequences start with m_0 = 1".into())),
        }
    }

    /// Builds `m_0 = 1` followed by `rest`.
    pub fn from_tail(rest: impl IntoIterator<Item = R>) -> Self {
        let mut m = vec![R::one()];
        m.extend(rest);
        MomentSequence(m)
    }

    /// Highest moment order stored.
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&R> {
        self.0.get(k)
    }

    pub fn as_slice(&self) -> &[R] {
        &self.0
    }
}

/// Free cumulants `κ_1..κ_K` of a moment sequence; index 0 of the result is zero.
pub fn moments_to_free_cumulants<R: Ring>(m: &MomentSequence<R>) -> Result<Vec<R>> {
    let order = m.order();
    let mut kappa = vec![R::zero(); order + 1];
    for n in 1..=order {
        let mut rest = R::zero();
        for ((t, _), c) in type_pairs(n)? {
            if t.len() == 1 {
                continue;
            }
            rest = rest + count::<R>(*c) * multiplicative(&kappa, t);
        }
        kappa[n] = m.0[n].clone() - rest;
    }
    Ok(kappa)
}

/// `m_n = sum over NC(n) of products of κ_{|B|}`; `kappa[0]` is ignored.
pub fn free_cumulants_to_moments<R: Ring>(kappa: &[R]) -> Result<MomentSequence<R>> {
    let order = kappa.len().saturating_sub(1);
    let mut m = vec![R::one()];
    for n in 1..=order {
        let mut acc = R::zero();
        for ((t, _), c) in type_pairs(n)? {
            acc = acc + count::<R>(*c) * multiplicative(kappa, t);
        }
        m.push(acc);
    }
    Ok(MomentSequence(m))
}

/// `m_n(μ ⊠ ν) = sum_{π ∈ NC(n)} κ_π(μ) m_{K(π)}(ν)` for `n <= order`.
pub fn boxtimes_moments<R: Ring>(
    mu: &MomentSequence<R>,
    nu: &MomentSequence<R>,
    order: usize,
) -> Result<MomentSequence<R>> {
    if order > mu.order() || order > nu.order() {
        return Err(Error::InvalidParameter(format!(
            "need moments up to order {order}, have {} and {}",
            mu.order(),
            nu.order()
        )));
    }
    let kappa = moments_to_free_cumulants(&MomentSequence(mu.0[..=order].to_vec()))?;
    let mut out = vec![R::one()];
    for n in 1..=order {
        let mut acc = R::zero();
        for ((t, kt), c) in type_pairs(n)? {
            acc = acc + count::<R>(*c) * multiplicative(&kappa, t) * multiplicative(&nu.0, kt);
        }
        out.push(acc);
    }
    Ok(MomentSequence(out))
}
