//! Closed-form limit moments.

mod nc;
mod poly;
mod quadrature;

pub use nc::{
    boxtimes_moments, enumerate_nc, free_cumulants_to_moments, kreweras, moments_to_free_cumulants,
    MomentSequence, NCPartition, MAX_NC_SIZE,
};
pub use poly::{Monomial, Poly, Ring};
pub use quadrature::{adaptive_simpson, mp_density_moment_quadrature};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, binomial, from_biguint, Rational};
use crate::{Error, Result};

/// `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

fn binom<R: Ring>(n: u64, k: u64) -> R {
    R::from_rational(&from_biguint(binomial(n, k)))
}

fn inverse<R: Ring>(k: u64) -> R {
    R::from_rational(&rational::ratio(1, k as i64))
}

/// `N_k(t) = sum_{j=1}^k (1/j) binom(k-1, j-1) binom(k, j-1) t^j`.
pub fn narayana<R: Ring>(k: u64, t: &R) -> R {
    (1..=k).fold(R::zero(), |acc, j| {
        acc + inverse::<R>(j) * binom::<R>(k - 1, j - 1) * binom::<R>(k, j - 1) * t.pow_u(j as u32)
    })
}

/// Marchenko-Pastur moment `m_k(ϱ_t) = sum_{i+j=k+1} (1/k) binom(k,i) binom(k,j) t^j`.
pub fn mp_moment<R: Ring>(k: u64, t: &R) -> R {
    if k == 0 {
        return R::one();
    }
    (1..=k).fold(R::zero(), |acc, j| {
        let i = k + 1 - j;
        acc + inverse::<R>(k) * binom::<R>(k, i) * binom::<R>(k, j) * t.pow_u(j as u32)
    })
}

/// Fuss-Narayana `Q_k(t) = sum_{j=1}^k (1/j) binom(k-1, j-1) binom(pk, j-1) t^j`.
pub fn fuss_narayana_q<R: Ring>(k: u64, p: u64, t: &R) -> R {
    (1..=k).fold(R::zero(), |acc, j| {
        acc + inverse::<R>(j) * binom::<R>(k - 1, j - 1) * binom::<R>(p * k, j - 1) * t.pow_u(j as u32)
    })
}

/// Multivariate Fuss-Narayana `P_k(d_0, ..., d_p)` evaluated at `d`:
/// the sum over `j_0 + ... + j_p = pk + 1`, `0 <= j_i <= k`, of
/// `(1/k) prod binom(k, j_i) d_0^{j_0 - 1} d_1^{j_1} ... d_p^{j_p}`.
pub fn fuss_narayana_eval<R: Ring>(k: u64, d: &[R]) -> Result<R> {
    if k == 0 {
        return Err(Error::InvalidParameter("P_k is defined for k >= 1".into()));
    }
    if d.len() < 2 {
        return Err(Error::InvalidParameter("P_k needs d_0 and at least d_1".into()));
    }
    let p = (d.len() - 1) as u64;
    let target = p * k + 1;
    let mut total = R::zero();
    let mut js = vec![0u64; d.len()];
    compositions(&mut js, 0, target, k, &mut |js| {
        // j_0 >= 1 always holds since the others sum to at most pk
        let mut term = inverse::<R>(k);
        for (i, &j) in js.iter().enumerate() {
            term = term * binom::<R>(k, j);
            let e = if i == 0 { j - 1 } else { j };
            term = term * d[i].pow_u(e as u32);
        }
        total = total.clone() + term;
    });
    Ok(total)
}

fn compositions(js: &mut [u64], i: usize, remaining: u64, cap: u64, f: &mut impl FnMut(&[u64])) {
    if i == js.len() - 1 {
        if remaining <= cap {
            js[i] = remaining;
            f(js);
        }
        return;
    }
    let slots_after = (js.len() - i - 1) as u64;
    for j in 0..=cap.min(remaining) {
        if remaining - j > slots_after * cap {
            continue;
        }
        js[i] = j;
        compositions(js, i + 1, remaining - j, cap, f);
    }
}

/// `P_k` as a polynomial in the variables `d0, ..., dp`.
pub fn fuss_narayana_multi(k: u64, p: usize) -> Result<Poly> {
    if p == 0 {
        return Err(Error::InvalidParameter("P_k needs p >= 1".into()));
    }
    let vars: Vec<Poly> = (0..=p).map(|i| Poly::var(&format!("d{i}"))).collect();
    fuss_narayana_eval(k, &vars)
}

/// Jacobi parameters: diagonal `alpha[0], alpha[1], ...` and off-diagonal
/// squares `beta[0], beta[1], ...` (so `beta[0] = β_1` couples levels 0 and 1).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParams {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl JacobiParams {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self> {
        if let Some(b) = beta.iter().find(|b| !b.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi beta must be positive, got {}",
                rational::render_rational(b)
            )));
        }
        Ok(JacobiParams { alpha, beta })
    }

    /// Free Meixner parameters `(α1, α2, α2, ...)`, `(β1, β2, β2, ...)` to `depth` levels.
    pub fn free_meixner(
        a1: &Rational,
        a2: &Rational,
        b1: &Rational,
        b2: &Rational,
        depth: usize,
    ) -> Result<Self> {
        let depth = depth.max(1);
        let mut alpha = vec![a1.clone()];
        alpha.resize(depth, a2.clone());
        let mut beta = vec![b1.clone()];
        beta.resize(depth, b2.clone());
        Self::new(alpha, beta)
    }
}

/// `<e_0, J^k e_0>` for the tridiagonal Jacobi operator, summed over weighted
/// Motzkin paths so that only `β` (never `sqrt β`) appears.
pub fn jacobi_moments(jp: &JacobiParams, k: usize) -> Result<Rational> {
    let depth = k / 2 + 1;
    if jp.alpha.len() < depth.min(k + 1).max(1) || jp.beta.len() < k / 2 {
        return Err(Error::InvalidParameter(format!(
            "Jacobi parameters too short for moment {k}"
        )));
    }
    let mut level = vec![Rational::zero(); depth + 1];
    level[0] = Rational::one();
    for step in 0..k {
        let mut next = vec![Rational::zero(); depth + 1];
        // levels above the remaining steps can't return to 0
        let reach = (k - step).min(depth);
        for (j, w) in level.iter().enumerate() {
            if w.is_zero() || j > reach {
                continue;
            }
            if let Some(a) = jp.alpha.get(j) {
                next[j] += w * a;
            }
            if j < depth {
                next[j + 1] += w.clone();
            }
            if j > 0 {
                next[j - 1] += w * &jp.beta[j - 1];
            }
        }
        level = next;
    }
    Ok(level.swap_remove(0))
}
