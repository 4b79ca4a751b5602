//! Closed-form queries answered exactly.

use std::collections::BTreeMap;

use super::config::EnsembleConfig;
use crate::combinatorics::{
    boxtimes_moments, fuss_narayana_multi, jacobi_moments, mp_density_moment_quadrature,
    mp_moment, JacobiParams, MomentSequence, Poly,
};
use crate::families::{meixner_gamma, limit_moment, MeixnerModel};
use crate::rational::{self, Rational};
use crate::surd::Surd;
use crate::word::parse_word;
use crate::{Error, Result};

pub const BOXTIMES_MAX_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    /// `P_k(d_0, ..., d_p)`, optionally with `name=value` substitutions.
    FussNarayana { k: u64, p: usize, eval: Vec<(String, String)> },
    /// `Ψ_1(γ^k)` for the free Meixner operator, checked against its Jacobi moments.
    Meixner { a1: Rational, a2: Rational, b1: Rational, b2: Rational, k: usize },
    /// `m_k(ϱ_{t_1} ⊠ ... ⊠ ϱ_{t_p})`; each `t_i` a rational or a variable name.
    Boxtimes { t: Vec<String>, k: usize },
    /// `m_k(ϱ_t)`, optionally with the density quadrature alongside.
    Mp { k: u64, t: Rational, quadrature: bool },
    /// Limit moment of a block word for the given ensemble.
    Exact { ensemble: EnsembleConfig, word: String, q: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub query: String,
    pub value: String,
    pub details: BTreeMap<String, String>,
}

impl QueryResult {
    fn new(query: &str, value: String) -> Self {
        QueryResult { query: query.into(), value, details: BTreeMap::new() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "query": self.query, "value": self.value, "details": self.details })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A rational literal or a formal variable.
fn poly_value(s: &str) -> Result<Poly> {
    let s = s.trim();
    if is_identifier(s) {
        Ok(Poly::var(s))
    } else {
        rational::parse_rational(s).map(Poly::constant)
    }
}

fn render_poly(p: &Poly) -> String {
    p.as_constant().map_or_else(|| p.to_string(), |c| rational::render_rational(&c))
}

pub fn run_query(q: &Query) -> Result<QueryResult> {
    match q {
        Query::FussNarayana { k, p, eval } => {
            let poly = fuss_narayana_multi(*k, *p)?;
            let mut subs = BTreeMap::new();
            for (name, value) in eval {
                let index = name
                    .strip_prefix('d')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i <= *p)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("unknown variable {name:?}, expected d0..d{p}"))
                    })?;
                if subs.insert(format!("d{index}"), poly_value(value)?).is_some() {
                    return Err(Error::InvalidParameter(format!("{name} assigned twice")));
                }
            }
            Ok(QueryResult::new("fuss-narayana", render_poly(&poly.substitute(&subs))))
        }
        Query::Meixner { a1, a2, b1, b2, k } => {
            let jp = JacobiParams::free_meixner(a1, a2, b1, b2, k / 2 + 1)?;
            let jacobi = jacobi_moments(&jp, *k)?;
            let model: MeixnerModel<Surd> = meixner_gamma("1", a1, a2, b1, b2)?;
            let fock = model.moment(*k)?;
            if fock != jacobi {
                return Err(Error::Numerical(format!(
                    "Fock moment {} disagrees with Jacobi moment {}",
                    rational::render_rational(&fock),
                    rational::render_rational(&jacobi)
                )));
            }
            Ok(QueryResult::new("meixner", rational::render_rational(&jacobi)))
        }
        Query::Boxtimes { t, k } => {
            if t.is_empty() {
                return Err(Error::InvalidParameter("boxtimes needs at least one --t".into()));
            }
            if *k > BOXTIMES_MAX_ORDER {
                return Err(Error::SizeLimit(format!("boxtimes supports k <= {BOXTIMES_MAX_ORDER}")));
            }
            let laws = t
                .iter()
                .map(|s| {
                    let t = poly_value(s)?;
                    Ok(MomentSequence::from_tail((1..=*k as u64).map(|j| mp_moment(j, &t))))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut acc = laws[0].clone();
            for nu in &laws[1..] {
                acc = boxtimes_moments(&acc, nu, *k)?;
            }
            Ok(QueryResult::new("boxtimes", render_poly(acc.get(*k).expect("order k"))))
        }
        Query::Mp { k, t, quadrature } => {
            if !(t > &Rational::from_integer(0.into())) {
                return Err(Error::InvalidParameter("shape t must be positive".into()));
            }
            if *k == 0 {
                return Err(Error::InvalidParameter("moment order k must be at least 1".into()));
            }
            let exact = mp_moment(*k, t);
            let mut res = QueryResult::new("mp", rational::render_rational(&exact));
            if *quadrature {
                let k32 = u32::try_from(*k).map_err(|_| Error::InvalidParameter("k too large".into()))?;
                let numeric = mp_density_moment_quadrature(k32, rational::to_f64(t))?;
                let e = rational::to_f64(&exact);
                res.details.insert("quadrature".into(), numeric.to_string());
                res.details.insert("relative_error".into(), ((numeric - e) / e).abs().to_string());
            }
            Ok(res)
        }
        Query::Exact { ensemble, word, q } => {
            let e = ensemble.resolve()?;
            let w = parse_word(word)?;
            let v = limit_moment(&w, *q, e.kind, e.structure.d(), &e.profile)?;
            Ok(QueryResult::new("exact", rational::render_rational(&v)))
        }
    }
}
