//! Lower bounds on the optimal heat, each with a checkable certificate.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lp::{self, LinearProgram, LpError};
use crate::matching::{
    enumerate_maximal_matchings, maximum_matching_size, CapExceeded, MatchingSet,
    DEFAULT_MATCHING_EDGE_CAP,
};
use crate::model::OpsInstance;
use crate::rational::{format_rational, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundConfig {
    pub matching_cap: usize,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            matching_cap: DEFAULT_MATCHING_EDGE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("edge {0} is not in the instance")]
    InvalidSubset(usize),
    #[error("subset lists edge {0} twice")]
    DuplicateInSubset(usize),
    #[error("dual weights must be non-negative, one per edge, and sum to one")]
    InvalidWeights,
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundMethod {
    Trivial,
    Bamboo,
    Mass,
    PolyDensity,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 4] = [
        BoundMethod::Trivial,
        BoundMethod::Bamboo,
        BoundMethod::Mass,
        BoundMethod::PolyDensity,
    ];
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMethod::Trivial => "trivial",
            BoundMethod::Bamboo => "bamboo",
            BoundMethod::Mass => "mass",
            BoundMethod::PolyDensity => "polydensity",
        })
    }
}

impl FromStr for BoundMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundMethod::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown bound method `{s}`"))
    }
}

/// Per-edge weights `z >= 0` summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualWeights(Vec<Rational>);

impl DualWeights {
    pub fn new(z: Vec<Rational>) -> Result<Self, BoundError> {
        if z.is_empty() || z.iter().any(Signed::is_negative) || !z.iter().sum::<Rational>().is_one() {
            return Err(BoundError::InvalidWeights);
        }
        Ok(DualWeights(z))
    }
    /// `z_e = g_e / G`, the weights behind the mass bound.
    pub fn proportional_to_growth(instance: &OpsInstance) -> Result<Self, BoundError> {
        let total = instance.total_growth();
        if total.is_zero() {
            return Err(BoundError::InvalidWeights);
        }
        DualWeights::new(instance.growth().iter().map(|g| g / &total).collect())
    }
    pub fn weights(&self) -> &[Rational] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    None,
    Person(usize),
    Subset {
        edges: Vec<usize>,
        inner: Box<BoundReport>,
    },
    Dual(DualWeights),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub method: String,
    pub value: Rational,
    pub certificate: Certificate,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.method, format_rational(&self.value))
    }
}

pub fn trivial_bound(instance: &OpsInstance) -> BoundReport {
    let delta = instance.graph().max_degree() as i64;
    let value = (int(delta) * instance.min_growth()).max(instance.max_growth());
    BoundReport {
        method: BoundMethod::Trivial.to_string(),
        value,
        certificate: Certificate::None,
    }
}

pub fn person_load(instance: &OpsInstance, p: usize) -> Rational {
    instance
        .graph()
        .incident(p)
        .iter()
        .map(|&e| &instance.growth()[e])
        .sum()
}

pub fn bamboo_bound(instance: &OpsInstance) -> BoundReport {
    let mut best = (Rational::zero(), 0);
    for p in 0..instance.graph().num_persons() {
        let load = person_load(instance, p);
        if load > best.0 {
            best = (load, p);
        }
    }
    BoundReport {
        method: BoundMethod::Bamboo.to_string(),
        value: best.0,
        certificate: Certificate::Person(best.1),
    }
}

/// Total growth divided by the maximum matching size.
pub fn total_growth_bound(instance: &OpsInstance) -> BoundReport {
    let m = maximum_matching_size(instance.graph());
    let (value, certificate) = if m == 0 {
        (Rational::zero(), Certificate::None)
    } else {
        (
            instance.total_growth() / int(m as i64),
            Certificate::Dual(DualWeights::proportional_to_growth(instance).expect("non-empty")),
        )
    };
    BoundReport {
        method: BoundMethod::Mass.to_string(),
        value,
        certificate,
    }
}

/// `1 / max_M sum_{e in M} z_e / g_e` over maximal matchings `M`.
pub fn dual_value(instance: &OpsInstance, z: &DualWeights, cap: usize) -> Result<Rational, BoundError> {
    if z.weights().len() != instance.graph().num_edges() {
        return Err(BoundError::InvalidWeights);
    }
    let set = enumerate_maximal_matchings(instance.graph(), cap)?;
    Ok(dual_value_over(instance, z, &set))
}

fn dual_value_over(instance: &OpsInstance, z: &DualWeights, set: &MatchingSet) -> Rational {
    let load = |m: &Vec<usize>| -> Rational {
        m.iter()
            .map(|&e| &z.weights()[e] / &instance.growth()[e])
            .sum()
    };
    let best = set.matchings.iter().map(load).max().unwrap_or_else(Rational::zero);
    Rational::one() / best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDensity {
    pub value: Rational,
    /// Optimal dual weights; `dual_value` of these equals `value`.
    pub weights: DualWeights,
    /// Optimum of the dual, equal to `1 / value`.
    pub dual_objective: Rational,
    /// Optimum of the primal, the fraction of days each edge is guaranteed.
    pub primal_objective: Rational,
    /// Non-zero matching weights of the primal optimum.
    pub primal: Vec<(Vec<usize>, Rational)>,
}

/// Exact fractional relaxation: distribute one day over maximal matchings so
/// that the smallest `share(e) / g_e` is as large as possible.
pub fn poly_density(instance: &OpsInstance, cap: usize) -> Result<PolyDensity, BoundError> {
    let set = enumerate_maximal_matchings(instance.graph(), cap)?;
    let m = instance.graph().num_edges();
    if m == 0 {
        return Err(BoundError::InvalidWeights);
    }
    // Columns: one per matching, then the level variable.
    let k = set.len();
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    let mut rows = Vec::with_capacity(m + 1);
    let mut budget = vec![Rational::one(); k + 1];
    budget[k] = Rational::zero();
    rows.push(budget);
    for e in 0..m {
        let mut row = vec![Rational::zero(); k + 1];
        let inv = Rational::one() / &instance.growth()[e];
        for (j, matching) in set.matchings.iter().enumerate() {
            if matching.binary_search(&e).is_ok() {
                row[j] = -inv.clone();
            }
        }
        row[k] = Rational::one();
        rows.push(row);
    }
    let mut rhs = vec![Rational::zero(); m + 1];
    rhs[0] = Rational::one();
    let sol = lp::solve(&LinearProgram { objective, rows, rhs })?;
    let weights = DualWeights::new(sol.dual[1..].to_vec())?;
    let dual_objective = sol.dual[0].clone();
    let primal = set
        .matchings
        .iter()
        .zip(&sol.primal)
        .filter(|(_, y)| !y.is_zero())
        .map(|(mt, y)| (mt.clone(), y.clone()))
        .collect();
    Ok(PolyDensity {
        value: Rational::one() / &sol.value,
        weights,
        dual_objective,
        primal_objective: sol.value,
        primal,
    })
}

pub fn poly_density_bound(instance: &OpsInstance, cap: usize) -> Result<BoundReport, BoundError> {
    if instance.graph().num_edges() == 0 {
        return Ok(BoundReport {
            method: BoundMethod::PolyDensity.to_string(),
            value: Rational::zero(),
            certificate: Certificate::None,
        });
    }
    let pd = poly_density(instance, cap)?;
    Ok(BoundReport {
        method: BoundMethod::PolyDensity.to_string(),
        value: pd.value,
        certificate: Certificate::Dual(pd.weights),
    })
}

pub fn bound(instance: &OpsInstance, method: BoundMethod, config: BoundConfig) -> Result<BoundReport, BoundError> {
    Ok(match method {
        BoundMethod::Trivial => trivial_bound(instance),
        BoundMethod::Bamboo => bamboo_bound(instance),
        BoundMethod::Mass => total_growth_bound(instance),
        BoundMethod::PolyDensity => poly_density_bound(instance, config.matching_cap)?,
    })
}

/// Applies `inner` to the instance restricted to `subset`; valid for the whole instance.
pub fn subset_bound(
    instance: &OpsInstance,
    subset: &[usize],
    inner: BoundMethod,
    config: BoundConfig,
) -> Result<BoundReport, BoundError> {
    let mut seen = vec![false; instance.graph().num_edges()];
    for &e in subset {
        match seen.get_mut(e) {
            None => return Err(BoundError::InvalidSubset(e)),
            Some(true) => return Err(BoundError::DuplicateInSubset(e)),
            Some(s) => *s = true,
        }
    }
    let report = bound(&instance.restrict(subset), inner, config)?;
    Ok(BoundReport {
        method: format!("subset({inner})"),
        value: report.value.clone(),
        certificate: Certificate::Subset {
            edges: subset.to_vec(),
            inner: Box::new(report),
        },
    })
}

/// Largest of the simple bounds and, when the graph is small enough, the poly density.
pub fn best_bound(instance: &OpsInstance, config: BoundConfig) -> BoundReport {
    let mut best = trivial_bound(instance);
    let mut candidates = vec![bamboo_bound(instance), total_growth_bound(instance)];
    if let Ok(pd) = poly_density_bound(instance, config.matching_cap) {
        candidates.push(pd);
    }
    for c in candidates {
        if c.value > best.value {
            best = c;
        }
    }
    best
}

/// Recomputes the value from the certificate alone.
pub fn verify_certificate(instance: &OpsInstance, report: &BoundReport, config: BoundConfig) -> Result<bool, BoundError> {
    Ok(match &report.certificate {
        Certificate::None => {
            let expected = match report.method.as_str() {
                "trivial" => trivial_bound(instance).value,
                _ => Rational::zero(),
            };
            expected == report.value
        }
        Certificate::Person(p) => {
            *p < instance.graph().num_persons() && person_load(instance, *p) == report.value
        }
        Certificate::Subset { edges, inner } => {
            inner.value == report.value
                && verify_certificate(&instance.restrict(edges), inner, config)?
        }
        Certificate::Dual(z) => dual_value(instance, z, config.matching_cap)? == report.value,
    })
}
