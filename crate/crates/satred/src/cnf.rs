//! 3-CNF formulas with a clause threshold, DIMACS text, and a brute-force MAX-SAT oracle.

use std::fmt;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }
    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }
    /// DIMACS form: `var + 1`, negated for negative literals.
    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 {
            return None;
        }
        let var = (code.unsigned_abs() - 1) as usize;
        Some(Literal { var, positive: code > 0 })
    }
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var + 1)
        } else {
            write!(f, "!x{}", self.var + 1)
        }
    }
}

pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {clause} has {len} literals, at most 3 allowed")]
    ClauseTooLong { clause: usize, len: usize },
    #[error("clause {clause} mentions variable {var}, but there are only {num_vars}")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("clause {clause} repeats literal {literal}")]
    DuplicateLiteral { clause: usize, literal: Literal },
    #[error("threshold {k} exceeds clause count {m}")]
    ThresholdTooLarge { k: usize, m: usize },
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    threshold: usize,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>, threshold: usize) -> Result<Self, CnfError> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::EmptyClause(i));
            }
            if clause.len() > 3 {
                return Err(CnfError::ClauseTooLong { clause: i, len: clause.len() });
            }
            for (j, lit) in clause.iter().enumerate() {
                if lit.var >= num_vars {
                    return Err(CnfError::VariableOutOfRange {
                        clause: i,
                        var: lit.var + 1,
                        num_vars,
                    });
                }
                if clause[..j].contains(lit) {
                    return Err(CnfError::DuplicateLiteral { clause: i, literal: *lit });
                }
            }
        }
        if threshold > clauses.len() {
            return Err(CnfError::ThresholdTooLarge { k: threshold, m: clauses.len() });
        }
        Ok(CnfFormula { num_vars, clauses, threshold })
    }

    /// Builds from DIMACS-style signed literals.
    pub fn from_codes(num_vars: usize, clauses: &[&[i64]], threshold: usize) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.iter()
                    .map(|&code| Literal::from_dimacs(code).ok_or(CnfError::EmptyClause(i)))
                    .collect::<Result<Clause, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        CnfFormula::new(num_vars, clauses, threshold)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }
    pub fn threshold(&self) -> usize {
        self.threshold
    }
    pub fn with_threshold(&self, threshold: usize) -> Result<Self, CnfError> {
        CnfFormula::new(self.num_vars, self.clauses.clone(), threshold)
    }

    pub fn clause_satisfied(&self, clause: usize, assignment: &[bool]) -> bool {
        self.clauses[clause].iter().any(|l| l.eval(assignment))
    }

    pub fn satisfied_count(&self, assignment: &[bool]) -> usize {
        (0..self.clauses.len())
            .filter(|&c| self.clause_satisfied(c, assignment))
            .count()
    }

    /// Number of times each literal occurs, indexed `[var][positive as usize]`.
    pub fn occurrences(&self) -> Vec<[usize; 2]> {
        let mut counts = vec![[0; 2]; self.num_vars];
        for lit in self.clauses.iter().flatten() {
            counts[lit.var][lit.positive as usize] += 1;
        }
        counts
    }
}

pub fn parse_dimacs(text: &str, threshold: usize) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Clause = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(CnfError::Dimacs { line, msg: "expected `p cnf <vars> <clauses>`".into() });
            }
            let n = parts[2].parse().map_err(|_| CnfError::Dimacs { line, msg: "bad variable count".into() })?;
            let m = parts[3].parse().map_err(|_| CnfError::Dimacs { line, msg: "bad clause count".into() })?;
            if header.replace((n, m)).is_some() {
                return Err(CnfError::Dimacs { line, msg: "duplicate header".into() });
            }
            continue;
        }
        let Some((n, _)) = header else {
            return Err(CnfError::Dimacs { line, msg: "clause before header".into() });
        };
        for token in trimmed.split_whitespace() {
            let code: i64 = token
                .parse()
                .map_err(|_| CnfError::Dimacs { line, msg: format!("bad literal `{token}`") })?;
            match Literal::from_dimacs(code) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(lit) if lit.var >= n => {
                    return Err(CnfError::Dimacs { line, msg: format!("variable {} out of range", lit.var + 1) })
                }
                Some(lit) => current.push(lit),
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(CnfError::Dimacs { line: 1, msg: "missing `p cnf` header".into() });
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != m {
        return Err(CnfError::Dimacs {
            line: text.lines().count().max(1),
            msg: format!("header announces {m} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::new(n, clauses, threshold)
}

pub fn emit_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len());
    for clause in &formula.clauses {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Clauses of one to three distinct variables with random signs; the threshold is zero.
pub fn random_formula(rng: &mut impl Rng, num_vars: usize, num_clauses: usize) -> CnfFormula {
    assert!(num_vars > 0 || num_clauses == 0, "clauses need a variable");
    let clauses = (0..num_clauses)
        .map(|_| {
            let width = rng.gen_range(1..=num_vars.min(3));
            sample(rng, num_vars, width)
                .into_iter()
                .map(|var| Literal { var, positive: rng.gen() })
                .collect()
        })
        .collect();
    CnfFormula::new(num_vars, clauses, 0).expect("generated clauses are well formed")
}

/// `count` random formulas cycling through every size up to `max_vars` variables and
/// `max_clauses` clauses, so small suites still cover each shape.
pub fn formula_suite(rng: &mut impl Rng, count: usize, max_vars: usize, max_clauses: usize) -> Vec<CnfFormula> {
    let shapes: Vec<(usize, usize)> = (1..=max_vars)
        .flat_map(|n| (1..=max_clauses).map(move |m| (n, m)))
        .collect();
    shapes
        .iter()
        .cycle()
        .take(count)
        .map(|&(n, m)| random_formula(rng, n, m))
        .collect()
}

pub const ORACLE_MAX_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{num_vars} variables exceed the brute-force limit of {limit}")]
pub struct TooManyVariables {
    pub num_vars: usize,
    pub limit: usize,
}

/// Decodes bit `i` of `bits` as the value of variable `i`.
pub fn assignment_from_bits(bits: u64, num_vars: usize) -> Vec<bool> {
    (0..num_vars).map(|i| bits >> i & 1 == 1).collect()
}

/// Largest number of simultaneously satisfiable clauses, with the first assignment reaching it.
pub fn max3sat_best(formula: &CnfFormula) -> Result<(usize, Vec<bool>), TooManyVariables> {
    let n = formula.num_vars;
    if n > ORACLE_MAX_VARS {
        return Err(TooManyVariables { num_vars: n, limit: ORACLE_MAX_VARS });
    }
    let mut best = (0, vec![false; n]);
    for bits in 0..1u64 << n {
        let a = assignment_from_bits(bits, n);
        let count = formula.satisfied_count(&a);
        if count > best.0 || bits == 0 {
            best = (count, a);
        }
        if best.0 == formula.clauses.len() {
            break;
        }
    }
    Ok(best)
}

pub fn max3sat_oracle(formula: &CnfFormula) -> Result<usize, TooManyVariables> {
    max3sat_best(formula).map(|(count, _)| count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_clauses() {
        assert_eq!(CnfFormula::from_codes(2, &[&[]], 0), Err(CnfError::EmptyClause(0)));
        assert!(matches!(
            CnfFormula::from_codes(2, &[&[1, 3]], 0),
            Err(CnfError::VariableOutOfRange { var: 3, .. })
        ));
        assert!(matches!(
            CnfFormula::from_codes(2, &[&[1, -2, 1]], 0),
            Err(CnfError::DuplicateLiteral { .. })
        ));
        assert!(matches!(
            CnfFormula::from_codes(4, &[&[1, 2, 3, 4]], 0),
            Err(CnfError::ClauseTooLong { len: 4, .. })
        ));
        assert!(matches!(
            CnfFormula::from_codes(1, &[&[1]], 2),
            Err(CnfError::ThresholdTooLarge { k: 2, m: 1 })
        ));
        // A clause with both polarities is allowed.
        assert!(CnfFormula::from_codes(1, &[&[1, -1]], 1).is_ok());
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c sample\np cnf 3 2\n1 -2 0\n3\n0\n";
        let f = parse_dimacs(text, 1).unwrap();
        assert_eq!(f.clauses(), &[vec![Literal::pos(0), Literal::neg(1)], vec![Literal::pos(2)]]);
        let emitted = emit_dimacs(&f);
        assert_eq!(emitted, "p cnf 3 2\n1 -2 0\n3 0\n");
        assert_eq!(parse_dimacs(&emitted, 1).unwrap(), f);
    }

    #[test]
    fn dimacs_errors_carry_lines() {
        assert!(matches!(parse_dimacs("1 2 0\n", 0), Err(CnfError::Dimacs { line: 1, .. })));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0\n", 0),
            Err(CnfError::Dimacs { line: 2, .. })
        ));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 0\n", 0), Err(CnfError::Dimacs { .. })));
    }

    #[test]
    fn oracle_small_cases() {
        let empty = CnfFormula::new(0, vec![], 0).unwrap();
        assert_eq!(max3sat_oracle(&empty), Ok(0));
        let contra = CnfFormula::from_codes(1, &[&[1], &[-1]], 0).unwrap();
        assert_eq!(max3sat_oracle(&contra), Ok(1));
        let big = CnfFormula::new(21, vec![], 0).unwrap();
        assert!(max3sat_oracle(&big).is_err());
    }

    #[test]
    fn suite_covers_every_shape() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let suite = formula_suite(&mut rng, 50, 3, 4);
        assert_eq!(suite.len(), 50);
        for n in 1..=3 {
            for m in 1..=4 {
                assert!(suite.iter().any(|f| (f.num_vars(), f.num_clauses()) == (n, m)));
            }
        }
        assert!(suite.iter().all(|f| f.clauses().iter().all(|c| !c.is_empty() && c.len() <= 3)));
    }
}
