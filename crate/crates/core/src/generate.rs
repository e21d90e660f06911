//! Named instance families and seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::io::Instance;
use crate::model::{DpsInstance, Graph, OpsInstance, PeriodicSchedule};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Figure1,
    UnweightedFig4,
    Pentagon,
    Tadpole { tail: usize, tail_freq: u64 },
    PinwheelStar(Vec<u64>),
    TriangleF2,
    Petersen,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    Unknown(String),
    #[error("invalid parameters for `{family}`: {msg}")]
    Params { family: String, msg: String },
}

fn params(family: &str, raw: &str) -> Result<Vec<u64>, FamilyError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<u64>().map_err(|_| FamilyError::Params {
                family: family.into(),
                msg: format!("`{s}` is not a non-negative integer"),
            })
        })
        .collect()
}

impl FromStr for Family {
    type Err = FamilyError;

    /// Accepts `name`, `name:a,b` and `name(a,b)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, raw) = if let Some((n, rest)) = s.split_once('(') {
            let inner = rest.strip_suffix(')').ok_or_else(|| FamilyError::Params {
                family: n.into(),
                msg: "missing `)`".into(),
            })?;
            (n, inner)
        } else if let Some((n, rest)) = s.split_once(':') {
            (n, rest)
        } else {
            (s, "")
        };
        let ps = params(name, raw)?;
        let bad = |msg: &str| FamilyError::Params {
            family: name.into(),
            msg: msg.into(),
        };
        let no_params = |f: Family| if ps.is_empty() { Ok(f) } else { Err(bad("takes no parameters")) };
        match name {
            "figure1" => no_params(Family::Figure1),
            "unweighted-fig4" => no_params(Family::UnweightedFig4),
            "pentagon" => no_params(Family::Pentagon),
            "triangle-f2" => no_params(Family::TriangleF2),
            "petersen" => no_params(Family::Petersen),
            "tadpole" => match ps[..] {
                [k, f] if f >= 2 => Ok(Family::Tadpole {
                    tail: k as usize,
                    tail_freq: f,
                }),
                [_, _] => Err(bad("tail frequency must be at least 2")),
                _ => Err(bad("expected tadpole(k,F)")),
            },
            "pinwheel-star" => {
                if ps.is_empty() || ps.contains(&0) {
                    Err(bad("expected positive frequencies f1,..,fk"))
                } else {
                    Ok(Family::PinwheelStar(ps))
                }
            }
            other => Err(FamilyError::Unknown(other.into())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Figure1 => f.write_str("figure1"),
            Family::UnweightedFig4 => f.write_str("unweighted-fig4"),
            Family::Pentagon => f.write_str("pentagon"),
            Family::TriangleF2 => f.write_str("triangle-f2"),
            Family::Petersen => f.write_str("petersen"),
            Family::Tadpole { tail, tail_freq } => write!(f, "tadpole({tail},{tail_freq})"),
            Family::PinwheelStar(fs) => {
                let s: Vec<String> = fs.iter().map(u64::to_string).collect();
                write!(f, "pinwheel-star({})", s.join(","))
            }
        }
    }
}

pub struct Generated {
    pub instance: Instance,
    pub warnings: Vec<String>,
}

pub fn generate(family: &Family) -> Generated {
    let mut warnings = Vec::new();
    let instance = match family {
        Family::Figure1 => Instance::Ops(figure1()),
        Family::UnweightedFig4 => Instance::Ops(unweighted_fig4()),
        Family::Pentagon => Instance::Dps(pentagon()),
        Family::TriangleF2 => Instance::Dps(triangle_f2()),
        Family::Petersen => Instance::Ops(OpsInstance::unweighted(petersen())),
        Family::Tadpole { tail, tail_freq } => {
            if *tail_freq < 3 {
                warnings.push(format!(
                    "tadpole tail frequency {tail_freq} is below the drawn family's minimum of 3"
                ));
            }
            Instance::Dps(tadpole(*tail, *tail_freq))
        }
        Family::PinwheelStar(fs) => Instance::Dps(pinwheel_star(fs)),
    };
    Generated { instance, warnings }
}

// Persons A..H are 0..7.
const FIG1_EDGES: [(usize, usize, i64); 10] = [
    (0, 1, 40),
    (1, 2, 80),
    (2, 3, 16),
    (3, 4, 20),
    (4, 5, 40),
    (5, 0, 40),
    (5, 6, 40),
    (0, 3, 80),
    (3, 6, 16),
    (4, 7, 80),
];

pub fn figure1() -> OpsInstance {
    let pairs: Vec<_> = FIG1_EDGES.iter().map(|&(a, b, _)| (a, b)).collect();
    let g = Graph::new(8, &pairs).expect("fixture graph");
    OpsInstance::new(g, FIG1_EDGES.iter().map(|&(_, _, w)| int(w)).collect()).expect("fixture")
}

/// The period-8 schedule drawn next to the figure-1 instance; its heat is 160.
pub fn figure1_schedule() -> PeriodicSchedule {
    let inst = figure1();
    let g = inst.graph();
    let e = |a: char, b: char| {
        let idx = |c: char| (c as u8 - b'A') as usize;
        g.find_edge(idx(a), idx(b)).expect("fixture edge")
    };
    let days = vec![
        vec![e('A', 'D'), e('B', 'C'), e('E', 'H'), e('F', 'G')],
        vec![e('A', 'B'), e('C', 'D'), e('E', 'F')],
        vec![e('A', 'D'), e('B', 'C'), e('E', 'H')],
        vec![e('A', 'F'), e('D', 'G')],
        vec![e('A', 'D'), e('B', 'C'), e('E', 'H'), e('F', 'G')],
        vec![e('A', 'B'), e('E', 'F')],
        vec![e('A', 'D'), e('B', 'C'), e('E', 'H')],
        vec![e('A', 'F'), e('D', 'E')],
    ];
    PeriodicSchedule::new(days).expect("fixture schedule")
}

pub fn unweighted_fig4() -> OpsInstance {
    // A-B, B-C, H-G, A-H, C-E, C-D, F-H, F-B, D-E
    let pairs = [(0, 1), (1, 2), (7, 6), (0, 7), (2, 4), (2, 3), (5, 7), (5, 1), (3, 4)];
    OpsInstance::unweighted(Graph::new(8, &pairs).expect("fixture graph"))
}

pub fn pentagon() -> DpsInstance {
    // A-B, B-C, E-D, A-E with f = 3 and C-D with f = 2.
    let pairs = [(0, 1), (1, 2), (4, 3), (0, 4), (2, 3)];
    DpsInstance::new(Graph::new(5, &pairs).expect("fixture graph"), vec![3, 3, 3, 3, 2])
        .expect("fixture")
}

pub fn triangle_f2() -> DpsInstance {
    let pairs = [(0, 1), (1, 2), (0, 2)];
    DpsInstance::new(Graph::new(3, &pairs).expect("fixture graph"), vec![2, 2, 2]).expect("fixture")
}

/// Triangle A-B (2), B-C (3), A-C (3) with a tail of `tail` edges of frequency `tail_freq` hanging off C.
pub fn tadpole(tail: usize, tail_freq: u64) -> DpsInstance {
    let mut pairs = vec![(0, 1), (1, 2), (0, 2)];
    let mut freq = vec![2, 3, 3];
    let mut prev = 2;
    for i in 0..tail {
        pairs.push((prev, 3 + i));
        freq.push(tail_freq);
        prev = 3 + i;
    }
    DpsInstance::new(Graph::new(3 + tail, &pairs).expect("tadpole graph"), freq).expect("tadpole")
}

/// Centre 0 joined to one leaf per frequency.
pub fn pinwheel_star(freqs: &[u64]) -> DpsInstance {
    let pairs: Vec<_> = (1..=freqs.len()).map(|i| (0, i)).collect();
    DpsInstance::new(Graph::new(freqs.len() + 1, &pairs).expect("star graph"), freqs.to_vec())
        .expect("star")
}

pub fn star(growth: &[Rational]) -> OpsInstance {
    let pairs: Vec<_> = (1..=growth.len()).map(|i| (0, i)).collect();
    OpsInstance::new(Graph::new(growth.len() + 1, &pairs).expect("star graph"), growth.to_vec())
        .expect("star")
}

pub fn cycle(n: usize) -> Graph {
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &pairs).expect("cycle graph")
}

pub fn petersen() -> Graph {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
        pairs.push((i, i + 5));
        pairs.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, &pairs).expect("petersen graph")
}

/// Random simple graph with `n` persons and `min(m, n(n-1)/2)` edges.
pub fn random_graph(rng: &mut impl Rng, n: usize, m: usize) -> Graph {
    let mut all: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    all.shuffle(rng);
    all.truncate(m);
    Graph::new(n, &all).expect("distinct pairs")
}

/// Random instance whose growth rates are drawn from `choices`.
pub fn random_ops(rng: &mut impl Rng, n: usize, m: usize, choices: &[Rational]) -> OpsInstance {
    let g = random_graph(rng, n, m);
    let growth = (0..g.num_edges())
        .map(|_| choices.choose(rng).expect("non-empty choices").clone())
        .collect();
    OpsInstance::new(g, growth).expect("positive choices")
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_family_names() {
        assert_eq!("tadpole(3,3)".parse::<Family>().unwrap(), Family::Tadpole { tail: 3, tail_freq: 3 });
        assert_eq!("tadpole:1,4".parse::<Family>().unwrap(), Family::Tadpole { tail: 1, tail_freq: 4 });
        assert_eq!(
            "pinwheel-star(2,3,6)".parse::<Family>().unwrap(),
            Family::PinwheelStar(vec![2, 3, 6])
        );
        assert!(matches!("hexagon".parse::<Family>(), Err(FamilyError::Unknown(_))));
        assert!("tadpole(3)".parse::<Family>().is_err());
        assert!("tadpole(3,1)".parse::<Family>().is_err());
        assert!("figure1(2)".parse::<Family>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for f in [
            Family::Figure1,
            Family::Tadpole { tail: 2, tail_freq: 5 },
            Family::PinwheelStar(vec![2, 4, 4]),
        ] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn small_tail_warns() {
        assert_eq!(generate(&Family::Tadpole { tail: 1, tail_freq: 2 }).warnings.len(), 1);
        assert!(generate(&Family::Tadpole { tail: 1, tail_freq: 3 }).warnings.is_empty());
    }

    #[test]
    fn petersen_is_cubic() {
        let g = petersen();
        assert_eq!(g.num_edges(), 15);
        assert!((0..10).all(|p| g.degree(p) == 3));
    }
}
