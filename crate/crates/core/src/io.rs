//! Line-oriented text formats for instances and schedules.
//!
//! Instance: a header `ops n m` or `dps n m`, then `m` lines `a b value`.
//! Schedule: a header `sched T`, then `T` lines of space-separated `a-b` tokens.
//! An empty line is an empty day. Output is canonical and parses back to itself.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{DpsInstance, Graph, ModelError, OpsInstance, PeriodicSchedule};
use crate::rational::{format_rational, parse_rational, ParseRationalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Ops(OpsInstance),
    Dps(DpsInstance),
}

impl Instance {
    pub fn graph(&self) -> &Graph {
        match self {
            Instance::Ops(i) => i.graph(),
            Instance::Dps(i) => i.graph(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Number {
        line: usize,
        source: ParseRationalError,
    },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("expected {what}, found `{tok}`")));
    }
    tok.parse()
        .map_err(|_| syntax(line, format!("{what} `{tok}` too large")))
}

fn body_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
        .into_iter()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines = body_lines(text);
    let header = lines.first().ok_or_else(|| syntax(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [kind, n, m] = toks[..] else {
        return Err(syntax(1, "header must be `ops n m` or `dps n m`"));
    };
    if kind != "ops" && kind != "dps" {
        return Err(syntax(1, format!("unknown instance kind `{kind}`")));
    }
    let n = parse_usize(n, 1, "person count")?;
    let m = parse_usize(m, 1, "edge count")?;
    if lines.len() != m + 1 {
        return Err(syntax(
            lines.len().min(m + 1) + 1,
            format!("expected {m} edge lines, found {}", lines.len() - 1),
        ));
    }
    let mut pairs = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for (i, l) in lines[1..].iter().enumerate() {
        let line = i + 2;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [a, b, v] = toks[..] else {
            return Err(syntax(line, "edge line must be `a b value`"));
        };
        let a = parse_usize(a, line, "person")?;
        let b = parse_usize(b, line, "person")?;
        // Validate the edge incrementally so the error points at its line.
        pairs.push((a, b));
        Graph::new(n, &pairs).map_err(|source| ParseError::Model { line, source })?;
        values.push((line, v));
    }
    let graph = Graph::new(n, &pairs).map_err(|source| ParseError::Model { line: 1, source })?;
    if kind == "ops" {
        let mut growth = Vec::with_capacity(m);
        for &(line, v) in &values {
            let g = parse_rational(v).map_err(|source| ParseError::Number { line, source })?;
            growth.push(g);
        }
        OpsInstance::new(graph, growth)
            .map(Instance::Ops)
            .map_err(|source| {
                let line = match &source {
                    ModelError::NonPositiveGrowth { edge } => edge + 2,
                    _ => 1,
                };
                ParseError::Model { line, source }
            })
    } else {
        let mut freq = Vec::with_capacity(m);
        for &(line, v) in &values {
            let f = v
                .parse::<u64>()
                .map_err(|_| syntax(line, format!("frequency `{v}` is not a positive integer")))?;
            freq.push(f);
        }
        DpsInstance::new(graph, freq)
            .map(Instance::Dps)
            .map_err(|source| {
                let line = match &source {
                    ModelError::ZeroFrequency { edge } => edge + 2,
                    _ => 1,
                };
                ParseError::Model { line, source }
            })
    }
}

pub fn emit_ops(instance: &OpsInstance) -> String {
    let g = instance.graph();
    let mut out = format!("ops {} {}\n", g.num_persons(), g.num_edges());
    for (e, v) in g.edges().iter().zip(instance.growth()) {
        let _ = writeln!(out, "{} {} {}", e.a(), e.b(), format_rational(v));
    }
    out
}

pub fn emit_dps(instance: &DpsInstance) -> String {
    let g = instance.graph();
    let mut out = format!("dps {} {}\n", g.num_persons(), g.num_edges());
    for (e, f) in g.edges().iter().zip(instance.freq()) {
        let _ = writeln!(out, "{} {} {}", e.a(), e.b(), f);
    }
    out
}

pub fn emit_instance(instance: &Instance) -> String {
    match instance {
        Instance::Ops(i) => emit_ops(i),
        Instance::Dps(i) => emit_dps(i),
    }
}

/// Parses a schedule whose `a-b` tokens refer to edges of `graph`.
pub fn parse_schedule(text: &str, graph: &Graph) -> Result<PeriodicSchedule, ParseError> {
    let lines = body_lines(text);
    let header = lines.first().ok_or_else(|| syntax(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let ["sched", t] = toks[..] else {
        return Err(syntax(1, "header must be `sched T`"));
    };
    let t = parse_usize(t, 1, "period")?;
    if t == 0 {
        return Err(ParseError::Model {
            line: 1,
            source: ModelError::EmptySchedule,
        });
    }
    if lines.len() != t + 1 {
        return Err(syntax(
            lines.len().min(t + 1) + 1,
            format!("expected {t} day lines, found {}", lines.len() - 1),
        ));
    }
    let mut days = Vec::with_capacity(t);
    for (i, l) in lines[1..].iter().enumerate() {
        let line = i + 2;
        let mut day = Vec::new();
        for tok in l.split_whitespace() {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| syntax(line, format!("expected `a-b`, found `{tok}`")))?;
            let a = parse_usize(a, line, "person")?;
            let b = parse_usize(b, line, "person")?;
            let e = graph
                .find_edge(a, b)
                .ok_or_else(|| syntax(line, format!("no edge {a}-{b} in the instance")))?;
            day.push(e);
        }
        days.push(day);
    }
    let schedule = PeriodicSchedule::new(days).map_err(|source| ParseError::Model { line: 1, source })?;
    schedule.validate(graph).map_err(|source| {
        let line = match &source {
            ModelError::NotMatching { day, .. } | ModelError::UnknownEdge { day, .. } => day + 2,
            _ => 1,
        };
        ParseError::Model { line, source }
    })?;
    Ok(schedule)
}

pub fn emit_schedule(schedule: &PeriodicSchedule, graph: &Graph) -> String {
    let mut out = format!("sched {}\n", schedule.period());
    for day in schedule.days() {
        let toks: Vec<String> = day
            .iter()
            .map(|&i| {
                let e = graph.edge(i);
                format!("{}-{}", e.a(), e.b())
            })
            .collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let text = "ops 3 2\n0 1 7/6\n1 2 3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(emit_instance(&inst), text);
        let text = "dps 3 2\n0 1 2\n1 2 3\n";
        assert_eq!(emit_instance(&parse_instance(text).unwrap()), text);
    }

    #[test]
    fn schedule_round_trip_with_empty_day() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let text = "sched 3\n0-1\n\n1-2\n";
        let s = parse_schedule(text, &g).unwrap();
        assert_eq!(s.days(), &[vec![0], vec![], vec![1]]);
        assert_eq!(emit_schedule(&s, &g), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instance("ops 3 2\n0 1 1\n1 1 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Model { line: 3, source: ModelError::SelfLoop(1) }));
        let err = parse_instance("ops 3 1\n0 1 1e3\n").unwrap_err();
        assert!(matches!(err, ParseError::Number { line: 2, .. }));
        let err = parse_instance("ops 3 1\n0 1 0\n").unwrap_err();
        assert!(matches!(err, ParseError::Model { line: 2, .. }));
        let err = parse_instance("dps 3 2\n0 1 2\n1 0 2\n").unwrap_err();
        assert!(matches!(err, ParseError::Model { line: 3, source: ModelError::DuplicateEdge(0, 1) }));
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let err = parse_schedule("sched 2\n0-1\n0-1 1-2\n", &g).unwrap_err();
        assert!(matches!(err, ParseError::Model { line: 3, .. }));
        let err = parse_schedule("sched 1\n0-2\n", &g).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
    }
}
