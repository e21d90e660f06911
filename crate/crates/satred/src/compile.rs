//! Assembles the full scheduling instance for a formula and threshold, layer by layer:
//! variables, duplication, clauses, sorting network, tension.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use polysched_core::io::emit_dps;
use polysched_core::model::{dps_to_ops, DpsInstance, Graph, OpsInstance};
use polysched_core::rational::{int, Rational};
use thiserror::Error;

use crate::cnf::{emit_dimacs, parse_dimacs, CnfError, CnfFormula, Literal};
use crate::gadgets::{
    d3, d6, or_clause, sb12, sg12, sorting_network, swap, tension, true_clock, variable, Builder, EdgeRole,
    GadgetId, GadgetInstance, GadgetKind, Layer, Port, PortRef, SwapConstants, Wire, TENSION_WIDTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Supply {
    Red3,
    Blue3,
    Green6,
    Purple6,
    Blue12,
    Green12,
}

impl Supply {
    /// Kinds that are copied from one of their own ports; one port is always held back as a seed.
    fn self_reproducing(self) -> bool {
        matches!(self, Supply::Red3 | Supply::Blue3 | Supply::Green6 | Supply::Purple6)
    }
}

/// Hands out constant and literal ports, growing duplicators and splitters on demand.
struct Factory {
    b: Builder,
    pools: BTreeMap<Supply, Vec<Port>>,
    literals: BTreeMap<Literal, Vec<Port>>,
}

impl Factory {
    fn push(&mut self, s: Supply, port: Port) {
        self.pools.entry(s).or_default().push(port);
    }

    /// Removes the newest port of kind `s` whose person is not in `avoid`, keeping `floor` ports back.
    fn pick(&mut self, s: Supply, avoid: &[usize], floor: usize) -> Option<Port> {
        let pool = self.pools.get_mut(&s)?;
        if pool.len() <= floor {
            return None;
        }
        let i = pool.iter().rposition(|p| !avoid.contains(&p.person))?;
        Some(pool.remove(i))
    }

    /// Takes a port for a gadget that already holds ports from the persons in `used`; two ports
    /// from one person must not meet at one consumer, or the graph would gain a parallel edge.
    fn take_for(&mut self, s: Supply, used: &mut Vec<usize>) -> Port {
        let floor = usize::from(s.self_reproducing());
        loop {
            if let Some(port) = self.pick(s, used, floor) {
                used.push(port.person);
                return port;
            }
            self.expand(s);
        }
    }

    fn take(&mut self, s: Supply) -> Port {
        self.take_for(s, &mut Vec::new())
    }

    fn take_n(&mut self, s: Supply, n: usize, used: &mut Vec<usize>) -> Vec<Port> {
        (0..n).map(|_| self.take_for(s, used)).collect()
    }

    /// Like `take_for` but may use the last port, for kinds that are handed straight back.
    fn borrow(&mut self, s: Supply, avoid: &[usize]) -> Port {
        loop {
            if let Some(port) = self.pick(s, avoid, 0) {
                return port;
            }
            self.expand(s);
        }
    }

    /// Runs a 3-duplicator on `seed`, borrowing and returning a green and a purple 6.
    fn triple(&mut self, seed: Port) -> [Port; 3] {
        let green = self.borrow(Supply::Green6, &[seed.person]);
        let purple = self.borrow(Supply::Purple6, &[]);
        let out = d3(&mut self.b, Layer::Duplication, seed, green, purple);
        self.push(Supply::Green6, out.green);
        self.push(Supply::Purple6, out.purple);
        out.copies
    }

    fn expand(&mut self, s: Supply) {
        match s {
            Supply::Red3 | Supply::Blue3 => {
                let seed = self.borrow(s, &[]);
                for copy in self.triple(seed) {
                    self.push(s, copy);
                }
            }
            Supply::Green6 | Supply::Purple6 => {
                // The blue and red inputs may themselves trigger 3-duplicators that borrow a
                // 6 of this kind, so they are acquired before the seed leaves the pool.
                let mut blue = self.take(Supply::Blue3);
                let red = self.take(Supply::Red3);
                let seed = loop {
                    if let Some(seed) = self.pick(s, &[blue.person], 0) {
                        break seed;
                    }
                    let other = self.take_for(Supply::Blue3, &mut vec![blue.person]);
                    self.push(Supply::Blue3, std::mem::replace(&mut blue, other));
                };
                let out = d6(&mut self.b, Layer::Duplication, seed, blue, red);
                for port in out.seeds {
                    self.push(s, port);
                }
                for port in out.red {
                    self.push(Supply::Red3, port);
                }
            }
            // Each consumer gets its own 12-splitter: a shared one fixes the concrete phases its
            // outputs hand to different swaps, and an OR2 whose two blue inputs sit on different
            // 6-day pairs cannot output blue.
            Supply::Blue12 => {
                let mut used = Vec::new();
                let red = self.take_for(Supply::Red3, &mut used);
                let green = self.take_for(Supply::Green6, &mut used);
                let purple = self.take_for(Supply::Purple6, &mut used);
                let [port, spares @ ..] = sb12(&mut self.b, Layer::Duplication, red, green, purple);
                self.push(s, port);
                for spare in spares {
                    self.b.pendant(spare);
                }
            }
            Supply::Green12 => {
                let mut used = Vec::new();
                let red = self.take_for(Supply::Red3, &mut used);
                let blue = self.take_for(Supply::Blue3, &mut used);
                let purple = self.take_for(Supply::Purple6, &mut used);
                let [port, spare] = sg12(&mut self.b, Layer::Duplication, red, blue, purple);
                self.push(s, port);
                self.b.pendant(spare);
            }
        }
    }

    fn grow_literal(&mut self, lit: Literal, demand: usize) {
        while self.literals.get(&lit).map_or(0, Vec::len) < demand {
            let seed = self.literals.get_mut(&lit).and_then(Vec::pop).expect("variable output");
            let copies = self.triple(seed);
            self.literals.get_mut(&lit).expect("literal pool").extend(copies);
        }
    }

    fn take_literal(&mut self, lit: Literal) -> Port {
        self.literals
            .get_mut(&lit)
            .and_then(Vec::pop)
            .expect("literal demand was provisioned")
    }

    fn flush(&mut self) {
        let ports: Vec<Port> = std::mem::take(&mut self.pools)
            .into_values()
            .chain(std::mem::take(&mut self.literals).into_values())
            .flatten()
            .collect();
        for port in ports {
            self.b.pendant(port);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockEdges {
    pub red: usize,
    pub blue: usize,
    pub green: usize,
    pub purple: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableEdges {
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeProvenance {
    pub source: PortRef,
    pub sink: PortRef,
    pub layer: Layer,
}

#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    pub formula: CnfFormula,
    pub dps: DpsInstance,
    pub gadgets: Vec<GadgetInstance>,
    /// Indexed like the edges of `dps`.
    pub provenance: Vec<EdgeProvenance>,
    pub roles: Vec<EdgeRole>,
    pub wires: Vec<Wire>,
    /// Persons whose incident frequencies must sum to exactly one.
    pub tight_nodes: Vec<usize>,
    pub clock: ClockEdges,
    /// One entry per variable gadget; a trailing padding variable may follow the formula's own.
    pub variables: Vec<VariableEdges>,
}

impl ReductionArtifact {
    pub fn frequencies(&self) -> BTreeSet<u64> {
        self.dps.freq().iter().copied().collect()
    }

    pub fn max_frequency(&self) -> u64 {
        self.dps.freq().iter().copied().max().unwrap_or(0)
    }

    /// Tight persons whose incident frequencies do not sum to one.
    pub fn density_violations(&self) -> Vec<usize> {
        let one = int(1);
        self.tight_nodes
            .iter()
            .copied()
            .filter(|&p| self.dps.density_at(p) != one)
            .collect()
    }

    /// Edges whose producing gadget sits in a later layer than the consuming one.
    pub fn layer_order_violations(&self) -> Vec<usize> {
        self.provenance
            .iter()
            .enumerate()
            .filter(|(_, p)| self.gadgets[p.source.gadget].layer > self.gadgets[p.sink.gadget].layer)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn count_kind(&self, kind: GadgetKind) -> usize {
        self.gadgets.iter().filter(|g| g.kind == kind).count()
    }

    /// Named ports of gadget `g`: `(port, edge, is_output)`.
    pub fn ports_of(&self, g: GadgetId) -> Vec<(&str, usize, bool)> {
        let mut ports = Vec::new();
        for (e, p) in self.provenance.iter().enumerate() {
            if p.source.gadget == g && p.sink.gadget != g {
                ports.push((p.source.port.as_str(), e, true));
            }
            if p.sink.gadget == g && p.source.gadget != g {
                ports.push((p.sink.port.as_str(), e, false));
            }
        }
        ports
    }
}

pub fn compile(formula: &CnfFormula) -> ReductionArtifact {
    let mut b = Builder::new();
    let clock = true_clock(&mut b);
    let mut factory_pools: BTreeMap<Supply, Vec<Port>> = BTreeMap::new();
    let mut literals: BTreeMap<Literal, Vec<Port>> = BTreeMap::new();
    factory_pools.insert(Supply::Red3, vec![clock.red]);
    factory_pools.insert(Supply::Blue3, vec![clock.blue]);
    factory_pools.insert(Supply::Purple6, vec![clock.purple]);

    // Variables hang off the chain in pairs so that the chain ends on a green 6.
    let n = formula.num_vars();
    let padded = n + n % 2;
    let mut chain = clock.green;
    for var in 0..padded {
        let out = variable(&mut b, var, chain);
        literals.insert(Literal::pos(var), vec![out.positive]);
        literals.insert(Literal::neg(var), vec![out.negative]);
        chain = out.chain;
    }
    factory_pools.insert(Supply::Green6, vec![chain]);
    let mut f = Factory {
        b,
        pools: factory_pools,
        literals,
    };

    for (var, counts) in formula.occurrences().iter().enumerate() {
        for positive in [true, false] {
            let lit = Literal { var, positive };
            f.grow_literal(lit, counts[positive as usize]);
        }
    }

    let mut channels: Vec<Option<Port>> = Vec::new();
    for (j, clause) in formula.clauses().iter().enumerate() {
        let mut inputs: Vec<Port> = clause.iter().map(|&lit| f.take_literal(lit)).collect();
        while inputs.len() < 3 {
            inputs.push(f.take(Supply::Blue3));
        }
        let inputs: [Port; 3] = inputs.try_into().expect("three inputs");
        let red = f.take(Supply::Red3);
        let w = f.b.wire(Wire::Clause(j));
        channels.push(Some(or_clause(&mut f.b, Layer::Clause, inputs, red, EdgeRole::Wire(w))));
    }

    let network = sorting_network(channels.len());
    if !network.is_empty() {
        let parent = f.b.gadget(GadgetKind::SortNet, Layer::Sorting);
        for (left, right) in network {
            let in1 = channels[left].take().expect("channel port");
            let in2 = channels[right].take().expect("channel port");
            let (EdgeRole::Wire(w1), EdgeRole::Wire(w2)) = (in1.role, in2.role) else {
                unreachable!("channels carry wires")
            };
            let or_wire = f.b.wire(Wire::Or(w1, w2));
            let and_wire = f.b.wire(Wire::And(w1, w2));
            let mut used = Vec::new();
            let consts = SwapConstants {
                red: f.take_n(Supply::Red3, SwapConstants::RED, &mut used),
                purple: f.take_n(Supply::Purple6, SwapConstants::PURPLE, &mut used),
                green: f.take_n(Supply::Green6, SwapConstants::GREEN, &mut used),
                blue12: f.take_for(Supply::Blue12, &mut used),
                green12: f.take_for(Supply::Green12, &mut used),
            };
            let [hi, lo] = swap(
                &mut f.b,
                Layer::Sorting,
                Some(parent),
                [in1, in2],
                consts,
                [EdgeRole::Wire(or_wire), EdgeRole::Wire(and_wire)],
            );
            channels[left] = Some(hi);
            channels[right] = Some(lo);
        }
    }

    let mut outputs: Vec<Port> = channels.into_iter().map(|c| c.expect("channel port")).collect();
    let rest = outputs.split_off(formula.threshold());
    let mut tensioned = outputs.into_iter().peekable();
    while tensioned.peek().is_some() {
        let group: Vec<Port> = tensioned.by_ref().take(TENSION_WIDTH).collect();
        let mut used = Vec::new();
        let red = f.take_for(Supply::Red3, &mut used);
        let green = f.take_for(Supply::Green6, &mut used);
        let purple = f.take_for(Supply::Purple6, &mut used);
        tension(&mut f.b, Layer::Tension, group, red, green, purple);
    }
    for port in rest {
        f.b.pendant(port);
    }
    f.flush();
    assemble(formula.clone(), f.b)
}

fn assemble(formula: CnfFormula, b: Builder) -> ReductionArtifact {
    let pairs: Vec<(usize, usize)> = b.edges().iter().map(|e| (e.a, e.b)).collect();
    let graph = Graph::new(b.num_persons(), &pairs).expect("gadget wiring forms a simple graph");
    let freq = b.edges().iter().map(|e| e.freq).collect();
    let dps = DpsInstance::new(graph, freq).expect("positive frequencies");
    let gadgets = b.gadgets().to_vec();
    let find = |kind: GadgetKind, label: Option<&str>, port: &str| {
        b.edges()
            .iter()
            .position(|e| {
                let g = &gadgets[e.source.gadget];
                g.kind == kind && label.is_none_or(|l| g.label == l) && e.source.port == port
            })
            .expect("gadget port is wired")
    };
    let clock = ClockEdges {
        red: find(GadgetKind::TrueClock, None, "3R"),
        blue: find(GadgetKind::TrueClock, None, "3B"),
        green: find(GadgetKind::TrueClock, None, "6G"),
        purple: find(GadgetKind::TrueClock, None, "6P"),
    };
    let variables = gadgets
        .iter()
        .filter(|g| g.kind == GadgetKind::Variable)
        .map(|g| VariableEdges {
            positive: find(GadgetKind::Variable, Some(&g.label), "3R"),
            negative: find(GadgetKind::Variable, Some(&g.label), "3B"),
        })
        .collect();
    let provenance = b
        .edges()
        .iter()
        .map(|e| EdgeProvenance {
            source: e.source.clone(),
            sink: e.sink.clone(),
            layer: gadgets[e.source.gadget].layer,
        })
        .collect();
    ReductionArtifact {
        formula,
        dps,
        provenance,
        roles: b.edges().iter().map(|e| e.role).collect(),
        wires: b.wires().to_vec(),
        tight_nodes: b.tight_nodes().to_vec(),
        gadgets,
        clock,
        variables,
    }
}

/// The instance read as an optimisation problem with growth rates `1/f`.
pub fn gap_instance(formula: &CnfFormula) -> OpsInstance {
    dps_to_ops(&compile(formula).dps)
}

/// `(F + 1) / F`: any schedule of an infeasible instance with largest frequency `F` has heat at least this.
pub fn gap_factor(max_frequency: u64) -> Rational {
    Rational::new((max_frequency + 1).into(), max_frequency.into())
}

const HEADER_PREFIX: &str = "# ";

/// One line per edge, `a b f source:port -> sink:port layer`, after a header holding the formula.
pub fn emit_provenance(artifact: &ReductionArtifact) -> String {
    let mut out = String::new();
    for line in emit_dimacs(&artifact.formula).lines() {
        let _ = writeln!(out, "{HEADER_PREFIX}{line}");
    }
    let _ = writeln!(out, "{HEADER_PREFIX}k {}", artifact.formula.threshold());
    let graph = artifact.dps.graph();
    for (i, p) in artifact.provenance.iter().enumerate() {
        let e = graph.edge(i);
        let _ = writeln!(
            out,
            "{} {} {} {}:{} -> {}:{} {}",
            e.a(),
            e.b(),
            artifact.dps.freq()[i],
            artifact.gadgets[p.source.gadget].label,
            p.source.port,
            artifact.gadgets[p.sink.gadget].label,
            p.sink.port,
            p.layer
        );
    }
    out
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("provenance header: {0}")]
    Header(#[from] CnfError),
    #[error("provenance file has no `k` header line")]
    MissingThreshold,
    #[error("{0} does not match the compiled formula")]
    Mismatch(&'static str),
}

/// Rebuilds an artifact from its instance text and provenance sidecar, checking both against a fresh compile.
pub fn load_artifact(instance_text: &str, provenance_text: &str) -> Result<ReductionArtifact, ArtifactError> {
    let mut dimacs = String::new();
    let mut threshold = None;
    for line in provenance_text.lines() {
        let Some(body) = line.strip_prefix(HEADER_PREFIX) else {
            break;
        };
        match body.strip_prefix("k ") {
            Some(k) => {
                let k = k.trim().parse().map_err(|_| ArtifactError::MissingThreshold)?;
                threshold = Some(k);
            }
            None => {
                dimacs.push_str(body);
                dimacs.push('\n');
            }
        }
    }
    let threshold = threshold.ok_or(ArtifactError::MissingThreshold)?;
    let formula = parse_dimacs(&dimacs, threshold)?;
    let artifact = compile(&formula);
    if emit_dps(&artifact.dps) != instance_text {
        return Err(ArtifactError::Mismatch("instance file"));
    }
    if emit_provenance(&artifact) != provenance_text {
        return Err(ArtifactError::Mismatch("provenance file"));
    }
    Ok(artifact)
}
