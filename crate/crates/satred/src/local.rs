//! Exhaustive checks of single gadgets in isolation. Constant inputs are pinned to their
//! colours, signal inputs range over the colours upstream gadgets can deliver, and every
//! achievable colouring of the outputs is compared against the gadget's characterisation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use polysched_core::model::{DpsInstance, Graph};

use crate::gadgets::{
    d12, d3, d6, and2, or2, or_clause, sb12, sb6, sg12, swap, tension, true_clock, variable, And2Constants, Builder,
    D12Constants, EdgeRole, GadgetId, GadgetKind, Layer, Or2Constants, Port, SwapConstants,
};
use crate::phase::PhaseProblem;
use crate::slots::{phase_color, SlotColor};

use SlotColor::{Blue as B, Green as G, Purple as P, Red as R};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaKind {
    Variable,
    D3,
    D6,
    D12,
    Or,
    Or2,
    And2,
    SplitB6,
    SplitB12,
    SplitG12,
    Swap,
    Tension,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 12] = [
        LemmaKind::Variable,
        LemmaKind::D3,
        LemmaKind::D6,
        LemmaKind::D12,
        LemmaKind::Or,
        LemmaKind::Or2,
        LemmaKind::And2,
        LemmaKind::SplitB6,
        LemmaKind::SplitB12,
        LemmaKind::SplitG12,
        LemmaKind::Swap,
        LemmaKind::Tension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::Variable => "variable",
            LemmaKind::D3 => "d3",
            LemmaKind::D6 => "d6",
            LemmaKind::D12 => "d12",
            LemmaKind::Or => "or",
            LemmaKind::Or2 => "or2",
            LemmaKind::And2 => "and2",
            LemmaKind::SplitB6 => "sb6",
            LemmaKind::SplitB12 => "sb12",
            LemmaKind::SplitG12 => "sg12",
            LemmaKind::Swap => "swap",
            LemmaKind::Tension => "tension",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown gadget kind `{s}`"))
    }
}

/// Observed colour of each output edge; `None` marks a green/purple mixture.
pub type Signature = Vec<Option<SlotColor>>;

/// A gadget wired to boundary persons, ready for enumeration.
#[derive(Debug, Clone)]
pub struct Bench {
    pub dps: DpsInstance,
    /// Edges pinned to a colour in every case.
    pub pins: Vec<(usize, SlotColor)>,
    /// Signal inputs and the colours each may take.
    pub inputs: Vec<(usize, Vec<SlotColor>)>,
    pub observed: Vec<usize>,
    /// Persons whose frequencies sum to one.
    pub tight_nodes: Vec<usize>,
}

impl Bench {
    /// Every combination of input colours, in lexicographic order.
    pub fn input_cases(&self) -> Vec<Vec<SlotColor>> {
        self.inputs.iter().fold(vec![Vec::new()], |acc, (_, domain)| {
            acc.into_iter()
                .flat_map(|prefix| {
                    domain.iter().map(move |&c| {
                        let mut next = prefix.clone();
                        next.push(c);
                        next
                    })
                })
                .collect()
        })
    }

    pub fn problem(&self, inputs: &[SlotColor]) -> PhaseProblem {
        let mut problem = PhaseProblem::new(&self.dps);
        for &(e, c) in &self.pins {
            problem.pin(e, c);
        }
        for (&(e, _), &c) in self.inputs.iter().zip(inputs) {
            problem.pin(e, c);
        }
        problem
    }

    /// All output signatures reachable by some phase assignment.
    pub fn signatures(&self, inputs: &[SlotColor]) -> BTreeSet<Signature> {
        let mut found = BTreeSet::new();
        self.extend(self.problem(inputs), &mut Vec::new(), &mut found);
        found
    }

    fn extend(&self, problem: PhaseProblem, current: &mut Signature, found: &mut BTreeSet<Signature>) {
        let Some(&e) = self.observed.get(current.len()) else {
            if problem.solve().is_some() {
                found.insert(current.clone());
            }
            return;
        };
        let freq = self.dps.freq()[e];
        let mut classes: Vec<(Option<SlotColor>, u16)> = Vec::new();
        for p in (0..freq).filter(|&p| problem.domain(e) >> p & 1 == 1) {
            let c = phase_color(p, freq);
            match classes.iter_mut().find(|(k, _)| *k == c) {
                Some((_, mask)) => *mask |= 1 << p,
                None => classes.push((c, 1 << p)),
            }
        }
        for (c, mask) in classes {
            let mut narrowed = problem.clone();
            narrowed.restrict(e, mask);
            if current.len() + 1 < self.observed.len() && narrowed.solve().is_none() {
                continue;
            }
            current.push(c);
            self.extend(narrowed, current, found);
            current.pop();
        }
    }
}

struct BenchBuilder {
    b: Builder,
    boundary: GadgetId,
    inputs: Vec<(String, Vec<SlotColor>)>,
    observed: Vec<usize>,
}

impl BenchBuilder {
    fn new() -> Self {
        let mut b = Builder::new();
        let boundary = b.gadget(GadgetKind::Boundary, Layer::Variable);
        BenchBuilder {
            b,
            boundary,
            inputs: Vec::new(),
            observed: Vec::new(),
        }
    }

    fn constant(&mut self, freq: u64, color: SlotColor) -> Port {
        let p = self.b.node(self.boundary, false);
        let name = format!("const{}", p);
        self.b.output(self.boundary, p, name, freq, EdgeRole::Constant(color))
    }

    fn constants(&mut self, n: usize, freq: u64, color: SlotColor) -> Vec<Port> {
        (0..n).map(|_| self.constant(freq, color)).collect()
    }

    fn pair(&mut self, freq: u64, color: SlotColor) -> [Port; 2] {
        [self.constant(freq, color), self.constant(freq, color)]
    }

    /// A signal input; `role` only has to satisfy the gadget's own assertions.
    fn input(&mut self, freq: u64, domain: &[SlotColor], role: EdgeRole) -> Port {
        let p = self.b.node(self.boundary, false);
        let name = format!("input{}", p);
        self.inputs.push((name.clone(), domain.to_vec()));
        self.b.output(self.boundary, p, name, freq, role)
    }

    fn observe(&mut self, port: Port) {
        let p = self.b.node(self.boundary, false);
        let e = self.b.connect(port, self.boundary, p, "observe");
        self.observed.push(e);
    }

    fn finish(self) -> Bench {
        let b = self.b;
        let edges = b.edges();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.a, e.b)).collect();
        let graph = Graph::new(b.num_persons(), &pairs).expect("bench wiring is simple");
        let dps = DpsInstance::new(graph, edges.iter().map(|e| e.freq).collect()).expect("positive frequencies");
        let input_names: Vec<&str> = self.inputs.iter().map(|(n, _)| n.as_str()).collect();
        let pins = edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                let source = b.gadgets()[e.source.gadget].kind;
                let from_outside = matches!(source, GadgetKind::Boundary | GadgetKind::TrueClock);
                match e.role {
                    EdgeRole::Constant(c) if from_outside && !input_names.contains(&e.source.port.as_str()) => {
                        Some((i, c))
                    }
                    _ => None,
                }
            })
            .collect();
        let inputs = self
            .inputs
            .iter()
            .map(|(name, domain)| {
                let e = edges
                    .iter()
                    .position(|e| e.source.gadget == self.boundary && &e.source.port == name)
                    .expect("every input is consumed");
                (e, domain.clone())
            })
            .collect();
        Bench {
            dps,
            pins,
            inputs,
            observed: self.observed,
            tight_nodes: b.tight_nodes().to_vec(),
        }
    }
}

const WIRE: EdgeRole = EdgeRole::Internal;
const BG: &[SlotColor] = &[B, G];

pub fn bench(kind: LemmaKind) -> Bench {
    let mut k = BenchBuilder::new();
    let layer = Layer::Duplication;
    match kind {
        LemmaKind::Variable => {
            let clock = true_clock(&mut k.b);
            let x1 = variable(&mut k.b, 0, clock.green);
            let x2 = variable(&mut k.b, 1, x1.chain);
            for port in [x1.positive, x1.negative, x2.positive, x2.negative, x2.chain] {
                k.observe(port);
            }
            for port in [clock.red, clock.blue, clock.purple] {
                k.b.pendant(port);
            }
        }
        LemmaKind::D3 => {
            let input = k.input(3, &[R, B], WIRE);
            let green = k.constant(6, G);
            let purple = k.constant(6, P);
            let out = d3(&mut k.b, layer, input, green, purple);
            for port in out.copies {
                k.observe(port);
            }
            k.observe(out.green);
            k.observe(out.purple);
        }
        LemmaKind::D6 => {
            let seed = k.input(6, &[G, P], EdgeRole::Constant(G));
            let blue = k.constant(3, B);
            let red = k.constant(3, R);
            let out = d6(&mut k.b, layer, seed, blue, red);
            for port in out.seeds.into_iter().chain(out.red) {
                k.observe(port);
            }
        }
        LemmaKind::D12 => {
            let input = k.input(12, BG, WIRE);
            let consts = D12Constants {
                red: k.pair(3, R),
                blue6: k.pair(6, B),
                purple: k.pair(6, P),
            };
            for port in d12(&mut k.b, layer, input, consts) {
                k.observe(port);
            }
        }
        LemmaKind::Or => {
            let literals = [0, 1, 2].map(|_| k.input(3, &[R, B], WIRE));
            let red = k.constant(3, R);
            let out = or_clause(&mut k.b, layer, literals, red, WIRE);
            k.observe(out);
        }
        LemmaKind::Or2 => {
            let inputs = [k.input(12, BG, WIRE), k.input(12, BG, WIRE)];
            let consts = Or2Constants {
                red: k.pair(3, R),
                purple: k.pair(6, P),
                blue6: k.constant(6, B),
                blue12: k.constant(12, B),
                green12: k.constant(12, G),
            };
            let out = or2(&mut k.b, layer, inputs, consts, WIRE);
            k.observe(out);
        }
        LemmaKind::And2 => {
            let inputs = [k.input(12, BG, WIRE), k.input(12, BG, WIRE)];
            let consts = And2Constants {
                red: k.pair(3, R),
                purple: k.pair(6, P),
                blue6: k.constant(6, B),
            };
            let out = and2(&mut k.b, layer, inputs, consts, WIRE);
            k.observe(out);
        }
        LemmaKind::SplitB6 => {
            let (r, g, p) = (k.constant(3, R), k.constant(6, G), k.constant(6, P));
            for port in sb6(&mut k.b, layer, r, g, p) {
                k.observe(port);
            }
        }
        LemmaKind::SplitB12 => {
            let (r, g, p) = (k.constant(3, R), k.constant(6, G), k.constant(6, P));
            for port in sb12(&mut k.b, layer, r, g, p) {
                k.observe(port);
            }
        }
        LemmaKind::SplitG12 => {
            let (r, bl, p) = (k.constant(3, R), k.constant(3, B), k.constant(6, P));
            for port in sg12(&mut k.b, layer, r, bl, p) {
                k.observe(port);
            }
        }
        LemmaKind::Swap => {
            let inputs = [k.input(12, BG, WIRE), k.input(12, BG, WIRE)];
            let consts = SwapConstants {
                red: k.constants(SwapConstants::RED, 3, R),
                purple: k.constants(SwapConstants::PURPLE, 6, P),
                green: k.constants(SwapConstants::GREEN, 6, G),
                blue12: k.constant(12, B),
                green12: k.constant(12, G),
            };
            for port in swap(&mut k.b, Layer::Sorting, None, inputs, consts, [WIRE, WIRE]) {
                k.observe(port);
            }
        }
        LemmaKind::Tension => {
            let inputs = (0..4).map(|_| k.input(12, BG, WIRE)).collect();
            let (r, g, p) = (k.constant(3, R), k.constant(6, G), k.constant(6, P));
            tension(&mut k.b, Layer::Tension, inputs, r, g, p);
        }
    }
    k.finish()
}

fn set<const N: usize>(rows: impl IntoIterator<Item = [SlotColor; N]>) -> BTreeSet<Signature> {
    rows.into_iter().map(|row| row.map(Some).to_vec()).collect()
}

/// Bounds on the reachable output signatures for one input case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    /// Signatures the gadget must never produce anything outside of.
    pub allowed: BTreeSet<Signature>,
    /// Signatures later layers rely on being reachable.
    pub required: BTreeSet<Signature>,
}

impl Expectation {
    fn exact(signatures: BTreeSet<Signature>) -> Self {
        Expectation {
            allowed: signatures.clone(),
            required: signatures,
        }
    }
}

pub fn expected(kind: LemmaKind, inputs: &[SlotColor]) -> Expectation {
    let exact = Expectation::exact;
    match kind {
        LemmaKind::Variable => exact(set([
            [R, B, R, B, G],
            [R, B, B, R, G],
            [B, R, R, B, G],
            [B, R, B, R, G],
        ])),
        LemmaKind::D3 => exact(set([[inputs[0], inputs[0], inputs[0], G, P]])),
        LemmaKind::D6 => exact(set([[inputs[0], inputs[0], R, R]])),
        LemmaKind::D12 => exact(set([[inputs[0]; 2]])),
        LemmaKind::Or if inputs.contains(&R) => exact(set([[B], [G], [P]])),
        LemmaKind::Or => exact(set([[G], [P]])),
        LemmaKind::Or2 if inputs.contains(&B) => exact(set([[B], [G]])),
        LemmaKind::Or2 => exact(set([[G]])),
        LemmaKind::And2 if inputs.iter().all(|&c| c == B) => exact(set([[B], [G]])),
        LemmaKind::And2 => exact(set([[G]])),
        LemmaKind::SplitB6 => exact(set([[B; 2]])),
        LemmaKind::SplitB12 => exact(set([[B; 4]])),
        LemmaKind::SplitG12 => exact(set([[G; 2]])),
        LemmaKind::Swap => {
            let any_blue = inputs.contains(&B);
            let both_blue = inputs.iter().all(|&c| c == B);
            let allowed = [B, G]
                .into_iter()
                .flat_map(|or| [B, G].map(|and| [or, and]))
                .filter(|&[or, and]| (or == G || any_blue) && (and == G || both_blue));
            let sorted = [if any_blue { B } else { G }, if both_blue { B } else { G }];
            Expectation {
                allowed: set(allowed),
                required: set([sorted]),
            }
        }
        LemmaKind::Tension if inputs.iter().all(|&c| c == B) => exact(set::<0>([[]])),
        LemmaKind::Tension => exact(BTreeSet::new()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub inputs: Vec<SlotColor>,
    pub observed: BTreeSet<Signature>,
    pub expected: Expectation,
}

impl CaseOutcome {
    pub fn matches(&self) -> bool {
        self.expected.required.is_subset(&self.observed) && self.observed.is_subset(&self.expected.allowed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaVerdict {
    pub kind: LemmaKind,
    pub cases: Vec<CaseOutcome>,
    /// Tight persons of the bench whose frequencies do not sum to one.
    pub density_violations: Vec<usize>,
}

impl LemmaVerdict {
    pub fn holds(&self) -> bool {
        self.density_violations.is_empty() && self.cases.iter().all(CaseOutcome::matches)
    }
}

pub fn gadget_local_check(kind: LemmaKind) -> LemmaVerdict {
    let bench = bench(kind);
    let one = polysched_core::rational::int(1);
    let density_violations = bench
        .tight_nodes
        .iter()
        .copied()
        .filter(|&p| bench.dps.density_at(p) != one)
        .collect();
    let cases = bench
        .input_cases()
        .into_iter()
        .map(|inputs| CaseOutcome {
            observed: bench.signatures(&inputs),
            expected: expected(kind, &inputs),
            inputs,
        })
        .collect();
    LemmaVerdict {
        kind,
        cases,
        density_violations,
    }
}
