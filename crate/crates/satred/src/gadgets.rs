//! Gadget library. Each function adds one gadget's persons and edges to a [`Builder`],
//! consuming the output ports it is fed and returning the ports it produces.

use std::fmt;

use crate::cnf::Literal;
use crate::slots::SlotColor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetKind {
    TrueClock,
    Variable,
    D3,
    D6,
    D12,
    Or,
    Or2,
    And2,
    SB6,
    SB12,
    SG12,
    Swap,
    SortNet,
    Tension,
    Pendant,
    /// Stand-in for the neighbours of a gadget examined in isolation.
    Boundary,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::TrueClock => "clock",
            GadgetKind::Variable => "var",
            GadgetKind::D3 => "d3",
            GadgetKind::D6 => "d6",
            GadgetKind::D12 => "d12",
            GadgetKind::Or => "or",
            GadgetKind::Or2 => "or2",
            GadgetKind::And2 => "and2",
            GadgetKind::SB6 => "sb6",
            GadgetKind::SB12 => "sb12",
            GadgetKind::SG12 => "sg12",
            GadgetKind::Swap => "swap",
            GadgetKind::SortNet => "sortnet",
            GadgetKind::Tension => "tension",
            GadgetKind::Pendant => "pendant",
            GadgetKind::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Variable,
    Duplication,
    Clause,
    Sorting,
    Tension,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Layer::Variable => "variable",
            Layer::Duplication => "duplication",
            Layer::Clause => "clause",
            Layer::Sorting => "sorting",
            Layer::Tension => "tension",
        };
        f.write_str(name)
    }
}

pub type GadgetId = usize;
pub type WireId = usize;

/// Boolean signal on a 12-frequency wire: blue when true, green when false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    Clause(usize),
    Or(WireId, WireId),
    And(WireId, WireId),
}

/// What fixes an edge's colour in a synthesized schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRole {
    Constant(SlotColor),
    /// Red when the literal is true, blue otherwise.
    Literal(Literal),
    Wire(WireId),
    /// Left to the phase search.
    Internal,
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub kind: GadgetKind,
    pub label: String,
    pub layer: Layer,
    pub parent: Option<GadgetId>,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub gadget: GadgetId,
    pub port: String,
}

#[derive(Debug, Clone)]
pub struct BuiltEdge {
    pub a: usize,
    pub b: usize,
    pub freq: u64,
    pub role: EdgeRole,
    pub source: PortRef,
    pub sink: PortRef,
}

/// An output half-edge waiting for its consumer.
#[derive(Debug)]
#[must_use]
pub struct Port {
    pub person: usize,
    pub freq: u64,
    pub role: EdgeRole,
    pub source: PortRef,
}

#[derive(Debug, Default)]
pub struct Builder {
    persons: usize,
    edges: Vec<BuiltEdge>,
    gadgets: Vec<GadgetInstance>,
    tight: Vec<usize>,
    wires: Vec<Wire>,
    kind_counts: std::collections::HashMap<GadgetKind, usize>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn gadget(&mut self, kind: GadgetKind, layer: Layer) -> GadgetId {
        let n = self.kind_counts.entry(kind).or_default();
        *n += 1;
        let label = format!("{}#{}", kind.name(), n);
        self.gadget_labelled(kind, layer, label)
    }

    pub fn gadget_labelled(&mut self, kind: GadgetKind, layer: Layer, label: String) -> GadgetId {
        self.gadgets.push(GadgetInstance {
            kind,
            label,
            layer,
            parent: None,
            nodes: Vec::new(),
        });
        self.gadgets.len() - 1
    }

    pub fn set_parent(&mut self, child: GadgetId, parent: GadgetId) {
        self.gadgets[child].parent = Some(parent);
    }

    /// Adds a person to gadget `g`; `tight` marks persons whose frequencies must sum to one.
    pub fn node(&mut self, g: GadgetId, tight: bool) -> usize {
        let p = self.persons;
        self.persons += 1;
        self.gadgets[g].nodes.push(p);
        if tight {
            self.tight.push(p);
        }
        p
    }

    pub fn output(&mut self, g: GadgetId, person: usize, port: impl Into<String>, freq: u64, role: EdgeRole) -> Port {
        Port {
            person,
            freq,
            role,
            source: PortRef { gadget: g, port: port.into() },
        }
    }

    pub fn connect(&mut self, port: Port, g: GadgetId, person: usize, name: impl Into<String>) -> usize {
        self.edges.push(BuiltEdge {
            a: port.person,
            b: person,
            freq: port.freq,
            role: port.role,
            source: port.source,
            sink: PortRef { gadget: g, port: name.into() },
        });
        self.edges.len() - 1
    }

    /// Edge between two persons of the same gadget.
    #[allow(clippy::too_many_arguments)]
    pub fn internal(
        &mut self,
        g: GadgetId,
        u: usize,
        v: usize,
        freq: u64,
        role: EdgeRole,
        from: &str,
        to: &str,
    ) -> usize {
        let port = self.output(g, u, from, freq, role);
        self.connect(port, g, v, to)
    }

    /// Terminates `port` at a fresh degree-one person.
    pub fn pendant(&mut self, port: Port) -> usize {
        let layer = self.gadgets[port.source.gadget].layer;
        let g = self.gadget(GadgetKind::Pendant, layer);
        let p = self.node(g, false);
        self.connect(port, g, p, "in")
    }

    pub fn wire(&mut self, wire: Wire) -> WireId {
        self.wires.push(wire);
        self.wires.len() - 1
    }

    pub fn num_persons(&self) -> usize {
        self.persons
    }
    pub fn edges(&self) -> &[BuiltEdge] {
        &self.edges
    }
    pub fn gadgets(&self) -> &[GadgetInstance] {
        &self.gadgets
    }
    pub fn tight_nodes(&self) -> &[usize] {
        &self.tight
    }
    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }
}

fn constant(color: SlotColor) -> EdgeRole {
    EdgeRole::Constant(color)
}

fn opposite(role: EdgeRole) -> EdgeRole {
    match role {
        EdgeRole::Constant(SlotColor::Green) => constant(SlotColor::Purple),
        EdgeRole::Constant(SlotColor::Purple) => constant(SlotColor::Green),
        other => panic!("expected a green or purple constant, got {other:?}"),
    }
}

pub struct Clock {
    pub red: Port,
    pub blue: Port,
    pub green: Port,
    pub purple: Port,
}

pub fn true_clock(b: &mut Builder) -> Clock {
    let g = b.gadget_labelled(GadgetKind::TrueClock, Layer::Variable, "T".into());
    let t = b.node(g, true);
    Clock {
        red: b.output(g, t, "3R", 3, constant(SlotColor::Red)),
        blue: b.output(g, t, "3B", 3, constant(SlotColor::Blue)),
        green: b.output(g, t, "6G", 6, constant(SlotColor::Green)),
        purple: b.output(g, t, "6P", 6, constant(SlotColor::Purple)),
    }
}

pub struct VariableOutputs {
    pub positive: Port,
    pub negative: Port,
    /// Continues the chain; purple after a green input and vice versa.
    pub chain: Port,
}

pub fn variable(b: &mut Builder, var: usize, chain_in: Port) -> VariableOutputs {
    let g = b.gadget_labelled(GadgetKind::Variable, Layer::Variable, format!("x{}", var + 1));
    let x = b.node(g, true);
    let next = opposite(chain_in.role);
    b.connect(chain_in, g, x, "in6");
    VariableOutputs {
        positive: b.output(g, x, "3R", 3, EdgeRole::Literal(Literal::pos(var))),
        negative: b.output(g, x, "3B", 3, EdgeRole::Literal(Literal::neg(var))),
        chain: b.output(g, x, "out6", 6, next),
    }
}

pub struct D3Outputs {
    pub copies: [Port; 3],
    pub green: Port,
    pub purple: Port,
}

/// Three copies of a 3-frequency input. Borrows a green and a purple 6 and returns both.
pub fn d3(b: &mut Builder, layer: Layer, input: Port, green: Port, purple: Port) -> D3Outputs {
    let g = b.gadget(GadgetKind::D3, layer);
    let role = input.role;
    let head = b.node(g, true);
    let tails = [b.node(g, true), b.node(g, true), b.node(g, true)];
    b.connect(input, g, head, "in3");
    b.connect(green, g, head, "in6G");
    let purple_out = b.output(g, head, "out6P", 6, constant(SlotColor::Purple));
    for (i, &t) in tails.iter().enumerate() {
        b.internal(g, head, t, 9, EdgeRole::Internal, &format!("9.{i}"), "9");
    }
    b.connect(purple, g, tails[0], "in6P");
    b.internal(g, tails[0], tails[1], 6, constant(SlotColor::Green), "6G", "6G");
    b.internal(g, tails[1], tails[2], 6, constant(SlotColor::Purple), "6P", "6P");
    let green_out = b.output(g, tails[2], "out6G", 6, constant(SlotColor::Green));
    let copies = tails.map(|t| {
        for spare in ["out9a", "out9b"] {
            let p = b.output(g, t, spare, 9, EdgeRole::Internal);
            b.pendant(p);
        }
        b.output(g, t, "out3", 3, role)
    });
    D3Outputs {
        copies,
        green: green_out,
        purple: purple_out,
    }
}

pub struct D6Outputs {
    pub seeds: [Port; 2],
    pub red: [Port; 2],
}

/// Two copies of a green or purple 6, plus a spare red 3, at the cost of one blue 3.
pub fn d6(b: &mut Builder, layer: Layer, seed: Port, blue: Port, red: Port) -> D6Outputs {
    let g = b.gadget(GadgetKind::D6, layer);
    let role = seed.role;
    assert!(
        matches!(role, EdgeRole::Constant(SlotColor::Green | SlotColor::Purple)),
        "d6 seeds must be green or purple 6s"
    );
    let [top, left, right] = [b.node(g, true), b.node(g, true), b.node(g, true)];
    b.connect(seed, g, top, "in6");
    b.connect(blue, g, top, "in3B");
    let red_top = b.output(g, top, "out3R", 3, constant(SlotColor::Red));
    b.internal(g, top, left, 12, EdgeRole::Internal, "12a", "12");
    b.internal(g, top, right, 12, EdgeRole::Internal, "12b", "12");
    b.connect(red, g, left, "in3R");
    b.internal(g, left, right, 3, constant(SlotColor::Blue), "3B", "3B");
    let seed_left = b.output(g, left, "out6", 6, role);
    let spare = b.output(g, left, "out12", 12, EdgeRole::Internal);
    b.pendant(spare);
    let red_right = b.output(g, right, "out3R", 3, constant(SlotColor::Red));
    let seed_right = b.output(g, right, "out6", 6, role);
    let spare = b.output(g, right, "out12", 12, EdgeRole::Internal);
    b.pendant(spare);
    D6Outputs {
        seeds: [seed_left, seed_right],
        red: [red_top, red_right],
    }
}

/// Inputs of a sorting-layer helper that only needs red 3s, blue 6s and purple 6s.
pub struct D12Constants {
    pub red: [Port; 2],
    pub blue6: [Port; 2],
    pub purple: [Port; 2],
}

/// Two copies of a 12-frequency wire, built inside gadget `g`.
pub fn d12_into(b: &mut Builder, g: GadgetId, prefix: &str, input: Port, consts: D12Constants) -> [Port; 2] {
    let role = input.role;
    let [r0, r1] = consts.red;
    let [b0, b1] = consts.blue6;
    let [p0, p1] = consts.purple;
    let inv = b.node(g, true);
    let dup = b.node(g, true);
    b.connect(input, g, inv, format!("{prefix}in12"));
    b.connect(r0, g, inv, format!("{prefix}in3R"));
    b.connect(b0, g, inv, format!("{prefix}in6B"));
    b.connect(p0, g, inv, format!("{prefix}in6P"));
    let spare = b.output(g, inv, format!("{prefix}spare12"), 12, role);
    b.pendant(spare);
    b.internal(g, inv, dup, 6, EdgeRole::Internal, &format!("{prefix}6bar"), &format!("{prefix}6bar"));
    b.connect(r1, g, dup, format!("{prefix}in3R'"));
    b.connect(b1, g, dup, format!("{prefix}in6B'"));
    b.connect(p1, g, dup, format!("{prefix}in6P'"));
    [
        b.output(g, dup, format!("{prefix}out12a"), 12, role),
        b.output(g, dup, format!("{prefix}out12b"), 12, role),
    ]
}

pub fn d12(b: &mut Builder, layer: Layer, input: Port, consts: D12Constants) -> [Port; 2] {
    let g = b.gadget(GadgetKind::D12, layer);
    d12_into(b, g, "", input, consts)
}

pub struct Or2Constants {
    pub red: [Port; 2],
    pub purple: [Port; 2],
    pub blue6: Port,
    pub blue12: Port,
    pub green12: Port,
}

/// Output may be blue only if some input is blue.
pub fn or2_into(
    b: &mut Builder,
    g: GadgetId,
    prefix: &str,
    inputs: [Port; 2],
    consts: Or2Constants,
    out_role: EdgeRole,
) -> Port {
    let [r0, r1] = consts.red;
    let [p0, p1] = consts.purple;
    let gate = b.node(g, true);
    let inv = b.node(g, true);
    for (i, input) in inputs.into_iter().enumerate() {
        b.connect(input, g, gate, format!("{prefix}in12.{i}"));
    }
    b.connect(r0, g, gate, format!("{prefix}in3R"));
    b.connect(p0, g, gate, format!("{prefix}in6P"));
    for (name, freq) in [("spare12", 12), ("spare6", 6)] {
        let spare = b.output(g, gate, format!("{prefix}{name}"), freq, EdgeRole::Internal);
        b.pendant(spare);
    }
    b.internal(g, gate, inv, 12, EdgeRole::Internal, &format!("{prefix}12'"), &format!("{prefix}12'"));
    b.connect(r1, g, inv, format!("{prefix}in3R'"));
    b.connect(p1, g, inv, format!("{prefix}in6P'"));
    b.connect(consts.blue6, g, inv, format!("{prefix}in6B"));
    b.connect(consts.blue12, g, inv, format!("{prefix}in12B"));
    b.connect(consts.green12, g, inv, format!("{prefix}in12G"));
    b.output(g, inv, format!("{prefix}out12"), 12, out_role)
}

pub fn or2(b: &mut Builder, layer: Layer, inputs: [Port; 2], consts: Or2Constants, out_role: EdgeRole) -> Port {
    let g = b.gadget(GadgetKind::Or2, layer);
    or2_into(b, g, "", inputs, consts, out_role)
}

pub struct And2Constants {
    pub red: [Port; 2],
    pub purple: [Port; 2],
    pub blue6: Port,
}

/// Output may be blue only if both inputs are blue.
pub fn and2_into(
    b: &mut Builder,
    g: GadgetId,
    prefix: &str,
    inputs: [Port; 2],
    consts: And2Constants,
    out_role: EdgeRole,
) -> Port {
    let [r0, r1] = consts.red;
    let [p0, p1] = consts.purple;
    let gate = b.node(g, true);
    let inv = b.node(g, true);
    for (i, input) in inputs.into_iter().enumerate() {
        b.connect(input, g, gate, format!("{prefix}in12.{i}"));
    }
    b.connect(r0, g, gate, format!("{prefix}in3R"));
    b.connect(p0, g, gate, format!("{prefix}in6P"));
    for name in ["spare12a", "spare12b"] {
        let spare = b.output(g, gate, format!("{prefix}{name}"), 12, EdgeRole::Internal);
        b.pendant(spare);
    }
    b.internal(g, gate, inv, 6, EdgeRole::Internal, &format!("{prefix}6and"), &format!("{prefix}6and"));
    b.connect(r1, g, inv, format!("{prefix}in3R'"));
    b.connect(consts.blue6, g, inv, format!("{prefix}in6B"));
    b.connect(p1, g, inv, format!("{prefix}in6P'"));
    let spare = b.output(g, inv, format!("{prefix}spare12"), 12, EdgeRole::Internal);
    b.pendant(spare);
    b.output(g, inv, format!("{prefix}out12"), 12, out_role)
}

pub fn and2(b: &mut Builder, layer: Layer, inputs: [Port; 2], consts: And2Constants, out_role: EdgeRole) -> Port {
    let g = b.gadget(GadgetKind::And2, layer);
    and2_into(b, g, "", inputs, consts, out_role)
}

pub fn sb6_into(b: &mut Builder, g: GadgetId, prefix: &str, red: Port, green: Port, purple: Port) -> [Port; 2] {
    let s = b.node(g, true);
    b.connect(red, g, s, format!("{prefix}in3R"));
    b.connect(green, g, s, format!("{prefix}in6G"));
    b.connect(purple, g, s, format!("{prefix}in6P"));
    [
        b.output(g, s, format!("{prefix}out6B.0"), 6, constant(SlotColor::Blue)),
        b.output(g, s, format!("{prefix}out6B.1"), 6, constant(SlotColor::Blue)),
    ]
}

pub fn sb6(b: &mut Builder, layer: Layer, red: Port, green: Port, purple: Port) -> [Port; 2] {
    let g = b.gadget(GadgetKind::SB6, layer);
    sb6_into(b, g, "", red, green, purple)
}

pub fn sb12(b: &mut Builder, layer: Layer, red: Port, green: Port, purple: Port) -> [Port; 4] {
    let g = b.gadget(GadgetKind::SB12, layer);
    let s = b.node(g, true);
    b.connect(red, g, s, "in3R");
    b.connect(green, g, s, "in6G");
    b.connect(purple, g, s, "in6P");
    [0, 1, 2, 3].map(|i| b.output(g, s, format!("out12B.{i}"), 12, constant(SlotColor::Blue)))
}

pub fn sg12(b: &mut Builder, layer: Layer, red: Port, blue: Port, purple: Port) -> [Port; 2] {
    let g = b.gadget(GadgetKind::SG12, layer);
    let s = b.node(g, true);
    b.connect(red, g, s, "in3R");
    b.connect(blue, g, s, "in3B");
    b.connect(purple, g, s, "in6P");
    [0, 1].map(|i| b.output(g, s, format!("out12G.{i}"), 12, constant(SlotColor::Green)))
}

/// Clause gadget: one inverter person per literal feeding a density-one OR person.
pub fn or_clause(b: &mut Builder, layer: Layer, literals: [Port; 3], red: Port, out_role: EdgeRole) -> Port {
    let g = b.gadget(GadgetKind::Or, layer);
    let gate = b.node(g, true);
    for (i, lit) in literals.into_iter().enumerate() {
        let inv = b.node(g, false);
        b.connect(lit, g, inv, format!("in3.{i}"));
        b.internal(g, inv, gate, 12, EdgeRole::Internal, "12", &format!("12.{i}"));
    }
    b.connect(red, g, gate, "in3R");
    for name in ["spare6a", "spare6b"] {
        let spare = b.output(g, gate, name, 6, EdgeRole::Internal);
        b.pendant(spare);
    }
    b.output(g, gate, "out12", 12, out_role)
}

pub struct SwapConstants {
    /// Eleven red 3s.
    pub red: Vec<Port>,
    /// Eleven purple 6s.
    pub purple: Vec<Port>,
    /// Three green 6s.
    pub green: Vec<Port>,
    pub blue12: Port,
    pub green12: Port,
}

impl SwapConstants {
    pub const RED: usize = 11;
    pub const PURPLE: usize = 11;
    pub const GREEN: usize = 3;
}

/// Comparator: the first output carries the OR of the inputs, the second the AND.
/// The middle splitter feeds both inverter persons; feeding an inverter and the OR from
/// one splitter leaves no schedule when only the first input is blue.
pub fn swap(
    b: &mut Builder,
    layer: Layer,
    parent: Option<GadgetId>,
    inputs: [Port; 2],
    consts: SwapConstants,
    roles: [EdgeRole; 2],
) -> [Port; 2] {
    assert_eq!(consts.red.len(), SwapConstants::RED);
    assert_eq!(consts.purple.len(), SwapConstants::PURPLE);
    assert_eq!(consts.green.len(), SwapConstants::GREEN);
    let g = b.gadget(GadgetKind::Swap, layer);
    if let Some(parent) = parent {
        b.set_parent(g, parent);
    }
    let mut red = consts.red.into_iter();
    let mut purple = consts.purple.into_iter();
    let mut green = consts.green.into_iter();
    let mut r = || red.next().expect("eleven red constants");
    let mut p = || purple.next().expect("eleven purple constants");
    let [left0, left1] = sb6_into(b, g, "sbL.", r(), green.next().unwrap(), p());
    let [mid0, mid1] = sb6_into(b, g, "sbM.", r(), green.next().unwrap(), p());
    let [right0, right1] = sb6_into(b, g, "sbR.", r(), green.next().unwrap(), p());
    let [in1, in2] = inputs;
    let [a_or, a_and] = d12_into(
        b,
        g,
        "d12a.",
        in1,
        D12Constants {
            red: [r(), r()],
            blue6: [mid0, left0],
            purple: [p(), p()],
        },
    );
    let [b_or, b_and] = d12_into(
        b,
        g,
        "d12b.",
        in2,
        D12Constants {
            red: [r(), r()],
            blue6: [mid1, right1],
            purple: [p(), p()],
        },
    );
    let or_out = or2_into(
        b,
        g,
        "or2.",
        [a_or, b_or],
        Or2Constants {
            red: [r(), r()],
            purple: [p(), p()],
            blue6: left1,
            blue12: consts.blue12,
            green12: consts.green12,
        },
        roles[0],
    );
    let and_out = and2_into(
        b,
        g,
        "and2.",
        [a_and, b_and],
        And2Constants {
            red: [r(), r()],
            purple: [p(), p()],
            blue6: right0,
        },
        roles[1],
    );
    [or_out, and_out]
}

pub const TENSION_WIDTH: usize = 4;

/// Forces up to four 12-frequency inputs into blue slots; unused inputs end at pendants.
pub fn tension(b: &mut Builder, layer: Layer, inputs: Vec<Port>, red: Port, green: Port, purple: Port) {
    assert!(inputs.len() <= TENSION_WIDTH);
    let g = b.gadget(GadgetKind::Tension, layer);
    let t = b.node(g, true);
    let used = inputs.len();
    for (i, input) in inputs.into_iter().enumerate() {
        b.connect(input, g, t, format!("in12.{i}"));
    }
    for i in used..TENSION_WIDTH {
        let spare = b.output(g, t, format!("unused12.{i}"), 12, EdgeRole::Internal);
        b.pendant(spare);
    }
    b.connect(red, g, t, "in3R");
    b.connect(green, g, t, "in6G");
    b.connect(purple, g, t, "in6P");
}

/// Comparators of the insertion/bubble network on `m` channels, in application order.
/// Channels `k` and `k + 1` (counted from one) meet in layers `k-1, k-3, ..., 1-k`.
pub fn sorting_network(m: usize) -> Vec<(usize, usize)> {
    if m < 2 {
        return Vec::new();
    }
    let top = m as i64 - 2;
    let mut comparators = Vec::new();
    for layer in -top..=top {
        for k in 1..m as i64 {
            if layer.abs() < k && (k - 1 - layer) % 2 == 0 {
                comparators.push((k as usize - 1, k as usize));
            }
        }
    }
    comparators
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn network_sizes() {
        assert!(sorting_network(1).is_empty());
        assert_eq!(sorting_network(2), vec![(0, 1)]);
        assert_eq!(sorting_network(3), vec![(1, 2), (0, 1), (1, 2)]);
        for m in 2..9 {
            assert_eq!(sorting_network(m).len(), m * (m - 1) / 2);
        }
    }

    #[test]
    fn gadget_persons_have_unit_density() {
        let mut b = Builder::new();
        let clock = true_clock(&mut b);
        let x1 = variable(&mut b, 0, clock.green);
        let x2 = variable(&mut b, 1, x1.chain);
        let out = d3(&mut b, Layer::Duplication, x1.positive, x2.chain, clock.purple);
        for p in out.copies {
            b.pendant(p);
        }
        for p in [out.green, out.purple, x1.negative, x2.positive, x2.negative, clock.red, clock.blue] {
            b.pendant(p);
        }
        for &p in b.tight_nodes() {
            let density: f64 = b
                .edges()
                .iter()
                .filter(|e| e.a == p || e.b == p)
                .map(|e| 1.0 / e.freq as f64)
                .sum();
            assert!((density - 1.0).abs() < 1e-9, "person {p} has density {density}");
        }
    }
}
