//! Circuit satisfiability to directed Hamiltonicity.
//!
//! Tseitin CNF is simplified by unit propagation, then each remaining variable
//! becomes a bidirectional chain between two hub vertices, and each clause a
//! vertex reachable by a detour from the chain of any of its literals.
//!
//! Chain of a variable with `k` occurrences: `3k + 1` vertices (two when `k`
//! is zero), separators at positions `0, 3, 6, ...` and occurrence `t` at
//! positions `3t + 1, 3t + 2`. Left-to-right traversal means true. A positive
//! literal detours `p -> clause -> q`, a negative one `q -> clause -> p`.

use super::circuit::BooleanCircuit;
use super::cnf::{tseitin, unit_propagate, Lit};
use super::graph::{CycleWitness, HamiltonicityInstance};
use serde::{Deserialize, Serialize};

pub const DEFAULT_GATE_BOUND: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("malformed statement: {0}")]
    Malformed(String),
    #[error("malformed circuit: {0}")]
    Circuit(#[from] super::circuit::CircuitError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub clause: usize,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub var: usize,
    pub hub: usize,
    /// Vertex ids, left to right.
    pub nodes: Vec<usize>,
    pub occurrences: Vec<Occurrence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapShape {
    /// Gadget graph as described in the module docs.
    Gadgets { chains: Vec<Chain>, clause_nodes: Vec<usize> },
    /// Every variable fixed and no clause left: a directed triangle.
    Trivial,
    /// Propagation found a conflict: a graph with no Hamiltonian cycle.
    Unsat,
}

/// Converts between satisfying circuit inputs and Hamiltonian cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMap {
    pub circuit: BooleanCircuit,
    pub fixed: Vec<Option<bool>>,
    pub clauses: Vec<Vec<(usize, bool)>>,
    pub shape: MapShape,
}

pub fn circuit_to_hc(c: &BooleanCircuit, gate_bound: usize) -> Result<(HamiltonicityInstance, WitnessMap), ReduceError> {
    c.validate()?;
    if c.gates.len() > gate_bound {
        return Err(ReduceError::UnsupportedScale(format!("{} gates exceed the bound {gate_bound}", c.gates.len())));
    }
    let s = unit_propagate(&tseitin(c));
    let to_pairs = |cl: &Vec<Lit>| cl.iter().map(|l| (l.var, l.positive)).collect::<Vec<_>>();
    let map = |shape, clauses| WitnessMap { circuit: c.clone(), fixed: s.fixed.clone(), clauses, shape };
    if s.unsat {
        let g = HamiltonicityInstance::new(3, [(0, 1), (1, 2), (2, 1)]).unwrap();
        return Ok((g, map(MapShape::Unsat, Vec::new())));
    }
    let mut in_clause = vec![false; c.wires()];
    for cl in &s.clauses {
        for l in cl {
            in_clause[l.var] = true;
        }
    }
    // Free inputs keep a chain even without clauses so that the cycle encodes them.
    let vars: Vec<usize> = (0..c.wires())
        .filter(|&v| s.fixed[v].is_none() && (v < c.inputs || in_clause[v]))
        .collect();
    let clauses: Vec<Vec<(usize, bool)>> = s.clauses.iter().map(to_pairs).collect();
    if vars.is_empty() {
        let g = HamiltonicityInstance::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        return Ok((g, map(MapShape::Trivial, clauses)));
    }
    let mut occ: Vec<Vec<Occurrence>> = vec![Vec::new(); c.wires()];
    for (j, cl) in clauses.iter().enumerate() {
        for &(v, positive) in cl {
            occ[v].push(Occurrence { clause: j, positive });
        }
    }
    let mut next = 0usize;
    let mut alloc = |k: usize| {
        let r: Vec<usize> = (next..next + k).collect();
        next += k;
        r
    };
    let mut chains = Vec::with_capacity(vars.len());
    for &v in &vars {
        let hub = alloc(1)[0];
        let len = if occ[v].is_empty() { 2 } else { 3 * occ[v].len() + 1 };
        chains.push(Chain { var: v, hub, nodes: alloc(len), occurrences: std::mem::take(&mut occ[v]) });
    }
    let clause_nodes = alloc(clauses.len());
    let mut edges = Vec::new();
    for (i, ch) in chains.iter().enumerate() {
        let next_hub = chains[(i + 1) % chains.len()].hub;
        let (first, last) = (ch.nodes[0], *ch.nodes.last().unwrap());
        edges.extend([(ch.hub, first), (ch.hub, last), (first, next_hub), (last, next_hub)]);
        for w in ch.nodes.windows(2) {
            edges.extend([(w[0], w[1]), (w[1], w[0])]);
        }
        for (t, o) in ch.occurrences.iter().enumerate() {
            let (p, q) = (ch.nodes[3 * t + 1], ch.nodes[3 * t + 2]);
            let cn = clause_nodes[o.clause];
            if o.positive {
                edges.extend([(p, cn), (cn, q)]);
            } else {
                edges.extend([(q, cn), (cn, p)]);
            }
        }
    }
    let g = HamiltonicityInstance::new(next, edges).expect("gadget edges are well-formed");
    Ok((g, map(MapShape::Gadgets { chains, clause_nodes }, clauses)))
}

impl WitnessMap {
    /// Full wire assignment from circuit inputs, if they satisfy the circuit.
    fn wire_values(&self, inputs: &[bool]) -> Option<Vec<bool>> {
        if inputs.len() != self.circuit.inputs {
            return None;
        }
        let w = self.circuit.eval_all(inputs);
        w[self.circuit.output].then_some(w)
    }

    pub fn assignment_to_cycle(&self, inputs: &[bool]) -> Option<CycleWitness> {
        let w = self.wire_values(inputs)?;
        match &self.shape {
            MapShape::Unsat => None,
            MapShape::Trivial => Some(CycleWitness(vec![0, 1, 2])),
            MapShape::Gadgets { chains, clause_nodes } => {
                // Each clause detours from its first true occurrence.
                let mut taken = vec![false; clause_nodes.len()];
                let mut cycle = Vec::new();
                for ch in chains {
                    cycle.push(ch.hub);
                    let value = w[ch.var];
                    let mut seq: Vec<usize> = Vec::with_capacity(ch.nodes.len() + ch.occurrences.len());
                    let mut detour_after = vec![None; ch.nodes.len()];
                    for (t, o) in ch.occurrences.iter().enumerate() {
                        if o.positive == value && !taken[o.clause] {
                            taken[o.clause] = true;
                            let entry = if value { 3 * t + 1 } else { 3 * t + 2 };
                            detour_after[entry] = Some(clause_nodes[o.clause]);
                        }
                    }
                    let order: Vec<usize> =
                        if value { (0..ch.nodes.len()).collect() } else { (0..ch.nodes.len()).rev().collect() };
                    for k in order {
                        seq.push(ch.nodes[k]);
                        if let Some(cn) = detour_after[k] {
                            seq.push(cn);
                        }
                    }
                    cycle.extend(seq);
                }
                taken.iter().all(|&t| t).then_some(CycleWitness(cycle))
            }
        }
    }

    /// Circuit inputs encoded by a Hamiltonian cycle of the reduced graph.
    pub fn cycle_to_assignment(&self, g: &HamiltonicityInstance, cycle: &CycleWitness) -> Option<Vec<bool>> {
        if !g.is_cycle(cycle) {
            return None;
        }
        let mut values: Vec<Option<bool>> = self.fixed.clone();
        match &self.shape {
            MapShape::Unsat => return None,
            MapShape::Trivial => {}
            MapShape::Gadgets { chains, .. } => {
                let v = g.vertices();
                let mut succ = vec![0; v];
                for i in 0..v {
                    succ[cycle.0[i]] = cycle.0[(i + 1) % v];
                }
                for ch in chains {
                    let s = succ[ch.hub];
                    values[ch.var] = Some(if s == ch.nodes[0] {
                        true
                    } else if s == *ch.nodes.last().unwrap() {
                        false
                    } else {
                        return None;
                    });
                }
            }
        }
        let inputs: Option<Vec<bool>> = values[..self.circuit.inputs].iter().copied().collect();
        inputs.filter(|i| self.circuit.eval(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npreduce::circuit::{CircuitBuilder, TRUE};

    #[test]
    fn constant_true_is_hamiltonian() {
        let c = CircuitBuilder::new(1).finish(TRUE).unwrap();
        let (g, m) = circuit_to_hc(&c, 100).unwrap();
        assert!(g.find_cycle().is_some());
        for x in [false, true] {
            let cyc = m.assignment_to_cycle(&[x]).unwrap();
            assert_eq!(m.cycle_to_assignment(&g, &cyc), Some(vec![x]));
        }
    }

    #[test]
    fn constant_false_is_not_hamiltonian() {
        let c = CircuitBuilder::new(1).finish(crate::npreduce::circuit::FALSE).unwrap();
        let (g, m) = circuit_to_hc(&c, 100).unwrap();
        assert!(g.find_cycle().is_none());
        assert!(m.assignment_to_cycle(&[true]).is_none());
    }

    #[test]
    fn single_and_gate() {
        let mut b = CircuitBuilder::new(2);
        let o = b.and(b.input(0), b.input(1));
        let c = b.finish(o).unwrap();
        let (g, m) = circuit_to_hc(&c, 100).unwrap();
        let cyc = m.assignment_to_cycle(&[true, true]).unwrap();
        assert!(g.is_cycle(&cyc));
        assert!(m.assignment_to_cycle(&[true, false]).is_none());
    }

    #[test]
    fn gate_bound_enforced() {
        let mut b = CircuitBuilder::new(3);
        let t = b.and(b.input(0), b.input(1));
        let o = b.or(t, b.input(2));
        let c = b.finish(o).unwrap();
        assert!(matches!(circuit_to_hc(&c, 1), Err(ReduceError::UnsupportedScale(_))));
    }

    fn all_circuits(inputs: usize, gates: usize) -> Vec<BooleanCircuit> {
        use crate::npreduce::circuit::{Gate, GateOp};
        let mut out = vec![Vec::<Gate>::new()];
        for g in 0..gates {
            let w = inputs + g;
            let mut next = Vec::new();
            for prefix in &out {
                for op in [GateOp::And, GateOp::Or, GateOp::Xor, GateOp::Not] {
                    let pairs: Vec<Vec<usize>> = if op == GateOp::Not {
                        (0..w).map(|a| vec![a]).collect()
                    } else {
                        (0..w).flat_map(|a| (0..w).map(move |b| vec![a, b])).collect()
                    };
                    for ins in pairs {
                        let mut p = prefix.clone();
                        p.push(Gate { op, inputs: ins });
                        next.push(p);
                    }
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|gs| BooleanCircuit { inputs, output: inputs + gs.len() - 1, gates: gs })
            .collect()
    }

    #[test]
    fn small_circuits_reduce_faithfully() {
        let mut checked = 0;
        for inputs in 1..=3 {
            for gates in 1..=3 {
                for c in all_circuits(inputs, gates) {
                    let sat: Vec<Vec<bool>> = (0..1u32 << inputs)
                        .map(|x| (0..inputs).map(|i| (x >> i) & 1 == 1).collect::<Vec<bool>>())
                        .filter(|a| c.eval(a))
                        .collect();
                    let (g, m) = circuit_to_hc(&c, 100).unwrap();
                    assert_eq!(g.find_cycle().is_some(), !sat.is_empty(), "{c:?}");
                    for a in &sat {
                        let cyc = m.assignment_to_cycle(a).unwrap();
                        assert!(g.is_cycle(&cyc));
                        assert_eq!(m.cycle_to_assignment(&g, &cyc).as_ref(), Some(a));
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 100_000);
    }
}
