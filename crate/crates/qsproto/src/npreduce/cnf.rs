//! Tseitin encoding and unit propagation.

use super::circuit::{BooleanCircuit, GateOp};

/// Literal over variable `var`; variable ids coincide with circuit wire ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }
    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }
    pub fn negate(self) -> Self {
        Lit { var: self.var, positive: !self.positive }
    }
    pub fn holds(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(values)))
    }
}

/// Gate definitions plus the unit clause asserting the output.
pub fn tseitin(c: &BooleanCircuit) -> Cnf {
    let mut clauses = Vec::with_capacity(3 * c.gates.len() + 1);
    for (i, g) in c.gates.iter().enumerate() {
        let o = c.inputs + i;
        let a = g.inputs[0];
        match g.op {
            GateOp::Not => {
                clauses.push(vec![Lit::pos(o), Lit::pos(a)]);
                clauses.push(vec![Lit::neg(o), Lit::neg(a)]);
            }
            GateOp::And => {
                let b = g.inputs[1];
                clauses.push(vec![Lit::neg(o), Lit::pos(a)]);
                clauses.push(vec![Lit::neg(o), Lit::pos(b)]);
                clauses.push(vec![Lit::pos(o), Lit::neg(a), Lit::neg(b)]);
            }
            GateOp::Or => {
                let b = g.inputs[1];
                clauses.push(vec![Lit::pos(o), Lit::neg(a)]);
                clauses.push(vec![Lit::pos(o), Lit::neg(b)]);
                clauses.push(vec![Lit::neg(o), Lit::pos(a), Lit::pos(b)]);
            }
            GateOp::Xor => {
                let b = g.inputs[1];
                clauses.push(vec![Lit::neg(o), Lit::pos(a), Lit::pos(b)]);
                clauses.push(vec![Lit::neg(o), Lit::neg(a), Lit::neg(b)]);
                clauses.push(vec![Lit::pos(o), Lit::neg(a), Lit::pos(b)]);
                clauses.push(vec![Lit::pos(o), Lit::pos(a), Lit::neg(b)]);
            }
        }
    }
    clauses.push(vec![Lit::pos(c.output)]);
    Cnf { vars: c.wires(), clauses }
}

/// Result of unit propagation. Every satisfying assignment of the input CNF
/// agrees with `fixed` and satisfies `clauses`, and conversely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub fixed: Vec<Option<bool>>,
    pub clauses: Vec<Vec<Lit>>,
    pub unsat: bool,
}

fn normalize(cnf: &Cnf) -> Vec<Vec<Lit>> {
    let mut clauses = Vec::new();
    for c in &cnf.clauses {
        let mut c = c.clone();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].var == w[1].var) {
            continue; // tautology
        }
        clauses.push(c);
    }
    clauses.sort();
    clauses.dedup();
    clauses
}

/// Propagates to a fixpoint; `None` on a conflict.
fn propagate(mut clauses: Vec<Vec<Lit>>, fixed: &mut [Option<bool>]) -> Option<Vec<Vec<Lit>>> {
    loop {
        let mut changed = false;
        let mut next = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut reduced = Vec::with_capacity(c.len());
            let mut sat = false;
            for l in c {
                match fixed[l.var] {
                    Some(v) if v == l.positive => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => reduced.push(l),
                }
            }
            if sat {
                continue;
            }
            match reduced.len() {
                0 => return None,
                1 => {
                    fixed[reduced[0].var] = Some(reduced[0].positive);
                    changed = true;
                }
                _ => next.push(reduced),
            }
        }
        clauses = next;
        if !changed {
            return Some(clauses);
        }
    }
}

fn unsat(fixed: Vec<Option<bool>>) -> Simplified {
    Simplified { fixed, clauses: vec![Vec::new()], unsat: true }
}

pub fn unit_propagate(cnf: &Cnf) -> Simplified {
    let mut fixed = vec![None; cnf.vars];
    match propagate(normalize(cnf), &mut fixed) {
        Some(clauses) => Simplified { fixed, clauses, unsat: false },
        None => unsat(fixed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npreduce::circuit::CircuitBuilder;

    #[test]
    fn tseitin_accepts_exactly_the_circuit_extension() {
        let mut b = CircuitBuilder::new(3);
        let (x, y, z) = (b.input(0), b.input(1), b.input(2));
        let t = b.and(x, y);
        let u = b.xor(t, z);
        let o = b.or(u, x);
        let c = b.finish(o).unwrap();
        let cnf = tseitin(&c);
        for v in 0..8u64 {
            let inp: Vec<bool> = (0..3).map(|i| (v >> i) & 1 == 1).collect();
            let all = c.eval_all(&inp);
            assert_eq!(cnf.satisfied_by(&all), c.eval(&inp));
        }
    }

    #[test]
    fn propagation_fixes_forced_values() {
        let mut b = CircuitBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let o = b.and(x, y);
        let s = unit_propagate(&tseitin(&b.finish(o).unwrap()));
        assert!(!s.unsat);
        assert_eq!(s.fixed[..2], [Some(true), Some(true)]);
        assert!(s.clauses.is_empty());
    }

    #[test]
    fn propagation_detects_conflict() {
        let cnf = Cnf { vars: 1, clauses: vec![vec![Lit::pos(0)], vec![Lit::neg(0)]] };
        assert!(unit_propagate(&cnf).unsat);
    }
}
