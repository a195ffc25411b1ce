//! Boolean circuits and a folding builder.
//!
//! Wire ids `0..inputs` are inputs; gate `i` drives wire `inputs + i`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateOp {
    And,
    Or,
    Not,
    Xor,
}

impl GateOp {
    pub fn arity(self) -> usize {
        if self == GateOp::Not {
            1
        } else {
            2
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateOp::And => a & b,
            GateOp::Or => a | b,
            GateOp::Not => !a,
            GateOp::Xor => a ^ b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    #[serde(rename = "in")]
    pub inputs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCircuit {
    pub inputs: usize,
    pub gates: Vec<Gate>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("gate {gate} reads wire {wire} which is not yet defined")]
    Cyclic { gate: usize, wire: usize },
    #[error("gate {0} has the wrong number of inputs")]
    Arity(usize),
    #[error("output wire {0} does not exist")]
    Output(usize),
    #[error("a circuit without inputs cannot express a constant")]
    NoInputs,
}

impl BooleanCircuit {
    pub fn wires(&self) -> usize {
        self.inputs + self.gates.len()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (i, g) in self.gates.iter().enumerate() {
            if g.inputs.len() != g.op.arity() {
                return Err(CircuitError::Arity(i));
            }
            if let Some(&w) = g.inputs.iter().find(|&&w| w >= self.inputs + i) {
                return Err(CircuitError::Cyclic { gate: i, wire: w });
            }
        }
        if self.output >= self.wires() {
            return Err(CircuitError::Output(self.output));
        }
        Ok(())
    }

    /// Values of every wire.
    pub fn eval_all(&self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.inputs);
        let mut w = input.to_vec();
        w.reserve(self.gates.len());
        for g in &self.gates {
            let a = w[g.inputs[0]];
            let b = g.inputs.get(1).map_or(false, |&i| w[i]);
            w.push(g.op.apply(a, b));
        }
        w
    }

    pub fn eval(&self, input: &[bool]) -> bool {
        self.eval_all(input)[self.output]
    }
}

/// A builder-side wire: either a known constant or a circuit wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum W {
    Const(bool),
    Wire(usize),
}

pub const FALSE: W = W::Const(false);
pub const TRUE: W = W::Const(true);

/// Builds circuits with constant folding and structural hashing.
pub struct CircuitBuilder {
    inputs: usize,
    gates: Vec<Gate>,
    cache: HashMap<(GateOp, usize, usize), usize>,
    negation_of: HashMap<usize, usize>,
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        CircuitBuilder { inputs, gates: Vec::new(), cache: HashMap::new(), negation_of: HashMap::new() }
    }

    pub fn input(&self, i: usize) -> W {
        assert!(i < self.inputs);
        W::Wire(i)
    }

    pub fn inputs(&self, start: usize, len: usize) -> Vec<W> {
        (start..start + len).map(|i| self.input(i)).collect()
    }

    fn emit(&mut self, op: GateOp, a: usize, b: usize) -> usize {
        let key = if op == GateOp::Not { (op, a, a) } else { (op, a.min(b), a.max(b)) };
        if let Some(&w) = self.cache.get(&key) {
            return w;
        }
        let inputs = if op == GateOp::Not { vec![a] } else { vec![key.1, key.2] };
        self.gates.push(Gate { op, inputs });
        let w = self.inputs + self.gates.len() - 1;
        self.cache.insert(key, w);
        if op == GateOp::Not {
            self.negation_of.insert(w, a);
            self.negation_of.insert(a, w);
        }
        w
    }

    fn complementary(&self, a: usize, b: usize) -> bool {
        self.negation_of.get(&a) == Some(&b)
    }

    pub fn not(&mut self, a: W) -> W {
        match a {
            W::Const(c) => W::Const(!c),
            W::Wire(x) => match self.negation_of.get(&x) {
                Some(&y) => W::Wire(y),
                None => W::Wire(self.emit(GateOp::Not, x, x)),
            },
        }
    }

    pub fn and(&mut self, a: W, b: W) -> W {
        match (a, b) {
            (W::Const(false), _) | (_, W::Const(false)) => FALSE,
            (W::Const(true), x) | (x, W::Const(true)) => x,
            (W::Wire(x), W::Wire(y)) if x == y => a,
            (W::Wire(x), W::Wire(y)) if self.complementary(x, y) => FALSE,
            (W::Wire(x), W::Wire(y)) => W::Wire(self.emit(GateOp::And, x, y)),
        }
    }

    pub fn or(&mut self, a: W, b: W) -> W {
        match (a, b) {
            (W::Const(true), _) | (_, W::Const(true)) => TRUE,
            (W::Const(false), x) | (x, W::Const(false)) => x,
            (W::Wire(x), W::Wire(y)) if x == y => a,
            (W::Wire(x), W::Wire(y)) if self.complementary(x, y) => TRUE,
            (W::Wire(x), W::Wire(y)) => W::Wire(self.emit(GateOp::Or, x, y)),
        }
    }

    pub fn xor(&mut self, a: W, b: W) -> W {
        match (a, b) {
            (W::Const(c), x) | (x, W::Const(c)) => {
                if c {
                    self.not(x)
                } else {
                    x
                }
            }
            (W::Wire(x), W::Wire(y)) if x == y => FALSE,
            (W::Wire(x), W::Wire(y)) if self.complementary(x, y) => TRUE,
            (W::Wire(x), W::Wire(y)) => W::Wire(self.emit(GateOp::Xor, x, y)),
        }
    }

    pub fn and_all(&mut self, ws: impl IntoIterator<Item = W>) -> W {
        let mut acc = TRUE;
        for w in ws {
            acc = self.and(acc, w);
            if acc == FALSE {
                break;
            }
        }
        acc
    }

    pub fn or_all(&mut self, ws: impl IntoIterator<Item = W>) -> W {
        let mut acc = FALSE;
        for w in ws {
            acc = self.or(acc, w);
        }
        acc
    }

    /// `bits` (little-endian) equals the constant `value`.
    pub fn eq_const(&mut self, bits: &[W], value: u64) -> W {
        let lits: Vec<W> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if (value >> i) & 1 == 1 { b } else { self.not(b) })
            .collect();
        self.and_all(lits)
    }

    pub fn eq_bits(&mut self, a: &[W], b: &[W]) -> W {
        assert_eq!(a.len(), b.len());
        let lits: Vec<W> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = self.xor(x, y);
                self.not(d)
            })
            .collect();
        self.and_all(lits)
    }

    /// Little-endian `bits < bound`.
    pub fn lt_const(&mut self, bits: &[W], bound: u64) -> W {
        if bits.len() < 64 && bound >= 1u64 << bits.len() {
            return TRUE;
        }
        // Scan from the top bit: less iff at the first differing bit, ours is 0.
        let mut less = FALSE;
        let mut equal_so_far = TRUE;
        for i in (0..bits.len()).rev() {
            let bb = (bound >> i) & 1 == 1;
            if bb {
                let nb = self.not(bits[i]);
                let here = self.and(equal_so_far, nb);
                less = self.or(less, here);
                equal_so_far = self.and(equal_so_far, bits[i]);
            } else {
                let nb = self.not(bits[i]);
                equal_so_far = self.and(equal_so_far, nb);
            }
        }
        less
    }

    /// Ripple-carry sum modulo `2^len`.
    pub fn add(&mut self, a: &[W], b: &[W]) -> Vec<W> {
        assert_eq!(a.len(), b.len());
        let mut carry = FALSE;
        let mut out = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            let t = self.xor(a[i], b[i]);
            out.push(self.xor(t, carry));
            let g = self.and(a[i], b[i]);
            let p = self.and(t, carry);
            carry = self.or(g, p);
        }
        out
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Emits the circuit with `out` as its output, dropping gates the output
    /// does not depend on.
    pub fn finish(mut self, out: W) -> Result<BooleanCircuit, CircuitError> {
        let out = match out {
            W::Wire(w) => w,
            W::Const(c) => {
                if self.inputs == 0 {
                    return Err(CircuitError::NoInputs);
                }
                // x ^ x is constant false; no folding on this path.
                self.gates.push(Gate { op: GateOp::Xor, inputs: vec![0, 0] });
                let f = self.inputs + self.gates.len() - 1;
                if c {
                    self.gates.push(Gate { op: GateOp::Not, inputs: vec![f] });
                    f + 1
                } else {
                    f
                }
            }
        };
        let n_in = self.inputs;
        let mut live = vec![false; n_in + self.gates.len()];
        live[out] = true;
        for g in (0..self.gates.len()).rev() {
            if live[n_in + g] {
                for &w in &self.gates[g].inputs {
                    live[w] = true;
                }
            }
        }
        let mut remap: Vec<usize> = (0..n_in).collect();
        remap.resize(live.len(), usize::MAX);
        let mut gates = Vec::new();
        for (g, gate) in self.gates.into_iter().enumerate() {
            if live[n_in + g] {
                remap[n_in + g] = n_in + gates.len();
                gates.push(Gate { op: gate.op, inputs: gate.inputs.iter().map(|&w| remap[w]).collect() });
            }
        }
        let c = BooleanCircuit { inputs: n_in, gates, output: remap[out] };
        c.validate()?;
        Ok(c)
    }
}
