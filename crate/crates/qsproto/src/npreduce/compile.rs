//! Statement-to-circuit compilation at micro parameters, and the combined
//! statement-to-graph pipeline used by the proof system.

use super::circuit::{BooleanCircuit, CircuitBuilder, W, FALSE};
use super::graph::{index_width, CycleWitness, HamiltonicityInstance};
use super::reduce::{circuit_to_hc, ReduceError, WitnessMap, DEFAULT_GATE_BOUND};
use super::statement::RelationStatement;
use crate::bits::Bits;
use crate::primitives::lwe::PublicKey;
use crate::primitives::prg::{micro_taps, MICRO_MAX_N};
use serde::{Deserialize, Serialize};

/// Largest graph a native `Hc` statement may have inside a compiled circuit.
pub const MICRO_MAX_VERTICES: usize = 16;
/// Largest LWE modulus and `samples * dim` the encryption gadget accepts.
pub const MICRO_MAX_MODULUS: u32 = 16;
pub const MICRO_MAX_MATRIX: usize = 16;

fn unsupported(msg: impl Into<String>) -> ReduceError {
    ReduceError::UnsupportedScale(msg.into())
}

/// Circuit whose inputs are the witness bits and which is satisfied exactly
/// by the witnesses `check_relation` accepts.
pub fn relation_to_circuit(stmt: &RelationStatement) -> Result<BooleanCircuit, ReduceError> {
    let len = stmt.witness_len().ok_or_else(|| ReduceError::Malformed("inconsistent component lengths".into()))?;
    let mut b = CircuitBuilder::new(len);
    let wit = b.inputs(0, len);
    let out = build(&mut b, stmt, &wit)?;
    Ok(b.finish(out)?)
}

fn build(b: &mut CircuitBuilder, stmt: &RelationStatement, wit: &[W]) -> Result<W, ReduceError> {
    match stmt {
        RelationStatement::Hc { graph } => build_hc(b, graph, wit),
        RelationStatement::L1 { n, coins, commitment, message } => {
            check_n(*n)?;
            let msg: Vec<W> = message.iter().map(W::Const).collect();
            Ok(build_commit(b, *n, coins, commitment, &msg, wit))
        }
        RelationStatement::Opening { n, coins, commitment } => {
            check_n(*n)?;
            let l = commitment.len() / (3 * n);
            Ok(build_commit(b, *n, coins, commitment, &wit[..l], &wit[l..]))
        }
        RelationStatement::L2 { pk, inner, ciphertext } => {
            let e = RelationStatement::enc_layout(pk, inner, ciphertext).expect("validated");
            let (w, r) = wit.split_at(e.w);
            let enc = build_enc(b, pk, ciphertext, w, r)?;
            let ok = build(b, inner, w)?;
            Ok(b.and(enc, ok))
        }
        RelationStatement::R { n, inner, x2, pk, ciphertext } => {
            check_n(*n)?;
            let e = RelationStatement::enc_layout(pk, inner, ciphertext).expect("validated");
            let tag = wit[0];
            let (w, rest) = wit[1..].split_at(e.w);
            let (r, seed) = rest.split_at(e.r);
            let enc = build_enc(b, pk, ciphertext, w, r)?;
            let ok = build(b, inner, w)?;
            let real = b.and(enc, ok);
            let gen = build_prg_eq(b, *n, seed, x2);
            let not_tag = b.not(tag);
            let left = b.and(not_tag, real);
            let right = b.and(tag, gen);
            Ok(b.or(left, right))
        }
    }
}

fn check_n(n: usize) -> Result<(), ReduceError> {
    if n > MICRO_MAX_N {
        return Err(unsupported(format!("seed length {n} exceeds the micro bound {MICRO_MAX_N}")));
    }
    Ok(())
}

/// Generator output bit `j` of seed wires `seed`.
fn prg_bit(b: &mut CircuitBuilder, n: usize, seed: &[W], j: usize) -> W {
    let t = micro_taps(n)[j];
    let a = if t.neg_a { b.not(seed[t.a]) } else { seed[t.a] };
    let prod = b.and(a, seed[t.b]);
    b.xor(seed[t.lin], prod)
}

fn build_prg_eq(b: &mut CircuitBuilder, n: usize, seed: &[W], target: &Bits) -> W {
    let lits: Vec<W> = (0..3 * n)
        .map(|j| {
            let g = prg_bit(b, n, seed, j);
            if target.get(j) { g } else { b.not(g) }
        })
        .collect();
    b.and_all(lits)
}

/// Every block `i` equals `G(seed_i) ^ (msg_i & R_i)`.
fn build_commit(b: &mut CircuitBuilder, n: usize, coins: &Bits, commitment: &Bits, msg: &[W], seeds: &[W]) -> W {
    let mut lits = Vec::new();
    for (i, &m) in msg.iter().enumerate() {
        let seed = &seeds[i * n..(i + 1) * n];
        for j in 0..3 * n {
            let k = 3 * n * i + j;
            let g = prg_bit(b, n, seed, j);
            let g = if coins.get(k) { b.xor(g, m) } else { g };
            lits.push(if commitment.get(k) { g } else { b.not(g) });
        }
    }
    b.and_all(lits)
}

/// `ciphertext == Enc_pk(w, r)` for a power-of-two modulus.
fn build_enc(b: &mut CircuitBuilder, pk: &PublicKey, ciphertext: &Bits, w: &[W], r: &[W]) -> Result<W, ReduceError> {
    let p = pk.params;
    if !p.modulus.is_power_of_two() || p.modulus > MICRO_MAX_MODULUS || p.samples * p.dim > MICRO_MAX_MATRIX {
        return Err(unsupported(format!("encryption parameters {p:?} exceed the micro bound")));
    }
    let eb = p.elem_bits();
    let q = p.modulus as u64;
    let (a, bv) = pk.matrix();
    let konst = |v: u64| -> Vec<W> { (0..eb).map(|i| W::Const((v >> i) & 1 == 1)).collect() };
    let mut lits = Vec::new();
    for (k, &wk) in w.iter().enumerate() {
        let rk = &r[k * p.samples..(k + 1) * p.samples];
        // Sum of the selected column entries, reduced mod q by truncation.
        let sum = |b: &mut CircuitBuilder, col: &dyn Fn(usize) -> u64, extra: Option<(W, u64)>| -> Vec<W> {
            let mut acc = konst(0);
            for (i, &ri) in rk.iter().enumerate() {
                let term: Vec<W> = konst(col(i)).into_iter().map(|c| b.and(c, ri)).collect();
                acc = b.add(&acc, &term);
            }
            if let Some((bit, v)) = extra {
                let term: Vec<W> = konst(v).into_iter().map(|c| b.and(c, bit)).collect();
                acc = b.add(&acc, &term);
            }
            acc
        };
        let block = ciphertext.slice(k * p.block_bits(), p.block_bits());
        for j in 0..p.dim {
            let u = sum(b, &|i| a[i][j] as u64, None);
            lits.push(b.eq_const(&u, block.slice(j * eb, eb).to_u64()));
        }
        let v = sum(b, &|i| bv[i] as u64, Some((wk, q / 2)));
        lits.push(b.eq_const(&v, block.slice(p.dim * eb, eb).to_u64()));
    }
    Ok(b.and_all(lits))
}

/// Valid Hamiltonian cycle encoding: in-range, pairwise distinct, consecutive edges.
fn build_hc(b: &mut CircuitBuilder, g: &HamiltonicityInstance, wit: &[W]) -> Result<W, ReduceError> {
    let v = g.vertices();
    if v > MICRO_MAX_VERTICES {
        return Err(unsupported(format!("{v} vertices exceed the micro bound {MICRO_MAX_VERTICES}")));
    }
    if v == 0 {
        return Ok(FALSE);
    }
    let w = index_width(v);
    let idx: Vec<&[W]> = wit.chunks(w).collect();
    let is: Vec<Vec<W>> = idx.iter().map(|x| (0..v).map(|a| b.eq_const(x, a as u64)).collect()).collect();
    let mut lits = Vec::new();
    for i in 0..v {
        lits.push(b.or_all(is[i].iter().copied()));
        for j in i + 1..v {
            let same = b.eq_bits(idx[i], idx[j]);
            lits.push(b.not(same));
        }
        let nx = (i + 1) % v;
        for a in 0..v {
            let succ: Vec<W> = (0..v).filter(|&c| g.has_edge(a, c)).map(|c| is[nx][c]).collect();
            let any = b.or_all(succ);
            let not_here = b.not(is[i][a]);
            lits.push(b.or(not_here, any));
        }
    }
    Ok(b.and_all(lits))
}

/// A statement as a Hamiltonicity instance, with witness transport.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompiledStatement {
    pub graph: HamiltonicityInstance,
    pub witness_len: usize,
    /// `None` for native `Hc` statements, whose witness is the cycle itself.
    pub map: Option<WitnessMap>,
}

impl CompiledStatement {
    pub fn witness_to_cycle(&self, witness: &Bits) -> Option<CycleWitness> {
        if witness.len() != self.witness_len {
            return None;
        }
        match &self.map {
            None => CycleWitness::from_bits(witness, self.graph.vertices()).filter(|c| self.graph.is_cycle(c)),
            Some(m) => m.assignment_to_cycle(&witness.to_bools()),
        }
    }

    pub fn cycle_to_witness(&self, cycle: &CycleWitness) -> Option<Bits> {
        match &self.map {
            None => self.graph.is_cycle(cycle).then(|| cycle.to_bits(self.graph.vertices())),
            Some(m) => m.cycle_to_assignment(&self.graph, cycle).map(|a| Bits::from_bools(&a)),
        }
    }
}

pub fn compile_statement(stmt: &RelationStatement) -> Result<CompiledStatement, ReduceError> {
    compile_statement_bounded(stmt, DEFAULT_GATE_BOUND)
}

pub fn compile_statement_bounded(stmt: &RelationStatement, gate_bound: usize) -> Result<CompiledStatement, ReduceError> {
    if let RelationStatement::Hc { graph } = stmt {
        return Ok(CompiledStatement {
            graph: graph.clone(),
            witness_len: stmt.witness_len().expect("hc always well-formed"),
            map: None,
        });
    }
    let c = relation_to_circuit(stmt)?;
    let (graph, map) = circuit_to_hc(&c, gate_bound)?;
    Ok(CompiledStatement { graph, witness_len: c.inputs, map: Some(map) })
}

/// An independently provable part of a statement: the compiled part and the
/// positions of its witness bits inside the full witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Conjunct {
    pub statement: RelationStatement,
    pub compiled: CompiledStatement,
    pub positions: Vec<usize>,
}

impl Conjunct {
    pub fn project(&self, witness: &Bits) -> Bits {
        self.positions.iter().map(|&i| witness.get(i)).collect()
    }
}

/// Splits commitment statements per message bit; everything else stays whole.
/// The statement holds iff every part holds on its projection.
pub fn split_conjuncts(stmt: &RelationStatement) -> Vec<(RelationStatement, Vec<usize>)> {
    let whole = || vec![(stmt.clone(), (0..stmt.witness_len().unwrap_or(0)).collect())];
    if stmt.witness_len().is_none() {
        return whole();
    }
    match stmt {
        RelationStatement::L1 { n, coins, commitment, message } if message.len() > 1 => (0..message.len())
            .map(|i| {
                let part = RelationStatement::L1 {
                    n: *n,
                    coins: coins.slice(3 * n * i, 3 * n),
                    commitment: commitment.slice(3 * n * i, 3 * n),
                    message: message.slice(i, 1),
                };
                (part, (n * i..n * (i + 1)).collect())
            })
            .collect(),
        RelationStatement::Opening { n, coins, commitment } if commitment.len() > 3 * n => {
            let l = commitment.len() / (3 * n);
            (0..l)
                .map(|i| {
                    let part = RelationStatement::Opening {
                        n: *n,
                        coins: coins.slice(3 * n * i, 3 * n),
                        commitment: commitment.slice(3 * n * i, 3 * n),
                    };
                    (part, std::iter::once(i).chain(l + n * i..l + n * (i + 1)).collect())
                })
                .collect()
        }
        _ => whole(),
    }
}

pub fn compile_conjuncts(stmt: &RelationStatement) -> Result<Vec<Conjunct>, ReduceError> {
    if stmt.witness_len().is_none() {
        return Err(ReduceError::Malformed("inconsistent component lengths".into()));
    }
    split_conjuncts(stmt)
        .into_iter()
        .map(|(statement, positions)| {
            Ok(Conjunct { compiled: compile_statement(&statement)?, statement, positions })
        })
        .collect()
}

/// Reassembles a full witness from per-part witnesses.
pub fn assemble_witness(len: usize, parts: &[(&Conjunct, Bits)]) -> Bits {
    let mut w = Bits::zeros(len);
    for (c, bits) in parts {
        for (k, &i) in c.positions.iter().enumerate() {
            w.set(i, bits.get(k));
        }
    }
    w
}
