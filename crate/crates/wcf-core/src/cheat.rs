//! Lower bounds on the optimal cheating probabilities, by exact state-vector
//! evaluation of explicit strategies and local ascent over them.
//!
//! The reformulated protocols fix the message wiring: the honest party plays
//! the protocol on its particles; the cheater holds its own particles plus a
//! fixed ancilla budget and may apply an arbitrary unitary on everything it
//! controls before each of its sends (one qubit per scheduled message, then
//! the full n-qubit dump). The honest party ends with all 2n particles and
//! measures the rank-one verification projector of the cheater's desired
//! outcome; the value of a strategy is the probability that measurement
//! reports the cheater as winner.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::{eigh, norm, CMatrix, C64, ZERO};
use crate::protocol::{CoinOutcome, ProtocolParams, Side};
use crate::tree::eval_side_fast;
use crate::{Error, Result};

/// Cap on simulated qubits (2n particles + ancilla).
pub const TOTAL_QUBITS_CAP: usize = 22;

const ISOMETRY_TOL: f64 = 1e-10;

/// Register layout and send schedule of one reformulated protocol.
#[derive(Debug, Clone)]
struct Wiring {
    n: usize,
    ancilla: usize,
    total: usize,
    /// (first, second, weight): honest party's |φ_i⟩ on global positions.
    honest_pairs: Vec<(usize, usize, f64)>,
    /// Cheater's register positions at the start (sorted).
    cheater_initial: Vec<usize>,
    /// Cheater's owned set (sorted) at each of its stages.
    stage_sets: Vec<Vec<usize>>,
}

impl Wiring {
    fn build(p: &ProtocolParams, side: Side, ancilla: usize) -> Result<Wiring> {
        let n = p.n();
        let total = 2 * n + ancilla;
        if total > TOTAL_QUBITS_CAP {
            return Err(Error::ResourceLimit {
                what: "total simulated qubits",
                requested: total,
                cap: TOTAL_QUBITS_CAP,
            });
        }
        let cheater_owns = |i: usize| match side {
            Side::Alice => !i.is_multiple_of(2),
            Side::Bob => i.is_multiple_of(2),
        };
        let mut honest_pairs = Vec::new();
        let mut owned: Vec<usize> = Vec::new();
        for i in 1..=n {
            // |φ_i⟩ on particles i and n+i, zero-based positions i−1, n+i−1
            if cheater_owns(i) {
                owned.push(i - 1);
                owned.push(n + i - 1);
            } else {
                honest_pairs.push((i - 1, n + i - 1, p.weights()[i - 1]));
            }
        }
        owned.extend(2 * n..total);
        owned.sort_unstable();
        let cheater_initial = owned.clone();

        let mut stage_sets = Vec::new();
        for i in 1..=n {
            // message i transfers the half the receiver keeps: particle n+i
            // when Alice sends (odd i), particle i when Bob sends (even i)
            let moved = if i % 2 == 1 { n + i - 1 } else { i - 1 };
            if cheater_owns(i) {
                stage_sets.push(owned.clone());
                owned.retain(|&q| q != moved);
            } else {
                owned.push(moved);
                owned.sort_unstable();
            }
        }
        // final dump: everything but the ancilla goes to the honest party
        stage_sets.push(owned.clone());
        Ok(Wiring { n, ancilla, total, honest_pairs, cheater_initial, stage_sets })
    }

    fn desired_outcome(side: Side) -> CoinOutcome {
        match side {
            Side::Alice => CoinOutcome::AliceWins,
            Side::Bob => CoinOutcome::BobWins,
        }
    }
}

/// One cheating strategy: an initial state on the cheater's registers and
/// a unitary stage per scheduled send.
#[derive(Debug, Clone)]
pub struct CheatStrategy {
    side: Side,
    n: usize,
    ancilla_qubits: usize,
    initial_state: Vec<C64>,
    stages: Vec<CMatrix>,
}

impl CheatStrategy {
    /// The honest strategy: prepare the protocol's |φ_i⟩ states (ancilla in
    /// |0…0⟩) and apply identity at every stage.
    pub fn honest(p: &ProtocolParams, side: Side, ancilla_qubits: usize) -> Result<Self> {
        let w = Wiring::build(p, side, ancilla_qubits)?;
        let slots = w.cheater_initial.len();
        let slot_of = |pos: usize| w.cheater_initial.iter().position(|&q| q == pos).unwrap();
        let mut initial = vec![ZERO; 1 << slots];
        let pairs: Vec<(usize, usize, f64)> = (1..=w.n)
            .filter(|&i| match side {
                Side::Alice => i % 2 == 1,
                Side::Bob => i % 2 == 0,
            })
            .map(|i| (slot_of(i - 1), slot_of(w.n + i - 1), p.weights()[i - 1]))
            .collect();
        for (idx, amp) in initial.iter_mut().enumerate() {
            // ancilla slots must read zero
            let anc_ok = w.cheater_initial.iter().enumerate().all(|(slot, &pos)| {
                pos < 2 * w.n || (idx >> (slots - 1 - slot)) & 1 == 0
            });
            if !anc_ok {
                continue;
            }
            let mut a = 1.0;
            for &(s1, s2, wi) in &pairs {
                let b1 = (idx >> (slots - 1 - s1)) & 1;
                let b2 = (idx >> (slots - 1 - s2)) & 1;
                if b1 != b2 {
                    a = 0.0;
                    break;
                }
                a *= if b1 == 0 { wi } else { 1.0 - wi };
            }
            *amp = C64::new(a.sqrt(), 0.0);
        }
        let stages = w
            .stage_sets
            .iter()
            .map(|set| CMatrix::identity(1 << set.len()))
            .collect();
        Ok(CheatStrategy { side, n: w.n, ancilla_qubits, initial_state: initial, stages })
    }

    /// A random product-free starting point: Haar-ish random register state,
    /// identity stages.
    pub fn random(
        p: &ProtocolParams,
        side: Side,
        ancilla_qubits: usize,
        rng: &mut ChaCha12Rng,
    ) -> Result<Self> {
        let mut s = Self::honest(p, side, ancilla_qubits)?;
        s.initial_state = random_unit_vector(rng, s.initial_state.len());
        Ok(s)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn initial_state(&self) -> &[C64] {
        &self.initial_state
    }

    pub fn stages(&self) -> &[CMatrix] {
        &self.stages
    }
}

fn random_unit_vector(rng: &mut ChaCha12Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(normal(rng), normal(rng)))
        .collect();
    let nrm = norm(&v);
    for x in &mut v {
        *x /= nrm;
    }
    v
}

fn normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Apply a unitary on the given (sorted) global qubit positions.
fn apply_on_positions(state: &mut [C64], u: &CMatrix, positions: &[usize], total: usize) {
    let d = positions.len();
    let sub = 1usize << d;
    // bit offset of each subspace basis pattern inside a global index
    let mut sub_offsets = vec![0usize; sub];
    for (m, off) in sub_offsets.iter_mut().enumerate() {
        let mut acc = 0usize;
        for (t, &pos) in positions.iter().enumerate() {
            if (m >> (d - 1 - t)) & 1 == 1 {
                acc |= 1 << (total - 1 - pos);
            }
        }
        *off = acc;
    }
    let rest: Vec<usize> = (0..total).filter(|q| !positions.contains(q)).collect();
    let rest_count = rest.len();
    let mut gathered = vec![ZERO; sub];
    for rr in 0..1usize << rest_count {
        let mut base = 0usize;
        for (t, &pos) in rest.iter().enumerate() {
            if (rr >> (rest_count - 1 - t)) & 1 == 1 {
                base |= 1 << (total - 1 - pos);
            }
        }
        for (m, &off) in sub_offsets.iter().enumerate() {
            gathered[m] = state[base | off];
        }
        for (m, &off) in sub_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (k, &g) in gathered.iter().enumerate() {
                acc += u.get(m, k) * g;
            }
            state[base | off] = acc;
        }
    }
}

/// Exact probability that the honest party's verification measurement
/// reports the cheater as winner.
pub fn cheat_value(p: &ProtocolParams, strategy: &CheatStrategy) -> Result<f64> {
    let w = Wiring::build(p, strategy.side, strategy.ancilla_qubits)?;
    if strategy.n != w.n {
        return Err(Error::ShapeMismatch(format!(
            "strategy built for n = {}, protocol has n = {}",
            strategy.n, w.n
        )));
    }
    if strategy.initial_state.len() != 1 << w.cheater_initial.len() {
        return Err(Error::ShapeMismatch(format!(
            "initial state dim {} for {} cheater registers",
            strategy.initial_state.len(),
            w.cheater_initial.len()
        )));
    }
    if strategy.stages.len() != w.stage_sets.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} stages supplied, schedule has {}",
            strategy.stages.len(),
            w.stage_sets.len()
        )));
    }
    for (k, (stage, set)) in strategy.stages.iter().zip(&w.stage_sets).enumerate() {
        if stage.dim() != 1 << set.len() {
            return Err(Error::ShapeMismatch(format!(
                "stage {k} dim {} for a {}-qubit register set",
                stage.dim(),
                set.len()
            )));
        }
        if stage.max_isometry_defect() > ISOMETRY_TOL {
            return Err(Error::invalid(format!("stage {k} is not an isometry")));
        }
    }
    let init_norm = norm(&strategy.initial_state);
    if (init_norm - 1.0).abs() > ISOMETRY_TOL {
        return Err(Error::invalid(format!(
            "initial state norm {init_norm} must be 1"
        )));
    }
    Ok(cheat_value_unchecked(p, strategy, &w))
}

/// Evaluation core, shared with the ascent loop (which keeps its iterates
/// unitary by construction).
fn cheat_value_unchecked(p: &ProtocolParams, strategy: &CheatStrategy, w: &Wiring) -> f64 {
    let total = w.total;
    let mut state = vec![ZERO; 1 << total];
    // global init = honest pairs ⊗ cheater registers
    let slots = w.cheater_initial.len();
    let pair_count = w.honest_pairs.len();
    for hp in 0..1usize << pair_count {
        let mut amp_h = 1.0f64;
        let mut idx_h = 0usize;
        for (t, &(q1, q2, wi)) in w.honest_pairs.iter().enumerate() {
            let bit = (hp >> (pair_count - 1 - t)) & 1;
            amp_h *= if bit == 0 { wi } else { 1.0 - wi };
            if bit == 1 {
                idx_h |= 1 << (total - 1 - q1);
                idx_h |= 1 << (total - 1 - q2);
            }
        }
        let amp_h = C64::new(amp_h.sqrt(), 0.0);
        for (ridx, &amp_c) in strategy.initial_state.iter().enumerate() {
            if amp_c == ZERO {
                continue;
            }
            let mut idx = idx_h;
            for (slot, &pos) in w.cheater_initial.iter().enumerate() {
                if (ridx >> (slots - 1 - slot)) & 1 == 1 {
                    idx |= 1 << (total - 1 - pos);
                }
            }
            state[idx] = amp_h * amp_c;
        }
    }
    for (stage, set) in strategy.stages.iter().zip(&w.stage_sets) {
        apply_on_positions(&mut state, stage, set, total);
    }
    // Σ over ancilla of |⟨f, anc|Ψ⟩|², f over the leading 2n particles
    let outcome = Wiring::desired_outcome(strategy.side);
    let f = match crate::protocol::build_verification_projector(p, outcome) {
        Ok(v) => v,
        // outcome has zero honest mass: the honest party never accepts
        Err(Error::DegenerateProtocol(_)) => return 0.0,
        Err(_) => unreachable!("caps already checked"),
    };
    let f_amp = f.state().amplitudes();
    let anc_dim = 1usize << w.ancilla;
    let mut value = 0.0;
    for anc in 0..anc_dim {
        let mut overlap = ZERO;
        for (j, fj) in f_amp.iter().enumerate() {
            overlap += fj.conj() * state[(j << w.ancilla) | anc];
        }
        value += overlap.norm_sqr();
    }
    value
}

/// Outcome of a local-ascent run.
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub value: f64,
    pub strategy: CheatStrategy,
    pub iterations: usize,
    /// Best value after each iteration; entry 0 is the starting value.
    pub trace: Vec<f64>,
}

/// Hill-climb a random initial strategy: each iteration visits one target
/// (the initial state or one stage) and tries a few random tangent
/// directions, following each promising geodesic with a short line search.
/// Only improvements are accepted, so the trace is nondecreasing; the whole
/// run is a pure function of the seed.
pub fn ascend(
    p: &ProtocolParams,
    side: Side,
    ancilla_qubits: usize,
    iters: usize,
    seed: u64,
) -> Result<AscentResult> {
    let w = Wiring::build(p, side, ancilla_qubits)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut strategy = CheatStrategy::random(p, side, ancilla_qubits, &mut rng)?;
    let mut value = cheat_value_unchecked(p, &strategy, &w);
    let mut trace = vec![value];
    let num_targets = 1 + strategy.stages.len();
    let mut steps = vec![0.6f64; num_targets];
    const TRIES: usize = 3;
    const PROBES: [f64; 3] = [0.25, 1.0, 4.0];

    for it in 0..iters {
        let target = it % num_targets;
        for _ in 0..TRIES {
            let candidate = |t: f64, strategy: &CheatStrategy, dir: &Direction| -> CheatStrategy {
                let mut s = strategy.clone();
                dir.apply(t, &mut s, target);
                s
            };
            let dir = match Direction::draw(&mut rng, &strategy, target) {
                Some(d) => d,
                None => continue,
            };
            let s = steps[target];
            let mut best_t = 0.0;
            let mut best_v = value;
            for &mult in PROBES.iter() {
                let t = s * mult;
                let v = cheat_value_unchecked(p, &candidate(t, &strategy, &dir), &w);
                if v > best_v {
                    best_v = v;
                    best_t = t;
                }
            }
            if best_t > 0.0 {
                // bracket around the best probe and refine
                let (mut lo, mut hi) = (best_t / 4.0, best_t * 4.0);
                for _ in 0..6 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    let v1 = cheat_value_unchecked(p, &candidate(m1, &strategy, &dir), &w);
                    let v2 = cheat_value_unchecked(p, &candidate(m2, &strategy, &dir), &w);
                    if v1 > v2 {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                    if v1 > best_v {
                        best_v = v1;
                        best_t = m1;
                    }
                    if v2 > best_v {
                        best_v = v2;
                        best_t = m2;
                    }
                }
                dir.apply(best_t, &mut strategy, target);
                value = best_v;
                steps[target] = (best_t * 1.5).min(core::f64::consts::PI);
            } else {
                steps[target] = (steps[target] * 0.55).max(1e-7);
            }
        }
        trace.push(value);
    }
    Ok(AscentResult { value, strategy, iterations: iters, trace })
}

/// A tangent direction at the current strategy: a great-circle partner for
/// the initial state, or a Hermitian generator (pre-diagonalized) for a
/// stage unitary.
enum Direction {
    State(Vec<C64>),
    Stage { freqs: Vec<f64>, vectors: CMatrix },
}

impl Direction {
    fn draw(rng: &mut ChaCha12Rng, strategy: &CheatStrategy, target: usize) -> Option<Direction> {
        if target == 0 {
            let psi = &strategy.initial_state;
            let mut eta = random_unit_vector(rng, psi.len());
            let overlap = crate::linalg::inner(psi, &eta);
            for (e, p) in eta.iter_mut().zip(psi) {
                *e -= overlap * p;
            }
            let nrm = norm(&eta);
            if nrm < 1e-12 {
                return None;
            }
            for e in &mut eta {
                *e /= nrm;
            }
            Some(Direction::State(eta))
        } else {
            let dim = strategy.stages[target - 1].dim();
            let raw = CMatrix::from_fn(dim, |_, _| C64::new(normal(rng), normal(rng)));
            let herm = raw.add(&raw.adjoint()).scale(C64::new(0.5, 0.0));
            let eig = eigh(&herm).expect("hermitian by construction");
            let peak = eig
                .values
                .iter()
                .fold(0.0f64, |acc, &x| acc.max(x.abs()))
                .max(1e-12);
            let freqs = eig.values.iter().map(|&x| x / peak).collect();
            Some(Direction::Stage { freqs, vectors: eig.vectors })
        }
    }

    fn apply(&self, t: f64, strategy: &mut CheatStrategy, target: usize) {
        match self {
            Direction::State(eta) => {
                let (c, s) = (t.cos(), t.sin());
                for (x, e) in strategy.initial_state.iter_mut().zip(eta) {
                    *x = *x * c + *e * s;
                }
            }
            Direction::Stage { freqs, vectors } => {
                // exp(itH)·U with H = V diag(freqs) V†
                let dim = vectors.dim();
                let mut rotated = CMatrix::zeros(dim);
                for (k, freq) in freqs.iter().enumerate() {
                    let phase = C64::new(0.0, t * freq).exp();
                    for i in 0..dim {
                        let vik = vectors.get(i, k) * phase;
                        for j in 0..dim {
                            let val = rotated.get(i, j) + vik * vectors.get(j, k).conj();
                            rotated.set(i, j, val);
                        }
                    }
                }
                strategy.stages[target - 1] = rotated.mul(&strategy.stages[target - 1]);
            }
        }
    }
}

/// Lower/upper sandwich for one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub side: Side,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

/// Default ascent budget used by [`gap_report`].
pub const GAP_DEFAULT_ANCILLA: usize = 2;
pub const GAP_DEFAULT_ITERS: usize = 400;

/// Run the ascent on both sides and report against the dual bounds. The
/// lower bound also considers honest play, so degenerate corners where one
/// side wins surely report lower = upper. Upper bounds are capped at 1.
pub fn gap_report(p: &ProtocolParams, seed: u64) -> Result<Vec<GapRow>> {
    let mut rows = Vec::new();
    for side in [Side::Alice, Side::Bob] {
        let upper = eval_side_fast(p, side).min(1.0);
        let honest = cheat_value(p, &CheatStrategy::honest(p, side, GAP_DEFAULT_ANCILLA)?)?;
        let climbed = ascend(p, side, GAP_DEFAULT_ANCILLA, GAP_DEFAULT_ITERS, seed)?;
        let lower = honest.max(climbed.value);
        rows.push(GapRow { side, lower, upper, gap: upper - lower });
    }
    Ok(rows)
}
