//! Alternating-tree evaluation of the cheating bounds α and β and the
//! honest fairness constraint, in both dense (general diagonal leaves) and
//! linear-time (structured E₀/E₁ leaves) form.
//!
//! A complete binary tree over the 2^n basis strings combines qubit 1 at the
//! root and qubit n at the leaf pairs. Bounds come from chains alternating
//! weighted sums with weighted root-mean-squares (the optimally rescaled
//! certificates) or with maxima (the raw Sum-Max trees).

use alloc::format;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::protocol::{winning_projector, DiagonalOperator, ProtocolParams, Side, DIAGONAL_MAX_N};
use crate::{Error, Result};

/// A binary combining rule applied at one tree depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeOp {
    /// a·left + (1−a)·right
    WSum(f64),
    /// √(a·left² + (1−a)·right²)
    WRms(f64),
    /// max(left, right)
    Max,
}

impl NodeOp {
    #[inline]
    pub fn apply(self, left: f64, right: f64) -> f64 {
        match self {
            NodeOp::WSum(a) => a * left + (1.0 - a) * right,
            NodeOp::WRms(a) => (a * left * left + (1.0 - a) * right * right).sqrt(),
            NodeOp::Max => left.max(right),
        }
    }
}

/// The per-depth rules of one tree evaluation; `ops[0]` combines at the
/// root (qubit 1), `ops[n-1]` combines leaf pairs (qubit n).
#[derive(Debug, Clone, PartialEq)]
pub struct AltChain {
    ops: Vec<NodeOp>,
}

impl AltChain {
    pub fn new(ops: Vec<NodeOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::invalid("chain needs at least one op"));
        }
        Ok(AltChain { ops })
    }

    pub fn depth(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[NodeOp] {
        &self.ops
    }

    /// β chain: weighted sum at odd qubits, weighted RMS at even qubits.
    pub fn beta(p: &ProtocolParams) -> Self {
        Self::alternating(p, NodeOp::WSum, NodeOp::WRms)
    }

    /// α chain: weighted RMS at odd qubits, weighted sum at even qubits.
    pub fn alpha(p: &ProtocolParams) -> Self {
        Self::alternating(p, NodeOp::WRms, NodeOp::WSum)
    }

    /// All-linear chain: the honest constraint.
    pub fn constraint(p: &ProtocolParams) -> Self {
        Self::alternating(p, NodeOp::WSum, NodeOp::WSum)
    }

    /// Raw Sum-Max tree of the given cheater: for Bob the honest party sums
    /// at odd qubits and the cheater maxes at even qubits; for Alice the
    /// roles (and parities) switch.
    pub fn summax(p: &ProtocolParams, side: Side) -> Self {
        match side {
            Side::Bob => Self::alternating(p, NodeOp::WSum, |_| NodeOp::Max),
            Side::Alice => Self::alternating(p, |_| NodeOp::Max, NodeOp::WSum),
        }
    }

    fn alternating(
        p: &ProtocolParams,
        odd: impl Fn(f64) -> NodeOp,
        even: impl Fn(f64) -> NodeOp,
    ) -> Self {
        let ops = p
            .weights()
            .iter()
            .enumerate()
            .map(|(idx, &a)| if (idx + 1) % 2 == 1 { odd(a) } else { even(a) })
            .collect();
        AltChain { ops }
    }
}

/// Evaluate the complete binary tree over arbitrary diagonal leaves.
pub fn eval_tree_dense(chain: &AltChain, leaves: &DiagonalOperator) -> Result<f64> {
    let n = chain.depth();
    if leaves.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "chain depth {n} vs {}-qubit leaves",
            leaves.n()
        )));
    }
    if n > DIAGONAL_MAX_N {
        return Err(Error::ResourceLimit { what: "tree depth n", requested: n, cap: DIAGONAL_MAX_N });
    }
    let mut values = leaves.entries().to_vec();
    for depth in (0..n).rev() {
        let op = chain.ops[depth];
        let mut next = Vec::with_capacity(values.len() / 2);
        for pair in values.chunks_exact(2) {
            next.push(op.apply(pair[0], pair[1]));
        }
        values = next;
    }
    Ok(values[0])
}

/// Root value of the High/Low recurrence over the structured projector
/// leaves: starting from (H, L) = (1, 0) at qubit n, collapse qubit i with
/// a weighted sum at odd i (new low a_i·H + (1−a_i)·L) and, at even i,
/// either a weighted RMS (new high √(a_i·L² + (1−a_i)·H²)) or — for the
/// all-linear constraint — a weighted sum (new high a_i·L + (1−a_i)·H).
/// The root combines as a_1·H + (1−a_1)·L. O(n) time, O(1) space.
fn high_low_root(p: &ProtocolParams, rms_at_even: bool) -> f64 {
    let a = p.weights();
    let n = a.len();
    let (mut high, mut low) = (1.0f64, 0.0f64);
    for i in (2..=n).rev() {
        let ai = a[i - 1];
        if i % 2 == 1 {
            low = ai * high + (1.0 - ai) * low;
        } else if rms_at_even {
            high = (ai * low * low + (1.0 - ai) * high * high).sqrt();
        } else {
            high = ai * low + (1.0 - ai) * high;
        }
    }
    a[0] * high + (1.0 - a[0]) * low
}

/// In debug builds, occasionally cross-check a fast evaluation against the
/// dense tree (cheap spot check; roughly one call in 64 for small n).
#[cfg(debug_assertions)]
fn debug_spot_check(p: &ProtocolParams, side: Side, got: f64) {
    let n = p.n();
    if n > 10 {
        return;
    }
    let mut h = 0u64;
    for &x in p.weights() {
        h = h.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(x.to_bits());
    }
    if !h.is_multiple_of(64) {
        return;
    }
    let chain = match side {
        Side::Bob => AltChain::beta(p),
        Side::Alice => AltChain::alpha(p),
    };
    let leaves = winning_projector(n, side).expect("projector for spot check");
    let root = eval_tree_dense(&chain, &leaves).expect("dense spot check");
    let dense = root * root / p.honest_prob();
    debug_assert!(
        (dense - got).abs() <= 1e-9 * dense.abs().max(1.0),
        "fast/dense disagree: {got} vs {dense}"
    );
}

/// Upper bound β on cheating Bob's winning probability, (1/c)·L₀².
pub fn eval_beta_fast(p: &ProtocolParams) -> f64 {
    let root = high_low_root(p, true);
    let beta = root * root / p.honest_prob();
    #[cfg(debug_assertions)]
    debug_spot_check(p, Side::Bob, beta);
    beta
}

/// Upper bound α on cheating Alice's winning probability: the role-switch
/// reduction evaluates β on the instance (1, a_1, …, a_n) with the same c.
pub fn eval_alpha_fast(p: &ProtocolParams) -> f64 {
    let root = high_low_root(&p.prefixed_with_one(), true);
    let alpha = root * root / p.honest_prob();
    #[cfg(debug_assertions)]
    debug_spot_check(p, Side::Alice, alpha);
    alpha
}

/// Honest probability that Bob wins, via the all-linear recurrence.
pub fn eval_constraint_fast(p: &ProtocolParams) -> f64 {
    high_low_root(p, false)
}

/// The fast bound for one side.
pub fn eval_side_fast(p: &ProtocolParams, side: Side) -> f64 {
    match side {
        Side::Alice => eval_alpha_fast(p),
        Side::Bob => eval_beta_fast(p),
    }
}

/// Both cheating bounds, the constraint, and the certified bias bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub alpha: f64,
    pub beta: f64,
    pub constraint: f64,
    pub bias_bound: f64,
}

pub fn bounds(p: &ProtocolParams) -> BoundReport {
    let alpha = eval_alpha_fast(p);
    let beta = eval_beta_fast(p);
    BoundReport {
        alpha,
        beta,
        constraint: eval_constraint_fast(p),
        bias_bound: alpha.max(beta) - p.honest_prob(),
    }
}
