//! Protocol objects: parameters, outcome projectors, states, verification
//! projectors, and honest execution.
//!
//! A protocol instance is given by weights `a_1..a_n`. Message `i` carries
//! half of the two-qubit state `√a_i|00⟩ + √(1−a_i)|11⟩`; after the n
//! messages each party measures the two-outcome diagonal projectors
//! `{E_0, E_1}` and the loser inspects the winner's qubits against the
//! rank-one verification projector.
//!
//! Basis convention: qubit 1 is the most significant bit of a basis-string
//! index, so for n = 3 index 0 is `|000⟩` and index 6 is `|110⟩`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::{inner, norm, C64, ZERO};
use crate::{Error, Result};

/// Largest n for which full 2n-qubit state vectors are materialized.
pub const FULL_STATE_MAX_N: usize = 10;
/// Largest n for diagonal-only objects (projectors, trees, certificates).
pub const DIAGONAL_MAX_N: usize = 14;

/// Which party is cheating (or being bounded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Alice => 'A',
            Side::Bob => 'B',
        }
    }
}

/// Coin outcome: zero means Alice wins, one means Bob wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinOutcome {
    AliceWins,
    BobWins,
}

impl CoinOutcome {
    pub fn bit(self) -> usize {
        match self {
            CoinOutcome::AliceWins => 0,
            CoinOutcome::BobWins => 1,
        }
    }

    pub fn from_bit(b: usize) -> Result<Self> {
        match b {
            0 => Ok(CoinOutcome::AliceWins),
            1 => Ok(CoinOutcome::BobWins),
            _ => Err(Error::invalid(format!("outcome must be 0 or 1, got {b}"))),
        }
    }
}

/// Protocol instance: n weights in \[0,1\] plus the target honest probability
/// of Bob winning (default 1/2, i.e. a fair coin).
///
/// Boundary weights 0 and 1 are legal; the reductions used by the bound
/// evaluators and certificate builder produce them routinely.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    a: Vec<f64>,
    c: f64,
}

impl ProtocolParams {
    /// Fair-coin instance (c = 1/2).
    pub fn new(a: Vec<f64>) -> Result<Self> {
        Self::with_honest_prob(a, 0.5)
    }

    pub fn with_honest_prob(a: Vec<f64>, c: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("need at least one weight (n >= 1)"));
        }
        for (i, &ai) in a.iter().enumerate() {
            if !(0.0..=1.0).contains(&ai) || !ai.is_finite() {
                return Err(Error::invalid(format!(
                    "weight a_{} = {ai} outside [0, 1]",
                    i + 1
                )));
            }
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid(format!("honest probability c = {c} outside (0, 1)")));
        }
        Ok(ProtocolParams { a, c })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn honest_prob(&self) -> f64 {
        self.c
    }

    /// Weight of bit value `b` for qubit `i` (1-based): a_i for 0, 1−a_i for 1.
    #[inline]
    pub fn bit_weight(&self, qubit: usize, b: usize) -> f64 {
        if b == 0 {
            self.a[qubit - 1]
        } else {
            1.0 - self.a[qubit - 1]
        }
    }

    /// The instance (1, a_1, …, a_n) with the same c; used by the
    /// role-switch reduction.
    pub fn prefixed_with_one(&self) -> ProtocolParams {
        let mut a = Vec::with_capacity(self.n() + 1);
        a.push(1.0);
        a.extend_from_slice(&self.a);
        ProtocolParams { a, c: self.c }
    }

    /// The instance (a_1, …, a_n, 0) with the same c; used by the
    /// even-to-odd parity reduction.
    pub fn appended_with_zero(&self) -> ProtocolParams {
        let mut a = self.a.clone();
        a.push(0.0);
        ProtocolParams { a, c: self.c }
    }
}

/// Basis-string helpers under the fixed convention (qubit 1 = MSB).
pub mod basis {
    /// Index of the basis string b_1…b_n.
    pub fn index(bits: &[usize]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
    }

    /// Bit of qubit `i` (1-based) in basis index `j` of an n-qubit string.
    #[inline]
    pub fn bit(j: usize, n: usize, qubit: usize) -> usize {
        (j >> (n - qubit)) & 1
    }
}

/// Real diagonal operator over n-qubit basis strings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    n: usize,
    d: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != 1 << n {
            return Err(Error::ShapeMismatch(format!(
                "diagonal over {n} qubits needs {} entries, got {}",
                1usize << n,
                d.len()
            )));
        }
        Ok(DiagonalOperator { n, d })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        DiagonalOperator { n, d: vec![value; 1 << n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.d
    }

    #[inline]
    pub fn entry(&self, j: usize) -> f64 {
        self.d[j]
    }

    pub fn is_projector(&self) -> bool {
        self.d.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.d.iter().all(|&x| x >= 0.0)
    }

    /// Basis indices with a nonzero entry.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.d.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(j, _)| j)
    }
}

fn check_diagonal_cap(n: usize) -> Result<()> {
    if n > DIAGONAL_MAX_N {
        return Err(Error::ResourceLimit { what: "diagonal qubits n", requested: n, cap: DIAGONAL_MAX_N });
    }
    Ok(())
}

fn check_full_state_cap(n: usize) -> Result<()> {
    if n > FULL_STATE_MAX_N {
        return Err(Error::ResourceLimit { what: "full-state qubits n", requested: n, cap: FULL_STATE_MAX_N });
    }
    Ok(())
}

fn outcome_projector_entries(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e0 = vec![0.0, 1.0];
    let mut e1 = vec![1.0, 0.0];
    for k in 1..n {
        let dim = 1 << k;
        let mut ne0 = Vec::with_capacity(2 * dim);
        ne0.extend_from_slice(&e1);
        ne0.extend_from_slice(&e1);
        ne0[2 * dim - 1] += 1.0;
        let mut ne1 = Vec::with_capacity(2 * dim);
        ne1.extend_from_slice(&e0);
        ne1.extend_from_slice(&e0);
        ne1[2 * dim - 1] -= 1.0;
        e0 = ne0;
        e1 = ne1;
    }
    (e0, e1)
}

/// Outcome projectors {E_0, E_1}, built by the inductive rule
/// `E_0^{(k+1)} = I⊗E_1^{(k)} + |1…1⟩⟨1…1|`,
/// `E_1^{(k+1)} = I⊗E_0^{(k)} − |1…1⟩⟨1…1|`,
/// with the one-qubit base case E_1 = |0⟩⟨0|, E_0 = |1⟩⟨1|.
///
/// Equivalently: scan bits b_n, b_{n−1}, …, b_1; the first zero decides
/// (odd position ⇒ outcome one), all ones ⇒ outcome zero.
pub fn build_outcome_projectors(n: usize) -> Result<(DiagonalOperator, DiagonalOperator)> {
    if n < 1 {
        return Err(Error::invalid("projectors need n >= 1"));
    }
    check_diagonal_cap(n)?;
    let (e0, e1) = outcome_projector_entries(n);
    Ok((DiagonalOperator { n, d: e0 }, DiagonalOperator { n, d: e1 }))
}

/// The side's winning projector: E_1 for Bob, E_0 for Alice.
pub fn winning_projector(n: usize, side: Side) -> Result<DiagonalOperator> {
    let (e0, e1) = build_outcome_projectors(n)?;
    Ok(match side {
        Side::Alice => e0,
        Side::Bob => e1,
    })
}

/// Uncapped variant for the certificate builder, whose parity and
/// role-switch reductions can grow an n ≤ 14 instance by two qubits.
pub(crate) fn winning_projector_routed(n: usize, side: Side) -> Result<DiagonalOperator> {
    if n < 1 {
        return Err(Error::invalid("projectors need n >= 1"));
    }
    if n > DIAGONAL_MAX_N + 2 {
        return Err(Error::ResourceLimit {
            what: "routed certificate qubits n",
            requested: n,
            cap: DIAGONAL_MAX_N + 2,
        });
    }
    let (e0, e1) = outcome_projector_entries(n);
    Ok(match side {
        Side::Alice => DiagonalOperator { n, d: e0 },
        Side::Bob => DiagonalOperator { n, d: e1 },
    })
}

/// Pure state on k qubits, amplitudes indexed by basis string (qubit 1 = MSB).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    k: usize,
    amp: Vec<C64>,
}

impl PureState {
    pub fn new(k: usize, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != 1 << k {
            return Err(Error::ShapeMismatch(format!(
                "state over {k} qubits needs {} amplitudes, got {}",
                1usize << k,
                amp.len()
            )));
        }
        Ok(PureState { k, amp })
    }

    pub fn qubits(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amp)
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        inner(&self.amp, &other.amp)
    }

    /// ⟨ψ| diag(op) |ψ⟩ for a diagonal operator on all k qubits.
    pub fn diagonal_expectation(&self, op: &DiagonalOperator) -> f64 {
        self.amp
            .iter()
            .zip(op.entries())
            .map(|(a, &d)| a.norm_sqr() * d)
            .sum()
    }

    /// Project onto a diagonal 0/1 mask and renormalize; None if zero mass.
    pub fn collapse_diagonal(&self, mask: impl Fn(usize) -> f64) -> Option<PureState> {
        let mut amp: Vec<C64> = self
            .amp
            .iter()
            .enumerate()
            .map(|(j, a)| a * mask(j))
            .collect();
        let m = norm(&amp);
        if m == 0.0 {
            return None;
        }
        for a in &mut amp {
            *a /= m;
        }
        Some(PureState { k: self.k, amp })
    }
}

/// Two-qubit message state √a|00⟩ + √(1−a)|11⟩.
pub fn build_phi(a_i: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&a_i) || !a_i.is_finite() {
        return Err(Error::invalid(format!("message weight {a_i} outside [0, 1]")));
    }
    let mut amp = vec![ZERO; 4];
    amp[0] = C64::new(a_i.sqrt(), 0.0);
    amp[3] = C64::new((1.0 - a_i).sqrt(), 0.0);
    PureState::new(2, amp)
}

/// Honest post-message state on 2n particles: |φ_i⟩ lives on particles
/// (i, n+i), so the amplitude at (x, y) is nonzero only for x = y.
pub fn build_honest_state(p: &ProtocolParams) -> Result<PureState> {
    let n = p.n();
    check_full_state_cap(n)?;
    let dim_half = 1usize << n;
    let mut amp = vec![ZERO; dim_half * dim_half];
    for x in 0..dim_half {
        let mut w = 1.0;
        for i in 1..=n {
            w *= p.bit_weight(i, basis::bit(x, n, i));
        }
        amp[x * dim_half + x] = C64::new(w.sqrt(), 0.0);
    }
    PureState::new(2 * n, amp)
}

/// Product state ⊗_i (√a_i|0⟩ + √(1−a_i)|1⟩) on n qubits. Its squared
/// amplitudes are the honest measurement distribution.
pub fn build_xi(p: &ProtocolParams) -> Result<PureState> {
    let n = p.n();
    check_diagonal_cap(n)?;
    let mut amp = vec![ZERO; 1 << n];
    for (j, a) in amp.iter_mut().enumerate() {
        let mut w = 1.0;
        for i in 1..=n {
            w *= p.bit_weight(i, basis::bit(j, n, i));
        }
        *a = C64::new(w.sqrt(), 0.0);
    }
    PureState::new(n, amp)
}

/// Squared ξ amplitudes as plain weights (no allocation of complex values).
pub fn xi_squared_weights(p: &ProtocolParams) -> Result<Vec<f64>> {
    let n = p.n();
    check_diagonal_cap(n)?;
    let mut w = vec![1.0];
    for i in 1..=n {
        let mut next = Vec::with_capacity(w.len() * 2);
        for &x in &w {
            next.push(x * p.bit_weight(i, 0));
            next.push(x * p.bit_weight(i, 1));
        }
        w = next;
    }
    Ok(w)
}

/// Normalized restrictions of ξ to each side's winning support:
/// ξ_A = E_0|ξ⟩/√c_A, ξ_B = E_1|ξ⟩/√c_B with the actual masses c_A, c_B.
pub fn build_xi_sides(p: &ProtocolParams) -> Result<(PureState, PureState)> {
    let xi = build_xi(p)?;
    let (e0, e1) = build_outcome_projectors(p.n())?;
    let xi_a = xi
        .collapse_diagonal(|j| e0.entry(j))
        .ok_or_else(|| Error::DegenerateProtocol("Alice's winning support carries no mass".into()))?;
    let xi_b = xi
        .collapse_diagonal(|j| e1.entry(j))
        .ok_or_else(|| Error::DegenerateProtocol("Bob's winning support carries no mass".into()))?;
    Ok((xi_a, xi_b))
}

/// Rank-one verification projector F_i onto the normalized
/// E_i⊗E_i|ψ⟩ over all 2n particles.
#[derive(Debug, Clone)]
pub struct VerificationProjector {
    outcome: CoinOutcome,
    state: PureState,
}

impl VerificationProjector {
    pub fn outcome(&self) -> CoinOutcome {
        self.outcome
    }

    /// The unit vector the projector projects onto.
    pub fn state(&self) -> &PureState {
        &self.state
    }

    /// ⟨ψ|F|ψ⟩ = |⟨f|ψ⟩|².
    pub fn expectation(&self, psi: &PureState) -> f64 {
        self.state.overlap(psi).norm_sqr()
    }
}

pub fn build_verification_projector(
    p: &ProtocolParams,
    outcome: CoinOutcome,
) -> Result<VerificationProjector> {
    let n = p.n();
    check_full_state_cap(n)?;
    let psi = build_honest_state(p)?;
    let (e0, e1) = build_outcome_projectors(n)?;
    let e = match outcome {
        CoinOutcome::AliceWins => e0,
        CoinOutcome::BobWins => e1,
    };
    let dim_half = 1usize << n;
    let state = psi
        .collapse_diagonal(|j| e.entry(j / dim_half) * e.entry(j % dim_half))
        .ok_or_else(|| {
            Error::DegenerateProtocol(format!(
                "outcome {} has zero honest probability",
                outcome.bit()
            ))
        })?;
    Ok(VerificationProjector { outcome, state })
}

/// Result of one honest execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transcript {
    pub alice_outcome: CoinOutcome,
    pub bob_outcome: CoinOutcome,
    pub verification_passed: bool,
}

/// Sample one honest run: draw the joint {E_i ⊗ E_i} outcome on |ψ⟩ (its
/// distribution is the product distribution of ξ pushed through E), then
/// play the loser's verification measurement on the post-measurement state.
///
/// Honest outcomes always agree and verification always passes; both facts
/// are computed, not assumed.
pub fn simulate_honest_run(p: &ProtocolParams, seed: u64) -> Result<Transcript> {
    let n = p.n();
    check_full_state_cap(n)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // the joint measurement commutes with sampling each particle pair
    let mut string = 0usize;
    for i in 1..=n {
        let zero: bool = rng.gen::<f64>() < p.bit_weight(i, 0);
        string = (string << 1) | usize::from(!zero);
    }
    let (e0, e1) = build_outcome_projectors(n)?;
    let outcome = if e1.entry(string) != 0.0 {
        CoinOutcome::BobWins
    } else {
        debug_assert!(e0.entry(string) != 0.0);
        CoinOutcome::AliceWins
    };
    // loser inspects the winner's qubits: measure F_outcome on the
    // post-measurement state
    let psi = build_honest_state(p)?;
    let e = match outcome {
        CoinOutcome::BobWins => &e1,
        CoinOutcome::AliceWins => &e0,
    };
    let dim_half = 1usize << n;
    let post = psi
        .collapse_diagonal(|j| e.entry(j / dim_half) * e.entry(j % dim_half))
        .ok_or_else(|| Error::DegenerateProtocol("sampled outcome has zero mass".into()))?;
    let f = build_verification_projector(p, outcome)?;
    let pass_prob = f.expectation(&post);
    let verification_passed = rng.gen::<f64>() < pass_prob;
    Ok(Transcript {
        alice_outcome: outcome,
        bob_outcome: outcome,
        verification_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) const PAPER_N3: [f64; 3] = [0.74094, 0.479696, 0.186312];

    fn support_strings(op: &DiagonalOperator) -> Vec<usize> {
        op.support().collect()
    }

    #[test]
    fn basis_convention_pins_bit_order() {
        // qubit 1 is the most significant bit: |110⟩ is index 6
        assert_eq!(basis::index(&[1, 1, 0]), 6);
        assert_eq!(basis::index(&[0, 0, 0]), 0);
        for j in 0..8 {
            let bits: Vec<usize> = (1..=3).map(|q| basis::bit(j, 3, q)).collect();
            assert_eq!(basis::index(&bits), j);
        }
    }

    #[test]
    fn projectors_match_paper_small_cases() {
        let (e0, e1) = build_outcome_projectors(2).unwrap();
        // E_0 = |00⟩⟨00| + |10⟩⟨10| + |11⟩⟨11|, E_1 = |01⟩⟨01|
        assert_eq!(support_strings(&e0), vec![0b00, 0b10, 0b11]);
        assert_eq!(support_strings(&e1), vec![0b01]);

        let (_, e1) = build_outcome_projectors(3).unwrap();
        assert_eq!(
            support_strings(&e1),
            vec![0b000, 0b010, 0b011, 0b100, 0b110]
        );
    }

    #[test]
    fn projectors_base_case() {
        let (e0, e1) = build_outcome_projectors(1).unwrap();
        assert_eq!(e1.entries(), &[1.0, 0.0]);
        assert_eq!(e0.entries(), &[0.0, 1.0]);
    }

    #[test]
    fn projectors_complete_and_match_scan_rule() {
        // oracle: scan bits from qubit n down to qubit 1
        fn scan_outcome(j: usize, n: usize) -> usize {
            for i in (1..=n).rev() {
                if basis::bit(j, n, i) == 0 {
                    return if i % 2 == 1 { 1 } else { 0 };
                }
            }
            0
        }
        for n in 1..=14 {
            let (e0, e1) = build_outcome_projectors(n).unwrap();
            for j in 0..1usize << n {
                assert_eq!(e0.entry(j) + e1.entry(j), 1.0, "completeness n={n} j={j}");
                assert_eq!(e1.entry(j) as usize, scan_outcome(j, n), "scan n={n} j={j}");
            }
            assert!(e0.is_projector() && e1.is_projector());
        }
    }

    #[test]
    fn projectors_reject_bad_n() {
        assert!(matches!(build_outcome_projectors(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            build_outcome_projectors(15),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn phi_corners_and_midpoint() {
        let phi = build_phi(1.0).unwrap();
        assert_eq!(phi.amplitudes()[0], C64::new(1.0, 0.0));
        let phi = build_phi(0.0).unwrap();
        assert_eq!(phi.amplitudes()[3], C64::new(1.0, 0.0));
        let phi = build_phi(0.5).unwrap();
        assert_abs_diff_eq!(phi.amplitudes()[0].re, (0.5f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(phi.norm(), 1.0, epsilon = 1e-12);
        assert!(build_phi(1.5).is_err());
        assert!(build_phi(-0.1).is_err());
    }

    #[test]
    fn honest_state_layout_and_norm() {
        // a = (1,1) puts everything on |0000⟩
        let p = ProtocolParams::new(vec![1.0, 1.0]).unwrap();
        let psi = build_honest_state(&p).unwrap();
        assert_eq!(psi.amplitudes()[0], C64::new(1.0, 0.0));
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);

        let p = ProtocolParams::new(vec![0.3, 0.8]).unwrap();
        let psi = build_honest_state(&p).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
        // particle layout: phi_1 on particles (1,3), phi_2 on (2,4);
        // the string x=01 pairs with y=01 at index 0b0101
        assert_abs_diff_eq!(
            psi.amplitudes()[0b0101].re,
            (0.3f64 * 0.2).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn honest_state_e1e1_expectation_matches_paper_constraint() {
        let p = ProtocolParams::new(PAPER_N3.to_vec()).unwrap();
        let psi = build_honest_state(&p).unwrap();
        let (_, e1) = build_outcome_projectors(3).unwrap();
        let dim_half = 1 << 3;
        let joint: f64 = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * e1.entry(j / dim_half) * e1.entry(j % dim_half))
            .sum();
        assert_abs_diff_eq!(joint, 0.5, epsilon = 1e-5);
    }

    #[test]
    fn xi_corners_and_paper_amplitude() {
        let p = ProtocolParams::new(vec![1.0, 1.0]).unwrap();
        let xi = build_xi(&p).unwrap();
        assert_eq!(xi.amplitudes()[0], C64::new(1.0, 0.0));

        let p = ProtocolParams::new(vec![0.5, 0.5]).unwrap();
        let xi = build_xi(&p).unwrap();
        for a in xi.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
        }

        let p = ProtocolParams::new(PAPER_N3.to_vec()).unwrap();
        let xi = build_xi(&p).unwrap();
        let expect = (PAPER_N3[0] * PAPER_N3[1] * PAPER_N3[2]).sqrt();
        assert_abs_diff_eq!(xi.amplitudes()[0].re, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(expect * expect, 0.066224, epsilon = 1e-5);
    }

    #[test]
    fn xi_sides_supports_match_paper() {
        let p = ProtocolParams::new(PAPER_N3.to_vec()).unwrap();
        let (xi_a, xi_b) = build_xi_sides(&p).unwrap();
        let supp = |s: &PureState| -> Vec<usize> {
            s.amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 0.0)
                .map(|(j, _)| j)
                .collect()
        };
        assert_eq!(supp(&xi_b), vec![0b000, 0b010, 0b011, 0b100, 0b110]);
        assert_eq!(supp(&xi_a), vec![0b001, 0b101, 0b111]);
        assert_abs_diff_eq!(xi_a.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(xi_b.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn xi_sides_degenerate_errors() {
        // a = (1, 0) puts all mass on string 01 (Bob's support); Alice's side
        // is empty
        let p = ProtocolParams::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            build_xi_sides(&p),
            Err(Error::DegenerateProtocol(_))
        ));
    }

    #[test]
    fn verification_projector_is_rank_one_and_idempotent() {
        let x = 1.0 / 2f64.sqrt();
        let p = ProtocolParams::new(vec![x, 1.0 - 1.0 / (2.0 * x)]).unwrap();
        let f1 = build_verification_projector(&p, CoinOutcome::BobWins).unwrap();
        // materialize the 16x16 matrix and check F² = F, tr F = 1
        let v = f1.state().amplitudes();
        let dim = v.len();
        let f = crate::linalg::CMatrix::outer(v);
        let f2 = f.mul(&f);
        for i in 0..dim {
            for j in 0..dim {
                assert!((f2.get(i, j) - f.get(i, j)).norm() < 1e-12);
            }
        }
        let tr: f64 = (0..dim).map(|i| f.get(i, i).re).sum();
        assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-12);
        // ⟨ψ|F₁|ψ⟩ equals the honest Bob-win probability 1/2
        let psi = build_honest_state(&p).unwrap();
        assert_abs_diff_eq!(f1.expectation(&psi), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn honest_run_agrees_and_verifies() {
        let p = ProtocolParams::new(vec![0.7, 0.4, 0.9]).unwrap();
        for seed in 0..200 {
            let t = simulate_honest_run(&p, seed).unwrap();
            assert_eq!(t.alice_outcome, t.bob_outcome);
            assert!(t.verification_passed);
        }
    }

    #[test]
    fn honest_run_deterministic_corner() {
        // a = (1,0): string 01 is certain, Bob always wins
        let p = ProtocolParams::new(vec![1.0, 0.0]).unwrap();
        for seed in 0..50 {
            let t = simulate_honest_run(&p, seed).unwrap();
            assert_eq!(t.bob_outcome, CoinOutcome::BobWins);
        }
    }

    #[test]
    fn honest_run_respects_cap() {
        let p = ProtocolParams::new(vec![0.5; 11]).unwrap();
        assert!(matches!(
            simulate_honest_run(&p, 0),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::new(vec![]).is_err());
        assert!(ProtocolParams::new(vec![1.2]).is_err());
        assert!(ProtocolParams::with_honest_prob(vec![0.5], 0.0).is_err());
        assert!(ProtocolParams::with_honest_prob(vec![0.5], 1.0).is_err());
        let p = ProtocolParams::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(p.n(), 2);
    }
}
