//! Explicit dual certificates for the cheating bounds.
//!
//! A certificate for side s is a positive scaling diagonal S (built by the
//! σ-recursion, which balances every max node of the side's Sum-Max tree)
//! together with the diagonal Z = (K/c)·S⁻¹E placed on the tree leaves,
//! where K = ⟨ξ|S E|ξ⟩. Feasibility reduces to the rank-one domination
//! diag(Z) ≥ |ξ_s⟩⟨ξ_s| on the 2^n-dimensional correlated subspace, and the
//! certified bound is the Sum-Max tree value of Z.
//!
//! The direct construction runs on odd-n Bob-side trees; even n is reached
//! by appending a weight-0 message and side A by prepending a weight-1
//! message with the parties' roles switched. Both reductions are exact
//! slices, so the certificate maps back to the original instance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eigh, CMatrix, C64};
use crate::protocol::{
    winning_projector, DiagonalOperator, ProtocolParams, PureState, Side, DIAGONAL_MAX_N,
};
use crate::tree::{eval_side_fast, eval_tree_dense, AltChain, NodeOp};
use crate::{Error, Result};

/// Acceptance thresholds for certificate verification.
pub const DOMINATION_TOL: f64 = 1e-9;
pub const BALANCE_TOL: f64 = 1e-9;
pub const TREE_MATCH_TOL: f64 = 1e-9;
/// Dimension up to which [`verify_certificate`] runs the eigenvalue oracle.
pub const ORACLE_DEFAULT_DIM: usize = 1 << 6;
/// Hard ceiling for the oracle when requested explicitly.
pub const ORACLE_MAX_DIM: usize = 1 << 12;

/// σ-variables of one max node of a Bob-side Sum-Max tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaNode {
    /// Even qubit whose pairs this max node combines.
    pub qubit: usize,
    /// Basis prefix b_1…b_{qubit-1} identifying the node.
    pub prefix: usize,
    /// Normalizer [a·σ_L² + (1−a)·σ_R²]^{-1/2}; infinite when the node's
    /// entire subtree carries no projector mass.
    pub sigma: f64,
    pub sigma_left: f64,
    pub sigma_right: f64,
}

/// Scaling assignment for the Bob tree of an odd-n instance: the values of
/// the weighted-RMS tree over E₁ at every prefix, read as σ-variables.
#[derive(Debug, Clone)]
pub struct SigmaAssignment {
    n: usize,
    /// values[level][prefix], level 0 = root … level n = leaves (E₁ entries)
    values: Vec<Vec<f64>>,
}

impl SigmaAssignment {
    /// Build for the Bob-side tree of `p` (odd n: weighted sums at odd
    /// qubits, max nodes at even qubits).
    pub fn for_bob_tree(p: &ProtocolParams) -> Result<Self> {
        let n = p.n();
        if n.is_multiple_of(2) {
            return Err(Error::invalid("direct σ-recursion needs odd n"));
        }
        let e1 = crate::protocol::winning_projector_routed(n, Side::Bob)?;
        let mut values = vec![Vec::new(); n + 1];
        values[n] = e1.entries().to_vec();
        for level in (0..n).rev() {
            let qubit = level + 1;
            let a = p.weights()[qubit - 1];
            let prev = &values[level + 1];
            let mut cur = Vec::with_capacity(1 << level);
            for pair in prev.chunks_exact(2) {
                cur.push(if qubit % 2 == 1 {
                    a * pair[0] + (1.0 - a) * pair[1]
                } else {
                    (a * pair[0] * pair[0] + (1.0 - a) * pair[1] * pair[1]).sqrt()
                });
            }
            values[level] = cur;
        }
        Ok(SigmaAssignment { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Root value of the rescaled tree; equals ⟨ξ|S E₁|ξ⟩ and the fast β
    /// recurrence's root.
    pub fn root_value(&self) -> f64 {
        self.values[0][0]
    }

    /// The σ-variables of every max node, bottom level last.
    pub fn nodes(&self) -> Vec<SigmaNode> {
        let mut out = Vec::new();
        for level in (1..self.n).step_by(2) {
            let qubit = level + 1;
            for prefix in 0..1usize << level {
                let v = self.values[level][prefix];
                out.push(SigmaNode {
                    qubit,
                    prefix,
                    sigma: if v > 0.0 { 1.0 / v } else { f64::INFINITY },
                    sigma_left: self.values[level + 1][2 * prefix],
                    sigma_right: self.values[level + 1][2 * prefix + 1],
                });
            }
        }
        out
    }

    /// Leaf scaling s_j: the product over max-node ancestors of
    /// σ_μ·σ_{μL} or σ_μ·σ_{μR} by descent direction; zero on leaves whose
    /// path passes through a massless subtree.
    pub fn leaf_scaling(&self, j: usize) -> f64 {
        let mut s = 1.0;
        for level in (1..self.n).step_by(2) {
            let node = self.values[level][j >> (self.n - level)];
            let child = self.values[level + 1][j >> (self.n - level - 1)];
            if node <= 0.0 || child <= 0.0 {
                return 0.0;
            }
            s *= child / node;
        }
        s
    }

    /// The full scaling diagonal.
    pub fn scaling_diagonal(&self) -> DiagonalOperator {
        let d = (0..1usize << self.n).map(|j| self.leaf_scaling(j)).collect();
        DiagonalOperator::new(self.n, d).expect("sized by construction")
    }
}

/// How an original instance maps into the routed odd instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Routing {
    prepended: bool,
    appended: bool,
}

impl Routing {
    /// Basis index of original leaf j inside the routed instance: a
    /// prepended qubit is fixed to 0 (most significant, no index change),
    /// an appended qubit to 1 (least significant).
    fn map_index(self, j: usize) -> usize {
        if self.appended {
            2 * j + 1
        } else {
            j
        }
    }
}

/// Route (p, side) to the odd-n Bob-side instance the σ-recursion handles.
fn route(p: &ProtocolParams, side: Side) -> (ProtocolParams, Routing) {
    let mut routed = p.clone();
    let mut r = Routing { prepended: false, appended: false };
    if side == Side::Alice {
        routed = routed.prefixed_with_one();
        r.prepended = true;
    }
    if routed.n().is_multiple_of(2) {
        routed = routed.appended_with_zero();
        r.appended = true;
    }
    (routed, r)
}

/// A dual certificate: scaling diagonal, certified diagonal Z, the scalar
/// K = Σ_j s_j ξ_j² e_j, and the bound it certifies (the Sum-Max tree value
/// of Z, which equals K²/c for the canonical construction).
#[derive(Debug, Clone)]
pub struct DualCertificate {
    params: ProtocolParams,
    side: Side,
    s: DiagonalOperator,
    z: DiagonalOperator,
    k: f64,
    bound: f64,
}

impl DualCertificate {
    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn scaling(&self) -> &DiagonalOperator {
        &self.s
    }

    pub fn z(&self) -> &DiagonalOperator {
        &self.z
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Assemble a certificate from an explicit scaling diagonal: K and Z
    /// are recomputed from S and the bound is the tree value of Z. The
    /// canonical σ-built S makes this meet the fast-recurrence value; any
    /// positive rescaling t·S yields the identical Z and bound.
    pub fn from_scaling(
        params: ProtocolParams,
        side: Side,
        s: DiagonalOperator,
    ) -> Result<DualCertificate> {
        let n = params.n();
        if s.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "scaling over {} qubits for an n = {n} instance",
                s.n()
            )));
        }
        if !s.is_nonnegative() {
            return Err(Error::invalid("scaling diagonal must be nonnegative"));
        }
        let e = winning_projector(n, side)?;
        let xi2 = crate::protocol::xi_squared_weights(&params)?;
        let k: f64 = (0..s.dim())
            .map(|j| s.entry(j) * xi2[j] * e.entry(j))
            .sum();
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::DegenerateCertificate(format!(
                "winning mass under the scaling vanishes (K = {k})"
            )));
        }
        let c = params.honest_prob();
        let z_entries: Vec<f64> = (0..s.dim())
            .map(|j| {
                if e.entry(j) != 0.0 && s.entry(j) > 0.0 {
                    (k / c) * e.entry(j) / s.entry(j)
                } else {
                    0.0
                }
            })
            .collect();
        let z = DiagonalOperator::new(n, z_entries)?;
        let bound = eval_tree_dense(&AltChain::summax(&params, side), &z)?;
        Ok(DualCertificate { params, side, s, z, k, bound })
    }
}

/// Build the canonical certificate for one side via the σ-recursion on the
/// routed odd instance, mapped back to the original basis.
pub fn build_certificate(p: &ProtocolParams, side: Side) -> Result<DualCertificate> {
    if p.n() > DIAGONAL_MAX_N {
        return Err(Error::ResourceLimit {
            what: "certificate qubits n",
            requested: p.n(),
            cap: DIAGONAL_MAX_N,
        });
    }
    let (routed, routing) = route(p, side);
    let sigma = SigmaAssignment::for_bob_tree(&routed)?;
    let s_routed = sigma.scaling_diagonal();
    let n = p.n();
    let s_entries: Vec<f64> = (0..1usize << n)
        .map(|j| s_routed.entry(routing.map_index(j)))
        .collect();
    let s = DiagonalOperator::new(n, s_entries)?;
    let cert = DualCertificate::from_scaling(p.clone(), side, s)?;
    debug_assert!(
        (cert.bound - cert.k * cert.k / p.honest_prob()).abs()
            <= 1e-10 * cert.bound.abs().max(1.0),
        "canonical bound should equal K²/c"
    );
    debug_assert!({
        let fast = eval_side_fast(p, side);
        (cert.bound - fast).abs() <= 1e-9 * fast.abs().max(1.0)
    });
    Ok(cert)
}

/// Rank-one domination diag(z) ≥ v v†, decided by support containment plus
/// the Schur-complement criterion Σ_j |v_j|²/z_j ≤ 1. Returns the margin
/// 1 − Σ_j |v_j|²/z_j; a support violation is an immediate rejection.
pub fn rank_one_domination(z: &[f64], v: &[C64]) -> Result<f64> {
    if z.len() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "domination dims {} vs {}",
            z.len(),
            v.len()
        )));
    }
    let mut total = 0.0;
    for (j, vj) in v.iter().enumerate() {
        let mass = vj.norm_sqr();
        if mass == 0.0 {
            continue;
        }
        if z[j] <= 0.0 {
            return Err(Error::SupportViolation { index: j });
        }
        total += mass / z[j];
    }
    Ok(1.0 - total)
}

/// Numerical verdict on a certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertReport {
    /// 1 − Σ_j v_j²/z_j over the support of the verification vector.
    pub domination_margin: f64,
    /// Worst relative mismatch of the two values entering a max node
    /// (degenerate nodes with a zero entering side are skipped).
    pub balance_residual: f64,
    /// Relative |tree value − bound|.
    pub tree_match_residual: f64,
    /// Minimum eigenvalue of diag(z) − vv† from the independent eigenvalue
    /// oracle; only computed for dimensions up to 2^8.
    pub psd_min_eig: Option<f64>,
}

impl CertReport {
    pub fn accepted(&self) -> bool {
        self.domination_margin >= -DOMINATION_TOL
            && self.balance_residual <= BALANCE_TOL
            && self.tree_match_residual <= TREE_MATCH_TOL
    }
}

/// The verification vector for a side: E·ξ scaled by 1/√c with the
/// instance's target honest probability. When the fairness constraint holds
/// this is the normalized ξ_side of the winner's state.
fn verification_vector(p: &ProtocolParams, side: Side) -> Result<Vec<f64>> {
    let e = winning_projector(p.n(), side)?;
    let xi2 = crate::protocol::xi_squared_weights(p)?;
    let c = p.honest_prob();
    Ok((0..e.dim())
        .map(|j| (xi2[j] * e.entry(j) / c).sqrt())
        .collect())
}

/// Evaluate the side's Sum-Max tree keeping all levels (for balance checks).
fn summax_levels(chain: &AltChain, z: &DiagonalOperator) -> Vec<Vec<f64>> {
    let n = chain.depth();
    let mut levels = vec![Vec::new(); n + 1];
    levels[n] = z.entries().to_vec();
    for depth in (0..n).rev() {
        let op = chain.ops()[depth];
        let prev = &levels[depth + 1];
        let mut cur = Vec::with_capacity(prev.len() / 2);
        for pair in prev.chunks_exact(2) {
            cur.push(op.apply(pair[0], pair[1]));
        }
        levels[depth] = cur;
    }
    levels
}

/// Check a certificate: rank-one domination (closed form), max-node balance,
/// tree-value agreement with the claimed bound, and — on small dimensions —
/// an independent eigenvalue oracle for diag(z) − vv†.
pub fn verify_certificate(cert: &DualCertificate) -> Result<CertReport> {
    verify_certificate_with_oracle(cert, ORACLE_DEFAULT_DIM)
}

/// As [`verify_certificate`], with an explicit cap on the dimension at
/// which the eigenvalue oracle is attempted (cubic cost; capped at 2^12).
pub fn verify_certificate_with_oracle(
    cert: &DualCertificate,
    oracle_dim_cap: usize,
) -> Result<CertReport> {
    let p = cert.params();
    let v = verification_vector(p, cert.side())?;
    let v_c: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    let domination_margin = rank_one_domination(cert.z().entries(), &v_c)?;

    let chain = AltChain::summax(p, cert.side());
    let levels = summax_levels(&chain, cert.z());
    let mut balance_residual = 0.0f64;
    for (depth, op) in chain.ops().iter().enumerate() {
        if !matches!(op, NodeOp::Max) {
            continue;
        }
        for pair in levels[depth + 1].chunks_exact(2) {
            let (lo, hi) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if lo > 0.0 {
                balance_residual = balance_residual.max((hi - lo) / hi);
            }
        }
    }
    let tree_value = levels[0][0];
    let tree_match_residual = (tree_value - cert.bound()).abs() / cert.bound().abs().max(1.0);

    let dim = cert.z().dim();
    let psd_min_eig = if dim <= oracle_dim_cap.min(ORACLE_MAX_DIM) {
        let m = CMatrix::from_fn(dim, |i, j| {
            let mut x = C64::new(-v[i] * v[j], 0.0);
            if i == j {
                x += C64::new(cert.z().entry(i), 0.0);
            }
            x
        });
        Some(*eigh(&m)?.values.first().expect("nonempty"))
    } else {
        None
    };

    Ok(CertReport {
        domination_margin,
        balance_residual,
        tree_match_residual,
        psd_min_eig,
    })
}

/// Minimum of Tr(Z·D) over real diagonal Z ≥ 2E|Ψ⟩⟨Ψ|E, where D is the
/// diagonal part of |Ψ⟩⟨Ψ| and E a diagonal projector: the optimum is
/// 2|⟨Ψ|E|Ψ⟩|², attained by Z = 2⟨Ψ|E|Ψ⟩E.
pub fn lemma_min_trace(
    psi: &PureState,
    e: &DiagonalOperator,
) -> Result<(f64, DiagonalOperator)> {
    if psi.dim() != e.dim() {
        return Err(Error::ShapeMismatch(format!(
            "state dim {} vs projector dim {}",
            psi.dim(),
            e.dim()
        )));
    }
    if !e.is_projector() {
        return Err(Error::invalid("lemma needs a 0/1 diagonal projector"));
    }
    let mass = psi.diagonal_expectation(e);
    let optimum = 2.0 * mass * mass;
    let z = DiagonalOperator::new(
        e.n(),
        e.entries().iter().map(|&x| 2.0 * mass * x).collect(),
    )?;
    Ok((optimum, z))
}

/// Projector of the product form I_sub ⊗ |φ⟩⟨φ|.
#[derive(Debug, Clone)]
pub struct ProductProjector {
    sub_dim: usize,
    phi: Vec<C64>,
}

impl ProductProjector {
    pub fn new(sub_dim: usize, phi: Vec<C64>) -> Result<Self> {
        if sub_dim == 0 || phi.is_empty() {
            return Err(Error::invalid("projector factors must be nonempty"));
        }
        let nrm = crate::linalg::norm(&phi);
        if (nrm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("|φ| must be 1, got {nrm}")));
        }
        Ok(ProductProjector { sub_dim, phi })
    }

    pub fn dim(&self) -> usize {
        self.sub_dim * self.phi.len()
    }

    pub fn sub_dim(&self) -> usize {
        self.sub_dim
    }

    /// Compression T(H) = (I ⊗ ⟨φ|) H (I ⊗ |φ⟩) onto the kept subsystem.
    pub fn compress(&self, h: &CMatrix) -> CMatrix {
        let dp = self.phi.len();
        CMatrix::from_fn(self.sub_dim, |a, b| {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..dp {
                for y in 0..dp {
                    acc += self.phi[x].conj() * h.get(a * dp + x, b * dp + y) * self.phi[y];
                }
            }
            acc
        })
    }

    /// The projector as a dense matrix.
    pub fn matrix(&self) -> CMatrix {
        let dp = self.phi.len();
        CMatrix::from_fn(self.dim(), |i, j| {
            if i / dp == j / dp {
                self.phi[i % dp] * self.phi[j % dp].conj()
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Output of the block-absorption lemma.
#[derive(Debug, Clone)]
pub struct BlockAbsorb {
    /// The dominating block-diagonal matrix.
    pub b: CMatrix,
    /// min-eig(B − H) when the dimension admits the eigenvalue check.
    pub domination_min_eig: Option<f64>,
    /// Perpendicular-block shift actually used.
    pub y: f64,
    /// Largest eigenvalue of (I−P)H(I−P).
    pub lambda: f64,
    /// Operator norm of the cross block P·H·(I−P).
    pub gamma: f64,
}

/// Given M ≥ T(H) on the kept subsystem and ε > 0, build the block-diagonal
/// B = (M + εI)⊗|φ⟩⟨φ| on the parallel space and (λ+y)·I on the
/// perpendicular space, with y sized so that B ≥ H. The AM–GM expansion of
/// the cross-term inequality needs ε·y ≥ γ², so y = 1.001·max(γ²/ε, γ);
/// domination is then confirmed by a direct eigenvalue check rather than
/// trusted from the formula.
pub fn block_absorb_certificate(
    m: &CMatrix,
    h: &CMatrix,
    proj: &ProductProjector,
    eps: f64,
) -> Result<BlockAbsorb> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if h.dim() != proj.dim() {
        return Err(Error::ShapeMismatch(format!(
            "H dim {} vs projector dim {}",
            h.dim(),
            proj.dim()
        )));
    }
    if m.dim() != proj.sub_dim() {
        return Err(Error::ShapeMismatch(format!(
            "M dim {} vs kept subsystem dim {}",
            m.dim(),
            proj.sub_dim()
        )));
    }
    // embedded precondition check: M − T(H) ⪰ 0
    let slack = m.sub(&proj.compress(h));
    let pre = eigh(&slack)?;
    let min_pre = pre.values[0];
    if min_pre < -1e-10 * h.frobenius_norm().max(1.0) {
        let witness = (0..slack.dim()).map(|i| pre.vectors.get(i, 0)).collect();
        return Err(Error::PreconditionViolated { min_eig: min_pre, witness });
    }

    let p_mat = proj.matrix();
    let dim = h.dim();
    let id = CMatrix::identity(dim);
    let q_mat = id.sub(&p_mat); // I − P
    let h_perp = q_mat.mul(&h.mul(&q_mat));
    let lambda = eigh(&h_perp)?.values.last().copied().unwrap_or(0.0);
    let cross = p_mat.mul(&h.mul(&q_mat));
    let gamma = crate::linalg::operator_norm(&cross)?;
    let y = 1.001 * (gamma * gamma / eps).max(gamma);

    let dp = dim / proj.sub_dim();
    let mut b = q_mat.scale(C64::new(lambda + y, 0.0));
    for a in 0..proj.sub_dim() {
        for bb in 0..proj.sub_dim() {
            let mut mab = m.get(a, bb);
            if a == bb {
                mab += C64::new(eps, 0.0);
            }
            for x in 0..dp {
                for yix in 0..dp {
                    let val = b.get(a * dp + x, bb * dp + yix)
                        + mab * proj.phi_entry(x) * proj.phi_entry(yix).conj();
                    b.set(a * dp + x, bb * dp + yix, val);
                }
            }
        }
    }

    let domination_min_eig = if dim <= 1 << 8 {
        Some(eigh(&b.sub(h))?.values[0])
    } else {
        None
    };
    Ok(BlockAbsorb { b, domination_min_eig, y, lambda, gamma })
}

impl ProductProjector {
    #[inline]
    fn phi_entry(&self, x: usize) -> C64 {
        self.phi[x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::protocol::build_xi;
    use crate::tree::{eval_alpha_fast, eval_beta_fast};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    const PAPER_N3: [f64; 3] = [0.74094, 0.479696, 0.186312];

    fn params(a: &[f64]) -> ProtocolParams {
        ProtocolParams::new(a.to_vec()).unwrap()
    }

    #[test]
    fn sigma_assignment_matches_hand_values_n3() {
        let p = params(&PAPER_N3);
        let sigma = SigmaAssignment::for_bob_tree(&p).unwrap();
        let [_, a2, a3] = PAPER_N3;
        let nodes = sigma.nodes();
        assert_eq!(nodes.len(), 2);
        let left = nodes[0];
        let right = nodes[1];
        assert_eq!((left.qubit, left.prefix), (2, 0));
        assert_abs_diff_eq!(left.sigma_left, a3, epsilon = 1e-15);
        assert_abs_diff_eq!(left.sigma_right, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            left.sigma,
            1.0 / (a2 * a3 * a3 + (1.0 - a2)).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(right.sigma_left, a3, epsilon = 1e-15);
        assert_abs_diff_eq!(right.sigma_right, a3, epsilon = 1e-15);
        assert_abs_diff_eq!(right.sigma, 1.0 / a3, epsilon = 1e-12);
        // normalization identity σ = [a σ_L² + (1−a) σ_R²]^{-1/2}
        for node in &nodes {
            let a = p.weights()[node.qubit - 1];
            let bracket = a * node.sigma_left * node.sigma_left
                + (1.0 - a) * node.sigma_right * node.sigma_right;
            assert_abs_diff_eq!(node.sigma, bracket.powf(-0.5), epsilon = 1e-12);
        }
        // leaf scalings are the ancestor products σ_μ·σ_{μ,dir}
        assert_abs_diff_eq!(sigma.leaf_scaling(0), left.sigma * a3, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma.leaf_scaling(2), left.sigma * 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma.leaf_scaling(4), right.sigma * a3, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma.leaf_scaling(7), right.sigma * a3, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma.leaf_scaling(0), 0.254256, epsilon = 1e-6);
    }

    #[test]
    fn certificate_n3_paper_values() {
        let p = params(&PAPER_N3);
        let cert = build_certificate(&p, Side::Bob).unwrap();
        assert_abs_diff_eq!(cert.k(), 0.591204, epsilon = 1e-5);
        assert_abs_diff_eq!(cert.bound(), 0.69905, epsilon = 5e-4);
        assert_abs_diff_eq!(cert.bound(), eval_beta_fast(&p), epsilon = 1e-12);
        // z vanishes exactly on the loser-support strings x₁, x₅, x₇
        for j in [0b001, 0b101, 0b111] {
            assert_eq!(cert.z().entry(j), 0.0);
        }
        for j in [0b000, 0b010, 0b011, 0b100, 0b110] {
            assert!(cert.z().entry(j) > 0.0);
        }

        let cert_a = build_certificate(&p, Side::Alice).unwrap();
        assert_abs_diff_eq!(cert_a.bound(), eval_alpha_fast(&p), epsilon = 1e-12);
        for j in [0b001, 0b101, 0b111] {
            assert!(cert_a.z().entry(j) > 0.0);
        }
        for j in [0b000, 0b010, 0b011, 0b100, 0b110] {
            assert_eq!(cert_a.z().entry(j), 0.0);
        }
    }

    #[test]
    fn certificate_symmetric_point() {
        let x = 1.0 / 2f64.sqrt();
        let p = params(&[x, 1.0 - 1.0 / (2.0 * x)]);
        let cert = build_certificate(&p, Side::Bob).unwrap();
        assert_abs_diff_eq!(cert.bound(), 1.0 / 2f64.sqrt(), epsilon = 1e-9);
        let report = verify_certificate(&cert).unwrap();
        assert!(report.accepted());
    }

    #[test]
    fn certificate_verifies_at_paper_point() {
        let p = params(&PAPER_N3);
        for side in [Side::Alice, Side::Bob] {
            let cert = build_certificate(&p, side).unwrap();
            let report = verify_certificate(&cert).unwrap();
            assert!(report.domination_margin.abs() <= 1e-9, "{report:?}");
            assert!(report.balance_residual <= 1e-9);
            assert!(report.tree_match_residual <= 1e-9);
            assert!(report.psd_min_eig.unwrap() >= -1e-9);
            assert!(report.accepted());
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let p = params(&PAPER_N3);
        let cert = build_certificate(&p, Side::Bob).unwrap();
        let mut z = cert.z().entries().to_vec();
        z[0] /= 2.0;
        let tampered = DualCertificate {
            params: cert.params().clone(),
            side: cert.side(),
            s: cert.scaling().clone(),
            z: DiagonalOperator::new(3, z).unwrap(),
            k: cert.k(),
            bound: cert.bound(),
        };
        let report = verify_certificate(&tampered).unwrap();
        assert!(report.domination_margin < -1e-9);
        assert!(!report.accepted());
        assert!(report.psd_min_eig.unwrap() < 0.0);
    }

    #[test]
    fn scale_covariance_of_bound() {
        let p = params(&[0.62, 0.31, 0.47, 0.15, 0.72]);
        for side in [Side::Alice, Side::Bob] {
            let cert = build_certificate(&p, side).unwrap();
            for &t in &[0.25, 3.0, 117.0] {
                let scaled = DiagonalOperator::new(
                    p.n(),
                    cert.scaling().entries().iter().map(|&x| t * x).collect(),
                )
                .unwrap();
                let rescaled =
                    DualCertificate::from_scaling(p.clone(), side, scaled).unwrap();
                assert_abs_diff_eq!(rescaled.bound(), cert.bound(), epsilon = 1e-12);
                assert_abs_diff_eq!(rescaled.k(), t * cert.k(), epsilon = 1e-12 * t);
            }
        }
    }

    #[test]
    fn rank_one_domination_examples() {
        // z = I, v = e₀: boundary feasible
        let z = [1.0, 1.0];
        let v = [C64::new(1.0, 0.0), ZERO];
        assert_abs_diff_eq!(rank_one_domination(&z, &v).unwrap(), 0.0, epsilon = 1e-15);
        // z = diag(1/2, 1/2), v = (√½, √½): margin −1, eigen oracle −1/2
        let z = [0.5, 0.5];
        let h = (0.5f64).sqrt();
        let v = [C64::new(h, 0.0), C64::new(h, 0.0)];
        assert_abs_diff_eq!(rank_one_domination(&z, &v).unwrap(), -1.0, epsilon = 1e-12);
        let m = CMatrix::from_fn(2, |i, j| {
            let mut x = C64::new(-v[i].re * v[j].re, 0.0);
            if i == j {
                x += C64::new(z[i], 0.0);
            }
            x
        });
        assert_abs_diff_eq!(eigh(&m).unwrap().values[0], -0.5, epsilon = 1e-12);
        // support violation
        let z = [1.0, 0.0];
        let v = [ZERO, C64::new(0.5, 0.0)];
        assert!(matches!(
            rank_one_domination(&z, &v),
            Err(Error::SupportViolation { index: 1 })
        ));
    }

    #[test]
    fn lemma_min_trace_examples() {
        // Ψ = e₀, E = I → optimum 2, z = 2I
        let psi = PureState::new(1, vec![C64::new(1.0, 0.0), ZERO]).unwrap();
        let e = DiagonalOperator::constant(1, 1.0);
        let (opt, z) = lemma_min_trace(&psi, &e).unwrap();
        assert_abs_diff_eq!(opt, 2.0, epsilon = 1e-15);
        assert_eq!(z.entries(), &[2.0, 2.0]);
        // orthogonal case
        let e = DiagonalOperator::new(1, vec![0.0, 1.0]).unwrap();
        let (opt, z) = lemma_min_trace(&psi, &e).unwrap();
        assert_eq!(opt, 0.0);
        assert_eq!(z.entries(), &[0.0, 0.0]);
    }

    #[test]
    fn lemma_min_trace_matches_certificate_on_rescaled_xi() {
        // Ψ = √S·ξ, E = E₁ reproduces the certificate bound 2K²
        let p = params(&PAPER_N3);
        let cert = build_certificate(&p, Side::Bob).unwrap();
        let xi = build_xi(&p).unwrap();
        let amp: Vec<C64> = xi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(j, a)| a * cert.scaling().entry(j).sqrt())
            .collect();
        let psi = PureState::new(3, amp).unwrap();
        let e1 = winning_projector(3, Side::Bob).unwrap();
        let (opt, _) = lemma_min_trace(&psi, &e1).unwrap();
        assert_abs_diff_eq!(opt, cert.bound(), epsilon = 1e-10);
        assert_abs_diff_eq!(opt, 0.69904, epsilon = 5e-4);
    }

    fn random_hermitian(rng: &mut ChaCha12Rng, n: usize) -> CMatrix {
        let raw = CMatrix::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        raw.add(&raw.adjoint()).scale(C64::new(0.5, 0.0))
    }

    fn random_unit(rng: &mut ChaCha12Rng, n: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nrm = crate::linalg::norm(&v);
        v.into_iter().map(|x| x / nrm).collect()
    }

    #[test]
    fn block_absorb_dominates_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for trial in 0..20 {
            let sub = 1 << (1 + trial % 2); // 2 or 4
            let dp = 1 << (1 + trial % 3); // 2, 4 or 8
            let h = random_hermitian(&mut rng, sub * dp);
            let proj = ProductProjector::new(sub, random_unit(&mut rng, dp)).unwrap();
            // make M = T(H) + margin·I so the precondition holds
            let t = proj.compress(&h);
            let m = t.add(&CMatrix::identity(sub).scale(C64::new(0.25, 0.0)));
            let out = block_absorb_certificate(&m, &h, &proj, 1e-2).unwrap();
            assert!(
                out.domination_min_eig.unwrap() >= -1e-10,
                "trial {trial}: {:?}",
                out.domination_min_eig
            );
        }
    }

    #[test]
    fn block_absorb_smaller_eps_needs_larger_shift() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 16);
        let proj = ProductProjector::new(4, random_unit(&mut rng, 4)).unwrap();
        let m = proj
            .compress(&h)
            .add(&CMatrix::identity(4).scale(C64::new(0.3, 0.0)));
        let big = block_absorb_certificate(&m, &h, &proj, 1e-2).unwrap();
        let small = block_absorb_certificate(&m, &h, &proj, 1e-4).unwrap();
        assert!(small.y > big.y);
        assert!(small.domination_min_eig.unwrap() >= -1e-10);
    }

    #[test]
    fn block_absorb_zero_coupling() {
        // H block-diagonal w.r.t. P: γ = 0, B ≥ H for any eps
        let proj = ProductProjector::new(2, vec![C64::new(1.0, 0.0), ZERO]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        // build H = P·A·P + (I−P)·C·(I−P)
        let a = random_hermitian(&mut rng, 4);
        let p_mat = proj.matrix();
        let q_mat = CMatrix::identity(4).sub(&p_mat);
        let h = p_mat
            .mul(&a.mul(&p_mat))
            .add(&q_mat.mul(&random_hermitian(&mut rng, 4).mul(&q_mat)));
        let m = proj
            .compress(&h)
            .add(&CMatrix::identity(2).scale(C64::new(1e-6, 0.0)));
        let out = block_absorb_certificate(&m, &h, &proj, 1e-3).unwrap();
        assert_abs_diff_eq!(out.gamma, 0.0, epsilon = 1e-10);
        assert!(out.domination_min_eig.unwrap() >= -1e-10);
    }

    #[test]
    fn block_absorb_rejects_bad_precondition() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let h = random_hermitian(&mut rng, 8);
        let proj = ProductProjector::new(2, random_unit(&mut rng, 4)).unwrap();
        let m = proj
            .compress(&h)
            .sub(&CMatrix::identity(2).scale(C64::new(0.5, 0.0)));
        match block_absorb_certificate(&m, &h, &proj, 1e-2) {
            Err(Error::PreconditionViolated { min_eig, witness }) => {
                assert!(min_eig < 0.0);
                assert_eq!(witness.len(), 2);
            }
            other => panic!("expected precondition violation, got {other:?}"),
        }
    }

    #[test]
    fn build_rejects_oversized_instances() {
        let p = params(&[0.5; 15]);
        assert!(matches!(
            build_certificate(&p, Side::Bob),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
