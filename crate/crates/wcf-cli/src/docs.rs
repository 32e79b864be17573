//! Serialized document shapes. Field names are part of the CLI contract.

use serde::{Deserialize, Serialize};

use wcf_core::cert::{CertReport, DualCertificate};

#[derive(Serialize, Deserialize)]
pub struct BoundsDoc {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub constraint: f64,
    pub bias_bound: f64,
}

#[derive(Serialize, Deserialize)]
pub struct OptimizeDoc {
    pub n: usize,
    pub seed: u64,
    pub restarts: usize,
    pub evals: usize,
    pub a: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub bias: f64,
    pub constraint_residual: f64,
    pub alpha_beta_residual: f64,
}

#[derive(Serialize, Deserialize)]
pub struct SweepRowDoc {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Serialize, Deserialize)]
pub struct ReportDoc {
    pub n: usize,
    pub side: char,
    pub bound: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub domination_margin: f64,
    pub balance_residual: f64,
    pub tree_match_residual: f64,
    pub psd_min_eig: Option<f64>,
    pub accepted: bool,
}

/// The exported certificate document: {n, a, side, s, z, K, bound, report}.
#[derive(Serialize, Deserialize)]
pub struct CertificateDoc {
    pub n: usize,
    pub a: Vec<f64>,
    pub side: char,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub bound: f64,
    pub report: CertReportDoc,
}

#[derive(Serialize, Deserialize)]
pub struct CertReportDoc {
    pub domination_margin: f64,
    pub balance_residual: f64,
    pub tree_match_residual: f64,
    pub psd_min_eig: Option<f64>,
    pub accepted: bool,
}

pub fn certificate_doc(cert: &DualCertificate, report: &CertReport) -> CertificateDoc {
    CertificateDoc {
        n: cert.params().n(),
        a: cert.params().weights().to_vec(),
        side: cert.side().letter(),
        s: cert.scaling().entries().to_vec(),
        z: cert.z().entries().to_vec(),
        k: cert.k(),
        bound: cert.bound(),
        report: CertReportDoc {
            domination_margin: report.domination_margin,
            balance_residual: report.balance_residual,
            tree_match_residual: report.tree_match_residual,
            psd_min_eig: report.psd_min_eig,
            accepted: report.accepted(),
        },
    }
}

#[derive(Serialize, Deserialize)]
pub struct SimulateDoc {
    pub n: usize,
    pub runs: usize,
    pub seed: u64,
    pub bob_win_frequency: f64,
    pub verification_failures: usize,
    pub outcome_disagreements: usize,
    pub constraint: f64,
}

#[derive(Serialize, Deserialize)]
pub struct CheatDoc {
    pub n: usize,
    pub side: char,
    pub ancilla: usize,
    pub iters: usize,
    pub seed: u64,
    pub value: f64,
    pub upper_bound: f64,
    pub gap_to_bound: f64,
}

#[derive(Serialize, Deserialize)]
pub struct GapRowDoc {
    pub side: char,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}
