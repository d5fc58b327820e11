//! Verification reports with resource tables and checked accounting rows.

use anyhow::Result;
use nlqc_core::algebra::LsssScheme;
use nlqc_core::classical::cds::SpanVariant;
use nlqc_core::classical::{verify_cds, verify_dre, verify_psm, Resources, VerificationReport, VerifyOptions};
use nlqc_core::descriptor::{build_cdqs, build_cds, build_dre, build_frouting, build_psm, build_psqm};
use nlqc_core::descriptor::{ProtocolDescriptor, ProtocolKind, Source};
use nlqc_core::gardenhose::GhStrategy;
use nlqc_core::nlqc::{verify_cdqs, verify_frouting, verify_psqm, QResources, QVerificationReport, QVerifyOptions};
use serde::Serialize;

use crate::chain::gh_routing_qubits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceTable {
    pub randomness_bits: u64,
    pub communication_bits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_bits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message_qubits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epr_pairs: Option<u64>,
}

impl ResourceTable {
    pub fn classical(r: &Resources) -> Self {
        Self {
            randomness_bits: r.shared_random_bits + r.private_random_bits,
            communication_bits: r.communication_bits(),
            ..Self::default()
        }
    }

    pub fn quantum(r: &QResources) -> Self {
        Self {
            randomness_bits: r.random_bits,
            communication_bits: 0,
            key_bits: Some(r.key_bits),
            message_qubits: Some(r.message_qubits),
            epr_pairs: Some(r.epr_pairs),
        }
    }
}

/// `lhs relation rhs`, with both sides kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub name: &'static str,
    pub lhs_label: &'static str,
    pub lhs: u64,
    pub relation: &'static str,
    pub rhs_label: &'static str,
    pub rhs: u64,
    pub pass: bool,
}

impl BoundRow {
    pub fn le(name: &'static str, lhs_label: &'static str, lhs: u64, rhs_label: &'static str, rhs: u64) -> Self {
        Self { name, lhs_label, lhs, relation: "<=", rhs_label, rhs, pass: lhs <= rhs }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub function: String,
    pub kind: ProtocolKind,
    pub compiler: String,
    pub verdict: Verdict,
    pub resources: ResourceTable,
    /// Declared resources equal what the rebuilt protocol reports.
    pub resources_match: bool,
    pub bounds: Vec<BoundRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QVerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub budget: u64,
    pub seed: u64,
    pub max_qubits: u32,
}

pub fn compiler_name(source: &Source) -> String {
    serde_json::to_value(source)
        .ok()
        .and_then(|v| v.get("compiler").and_then(|c| c.as_str()).map(str::to_owned))
        .unwrap_or_default()
}

fn pipes_of(strategy: &serde_json::Value) -> Option<u64> {
    GhStrategy::from_json_value(strategy.clone()).ok().map(|s| s.pipes() as u64)
}

/// Accounting rows that apply to how the top-level protocol was compiled.
pub fn classical_bounds(source: &Source, r: &Resources) -> Vec<BoundRow> {
    match source {
        Source::CdsFromGh { strategy } => pipes_of(strategy)
            .map(|m| {
                vec![BoundRow::le("cds_randomness_le_gh_pipes", "shared_random_bits", r.shared_random_bits, "pipes", m)]
            })
            .unwrap_or_default(),
        Source::CdsFromSpan { program, variant } => {
            let Ok(program) = program.build() else { return Vec::new() };
            let share = LsssScheme::new(program).total_share_bits();
            match variant {
                SpanVariant::CommOpt => vec![BoundRow::le(
                    "communication_le_share_bits",
                    "communication_bits",
                    r.communication_bits(),
                    "total_share_bits",
                    share,
                )],
                SpanVariant::RandOpt => vec![BoundRow::le(
                    "randomness_le_share_bits",
                    "random_bits",
                    r.shared_random_bits + r.private_random_bits,
                    "total_share_bits",
                    share,
                )],
            }
        }
        _ => Vec::new(),
    }
}

fn quantum_bounds(source: &Source, q: &QVerificationReport) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    if let Source::FroutingFromGh { strategy } = source {
        if let Some(m) = pipes_of(strategy) {
            rows.push(BoundRow::le("epr_pairs_le_gh_pipes", "epr_pairs", q.resources.epr_pairs, "pipes", m));
        }
    }
    if let Some(b) = &q.bound {
        rows.push(BoundRow::le("messages_le_4_nm_plus_ne", "message_qubits", b.used, "4(n_M + n_E)", b.limit));
    }
    rows
}

fn budget_check(source: &Source, max_qubits: u32) -> Result<()> {
    if let Source::FroutingFromGh { strategy } = source {
        if let Some(m) = pipes_of(strategy) {
            let need = gh_routing_qubits(m as u32);
            if need > max_qubits {
                return Err(nlqc_core::Error::Budget(format!(
                    "routing simulates {need} qubits, over --max-qubits {max_qubits}"
                ))
                .into());
            }
        }
    }
    Ok(())
}

/// Rebuilds the protocol a descriptor names and runs its verifier.
pub fn verify_descriptor(d: &ProtocolDescriptor, cfg: VerifyConfig) -> Result<Report> {
    let f = d.function()?;
    let classical_opts = VerifyOptions { budget: cfg.budget };
    let quantum_opts = QVerifyOptions { budget: cfg.budget, seed: cfg.seed, ..QVerifyOptions::default() };
    let mut report = Report {
        function: f.label(),
        kind: d.kind,
        compiler: compiler_name(&d.source),
        verdict: Verdict::Fail,
        resources: ResourceTable::default(),
        resources_match: false,
        bounds: Vec::new(),
        classical: None,
        quantum: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        budget_check(&d.source, cfg.max_qubits)?;
        match d.kind {
            ProtocolKind::Cds | ProtocolKind::Psm | ProtocolKind::Dre => {
                let (rep, declared) = match d.kind {
                    ProtocolKind::Cds => {
                        let p = build_cds(&d.source, &f)?;
                        (verify_cds(&*p, &classical_opts)?, p.resources())
                    }
                    ProtocolKind::Psm => {
                        let p = build_psm(&d.source, &f)?;
                        (verify_psm(&*p, &classical_opts)?, p.resources())
                    }
                    _ => {
                        let p = build_dre(&d.source, &f)?;
                        (verify_dre(&p, &classical_opts)?, p.resources())
                    }
                };
                report.resources = ResourceTable::classical(&declared);
                report.resources_match = serde_json::to_value(declared)? == d.resources;
                report.bounds = classical_bounds(&d.source, &declared);
                report.classical = Some(rep);
            }
            ProtocolKind::Cdqs | ProtocolKind::Frouting | ProtocolKind::Psqm => {
                let rep = match d.kind {
                    ProtocolKind::Cdqs => verify_cdqs(&build_cdqs(&d.source, &f)?, &quantum_opts)?,
                    ProtocolKind::Frouting => verify_frouting(&build_frouting(&d.source, &f)?, &quantum_opts)?,
                    _ => verify_psqm(&build_psqm(&d.source, &f)?, &quantum_opts)?,
                };
                report.resources = ResourceTable::quantum(&rep.resources);
                report.resources_match = serde_json::to_value(rep.resources)? == d.resources;
                report.bounds = quantum_bounds(&d.source, &rep);
                report.quantum = Some(rep);
            }
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => {
            let perfect = report.classical.as_ref().is_none_or(|r| r.is_perfect())
                && report.quantum.as_ref().is_none_or(|r| r.is_perfect());
            let ok = perfect && report.resources_match && report.bounds.iter().all(|b| b.pass);
            report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
            Ok(report)
        }
        Err(e) if is_budget(&e) => {
            report.verdict = Verdict::BudgetExceeded;
            report.error = Some(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

pub fn is_budget(e: &anyhow::Error) -> bool {
    matches!(e.downcast_ref::<nlqc_core::Error>(), Some(nlqc_core::Error::Budget(_)))
}
