//! Verification sweeps over function families.

use anyhow::Result;
use nlqc_core::boolfn::BoolFn;
use nlqc_core::classical::cds::{cds_from_gh, cds_from_psm, cds_parallel};
use nlqc_core::classical::dre::dre_qr;
use nlqc_core::classical::psm::psm_from_dre;
use nlqc_core::classical::{verify_cds, verify_dre, verify_psm, Ratio, VerificationReport, VerifyOptions};
use nlqc_core::gardenhose::{gh_generic, gh_search};
use nlqc_core::nlqc::{cdqs_from_cds, verify_cdqs, QVerifyOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{classical_bounds, BoundRow, ResourceTable};

pub const QR_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// Attached to sweeps built on the generic strategy.
pub const GENERIC_NOTE: &str = "generic strategy uses 2^(n_x+1) pipes; no 2^n_x + 1 pipe construction is implemented";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// All 16 functions on 1+1 bits: minimal strategy, CDS and pad CDQS.
    OneBit,
    /// All 65536 functions on 2+2 bits through the generic strategy.
    TwoBit,
    /// QR_SPLIT for p in {3, 5, 7, 11, 13}: encoding, PSM and CDS.
    Qr,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub family: Family,
    pub max_pipes: u32,
    pub budget: u64,
    pub seed: u64,
    /// Only the first `limit` functions of the family.
    pub limit: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumCell {
    pub worst_correctness_infidelity: f64,
    pub worst_security_gap: f64,
    pub perfect: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub function: String,
    pub table: String,
    pub protocol: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gh_pipes: Option<u32>,
    pub eps_hat: Ratio,
    pub delta_pair: Ratio,
    pub perfect: bool,
    pub resources: ResourceTable,
    pub bounds: Vec<BoundRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdqs: Option<QuantumCell>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.perfect && self.bounds.iter().all(|b| b.pass) && self.cdqs.as_ref().is_none_or(|c| c.perfect)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub perfect_rows: usize,
    pub all_bounds_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_gh_pipes: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub family: Family,
    pub seed: u64,
    pub summary: SweepSummary,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(SweepRow::ok)
    }
}

fn row(f: &BoolFn, protocol: &'static str, rep: &VerificationReport, bounds: Vec<BoundRow>) -> SweepRow {
    SweepRow {
        function: f.label(),
        table: f.to_hex(),
        protocol,
        gh_pipes: None,
        eps_hat: rep.eps_hat,
        delta_pair: rep.delta_pair,
        perfect: rep.is_perfect(),
        resources: ResourceTable::classical(&rep.resources),
        bounds,
        cdqs: None,
    }
}

fn gh_row(f: &BoolFn, cfg: &SweepConfig, generic: bool, with_cdqs: bool) -> Result<SweepRow> {
    let opts = VerifyOptions { budget: cfg.budget };
    let strategy = if generic {
        gh_generic(f)?
    } else {
        gh_search(f, cfg.max_pipes)?
            .ok_or_else(|| anyhow::anyhow!("no strategy for {} within {} pipes", f.label(), cfg.max_pipes))?
    };
    let cds = cds_from_gh(&strategy, f)?;
    let rep = verify_cds(&*cds, &opts)?;
    let bounds = classical_bounds(&cds.source(), &cds.resources());
    let mut r = row(f, if generic { "gh-generic,cds" } else { "gh,cds" }, &rep, bounds);
    r.gh_pipes = Some(strategy.pipes());
    if with_cdqs {
        let q = verify_cdqs(
            &cdqs_from_cds(cds_parallel(cds, 2)?)?,
            &QVerifyOptions { budget: cfg.budget, seed: cfg.seed, ..QVerifyOptions::default() },
        )?;
        r.cdqs = Some(QuantumCell {
            worst_correctness_infidelity: q.worst_correctness_infidelity,
            worst_security_gap: q.worst_security_gap,
            perfect: q.is_perfect(),
        });
    }
    Ok(r)
}

fn qr_rows(p: u64, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let opts = VerifyOptions { budget: cfg.budget };
    let dre = dre_qr(p, None)?;
    let f = dre.function().clone();
    let dre_rep = verify_dre(&dre, &opts)?;
    let psm = psm_from_dre(dre);
    let psm_rep = verify_psm(&*psm, &opts)?;
    let cds = cds_from_psm(psm)?;
    let cds_rep = verify_cds(&*cds, &opts)?;
    Ok(vec![
        row(&f, "dre", &dre_rep, Vec::new()),
        row(&f, "dre,psm", &psm_rep, Vec::new()),
        row(&f, "dre,psm,cds", &cds_rep, Vec::new()),
    ])
}

/// Runs every function of the family in parallel; rows keep family order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let take = cfg.limit.unwrap_or(usize::MAX);
    let rows: Vec<SweepRow> = match cfg.family {
        Family::OneBit => (0u64..16)
            .take(take)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|bits| gh_row(&BoolFn::from_bits(1, 1, bits)?, cfg, false, true))
            .collect::<Result<_>>()?,
        Family::TwoBit => (0u64..1 << 16)
            .take(take)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|bits| gh_row(&BoolFn::from_bits(2, 2, bits)?, cfg, true, false))
            .collect::<Result<_>>()?,
        Family::Qr => {
            let nested: Vec<Vec<SweepRow>> = QR_PRIMES
                .iter()
                .take(take)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|&p| qr_rows(p, cfg))
                .collect::<Result<_>>()?;
            nested.into_iter().flatten().collect()
        }
    };
    let summary = SweepSummary {
        rows: rows.len(),
        perfect_rows: rows.iter().filter(|r| r.ok()).count(),
        all_bounds_pass: rows.iter().all(|r| r.bounds.iter().all(|b| b.pass)),
        max_gh_pipes: rows.iter().filter_map(|r| r.gh_pipes).max(),
        note: (cfg.family == Family::TwoBit).then_some(GENERIC_NOTE),
    };
    Ok(SweepReport { family: cfg.family, seed: cfg.seed, summary, rows })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    function: &'a str,
    table: &'a str,
    protocol: &'a str,
    gh_pipes: Option<u32>,
    eps_hat: String,
    delta_pair: String,
    perfect: bool,
    randomness_bits: u64,
    communication_bits: u64,
    bounds_pass: bool,
    cdqs_worst_infidelity: Option<f64>,
    cdqs_worst_gap: Option<f64>,
}

fn frac(r: &Ratio) -> String {
    format!("{}/{}", r.num, r.den)
}

pub fn to_csv(report: &SweepReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(CsvRow {
            function: &r.function,
            table: &r.table,
            protocol: r.protocol,
            gh_pipes: r.gh_pipes,
            eps_hat: frac(&r.eps_hat),
            delta_pair: frac(&r.delta_pair),
            perfect: r.perfect,
            randomness_bits: r.resources.randomness_bits,
            communication_bits: r.resources.communication_bits,
            bounds_pass: r.bounds.iter().all(|b| b.pass),
            cdqs_worst_infidelity: r.cdqs.as_ref().map(|c| c.worst_correctness_infidelity),
            cdqs_worst_gap: r.cdqs.as_ref().map(|c| c.worst_security_gap),
        })?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
