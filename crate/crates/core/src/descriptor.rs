//! Serializable protocol descriptors.
//!
//! A descriptor records the target function, the compiler chain that produced
//! the protocol, and its declared resources. Rebuilding from a descriptor
//! skips semantic preconditions (such as a strategy computing the function),
//! so a corrupted descriptor yields a protocol that fails verification with a
//! witness rather than a build error.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::span::SpanSpec;
use crate::boolfn::{BitSplit, BoolFn, FnSpec};
use crate::classical::cds::{cds_from_psm, cds_parallel, GhCds, SpanCds, SpanVariant, TrivialCds};
use crate::classical::dre::{dre_xor, QrDre};
use crate::classical::psm::{psm_from_dre, psm_generic_table};
use crate::classical::{Cds, Dre, Psm};
use crate::error::{invalid, Result};
use crate::gardenhose::{GhStrategy, Side};
use crate::nlqc::routing::frouting_from_gh_unchecked;
use crate::nlqc::{
    cdqs_from_cds_with_key, cdqs_from_frouting, cdqs_from_psqm, frouting_constant, frouting_from_cdqs, psqm_from_psm,
    CdqsProtocol, FRouting, PsqmProtocol,
};

/// How a protocol was produced. Serialized as `{"compiler": .., "parameters": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "compiler", content = "parameters", rename_all = "snake_case")]
pub enum Source {
    /// Hand-written; cannot be rebuilt.
    Custom {
        name: String,
    },
    CdsFromGh {
        strategy: serde_json::Value,
    },
    CdsFromSpan {
        program: SpanSpec,
        variant: SpanVariant,
    },
    CdsFromPsm {
        psm: Box<Source>,
    },
    CdsParallel {
        inner: Box<Source>,
        copies: u32,
    },
    CdsTrivial {
        reveal: bool,
    },
    PsmTable,
    PsmFromDre {
        dre: Box<Source>,
    },
    DreQr {
        p: u64,
        alice_bits: Vec<u32>,
    },
    DreXor,
    CdqsFromCds {
        cds: Box<Source>,
        key: KeyPolicy,
    },
    CdqsFromFrouting {
        routing: Box<Source>,
    },
    CdqsFromPsqm {
        psqm: Box<Source>,
    },
    FroutingFromGh {
        strategy: serde_json::Value,
    },
    FroutingFromCdqs {
        cdqs: Box<Source>,
    },
    /// Always routes to one side; used to exercise the verifier.
    FroutingConstant {
        side: Side,
    },
    PsqmFromPsm {
        psm: Box<Source>,
    },
}

/// How the one-time-pad key of a pad-based CDQS is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "key")]
pub enum KeyPolicy {
    #[default]
    Uniform,
    /// Always the given key; breaks security on purpose.
    Fixed(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Cds,
    Psm,
    Dre,
    Cdqs,
    Frouting,
    Psqm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolDescriptor {
    pub kind: ProtocolKind,
    pub function: FnSpec,
    pub source: Source,
    pub resources: serde_json::Value,
}

impl ProtocolDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn new(kind: ProtocolKind, f: &BoolFn, source: Source, resources: impl Serialize) -> Self {
        Self {
            kind,
            function: FnSpec::from_fn(f),
            source,
            resources: serde_json::to_value(resources).expect("resources serialize"),
        }
    }

    pub fn function(&self) -> Result<BoolFn> {
        self.function.build()
    }
}

fn not_a(what: &str, source: &Source) -> crate::Error {
    let name = serde_json::to_value(source)
        .ok()
        .and_then(|v| v.get("compiler").and_then(|c| c.as_str()).map(str::to_owned))
        .unwrap_or_default();
    invalid(format!("compiler {name:?} does not produce a {what}"))
}

pub fn build_cds(source: &Source, f: &BoolFn) -> Result<Cds> {
    match source {
        Source::CdsFromGh { strategy } => {
            let s = GhStrategy::from_json_value(strategy.clone())?;
            Ok(Arc::new(GhCds::new_unchecked(s, f.clone())?))
        }
        Source::CdsFromSpan { program, variant } => {
            Ok(Arc::new(SpanCds::new_unchecked(program.build()?, f.clone(), *variant)?))
        }
        Source::CdsFromPsm { psm } => cds_from_psm(build_psm(psm, f)?),
        Source::CdsParallel { inner, copies } => cds_parallel(build_cds(inner, f)?, *copies),
        Source::CdsTrivial { reveal } => Ok(Arc::new(TrivialCds::new(f.clone(), *reveal))),
        other => Err(not_a("CDS", other)),
    }
}

pub fn build_psm(source: &Source, f: &BoolFn) -> Result<Psm> {
    match source {
        Source::PsmTable => psm_generic_table(f),
        Source::PsmFromDre { dre } => Ok(psm_from_dre(build_dre(dre, f)?)),
        other => Err(not_a("PSM", other)),
    }
}

pub fn build_dre(source: &Source, f: &BoolFn) -> Result<Dre> {
    let built: Dre = match source {
        Source::DreQr { p, alice_bits } => {
            let n = 64 - p.leading_zeros();
            Arc::new(QrDre::new(*p, Some(BitSplit::new(n, alice_bits.clone())?))?)
        }
        Source::DreXor => dre_xor(),
        other => return Err(not_a("DRE", other)),
    };
    if built.function().table() != f.table() {
        return Err(invalid("encoding computes a different function than the descriptor names"));
    }
    Ok(built)
}

pub fn build_cdqs(source: &Source, f: &BoolFn) -> Result<CdqsProtocol> {
    match source {
        Source::CdqsFromCds { cds, key } => cdqs_from_cds_with_key(build_cds(cds, f)?, *key),
        Source::CdqsFromFrouting { routing } => Ok(cdqs_from_frouting(&build_frouting(routing, f)?)),
        Source::CdqsFromPsqm { psqm } => cdqs_from_psqm(&build_psqm(psqm, f)?),
        other => Err(not_a("CDQS", other)),
    }
}

pub fn build_frouting(source: &Source, f: &BoolFn) -> Result<FRouting> {
    match source {
        Source::FroutingFromGh { strategy } => {
            frouting_from_gh_unchecked(GhStrategy::from_json_value(strategy.clone())?, f.clone())
        }
        Source::FroutingFromCdqs { cdqs } => frouting_from_cdqs(&build_cdqs(cdqs, f)?),
        Source::FroutingConstant { side } => Ok(frouting_constant(f, *side)),
        other => Err(not_a("f-routing", other)),
    }
}

pub fn build_psqm(source: &Source, f: &BoolFn) -> Result<PsqmProtocol> {
    match source {
        Source::PsqmFromPsm { psm } => Ok(psqm_from_psm(build_psm(psm, f)?)),
        other => Err(not_a("PSQM", other)),
    }
}
