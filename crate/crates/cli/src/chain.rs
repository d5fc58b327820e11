//! Compiler chains: a path through the reduction graph, starting at a
//! primitive (strategy, span program, encoding, table PSM) and ending at a
//! protocol.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use nlqc_core::algebra::span::library;
use nlqc_core::boolfn::{qr_split, BoolFn, NamedFn};
use nlqc_core::classical::cds::{cds_from_gh, cds_from_psm, cds_from_span, cds_parallel, SpanVariant};
use nlqc_core::classical::dre::{dre_qr, dre_xor};
use nlqc_core::classical::psm::{psm_from_dre, psm_generic_table};
use nlqc_core::classical::{Cds, Dre, Psm};
use nlqc_core::descriptor::{ProtocolDescriptor, ProtocolKind};
use nlqc_core::gardenhose::{gh_generic, gh_search, GhStrategy};
use nlqc_core::nlqc::{
    cdqs_from_cds, cdqs_from_frouting, cdqs_from_psqm, frouting_from_cdqs, frouting_from_gh, psqm_from_psm,
    CdqsProtocol, FRouting, PsqmProtocol,
};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Gh,
    GhGeneric,
    Span,
    SpanRand,
    Dre,
    Psm,
    Cds,
    Cdqs,
    Psqm,
    Frouting,
}

impl Node {
    pub const ALL: [Node; 10] = [
        Node::Gh,
        Node::GhGeneric,
        Node::Span,
        Node::SpanRand,
        Node::Dre,
        Node::Psm,
        Node::Cds,
        Node::Cdqs,
        Node::Psqm,
        Node::Frouting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Node::Gh => "gh",
            Node::GhGeneric => "gh-generic",
            Node::Span => "span",
            Node::SpanRand => "span-rand",
            Node::Dre => "dre",
            Node::Psm => "psm",
            Node::Cds => "cds",
            Node::Cdqs => "cdqs",
            Node::Psqm => "psqm",
            Node::Frouting => "frouting",
        }
    }

    /// Nodes a chain may start from.
    fn is_source(self) -> bool {
        matches!(self, Node::Gh | Node::GhGeneric | Node::Span | Node::SpanRand | Node::Dre | Node::Psm)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Node {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        Node::ALL
            .into_iter()
            .find(|n| n.name() == s.trim())
            .ok_or_else(|| UsageError(format!("unknown chain node {s:?}\n{}", legal_edges_text())))
    }
}

/// Reductions implemented by the compilers.
pub const LEGAL_EDGES: [(Node, Node); 13] = [
    (Node::Gh, Node::Cds),
    (Node::Gh, Node::Frouting),
    (Node::GhGeneric, Node::Cds),
    (Node::GhGeneric, Node::Frouting),
    (Node::Span, Node::Cds),
    (Node::SpanRand, Node::Cds),
    (Node::Dre, Node::Psm),
    (Node::Psm, Node::Cds),
    (Node::Psm, Node::Psqm),
    (Node::Cds, Node::Cdqs),
    (Node::Cdqs, Node::Frouting),
    (Node::Frouting, Node::Cdqs),
    (Node::Psqm, Node::Cdqs),
];

pub fn legal_edges_text() -> String {
    let mut out = String::from("legal chain edges:");
    for (a, b) in LEGAL_EDGES {
        out.push_str(&format!("\n  {a} -> {b}"));
    }
    out.push_str("\nchains start at gh, gh-generic, span, span-rand, dre or psm");
    out
}

pub fn parse_chain(text: &str) -> Result<Vec<Node>, UsageError> {
    let nodes = text
        .split([',', '>'])
        .map(|s| s.trim_end_matches('-'))
        .filter(|s| !s.trim().is_empty())
        .map(Node::from_str)
        .collect::<Result<Vec<_>, _>>()?;
    let Some(&first) = nodes.first() else {
        return Err(UsageError(format!("empty chain\n{}", legal_edges_text())));
    };
    if !first.is_source() {
        return Err(UsageError(format!("a chain cannot start at {first}\n{}", legal_edges_text())));
    }
    for pair in nodes.windows(2) {
        if !LEGAL_EDGES.contains(&(pair[0], pair[1])) {
            return Err(UsageError(format!("no reduction {} -> {}\n{}", pair[0], pair[1], legal_edges_text())));
        }
    }
    if nodes.len() == 1 && matches!(first, Node::Gh | Node::GhGeneric | Node::Span | Node::SpanRand) {
        return Err(UsageError(format!("{first} is not a protocol; extend the chain\n{}", legal_edges_text())));
    }
    Ok(nodes)
}

#[derive(Clone, Copy, Debug)]
pub struct BuildLimits {
    pub max_pipes: u32,
    pub max_qubits: u32,
}

enum Stage {
    Gh(GhStrategy),
    Span(nlqc_core::algebra::SpanProgram, SpanVariant),
    Dre(Dre),
    Psm(Psm),
    Cds(Cds),
    Cdqs(CdqsProtocol),
    Psqm(PsqmProtocol),
    Frouting(FRouting),
}

/// Qubits a garden-hose routing simulates: `Ref`, `Q` and two per pipe.
pub fn gh_routing_qubits(pipes: u32) -> u32 {
    2 * pipes + 2
}

fn start(node: Node, f: &BoolFn, limits: BuildLimits) -> Result<Stage> {
    Ok(match node {
        Node::Gh => match gh_search(f, limits.max_pipes)? {
            Some(s) => Stage::Gh(s),
            None => {
                return Err(UsageError(format!(
                    "no garden-hose strategy for {} with at most {} pipes; raise --max-pipes or start at gh-generic",
                    f.label(),
                    limits.max_pipes
                ))
                .into())
            }
        },
        Node::GhGeneric => Stage::Gh(gh_generic(f)?),
        Node::Span | Node::SpanRand => {
            let program = library::for_function(f)
                .ok_or_else(|| UsageError(format!("no library span program computes {}", f.label())))?;
            let variant = if node == Node::Span { SpanVariant::CommOpt } else { SpanVariant::RandOpt };
            Stage::Span(program, variant)
        }
        Node::Dre => match f.name() {
            Some(NamedFn::QrSplit { p, split }) => Stage::Dre(dre_qr(*p, Some(split.clone()))?),
            Some(NamedFn::Xor) if f.n_x() == 1 && f.n_y() == 1 => Stage::Dre(dre_xor()),
            _ => return Err(UsageError(format!("no decomposable encoding known for {}", f.label())).into()),
        },
        Node::Psm => Stage::Psm(psm_generic_table(f)?),
        other => unreachable!("{other} is not a source node"),
    })
}

fn step(stage: Stage, to: Node, f: &BoolFn, limits: BuildLimits) -> Result<Stage> {
    Ok(match (stage, to) {
        (Stage::Gh(s), Node::Cds) => Stage::Cds(cds_from_gh(&s, f)?),
        (Stage::Gh(s), Node::Frouting) => {
            let need = gh_routing_qubits(s.pipes());
            if need > limits.max_qubits {
                return Err(nlqc_core::Error::Budget(format!(
                    "routing over {} pipes simulates {need} qubits, over --max-qubits {}",
                    s.pipes(),
                    limits.max_qubits
                ))
                .into());
            }
            Stage::Frouting(frouting_from_gh(&s, f)?)
        }
        (Stage::Span(p, v), Node::Cds) => Stage::Cds(cds_from_span(&p, f, v)?),
        (Stage::Dre(d), Node::Psm) => Stage::Psm(psm_from_dre(d)),
        (Stage::Psm(p), Node::Cds) => Stage::Cds(cds_from_psm(p)?),
        (Stage::Psm(p), Node::Psqm) => Stage::Psqm(psqm_from_psm(p)),
        (Stage::Cds(c), Node::Cdqs) => {
            // The pad needs a two-bit secret; run one-bit schemes twice.
            let c = if c.secret_values() == 4 { c } else { cds_parallel(c, 2)? };
            Stage::Cdqs(cdqs_from_cds(c)?)
        }
        (Stage::Cdqs(p), Node::Frouting) => Stage::Frouting(frouting_from_cdqs(&p)?),
        (Stage::Frouting(r), Node::Cdqs) => Stage::Cdqs(cdqs_from_frouting(&r)),
        (Stage::Psqm(p), Node::Cdqs) => Stage::Cdqs(cdqs_from_psqm(&p)?),
        (_, to) => bail!("internal: unchecked edge into {to}"),
    })
}

fn descriptor(stage: &Stage, f: &BoolFn) -> Result<ProtocolDescriptor> {
    Ok(match stage {
        Stage::Dre(d) => ProtocolDescriptor::new(ProtocolKind::Dre, f, d.source(), d.resources()),
        Stage::Psm(p) => ProtocolDescriptor::new(ProtocolKind::Psm, f, p.source(), p.resources()),
        Stage::Cds(c) => ProtocolDescriptor::new(ProtocolKind::Cds, f, c.source(), c.resources()),
        Stage::Cdqs(p) => ProtocolDescriptor::new(ProtocolKind::Cdqs, f, p.source.clone(), p.resources),
        Stage::Psqm(p) => ProtocolDescriptor::new(ProtocolKind::Psqm, f, p.source.clone(), p.resources),
        Stage::Frouting(r) => ProtocolDescriptor::new(ProtocolKind::Frouting, f, r.source.clone(), r.resources),
        Stage::Gh(_) | Stage::Span(..) => return Err(anyhow!("chain ends before a protocol")),
    })
}

/// Runs the compilers along `chain` and describes the final protocol.
pub fn build(f: &BoolFn, chain: &[Node], limits: BuildLimits) -> Result<ProtocolDescriptor> {
    let mut stage = start(chain[0], f, limits)?;
    for &to in &chain[1..] {
        stage = step(stage, to, f, limits)?;
    }
    descriptor(&stage, f)
}

/// Balanced QR_SPLIT for a modulus.
pub fn qr_function(p: u64) -> Result<BoolFn> {
    Ok(qr_split(p, None)?)
}
