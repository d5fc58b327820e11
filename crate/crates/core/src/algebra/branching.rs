use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use serde::{Deserialize, Serialize};

use super::Literal;
use crate::error::{budget, invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    /// Present for every input.
    Yes,
    Literal(Literal),
}

impl EdgeLabel {
    fn live(&self, z: &[bool]) -> bool {
        match self {
            EdgeLabel::Yes => true,
            EdgeLabel::Literal(l) => l.holds(z),
        }
    }
}

/// A branching program `(G, labels, s, t0, t1)` on `n_vars` input bits.
#[derive(Clone, Debug)]
pub struct BranchingProgram {
    n_vars: u32,
    graph: DiGraph<(), EdgeLabel>,
    order: Vec<NodeIndex>,
    s: NodeIndex,
    t0: NodeIndex,
    t1: NodeIndex,
}

/// JSON form: `{"n_vars": 2, "vertices": 3, "s": 0, "t0": 1, "t1": 2,
/// "edges": [{"from": 0, "to": 2, "label": {"literal": {"var": 1, "bit": 1}}}, {"from": 0, "to": 1, "label": "yes"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchingSpec {
    pub n_vars: u32,
    pub vertices: u32,
    pub s: u32,
    pub t0: u32,
    pub t1: u32,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: u32,
    pub to: u32,
    pub label: EdgeLabel,
}

impl BranchingSpec {
    pub fn build(&self) -> Result<BranchingProgram> {
        let n = self.vertices;
        for v in [self.s, self.t0, self.t1] {
            if v >= n {
                return Err(invalid(format!("distinguished vertex {v} outside 0..{n}")));
            }
        }
        let mut graph = DiGraph::with_capacity(n as usize, self.edges.len());
        for _ in 0..n {
            graph.add_node(());
        }
        for e in &self.edges {
            if e.from >= n || e.to >= n {
                return Err(invalid(format!("edge {} -> {} leaves the vertex set", e.from, e.to)));
            }
            if let EdgeLabel::Literal(l) = e.label {
                if l.var == 0 || l.var > self.n_vars {
                    return Err(invalid(format!("edge variable {} outside 1..={}", l.var, self.n_vars)));
                }
            }
            graph.add_edge(NodeIndex::new(e.from as usize), NodeIndex::new(e.to as usize), e.label);
        }
        let order = toposort(&graph, None)
            .map_err(|c| invalid(format!("branching program has a cycle through vertex {}", c.node_id().index())))?;
        Ok(BranchingProgram {
            n_vars: self.n_vars,
            graph,
            order,
            s: NodeIndex::new(self.s as usize),
            t0: NodeIndex::new(self.t0 as usize),
            t1: NodeIndex::new(self.t1 as usize),
        })
    }
}

impl BranchingProgram {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<BranchingSpec>(text)?.build()
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        self.graph.node_count()
    }

    /// `(acc, rej)`: path counts `s -> t1` and `s -> t0` in the subgraph of
    /// live edges, reduced mod `p`. `p = 0` counts exactly.
    pub fn count(&self, z: &[bool], p: u64) -> Result<(u64, u64)> {
        if z.len() != self.n_vars as usize {
            return Err(invalid(format!("input has {} bits, program has {}", z.len(), self.n_vars)));
        }
        let mut paths = vec![0u64; self.graph.node_count()];
        paths[self.s.index()] = 1;
        for &v in &self.order {
            let here = paths[v.index()];
            if here == 0 {
                continue;
            }
            for e in self.graph.edges(v) {
                if !e.weight().live(z) {
                    continue;
                }
                let slot = &mut paths[e.target().index()];
                *slot = if p == 0 {
                    slot.checked_add(here).ok_or_else(|| budget("path count overflows u64"))?
                } else {
                    ((*slot as u128 + here as u128) % p as u128) as u64
                };
            }
        }
        Ok((paths[self.t1.index()], paths[self.t0.index()]))
    }

    /// Value of the mod-`p` program: 1 iff `acc != 0 mod p`.
    pub fn eval_mod(&self, z: &[bool], p: u64) -> Result<bool> {
        Ok(self.count(z, p)?.0 != 0)
    }
}
