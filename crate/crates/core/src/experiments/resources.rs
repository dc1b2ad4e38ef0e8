use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_graph, maximal_cliques, moralize, GraphSpec};
use crate::hamiltonian::{estimate_resources, AncillaMode, ModelKind, ModelStructure, ResourceEstimate};
use crate::pgm::bn_from_mn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceFamily {
    Loop,
    Kgram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub family: ResourceFamily,
    pub n: usize,
    pub k: Option<usize>,
    pub qcmrf: ResourceEstimate,
    pub bbqc: ResourceEstimate,
}

/// QCMRF and BBQC estimates per instance. Loops use the cycle's own cliques
/// for QCMRF and the triangulated orientation for BBQC; k-gram DAGs feed BBQC
/// directly and QCMRF through their moral graph. `ks` is ignored for loops.
pub fn run_resource_scan(
    family: ResourceFamily,
    ns: &[usize],
    ks: &[usize],
    ancilla: AncillaMode,
) -> Result<Vec<ResourceRecord>> {
    let mut out = Vec::new();
    let instances: Vec<(usize, Option<usize>)> = match family {
        ResourceFamily::Loop => ns.iter().map(|&n| (n, None)).collect(),
        ResourceFamily::Kgram => ns.iter().flat_map(|&n| ks.iter().map(move |&k| (n, Some(k)))).collect(),
    };
    if instances.is_empty() {
        return Err(Error::InvalidConfig("resource scan has no instances".into()));
    }
    for (n, k) in instances {
        let (graph, dag) = match k {
            None => {
                let g = generate_graph(&GraphSpec::Loop { n })?.into_undirected()?;
                let d = bn_from_mn(&g);
                (g, d)
            }
            Some(k) => {
                let d = generate_graph(&GraphSpec::Kgram { n, k })?.into_directed()?;
                (moralize(&d), d)
            }
        };
        let cliques = maximal_cliques(&graph);
        let markov = ModelStructure::Markov { n, cliques: &cliques, max_locality: None };
        out.push(ResourceRecord {
            family,
            n,
            k,
            qcmrf: estimate_resources(ModelKind::Qcmrf, markov, ancilla)?,
            bbqc: estimate_resources(ModelKind::Bbqc, ModelStructure::Bayes(&dag), AncillaMode::None)?,
        });
    }
    Ok(out)
}
