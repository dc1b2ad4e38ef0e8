use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, MarkovModel};
use crate::error::Result;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsConfig {
    /// Sweeps discarded before the first sample.
    pub burn_in: usize,
    /// Sweeps between kept samples.
    pub thinning: usize,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self { burn_in: 1000, thinning: 2 }
    }
}

/// `P(x_site = 1 | rest of x)`, using only the factors whose scope contains `site`.
pub fn site_conditional(m: &MarkovModel, x: usize, site: usize) -> f64 {
    let touching: Vec<usize> = (0..m.factors().len())
        .filter(|&f| m.factors()[f].scope().contains(&site))
        .collect();
    conditional_one(m, &touching, x, site)
}

fn conditional_one(m: &MarkovModel, touching: &[usize], x: usize, site: usize) -> f64 {
    let x0 = x & !(1 << site);
    let x1 = x | (1 << site);
    let (mut w0, mut w1) = (1.0, 1.0);
    for &f in touching {
        let factor = &m.factors()[f];
        w0 *= factor.at(x0);
        w1 *= factor.at(x1);
    }
    w1 / (w0 + w1)
}

/// Single-site Gibbs sampling with sweeps in node order. The chain starts
/// from a uniformly random assignment.
pub fn gibbs_sample(m: &MarkovModel, cfg: GibbsConfig, count: usize, seed: u64) -> Result<Dataset> {
    let n = m.n();
    let mut rng = seed::rng(seed);
    let touching: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..m.factors().len())
                .filter(|&f| m.factors()[f].scope().contains(&v))
                .collect()
        })
        .collect();

    let mut x: usize = (0..n).fold(0, |acc, v| acc | (usize::from(rng.gen::<bool>()) << v));
    let sweep = |x: &mut usize, rng: &mut rand_chacha::ChaCha8Rng| {
        for v in 0..n {
            let p1 = conditional_one(m, &touching[v], *x, v);
            if rng.gen::<f64>() < p1 {
                *x |= 1 << v;
            } else {
                *x &= !(1 << v);
            }
        }
    };

    for _ in 0..cfg.burn_in {
        sweep(&mut x, &mut rng);
    }
    let thinning = cfg.thinning.max(1);
    let mut samples = Vec::with_capacity(count);
    while samples.len() < count {
        for _ in 0..thinning {
            sweep(&mut x, &mut rng);
        }
        samples.push(x as u32);
    }
    Dataset::new(n, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{maximal_cliques, CliqueSet, UndirectedGraph};
    use crate::pgm::{mn_joint, random_markov_model, FactorTable};
    use crate::training::tv_distance;

    #[test]
    fn single_variable_marginal() {
        let g = UndirectedGraph::numbered(1, []).unwrap();
        let cs = CliqueSet::new(&g, vec![vec![0]]).unwrap();
        let m = MarkovModel::new(g, cs, vec![FactorTable::new(vec![0], vec![1.0, 3.0]).unwrap()]).unwrap();
        let ds = gibbs_sample(&m, GibbsConfig::default(), 100_000, 5).unwrap();
        let p1 = ds.empirical().unwrap().probs()[1];
        assert!((p1 - 0.75).abs() < 0.01, "{p1}");
    }

    #[test]
    fn uniform_factors_give_uniform_samples() {
        let g = UndirectedGraph::numbered(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let cs = maximal_cliques(&g);
        let factors = cs.iter().map(|c| FactorTable::new(c.to_vec(), vec![0.5; 4]).unwrap()).collect();
        let m = MarkovModel::new(g, cs, factors).unwrap();
        let ds = gibbs_sample(&m, GibbsConfig::default(), 100_000, 9).unwrap();
        let tv = tv_distance(&ds.empirical().unwrap(), &crate::pgm::Distribution::uniform(4)).unwrap();
        assert!(tv < 0.05, "{tv}");
    }

    /// The sampler's local conditional equals the exact conditional of the
    /// enumerated joint for every site and assignment.
    #[test]
    fn site_conditional_matches_exact_joint() {
        for s in 0..5u64 {
            let g = UndirectedGraph::numbered(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (1, 4)])
                .unwrap();
            let cs = maximal_cliques(&g);
            let mut rng = seed::rng(s);
            let m = random_markov_model(g, cs, &mut rng).unwrap();
            let joint = mn_joint(&m).unwrap();
            let p = joint.probs();
            for x in 0..64usize {
                for v in 0..6 {
                    let x1 = x | 1 << v;
                    let x0 = x & !(1 << v);
                    let exact = p[x1] / (p[x0] + p[x1]);
                    assert!((site_conditional(&m, x, v) - exact).abs() < 1e-12);
                }
            }
        }
    }
}
