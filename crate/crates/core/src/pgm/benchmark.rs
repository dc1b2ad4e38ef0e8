use std::ops::Range;

use rand::Rng;

use super::{mn_joint, Dataset, Distribution, FactorTable, MarkovModel};
use crate::error::Result;
use crate::graph::{CliqueSet, UndirectedGraph};
use crate::seed;

/// Factor values are drawn IID uniform from this range.
pub const FACTOR_RANGE: Range<f64> = 0.1..1.0;

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub model: MarkovModel,
    pub distribution: Distribution,
    pub dataset: Dataset,
}

/// Assigns `2^|C|` random factor values to every clique, in clique order.
pub fn random_markov_model<R: Rng + ?Sized>(
    graph: UndirectedGraph,
    cliques: CliqueSet,
    rng: &mut R,
) -> Result<MarkovModel> {
    let factors = cliques
        .iter()
        .map(|c| {
            let values = (0..1usize << c.len()).map(|_| rng.gen_range(FACTOR_RANGE)).collect();
            FactorTable::new(c.to_vec(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    MarkovModel::new(graph, cliques, factors)
}

/// Random factors, exact joint by enumeration, then `sample_count`
/// inverse-CDF draws, all from one seeded stream.
pub fn generate_benchmark(
    graph: &UndirectedGraph,
    cliques: &CliqueSet,
    seed: u64,
    sample_count: usize,
) -> Result<Benchmark> {
    let mut rng = seed::rng(seed);
    let model = random_markov_model(graph.clone(), cliques.clone(), &mut rng)?;
    let distribution = mn_joint(&model)?;
    let dataset = distribution.sample(sample_count, &mut rng);
    Ok(Benchmark { model, distribution, dataset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, maximal_cliques, GraphSpec};
    use crate::training::tv_distance;

    fn grid() -> (UndirectedGraph, CliqueSet) {
        let g = generate_graph(&GraphSpec::Grid { rows: 2, cols: 3 }).unwrap().into_undirected().unwrap();
        let cs = maximal_cliques(&g);
        (g, cs)
    }

    #[test]
    fn factor_sizes_and_range() {
        let g = UndirectedGraph::numbered(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let cs = maximal_cliques(&g);
        let b = generate_benchmark(&g, &cs, 1, 10).unwrap();
        let sizes: Vec<usize> = b.model.factors().iter().map(|f| f.values().len()).collect();
        assert_eq!(sizes, vec![8, 4]);
        assert!(b
            .model
            .factors()
            .iter()
            .flat_map(|f| f.values())
            .all(|v| FACTOR_RANGE.contains(v)));
        let total: f64 = b.distribution.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(b.dataset.len(), 10);
    }

    #[test]
    fn bit_reproducible() {
        let (g, cs) = grid();
        let a = generate_benchmark(&g, &cs, 42, 500).unwrap();
        let b = generate_benchmark(&g, &cs, 42, 500).unwrap();
        assert_eq!(a.distribution, b.distribution);
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.model.factors(), b.model.factors());
        let c = generate_benchmark(&g, &cs, 43, 500).unwrap();
        assert_ne!(a.distribution, c.distribution);
    }

    /// Empirical TV to the exact joint shrinks with the sample count
    /// (averaged over 10 seeds).
    #[test]
    fn empirical_tv_shrinks_with_samples() {
        let (g, cs) = grid();
        let mean_tv = |count: usize| {
            (0..10)
                .map(|s| {
                    let b = generate_benchmark(&g, &cs, s, count).unwrap();
                    tv_distance(&b.dataset.empirical().unwrap(), &b.distribution).unwrap()
                })
                .sum::<f64>()
                / 10.0
        };
        let tvs: Vec<f64> = [1_000, 10_000, 100_000].into_iter().map(mean_tv).collect();
        assert!(tvs[0] > tvs[1] && tvs[1] > tvs[2], "{tvs:?}");
    }
}
