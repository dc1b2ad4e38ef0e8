use std::collections::BTreeSet;

use super::{DirectedAcyclicGraph, UndirectedGraph};
use crate::error::{Error, Result};

/// Greedy minimum-fill elimination. Each step eliminates the remaining vertex
/// whose neighbourhood needs the fewest extra edges to become a clique (ties
/// go to the lowest index) and records those edges as chords.
pub fn triangulate(g: &UndirectedGraph) -> UndirectedGraph {
    let n = g.n();
    let mut work: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut alive = vec![true; n];
    let mut chords = Vec::new();

    for _ in 0..n {
        let (v, _) = (0..n)
            .filter(|&v| alive[v])
            .map(|v| (v, missing_pairs(&work, v).len()))
            .min_by_key(|&(v, fill)| (fill, v))
            .expect("a live vertex remains");
        for (a, b) in missing_pairs(&work, v) {
            work[a].insert(b);
            work[b].insert(a);
            chords.push((a, b));
        }
        for u in std::mem::take(&mut work[v]) {
            work[u].remove(&v);
        }
        alive[v] = false;
    }
    g.with_extra_edges(&chords)
}

fn missing_pairs(adj: &[BTreeSet<usize>], v: usize) -> Vec<(usize, usize)> {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut out = Vec::new();
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Maximum-cardinality search visiting order; ties go to the lowest index.
/// For a chordal graph the reverse of this order is a perfect elimination
/// ordering.
pub fn max_cardinality_order(g: &UndirectedGraph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !visited[u] {
                weight[u] += 1;
            }
        }
    }
    order
}

fn earlier_neighbors(g: &UndirectedGraph, order: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    (0..g.n())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .copied()
                .filter(|&u| pos[u] < pos[v])
                .collect()
        })
        .collect()
}

pub fn is_chordal(g: &UndirectedGraph) -> bool {
    let order = max_cardinality_order(g);
    earlier_neighbors(g, &order)
        .iter()
        .all(|nb| g.is_complete_on(nb))
}

/// Directs every edge from the earlier to the later vertex of a
/// maximum-cardinality search, so each node's parents form a clique.
pub fn orient_acyclic(g: &UndirectedGraph) -> Result<DirectedAcyclicGraph> {
    let order = max_cardinality_order(g);
    let parents = earlier_neighbors(g, &order);
    if !parents.iter().all(|nb| g.is_complete_on(nb)) {
        return Err(Error::NotChordal);
    }
    let edges = parents
        .iter()
        .enumerate()
        .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)));
    DirectedAcyclicGraph::from_index_edges(g.labels().to_vec(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, moralize, GraphSpec};

    fn cycle(n: usize) -> UndirectedGraph {
        generate_graph(&GraphSpec::Loop { n }).unwrap().into_undirected().unwrap()
    }

    fn triangle() -> UndirectedGraph {
        UndirectedGraph::numbered(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn cycle_triangulation_adds_n_minus_3_chords() {
        for n in 4..=12 {
            let g = cycle(n);
            let t = triangulate(&g);
            assert_eq!(t.edge_count() - g.edge_count(), n - 3, "C{n}");
            assert!(is_chordal(&t));
            assert!(!is_chordal(&g));
        }
    }

    #[test]
    fn chordal_graphs_are_left_alone() {
        let t = triangle();
        assert!(is_chordal(&t));
        assert_eq!(triangulate(&t), t);
        let chain = generate_graph(&GraphSpec::TriangleChain { n: 7 })
            .unwrap()
            .into_undirected()
            .unwrap();
        assert_eq!(triangulate(&chain), chain);
    }

    #[test]
    fn four_cycle_is_not_chordal() {
        assert!(!is_chordal(&cycle(4)));
        assert!(matches!(orient_acyclic(&cycle(4)), Err(Error::NotChordal)));
    }

    #[test]
    fn single_edge_points_from_lower_index() {
        let g = UndirectedGraph::numbered(2, [(0, 1)]).unwrap();
        let d = orient_acyclic(&g).unwrap();
        assert_eq!(d.edges(), vec![(0, 1)]);
    }

    #[test]
    fn triangle_orientation_has_parent_sizes_0_1_2() {
        let d = orient_acyclic(&triangle()).unwrap();
        let mut sizes: Vec<usize> = (0..3).map(|v| d.parents(v).len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![0, 1, 2]);
    }

    #[test]
    fn oriented_triangulated_cycle_moralizes_back() {
        for n in 4..=9 {
            let t = triangulate(&cycle(n));
            let d = orient_acyclic(&t).unwrap();
            assert_eq!(d.topological_order().len(), n);
            assert_eq!(moralize(&d), t);
        }
    }

    /// Brute force: some vertex subset of size >= 4 induces a cycle.
    fn has_chordless_cycle(g: &UndirectedGraph) -> bool {
        let n = g.n();
        (0u32..(1 << n)).filter(|m| m.count_ones() >= 4).any(|mask| {
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let inner_degree =
                |v: usize| members.iter().filter(|&&u| g.has_edge(u, v)).count();
            if !members.iter().all(|&v| inner_degree(v) == 2) {
                return false;
            }
            // 2-regular: a single cycle iff connected
            let mut seen = vec![members[0]];
            let mut frontier = vec![members[0]];
            while let Some(v) = frontier.pop() {
                for &u in &members {
                    if g.has_edge(u, v) && !seen.contains(&u) {
                        seen.push(u);
                        frontier.push(u);
                    }
                }
            }
            seen.len() == members.len()
        })
    }

    /// Exhaustive: all graphs on up to 5 nodes, and the triangulation and
    /// orientation contracts on every one of them.
    #[test]
    fn exhaustive_small_graphs() {
        for n in 1..=5usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e);
                let g = UndirectedGraph::numbered(n, edges).unwrap();
                assert_eq!(is_chordal(&g), !has_chordless_cycle(&g));
                let t = triangulate(&g);
                assert!(is_chordal(&t));
                assert!(g.edges().iter().all(|&(u, v)| t.has_edge(u, v)));
                if is_chordal(&g) {
                    assert_eq!(t, g);
                }
                let d = orient_acyclic(&t).unwrap();
                for v in 0..n {
                    assert!(t.is_complete_on(d.parents(v)));
                }
                assert_eq!(moralize(&d), t);
            }
        }
    }
}
