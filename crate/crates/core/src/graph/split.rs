use rand::Rng;

use super::Graph;
use crate::rng::{self, Stream};

/// Colors every edge red or blue with probability 1/2 each, returning the
/// red and blue graphs on the same vertex set.
pub fn color_edges(g: &Graph, seed: u64) -> (Graph, Graph) {
    let mut rng = rng::stream(seed, Stream::Coloring);
    let mut red = Vec::new();
    let mut blue = Vec::new();
    for e in g.edges() {
        if rng.random::<bool>() {
            red.push(e);
        } else {
            blue.push(e);
        }
    }
    let n = g.num_vertices();
    (Graph::from_sorted_unique(n, &red), Graph::from_sorted_unique(n, &blue))
}

/// Places each vertex in `Y` or `Z` independently with probability 1/2.
/// Both lists are ascending.
pub fn split_vertices(num_vertices: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = rng::stream(seed, Stream::Splitting);
    let mut y = Vec::new();
    let mut z = Vec::new();
    for v in 0..num_vertices {
        if rng.random::<bool>() {
            y.push(v);
        } else {
            z.push(v);
        }
    }
    (y, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_partitions_edges() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
        let (red, blue) = color_edges(&g, 11);
        assert_eq!(red.edge_count() + blue.edge_count(), g.edge_count());
        for (u, v) in g.edges() {
            assert!(red.has_edge(u, v) ^ blue.has_edge(u, v));
        }
        assert_eq!(red.num_vertices(), 6);
        assert_eq!(blue.num_vertices(), 6);
    }

    #[test]
    fn empty_inputs() {
        let (r, b) = color_edges(&Graph::empty(3), 0);
        assert_eq!((r.edge_count(), b.edge_count()), (0, 0));
        let (y, z) = split_vertices(0, 0);
        assert!(y.is_empty() && z.is_empty());
    }

    #[test]
    fn split_covers_all_vertices() {
        let (y, z) = split_vertices(101, 3);
        assert_eq!(y.len() + z.len(), 101);
        let mut all: Vec<_> = y.iter().chain(&z).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }
}
