//! Spanning trees with small measured stretch.
//!
//! Several candidates are built and the one with the least total stretch is
//! kept: breadth-first trees from a graph centre and from node 0, and
//! ball-growing trees that repeatedly contract low-boundary balls of the
//! current cluster graph.


use super::tree::tree_stretch;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

const BALL_RATIOS: [f64; 3] = [0.25, 0.5, 1.0];

pub fn spanning_tree_low_stretch(graph: &Graph) -> Result<Vec<EdgeId>> {
    let n = graph.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut candidates = vec![graph.bfs_tree(center(graph))?, graph.bfs_tree(0)?];
    for beta in BALL_RATIOS {
        candidates.push(ball_growing_tree(graph, beta));
    }
    let mut best: Option<(u64, Vec<EdgeId>)> = None;
    for mut tree in candidates {
        tree.sort_unstable();
        let s = tree_stretch(graph, &tree)?;
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, tree));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Midpoint of a double-sweep BFS diameter estimate.
fn center(graph: &Graph) -> usize {
    let far = |d: &[usize]| {
        (0..d.len())
            .max_by_key(|&v| (d[v], std::cmp::Reverse(v)))
            .unwrap_or(0)
    };
    let a = far(&graph.bfs_distances(0));
    let da = graph.bfs_distances(a);
    let b = far(&da);
    let db = graph.bfs_distances(b);
    let half = da[b] / 2;
    (0..graph.node_count())
        .filter(|&v| da[v] + db[v] == da[b])
        .min_by_key(|&v| (da[v].abs_diff(half), v))
        .unwrap_or(0)
}

/// Ball growing on the contracted cluster graph. Each round grows balls by
/// whole BFS layers until the boundary has at most `beta` times as many
/// edges as the inside, then contracts every ball.
fn ball_growing_tree(graph: &Graph, beta: f64) -> Vec<EdgeId> {
    let n = graph.node_count();
    let mut tree = Vec::with_capacity(n - 1);
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut count = n;
    while count > 1 {
        // cluster multigraph: (neighbour cluster, original edge)
        let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); count];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let (cu, cv) = (cluster[u], cluster[v]);
            if cu != cv {
                adj[cu].push((cv, e));
                adj[cv].push((cu, e));
            }
        }
        let mut ball = vec![usize::MAX; count];
        let mut balls = 0;
        for seed in 0..count {
            if ball[seed] != usize::MAX {
                continue;
            }
            let id = balls;
            balls += 1;
            ball[seed] = id;
            let mut layer = vec![seed];
            let mut members = vec![seed];
            let mut inside = 0usize;
            let mut radius = 0;
            loop {
                // edges leaving the ball to still unclaimed clusters
                let mut next: Vec<usize> = Vec::new();
                let mut boundary = 0usize;
                let mut via: Vec<(usize, EdgeId)> = Vec::new();
                for &c in &layer {
                    for &(d, e) in &adj[c] {
                        if ball[d] == usize::MAX {
                            boundary += 1;
                            if !via.iter().any(|&(x, _)| x == d) {
                                via.push((d, e));
                                next.push(d);
                            }
                        }
                    }
                }
                if next.is_empty() || (radius >= 1 && boundary as f64 <= beta * inside as f64) {
                    break;
                }
                for &(d, e) in &via {
                    ball[d] = id;
                    tree.push(e);
                }
                members.extend(&next);
                inside = members
                    .iter()
                    .map(|&c| adj[c].iter().filter(|&&(d, _)| ball[d] == id).count())
                    .sum::<usize>()
                    / 2;
                layer = next;
                radius += 1;
            }
        }
        for c in cluster.iter_mut() {
            *c = ball[*c];
        }
        count = balls;
    }
    tree
}
