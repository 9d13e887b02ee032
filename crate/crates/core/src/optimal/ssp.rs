//! Successive shortest paths on the bipartite flow network
//! `source → site → pixel → sink`, with Dijkstra on reduced costs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::instance::TransportInstance;
use crate::error::{Error, Result};

const INF: i64 = i64::MAX / 4;

struct Network {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
}

const NIL: usize = usize::MAX;

impl Network {
    fn new(nodes: usize, edges: usize) -> Self {
        Network {
            head: vec![NIL; nodes],
            next: Vec::with_capacity(2 * edges),
            to: Vec::with_capacity(2 * edges),
            cap: Vec::with_capacity(2 * edges),
            cost: Vec::with_capacity(2 * edges),
        }
    }

    /// Adds `u → v` and its residual twin; returns the forward edge id.
    fn add_edge(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let id = self.to.len();
        for (from, dest, c, w) in [(u, v, cap, cost), (v, u, 0, -cost)] {
            self.to.push(dest);
            self.cap.push(c);
            self.cost.push(w);
            self.next.push(self.head[from]);
            self.head[from] = self.to.len() - 1;
        }
        id
    }
}

/// Returns an optimal assignment (pixel → site) or the sites whose supply
/// could not be shipped.
pub(super) fn solve(inst: &TransportInstance) -> Result<Vec<u32>> {
    let k = inst.num_sites();
    let n = inst.num_pixels();
    let source = 0;
    let sink = k + n + 1;
    let site_node = |i: usize| 1 + i;
    let pixel_node = |j: usize| 1 + k + j;

    let mut net = Network::new(k + n + 2, k + n + inst.arcs().len());
    let supply_edges: Vec<usize> = inst
        .supplies()
        .iter()
        .enumerate()
        .map(|(i, &s)| net.add_edge(source, site_node(i), s as i64, 0))
        .collect();
    let arc_edges: Vec<usize> = inst
        .arcs()
        .iter()
        .map(|a| net.add_edge(site_node(a.site as usize), pixel_node(a.pixel as usize), 1, a.cost))
        .collect();
    for j in 0..n {
        net.add_edge(pixel_node(j), sink, 1, 0);
    }

    let nodes = k + n + 2;
    let mut potential = vec![0i64; nodes];
    let mut dist = vec![INF; nodes];
    let mut parent_edge = vec![NIL; nodes];
    let mut done = vec![false; nodes];
    let mut heap = BinaryHeap::new();

    for _ in 0..n {
        dist.fill(INF);
        done.fill(false);
        parent_edge.fill(NIL);
        heap.clear();
        dist[source] = 0;
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == sink {
                break;
            }
            let mut e = net.head[u];
            while e != NIL {
                let v = net.to[e];
                if net.cap[e] > 0 && !done[v] {
                    let nd = d + net.cost[e] + potential[u] - potential[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        parent_edge[v] = e;
                        heap.push(Reverse((nd, v)));
                    }
                }
                e = net.next[e];
            }
        }
        if dist[sink] >= INF {
            let starved = supply_edges
                .iter()
                .enumerate()
                .filter(|(_, &e)| net.cap[e] > 0)
                .map(|(i, _)| i)
                .collect();
            return Err(Error::Infeasible { starved });
        }
        let reach = dist[sink];
        for (p, &d) in potential.iter_mut().zip(&dist) {
            *p += d.min(reach);
        }
        let mut v = sink;
        while v != source {
            let e = parent_edge[v];
            net.cap[e] -= 1;
            net.cap[e ^ 1] += 1;
            v = net.to[e ^ 1];
        }
    }

    let mut assignment = vec![u32::MAX; n];
    for (a, &e) in inst.arcs().iter().zip(&arc_edges) {
        if net.cap[e] == 0 {
            assignment[a.pixel as usize] = a.site;
        }
    }
    debug_assert!(assignment.iter().all(|&s| s != u32::MAX));
    Ok(assignment)
}
