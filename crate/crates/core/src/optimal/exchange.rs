//! Cycle canceling on the site exchange graph.
//!
//! With every pixel assigned, the residual network of the transportation
//! problem only has cycles of the form `a → j → b → …`: pixel `j` leaves
//! site `a` for site `b` at cost `c_bj − c_aj`. Collapsing pixels gives a
//! graph on sites whose edge `(a, b)` weighs the cheapest such move. An
//! assignment is optimal iff this graph has no negative cycle, and its
//! shortest-path distances are then optimal site potentials.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use super::instance::TransportInstance;
use super::DualSolution;

const NONE: u32 = u32::MAX;

pub(super) struct ExchangeGraph<'a> {
    inst: &'a TransportInstance,
    owner: Vec<u32>,
    /// `(from, to)` site pairs sharing at least one pixel, sorted.
    pairs: Vec<(u32, u32)>,
    pair_index: HashMap<(u32, u32), u32>,
    out_offsets: Vec<usize>,
    /// Min-heaps of `(c_to,j − c_from,j, j)`; entries whose pixel has left
    /// `from` are stale and dropped lazily.
    heaps: Vec<BinaryHeap<Reverse<(i64, u32)>>>,
}

enum Search {
    Cycle(Vec<u32>),
    Potentials(Vec<i64>),
}

impl<'a> ExchangeGraph<'a> {
    pub(super) fn new(inst: &'a TransportInstance, assignment: Vec<u32>) -> Self {
        let mut pairs = Vec::new();
        for j in 0..inst.num_pixels() {
            let sites: Vec<u32> = inst.pixel_arcs(j).map(|a| a.site).collect();
            for &a in &sites {
                for &b in &sites {
                    if a != b {
                        pairs.push((a, b));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let pair_index = pairs.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let mut out_offsets = vec![0usize; inst.num_sites() + 1];
        for &(a, _) in &pairs {
            out_offsets[a as usize + 1] += 1;
        }
        for i in 0..inst.num_sites() {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut graph = ExchangeGraph {
            inst,
            owner: assignment,
            heaps: vec![BinaryHeap::new(); pairs.len()],
            pairs,
            pair_index,
            out_offsets,
        };
        for j in 0..inst.num_pixels() {
            graph.push_moves(j as u32);
        }
        graph
    }

    fn push_moves(&mut self, j: u32) {
        let from = self.owner[j as usize];
        let base = self.inst.cost(from as usize, j as usize).expect("owner arc is admitted");
        for arc in self.inst.pixel_arcs(j as usize) {
            if arc.site != from {
                let p = self.pair_index[&(from, arc.site)];
                self.heaps[p as usize].push(Reverse((arc.cost - base, j)));
            }
        }
    }

    /// Cheapest valid move along pair `p`.
    fn best_move(&mut self, p: u32) -> Option<(i64, u32)> {
        let from = self.pairs[p as usize].0;
        let heap = &mut self.heaps[p as usize];
        while let Some(&Reverse((delta, j))) = heap.peek() {
            if self.owner[j as usize] == from {
                return Some((delta, j));
            }
            heap.pop();
        }
        None
    }

    fn move_pixel(&mut self, j: u32, to: u32) {
        self.owner[j as usize] = to;
        self.push_moves(j);
    }

    /// Applies the cheapest move of every pair in `cycle`, choosing all
    /// pixels before moving any.
    fn cancel(&mut self, cycle: &[u32]) {
        let moves: Vec<(u32, u32)> = cycle
            .iter()
            .map(|&p| {
                let (_, j) = self.best_move(p).expect("cycle edge has a move");
                (j, self.pairs[p as usize].1)
            })
            .collect();
        for (j, to) in moves {
            self.move_pixel(j, to);
        }
    }

    /// Swaps pixels between site pairs while that lowers the cost.
    fn cancel_two_cycles(&mut self) {
        loop {
            let mut improved = false;
            for p in 0..self.pairs.len() as u32 {
                let (a, b) = self.pairs[p as usize];
                if a > b {
                    continue;
                }
                let q = self.pair_index[&(b, a)];
                while let (Some((d1, j1)), Some((d2, j2))) = (self.best_move(p), self.best_move(q)) {
                    if d1 + d2 >= 0 {
                        break;
                    }
                    self.move_pixel(j1, b);
                    self.move_pixel(j2, a);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }

    /// Queue-based Bellman–Ford from a virtual root joined to every site at
    /// weight 0. The predecessor graph is checked for a cycle after every
    /// `k` relaxations; any such cycle is negative.
    fn search(&mut self) -> Search {
        let k = self.inst.num_sites();
        let weights: Vec<Option<i64>> = (0..self.pairs.len() as u32)
            .map(|p| self.best_move(p).map(|(d, _)| d))
            .collect();
        let mut dist = vec![0i64; k];
        let mut parent = vec![NONE; k];
        let mut queued = vec![true; k];
        let mut queue: VecDeque<usize> = (0..k).collect();
        let mut relaxations = 0usize;
        let mut stamp = vec![0u32; k];
        let mut round = 0u32;

        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for p in self.out_offsets[u]..self.out_offsets[u + 1] {
                let Some(w) = weights[p] else { continue };
                let v = self.pairs[p].1 as usize;
                if dist[u] + w < dist[v] {
                    dist[v] = dist[u] + w;
                    parent[v] = p as u32;
                    relaxations += 1;
                    if relaxations.is_multiple_of(k.max(1)) {
                        round += 1;
                        if let Some(cycle) = self.parent_cycle(&parent, &mut stamp, round) {
                            return Search::Cycle(cycle);
                        }
                    }
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        Search::Potentials(dist)
    }

    fn parent_cycle(&self, parent: &[u32], stamp: &mut [u32], round: u32) -> Option<Vec<u32>> {
        // Each walk gets its own mark so revisiting a node finished by an
        // earlier walk in this round stops without reporting a cycle.
        let k = parent.len();
        let mut walk_of = vec![0usize; k];
        for start in 0..k {
            if stamp[start] == round {
                continue;
            }
            let mut v = start;
            while stamp[v] != round && parent[v] != NONE {
                stamp[v] = round;
                walk_of[v] = start + 1;
                v = self.pairs[parent[v] as usize].0 as usize;
            }
            if stamp[v] == round && walk_of[v] == start + 1 {
                let mut cycle = Vec::new();
                let entry = v;
                loop {
                    let p = parent[v];
                    cycle.push(p);
                    v = self.pairs[p as usize].0 as usize;
                    if v == entry {
                        break;
                    }
                }
                cycle.reverse();
                return Some(cycle);
            }
            stamp[v] = round;
        }
        None
    }

    /// Cancels negative cycles until none remain; returns the optimal
    /// assignment and site potentials.
    pub(super) fn optimize(mut self) -> (Vec<u32>, Vec<i64>) {
        loop {
            self.cancel_two_cycles();
            match self.search() {
                Search::Cycle(cycle) => self.cancel(&cycle),
                Search::Potentials(dist) => return (self.owner, dist),
            }
        }
    }
}

/// Optimal assignment and duals, starting from a feasible assignment.
pub(super) fn optimize(inst: &TransportInstance, assignment: Vec<u32>) -> (Vec<u32>, DualSolution) {
    let (assignment, site_potentials) = ExchangeGraph::new(inst, assignment).optimize();
    let pixel_potentials = assignment
        .iter()
        .enumerate()
        .map(|(j, &i)| inst.cost(i as usize, j).expect("admitted") - site_potentials[i as usize])
        .collect();
    (
        assignment,
        DualSolution {
            site_potentials,
            pixel_potentials,
        },
    )
}
