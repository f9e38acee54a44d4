//! Bubble clustering: grouping defects into trees under a fixed radius.

use crate::lattice::{BoundaryQuery, SurfaceCode};

const UNASSIGNED: usize = usize::MAX;

/// Forest produced by the clustering phase.
///
/// Defects are addressed by their *position* in the syndrome (ascending site
/// order), not by site index. Every cluster is a tree rooted at its first
/// list entry; `parent` points towards that root.
#[derive(Clone, Debug, Default)]
pub struct ClusterState {
    sites: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    edge_len: Vec<usize>,
    membership: Vec<usize>,
    clusters: Vec<Vec<usize>>,
    /// `(row, col)` of each defect, cached for the pairwise distance scans.
    coords: Vec<(usize, usize)>,
    /// Emptied cluster lists kept for reuse.
    spare: Vec<Vec<usize>>,
    /// Defects of grid row `r` occupy positions `row_start[r]..row_start[r + 1]`.
    row_start: Vec<usize>,
    /// Clustering scratch: siblings of the defect being processed.
    siblings: Vec<usize>,
}

impl ClusterState {
    fn reset(&mut self, code: &SurfaceCode, sites: &[usize]) {
        let n = sites.len();
        self.sites.clear();
        self.sites.extend_from_slice(sites);
        self.coords.clear();
        self.coords.extend(sites.iter().map(|&s| code.site_coords(s)));
        // Sites are sorted, so each row's defects are contiguous.
        self.row_start.clear();
        let mut pos = 0;
        for r in 0..=code.d() {
            while pos < n && self.coords[pos].0 < r {
                pos += 1;
            }
            self.row_start.push(pos);
        }
        for adj in &mut self.adjacency {
            adj.clear();
        }
        self.adjacency.resize_with(n, Vec::new);
        self.parent.clear();
        self.parent.resize(n, None);
        self.edge_len.clear();
        self.edge_len.resize(n, 0);
        self.membership.clear();
        self.membership.resize(n, UNASSIGNED);
        for mut c in self.clusters.drain(..) {
            c.clear();
            self.spare.push(c);
        }
    }

    pub fn num_defects(&self) -> usize {
        self.sites.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Defect-graph distance between the defects at two positions.
    #[inline]
    pub fn distance(&self, u: usize, v: usize) -> usize {
        let (ru, cu) = self.coords[u];
        let (rv, cv) = self.coords[v];
        ru.abs_diff(rv) + cu.abs_diff(cv)
    }

    /// `(row, col)` of the defect at `pos`.
    #[inline]
    pub fn coords(&self, pos: usize) -> (usize, usize) {
        self.coords[pos]
    }

    /// Site index of the defect at `pos`.
    pub fn site(&self, pos: usize) -> usize {
        self.sites[pos]
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Defects of a cluster in insertion order.
    pub fn cluster(&self, c: usize) -> &[usize] {
        &self.clusters[c]
    }

    pub fn cardinality(&self, c: usize) -> usize {
        self.clusters[c].len()
    }

    pub fn cluster_of(&self, pos: usize) -> usize {
        self.membership[pos]
    }

    /// Degree of a defect in its tree.
    pub fn order(&self, pos: usize) -> usize {
        self.adjacency[pos].len()
    }

    pub fn adjacent(&self, pos: usize) -> &[usize] {
        &self.adjacency[pos]
    }

    pub fn parent(&self, pos: usize) -> Option<usize> {
        self.parent[pos]
    }

    /// Defect-graph length of the edge to the tree parent (0 for roots).
    pub fn nearest_edge_len(&self, pos: usize) -> usize {
        self.edge_len[pos]
    }

    /// Tree edges as `(parent, child)` position pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (p, child)))
    }

    fn new_cluster(&mut self, pos: usize) -> usize {
        let c = self.clusters.len();
        let mut list = self.spare.pop().unwrap_or_default();
        list.push(pos);
        self.clusters.push(list);
        self.membership[pos] = c;
        c
    }

    fn attach(&mut self, child: usize, parent: usize, len: usize) {
        self.adjacency[parent].push(child);
        self.adjacency[child].push(parent);
        self.parent[child] = Some(parent);
        self.edge_len[child] = len;
        let c = self.membership[parent];
        self.membership[child] = c;
        self.clusters[c].push(child);
    }

    fn reparent(&mut self, child: usize, new_parent: usize, len: usize) {
        let old = self.parent[child].expect("reparenting a root");
        self.adjacency[old].retain(|&v| v != child);
        self.adjacency[child].retain(|&v| v != old);
        self.adjacency[new_parent].push(child);
        self.adjacency[child].push(new_parent);
        self.parent[child] = Some(new_parent);
        self.edge_len[child] = len;
    }

    /// Moves every defect of cluster `from` into cluster `into` and connects
    /// the two trees with the edge `(anchor, joining)`. `joining` becomes the
    /// new root-side link of its old tree, so parent pointers along its old
    /// root path are flipped.
    fn merge_into(&mut self, from: usize, into: usize, anchor: usize, joining: usize, len: usize) {
        debug_assert_eq!(self.membership[anchor], into);
        debug_assert_eq!(self.membership[joining], from);
        // Re-root the joining tree at `joining`.
        let mut prev = None;
        let mut cur = Some(joining);
        let mut prev_len = len;
        while let Some(v) = cur {
            let next = self.parent[v];
            let next_len = self.edge_len[v];
            self.parent[v] = prev;
            self.edge_len[v] = if prev.is_some() { prev_len } else { 0 };
            prev = Some(v);
            prev_len = next_len;
            cur = next;
        }
        self.adjacency[anchor].push(joining);
        self.adjacency[joining].push(anchor);
        self.parent[joining] = Some(anchor);
        self.edge_len[joining] = len;
        let mut moved = self.clusters.remove(from);
        for &v in &moved {
            self.membership[v] = into;
        }
        let into = if into > from { into - 1 } else { into };
        self.clusters[into].extend_from_slice(&moved);
        moved.clear();
        self.spare.push(moved);
        for m in &mut self.membership {
            if *m > from && *m != UNASSIGNED {
                *m -= 1;
            }
        }
    }

    /// Checks the forest invariants; returns a description of the first
    /// violation found.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.sites.len();
        let mut seen = vec![false; n];
        let mut total = 0;
        for (c, list) in self.clusters.iter().enumerate() {
            total += list.len();
            for &v in list {
                if seen[v] {
                    return Err(format!("defect {v} listed twice"));
                }
                seen[v] = true;
                if self.membership[v] != c {
                    return Err(format!("defect {v} membership mismatch"));
                }
            }
            let edges: usize = list.iter().map(|&v| self.adjacency[v].len()).sum::<usize>() / 2;
            if edges + 1 != list.len() {
                return Err(format!("cluster {c} has {edges} edges for {} defects", list.len()));
            }
            // Connected: walk from the root.
            let mut reached = vec![false; n];
            let mut stack = vec![list[0]];
            reached[list[0]] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if self.membership[w] != c {
                        return Err(format!("edge ({u}, {w}) crosses clusters"));
                    }
                    if !reached[w] {
                        reached[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            if count != list.len() {
                return Err(format!("cluster {c} is disconnected"));
            }
        }
        if total != n {
            return Err(format!("{total} clustered defects, expected {n}"));
        }
        for (child, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                if !self.adjacency[child].contains(&p) {
                    return Err(format!("parent edge ({p}, {child}) missing from adjacency"));
                }
            }
        }
        Ok(())
    }
}

/// Groups defects into trees: any unassigned defect within `radius` of a
/// defect being processed joins its cluster with a tree edge to it.
///
/// With `star_avoidance`, when the processed defect is strictly closer to a
/// sibling (a defect sharing its tree parent) than that sibling is to the
/// parent, the sibling is re-attached under the processed defect.
pub fn bubble_cluster(
    code: &SurfaceCode,
    sites: &[usize],
    radius: usize,
    star_avoidance: bool,
) -> ClusterState {
    let mut state = ClusterState::default();
    bubble_cluster_into(code, sites, radius, star_avoidance, &mut state);
    state
}

pub(crate) fn bubble_cluster_into(
    code: &SurfaceCode,
    sites: &[usize],
    radius: usize,
    star_avoidance: bool,
    state: &mut ClusterState,
) {
    debug_assert!(sites.windows(2).all(|w| w[0] < w[1]));
    state.reset(code, sites);
    let n = sites.len();
    let mut siblings = std::mem::take(&mut state.siblings);
    let rows = state.row_start.len() - 1;
    for seed in 0..n {
        if state.membership[seed] != UNASSIGNED {
            continue;
        }
        let c = state.new_cluster(seed);
        let mut cursor = 0;
        while cursor < state.clusters[c].len() {
            let x = state.clusters[c][cursor];
            let (rx, cx) = state.coords[x];
            // Rows ascend and each row's defects ascend by column, so
            // candidates are visited in ascending site order.
            for r in rx.saturating_sub(radius)..rx.saturating_add(radius).saturating_add(1).min(rows) {
                let dr = r.abs_diff(rx);
                let span = radius - dr;
                let (lo, hi) = (cx.saturating_sub(span), cx.saturating_add(span));
                for y in state.row_start[r]..state.row_start[r + 1] {
                    let col = state.coords[y].1;
                    if col > hi {
                        break;
                    }
                    if col >= lo && state.membership[y] == UNASSIGNED {
                        state.attach(y, x, dr + col.abs_diff(cx));
                    }
                }
            }
            if star_avoidance {
                if let Some(p) = state.parent[x] {
                    siblings.clear();
                    siblings.extend(
                        state.adjacency[p]
                            .iter()
                            .copied()
                            .filter(|&y| y != x && state.parent[y] == Some(p)),
                    );
                    for &y in &siblings {
                        let dist = state.distance(x, y);
                        if dist < state.edge_len[y] {
                            state.reparent(y, x, dist);
                        }
                    }
                }
            }
            cursor += 1;
        }
    }
    state.siblings = siblings;
}

/// Extra cluster merges applied at large distances.
///
/// (a) If there are exactly two singleton clusters and their defects are
/// `radius + 1` apart, they become one cluster.
/// (b) A singleton whose nearest-boundary distance equals its distance to a
/// defect of an odd-cardinality cluster joins that cluster (lowest cluster
/// index wins, then the first defect in list order).
pub fn high_distance_merge(code: &SurfaceCode, state: &mut ClusterState, radius: usize) {
    let singletons: Vec<usize> = (0..state.num_clusters())
        .filter(|&c| state.cardinality(c) == 1)
        .collect();
    if singletons.len() == 2 {
        let (a, b) = (singletons[0], singletons[1]);
        let (va, vb) = (state.clusters[a][0], state.clusters[b][0]);
        let dist = code.eval_d(state.sites[va], state.sites[vb]);
        if dist == radius + 1 {
            state.merge_into(b, a, va, vb, dist);
            return;
        }
    }

    let mut c = 0;
    while c < state.num_clusters() {
        if state.cardinality(c) != 1 {
            c += 1;
            continue;
        }
        let v = state.clusters[c][0];
        let sv = state.sites[v];
        let (bdist, _) = code.boundary_distance(sv, BoundaryQuery::Nearest);
        let target = (0..state.num_clusters())
            .filter(|&o| o != c && state.cardinality(o) % 2 == 1)
            .find_map(|o| {
                state.clusters[o]
                    .iter()
                    .copied()
                    .find(|&u| code.eval_d(state.sites[u], sv) == bdist)
                    .map(|u| (o, u))
            });
        match target {
            Some((o, u)) => {
                state.merge_into(c, o, u, v, bdist);
                // Cluster indices above `c` shifted down; re-examine index `c`.
            }
            None => c += 1,
        }
    }
}
