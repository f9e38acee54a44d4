//! Ghost insertion, tree peeling and the matching decision rule.

use serde::Serialize;

use super::cluster::ClusterState;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, BoundaryQuery, QubitPos, QubitSet, SurfaceCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelPhase {
    First,
    Second,
}

/// A ghost ancilla on `side`, connected to the defect at position `defect`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhostAttachment {
    pub defect: usize,
    pub side: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GhostSide {
    None,
    Left,
    Right,
    Both,
}

impl GhostSide {
    fn from_attachments(ghosts: &[GhostAttachment]) -> Self {
        let left = ghosts.iter().any(|g| g.side == Boundary::Left);
        let right = ghosts.iter().any(|g| g.side == Boundary::Right);
        match (left, right) {
            (false, false) => GhostSide::None,
            (true, false) => GhostSide::Left,
            (false, true) => GhostSide::Right,
            (true, true) => GhostSide::Both,
        }
    }
}

/// Endpoint of a path built by [`build_match`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Site(usize),
    Boundary(Boundary),
}

/// Appends the qubits of the path from site `from` to `to`: vertical steps
/// in the column of `from` down (or up) to the row of `to`, then horizontal
/// steps along that row. Boundary targets take the straight horizontal run.
pub(crate) fn push_path(code: &SurfaceCode, from: usize, to: Target, out: &mut Vec<usize>) {
    let (r0, c0) = code.site_coords(from);
    match to {
        Target::Site(s) => {
            let (r1, c1) = code.site_coords(s);
            for r in r0.min(r1)..r0.max(r1) {
                out.push(code.vertical_qubit(r, c0));
            }
            for c in c0.min(c1) + 1..=c0.max(c1) {
                out.push(code.horizontal_qubit(r1, c));
            }
        }
        Target::Boundary(Boundary::Left) => {
            for c in 0..=c0 {
                out.push(code.horizontal_qubit(r0, c));
            }
        }
        Target::Boundary(Boundary::Right) => {
            for c in c0 + 1..code.d() {
                out.push(code.horizontal_qubit(r0, c));
            }
        }
    }
}

/// Qubits (primal frame indices) joining site `from` to `to`.
pub fn build_match(code: &SurfaceCode, from: usize, to: Target) -> QubitSet {
    let mut v = Vec::new();
    push_path(code, from, to, &mut v);
    QubitSet::from_toggles(v)
}

/// A candidate correction for one cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// Primal-frame qubit indices.
    pub qubits: QubitSet,
    pub weight: usize,
    /// `column_parity[k]` is the parity of qubits in column `k + 1`.
    pub column_parity: Vec<u8>,
    pub ghost_side: GhostSide,
}

impl Matching {
    pub fn from_qubits(code: &SurfaceCode, qubits: QubitSet, ghost_side: GhostSide) -> Self {
        let mut column_parity = vec![0u8; code.d()];
        for q in qubits.iter() {
            if let QubitPos::Horizontal { col, .. } = code.qubit_pos(q) {
                column_parity[col] ^= 1;
            }
        }
        Matching {
            weight: qubits.len(),
            qubits,
            column_parity,
            ghost_side,
        }
    }

    /// Number of columns crossed an odd number of times.
    pub fn column_metric(&self) -> usize {
        self.column_parity.iter().map(|&u| u as usize).sum()
    }
}

/// Picks the defect of a cluster closest to a boundary. Ties go to the defect
/// farthest from its nearest cluster neighbour, then to the lowest site index.
fn nearest_to_boundary(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    query: BoundaryQuery,
) -> (usize, Boundary) {
    let list = state.cluster(cluster);
    let mut best: Option<(usize, usize, Boundary)> = None; // (pos, dist, side)
    let mut tied = false;
    for &v in list {
        let (dist, side) = code.column_boundary_distance(state.coords(v).1, query);
        match best {
            None => best = Some((v, dist, side)),
            Some((_, bd, _)) if dist < bd => {
                best = Some((v, dist, side));
                tied = false;
            }
            Some((_, bd, _)) if dist == bd => tied = true,
            _ => {}
        }
    }
    let (pos, dist, side) = best.expect("empty cluster");
    if !tied {
        return (pos, side);
    }
    let neighbour_dist = |v: usize| {
        list.iter()
            .filter(|&&u| u != v)
            .map(|&u| state.distance(u, v))
            .min()
            .unwrap_or(usize::MAX)
    };
    // Positions follow ascending site order, so among tied candidates a strictly
    // larger neighbour distance wins and equal ones keep the lowest position.
    let mut pick: Option<(usize, usize)> = None; // (pos, neighbour distance)
    for &v in list {
        if code.column_boundary_distance(state.coords(v).1, query).0 != dist {
            continue;
        }
        let nn = neighbour_dist(v);
        pick = match pick {
            Some((p, pn)) if pn > nn || (pn == nn && p < v) => Some((p, pn)),
            _ => Some((v, nn)),
        };
    }
    let (pick, _) = pick.expect("tied candidates exist");
    (pick, code.column_boundary_distance(state.coords(pick).1, query).1)
}

/// Ghost ancillas for one peeling phase of a cluster.
///
/// First phase: odd clusters get one ghost on the defect nearest a boundary.
/// Second phase: odd clusters get one ghost on the boundary opposite
/// `prev_side`; even clusters get one on each boundary.
pub fn add_ghost(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    phase: PeelPhase,
    prev_side: Option<Boundary>,
) -> Result<Vec<GhostAttachment>> {
    let odd = state.cardinality(cluster) % 2 == 1;
    let attach = |query| {
        let (defect, side) = nearest_to_boundary(code, state, cluster, query);
        GhostAttachment { defect, side }
    };
    Ok(match (phase, odd) {
        (PeelPhase::First, true) => vec![attach(BoundaryQuery::Nearest)],
        (PeelPhase::First, false) => Vec::new(),
        (PeelPhase::Second, true) => {
            let prev = prev_side.ok_or_else(|| {
                Error::ContractViolation(format!(
                    "second phase of odd cluster {cluster} without a first-phase boundary"
                ))
            })?;
            vec![attach(prev.opposite().into())]
        }
        (PeelPhase::Second, false) => {
            vec![attach(BoundaryQuery::Left), attach(BoundaryQuery::Right)]
        }
    })
}

/// Per-defect working arrays reused across peels.
#[derive(Clone, Debug, Default)]
pub struct PeelScratch {
    on: Vec<bool>,
    order: Vec<usize>,
    removed: Vec<bool>,
    toggles: Vec<usize>,
}

impl PeelScratch {
    fn prepare(&mut self, n: usize) {
        if self.on.len() < n {
            self.on.resize(n, false);
            self.order.resize(n, 0);
            self.removed.resize(n, false);
        }
        self.toggles.clear();
    }
}

/// Peels a cluster tree into a matching.
///
/// All cluster defects start switched on. Each ghost contributes the straight
/// boundary path of its defect and toggles that defect. The cluster list is
/// then scanned repeatedly; a defect of order one with neighbour `u` adds the
/// path to `u` if it is on (and toggles `u`), and its edge is removed either way.
pub fn peel(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    ghosts: &[GhostAttachment],
) -> Result<Matching> {
    peel_with(code, state, cluster, ghosts, &mut PeelScratch::default())
}

pub(crate) fn peel_with(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    ghosts: &[GhostAttachment],
    scratch: &mut PeelScratch,
) -> Result<Matching> {
    let list = state.cluster(cluster);
    scratch.prepare(state.num_defects());
    for &v in list {
        scratch.on[v] = true;
        scratch.order[v] = state.order(v);
        scratch.removed[v] = false;
    }
    for g in ghosts {
        push_path(code, state.site(g.defect), Target::Boundary(g.side), &mut scratch.toggles);
        scratch.on[g.defect] ^= true;
    }

    let mut edges_left = list.len() - 1;
    while edges_left > 0 {
        let before = edges_left;
        for &v in list {
            if scratch.order[v] != 1 {
                continue;
            }
            // The edge to the parent is keyed by the child; a leaf's live edge is
            // either its parent edge or the one edge to a live child.
            let u = match state.parent(v) {
                Some(p) if !scratch.removed[v] => p,
                _ => *state
                    .adjacent(v)
                    .iter()
                    .find(|&&c| state.parent(c) == Some(v) && !scratch.removed[c])
                    .ok_or_else(|| {
                        Error::ContractViolation(format!("leaf {v} has no live edge"))
                    })?,
            };
            if scratch.on[v] {
                push_path(code, state.site(v), Target::Site(state.site(u)), &mut scratch.toggles);
                scratch.on[v] = false;
                scratch.on[u] ^= true;
            }
            let child = if state.parent(v) == Some(u) { v } else { u };
            scratch.removed[child] = true;
            scratch.order[v] -= 1;
            scratch.order[u] -= 1;
            edges_left -= 1;
        }
        if edges_left == before {
            return Err(Error::ContractViolation(format!(
                "cluster {cluster} is not a tree"
            )));
        }
    }
    if let Some(&v) = list.iter().find(|&&v| scratch.on[v]) {
        scratch.on[v] = false;
        return Err(Error::ContractViolation(format!(
            "defect {v} left unmatched in cluster {cluster}"
        )));
    }
    let qubits = QubitSet::from_toggle_buffer(&mut scratch.toggles);
    Ok(Matching::from_qubits(code, qubits, GhostSide::from_attachments(ghosts)))
}

/// Which rule selected the final matching of a cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// `w¹ ≤ t`.
    FirstWithinT,
    /// `w² ≤ t`.
    SecondWithinT,
    /// `w¹ = t + 1`.
    FirstAtTPlusOne,
    /// `w² = t + 1`.
    SecondAtTPlusOne,
    /// Column metric, first matching (also taken on ties).
    ColumnMetricFirst,
    ColumnMetricSecond,
}

#[derive(Clone, Debug)]
pub struct PostProcessOutcome {
    pub chosen: Matching,
    pub decision: Decision,
    pub second_weight: Option<usize>,
}

/// Chooses between the first matching and a second one that differs from
/// it by a logical operator.
pub fn post_process(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    first_ghosts: &[GhostAttachment],
    m1: Matching,
) -> Result<PostProcessOutcome> {
    post_process_with(code, state, cluster, first_ghosts, m1, &mut PeelScratch::default())
}

pub(crate) fn post_process_with(
    code: &SurfaceCode,
    state: &ClusterState,
    cluster: usize,
    first_ghosts: &[GhostAttachment],
    m1: Matching,
    scratch: &mut PeelScratch,
) -> Result<PostProcessOutcome> {
    let t = code.t();
    if m1.weight <= t {
        return Ok(PostProcessOutcome {
            chosen: m1,
            decision: Decision::FirstWithinT,
            second_weight: None,
        });
    }
    let prev_side = first_ghosts.first().map(|g| g.side);
    let ghosts = add_ghost(code, state, cluster, PeelPhase::Second, prev_side)?;
    let m2 = peel_with(code, state, cluster, &ghosts, scratch)?;
    let w2 = m2.weight;
    let (chosen, decision) = if m2.weight <= t {
        (m2, Decision::SecondWithinT)
    } else if m1.weight == t + 1 {
        (m1, Decision::FirstAtTPlusOne)
    } else if m2.weight == t + 1 {
        (m2, Decision::SecondAtTPlusOne)
    } else if m2.column_metric() < m1.column_metric() {
        (m2, Decision::ColumnMetricSecond)
    } else {
        (m1, Decision::ColumnMetricFirst)
    };
    Ok(PostProcessOutcome {
        chosen,
        decision,
        second_weight: Some(w2),
    })
}
