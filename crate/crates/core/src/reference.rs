//! Ground-truth and baseline decoders.
//!
//! [`exact_min_matching`] solves minimum-weight matching with boundary
//! connections exactly by dynamic programming over defect subsets, which is
//! only tractable for small defect counts. [`greedy_decode`] repeatedly pairs
//! the closest remaining defects.

use crate::bc::{build_match, Target};
use crate::error::{Error, Result};
use crate::lattice::{BoundaryQuery, QubitSet, Syndrome, SurfaceCode};

/// Largest defect count the exact oracle accepts.
pub const ORACLE_MAX_DEFECTS: usize = 16;

/// Uniform-weight matching instance over a set of defects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchOracleProblem {
    pub defects: Vec<usize>,
    /// Row-major `n × n` matrix of pair costs.
    pub pair_cost: Vec<usize>,
    pub boundary_cost: Vec<usize>,
}

impl MatchOracleProblem {
    pub fn from_syndrome(code: &SurfaceCode, syndrome: &Syndrome) -> Self {
        let defects = syndrome.defects().to_vec();
        let n = defects.len();
        let mut pair_cost = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                pair_cost[i * n + j] = code.eval_d(defects[i], defects[j]);
            }
        }
        let boundary_cost = defects
            .iter()
            .map(|&s| code.boundary_distance(s, BoundaryQuery::Nearest).0)
            .collect();
        MatchOracleProblem {
            defects,
            pair_cost,
            boundary_cost,
        }
    }

    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn pair(&self, i: usize, j: usize) -> usize {
        self.pair_cost[i * self.defects.len() + j]
    }
}

/// How one defect is matched: to another defect (by position) or to its
/// nearest boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Partner {
    Defect(usize),
    Boundary,
}

/// Solution of a matching problem: `(position, partner)` for every defect,
/// listing each pair once from its lower position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub assignments: Vec<(usize, Partner)>,
    pub cost: usize,
}

/// Exact minimum-cost pairing where each defect pairs with another defect or
/// with a boundary; boundary ghosts pair among themselves at no cost.
///
/// Among optimal solutions the lowest defect takes the lowest-indexed defect
/// partner that stays optimal, with the boundary tried last.
pub fn exact_min_matching(problem: &MatchOracleProblem) -> Result<Pairing> {
    let n = problem.len();
    if n > ORACLE_MAX_DEFECTS {
        return Err(Error::Capacity {
            what: "defect count",
            requested: n as u128,
            limit: ORACLE_MAX_DEFECTS as u128,
        });
    }
    let full = (1usize << n) - 1;
    // best[mask] = minimum cost to match the defects in `mask`.
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = problem.boundary_cost[i] + best[rest];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let c = problem.pair(i, j) + best[rest & !(1 << j)];
            b = b.min(c);
        }
        best[mask] = b;
    }
    let mut assignments = Vec::with_capacity(n);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut r = rest;
        let mut chosen = None;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            if problem.pair(i, j) + best[rest & !(1 << j)] == best[mask] {
                chosen = Some(j);
                break;
            }
        }
        match chosen {
            Some(j) => {
                assignments.push((i, Partner::Defect(j)));
                mask = rest & !(1 << j);
            }
            None => {
                debug_assert_eq!(problem.boundary_cost[i] + best[rest], best[mask]);
                assignments.push((i, Partner::Boundary));
                mask = rest;
            }
        }
    }
    Ok(Pairing {
        assignments,
        cost: best[full],
    })
}

fn pairing_to_correction(code: &SurfaceCode, syndrome: &Syndrome, pairing: &Pairing) -> QubitSet {
    let sites = syndrome.defects();
    let mut toggles = Vec::new();
    for &(i, partner) in &pairing.assignments {
        let path = match partner {
            Partner::Defect(j) => build_match(code, sites[i], Target::Site(sites[j])),
            Partner::Boundary => {
                let (_, side) = code.boundary_distance(sites[i], BoundaryQuery::Nearest);
                build_match(code, sites[i], Target::Boundary(side))
            }
        };
        toggles.extend(path.iter().map(|q| code.to_frame(syndrome.side, q)));
    }
    QubitSet::from_toggles(toggles)
}

/// Minimum-weight matching decoder backed by the exact oracle.
pub fn mwpm_decode(code: &SurfaceCode, syndrome: &Syndrome) -> Result<QubitSet> {
    if syndrome.is_empty() {
        return Ok(QubitSet::new());
    }
    let problem = MatchOracleProblem::from_syndrome(code, syndrome);
    let pairing = exact_min_matching(&problem)?;
    Ok(pairing_to_correction(code, syndrome, &pairing))
}

/// Greedy matching: repeatedly commits the globally cheapest remaining
/// defect pair or defect-to-boundary link. Ties prefer the lower first
/// defect, then the lower partner, with the boundary ranked after defects.
pub fn greedy_pairing(problem: &MatchOracleProblem) -> Pairing {
    let n = problem.len();
    let mut candidates: Vec<(usize, usize, Partner)> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            candidates.push((problem.pair(i, j), i, Partner::Defect(j)));
        }
        candidates.push((problem.boundary_cost[i], i, Partner::Boundary));
    }
    candidates.sort_unstable();
    let mut used = vec![false; n];
    let mut assignments = Vec::new();
    let mut cost = 0;
    for (c, i, partner) in candidates {
        if used[i] {
            continue;
        }
        match partner {
            Partner::Defect(j) if used[j] => continue,
            Partner::Defect(j) => used[j] = true,
            Partner::Boundary => {}
        }
        used[i] = true;
        cost += c;
        assignments.push((i, partner));
    }
    assignments.sort_unstable();
    Pairing { assignments, cost }
}

pub fn greedy_decode(code: &SurfaceCode, syndrome: &Syndrome) -> QubitSet {
    if syndrome.is_empty() {
        return QubitSet::new();
    }
    let problem = MatchOracleProblem::from_syndrome(code, syndrome);
    pairing_to_correction(code, syndrome, &greedy_pairing(&problem))
}
