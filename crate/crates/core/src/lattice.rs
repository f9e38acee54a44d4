//! Planar surface-code geometry.
//!
//! The code of distance `d` has `d` rows of `d` horizontal qubits and `d - 1`
//! rows of `d - 1` vertical qubits. Horizontal qubits are indexed row-major
//! first (`0..d²`), vertical qubits follow (`d²..n`).
//!
//! ```text
//!   row 0:  |--h--X--h--X--h--|      X: X-type generator (primal defect site)
//!                 v     v            v: vertical qubit
//!   row 1:  |--h--X--h--X--h--|      h: horizontal qubit
//! ```
//!
//! X generators sit between horizontal neighbours, so a `d`-qubit code has a
//! `d × (d - 1)` grid of primal defect sites. The left and right edges are the
//! boundaries a Z chain may terminate on.
//!
//! Z generators (plaquettes) form the dual grid. The dual grid is the primal
//! grid transposed: swapping row and column of every qubit maps plaquettes onto
//! X-generator positions. All decoders work in this *frame* and map back with
//! [`SurfaceCode::to_frame`], which is an involution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which decoding problem a syndrome belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Z errors detected by X generators.
    Primal,
    /// X errors detected by Z generators.
    Dual,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Primal, Side::Dual];
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Primal => f.write_str("primal"),
            Side::Dual => f.write_str("dual"),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "primal" | "z" => Ok(Side::Primal),
            "dual" | "x" => Ok(Side::Dual),
            other => Err(Error::Config(format!("unknown side `{other}`"))),
        }
    }
}

/// One of the two rough boundaries of the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Left,
    Right,
}

impl Boundary {
    pub fn opposite(self) -> Boundary {
        match self {
            Boundary::Left => Boundary::Right,
            Boundary::Right => Boundary::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryQuery {
    Left,
    Right,
    /// The closer boundary, ties reported as [`Boundary::Left`].
    Nearest,
}

impl From<Boundary> for BoundaryQuery {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Left => BoundaryQuery::Left,
            Boundary::Right => BoundaryQuery::Right,
        }
    }
}

/// Position of a qubit in the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitPos {
    Horizontal { row: usize, col: usize },
    Vertical { row: usize, col: usize },
}

/// Sorted, duplicate-free set of qubit indices.
///
/// Pauli operators of a single type compose by symmetric difference, which
/// is the only combining operation offered.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitSet(Vec<usize>);

impl QubitSet {
    pub fn new() -> Self {
        QubitSet(Vec::new())
    }

    /// Builds a set from a sorted duplicate-free vector.
    pub fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        QubitSet(v)
    }

    /// Every index toggles membership, so indices listed twice cancel.
    pub fn from_toggles(mut v: Vec<usize>) -> Self {
        Self::from_toggle_buffer(&mut v)
    }

    /// Like [`QubitSet::from_toggles`], but sorts the caller's buffer in
    /// place so it can be reused.
    pub fn from_toggle_buffer(v: &mut [usize]) -> Self {
        v.sort_unstable();
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(v[i]);
            }
            i = j;
        }
        QubitSet(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn symmetric_difference(&self, other: &QubitSet) -> QubitSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        QubitSet(out)
    }

    pub fn intersection_len(&self, other: &QubitSet) -> usize {
        self.0.iter().filter(|q| other.contains(**q)).count()
    }
}

impl FromIterator<usize> for QubitSet {
    /// Collects with toggle semantics.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        QubitSet::from_toggles(iter.into_iter().collect())
    }
}

/// Defects of one side, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syndrome {
    pub side: Side,
    defects: Vec<usize>,
}

impl Syndrome {
    /// Sorts and deduplicates the defect list.
    pub fn new(side: Side, mut defects: Vec<usize>) -> Self {
        defects.sort_unstable();
        defects.dedup();
        Syndrome { side, defects }
    }

    pub fn empty(side: Side) -> Self {
        Syndrome {
            side,
            defects: Vec::new(),
        }
    }

    pub fn defects(&self) -> &[usize] {
        &self.defects
    }

    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Immutable geometry of an `[[n, 1, d]]` planar surface code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceCode {
    d: usize,
    t: usize,
    n: usize,
}

impl SurfaceCode {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidDistance(d));
        }
        Ok(SurfaceCode {
            d,
            t: (d - 1) / 2,
            n: d * d + (d - 1) * (d - 1),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Guaranteed correction capability `floor((d - 1) / 2)`.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_horizontal(&self) -> usize {
        self.d * self.d
    }

    /// Defect sites per side, `d · (d - 1)`.
    pub fn num_defect_sites(&self) -> usize {
        self.d * (self.d - 1)
    }

    /// Number of sites per defect-grid row.
    fn row_len(&self) -> usize {
        self.d - 1
    }

    fn check_site(&self, s: usize) {
        assert!(
            s < self.num_defect_sites(),
            "defect index {s} out of range for d={} ({} sites)",
            self.d,
            self.num_defect_sites()
        );
    }

    fn check_qubit(&self, q: usize) {
        assert!(
            q < self.n,
            "qubit index {q} out of range for d={} ({} qubits)",
            self.d,
            self.n
        );
    }

    /// `(row, col)` of a defect site, `row < d`, `col < d - 1`.
    pub fn site_coords(&self, s: usize) -> (usize, usize) {
        self.check_site(s);
        (s / self.row_len(), s % self.row_len())
    }

    pub fn site_index(&self, row: usize, col: usize) -> usize {
        assert!(row < self.d && col < self.row_len(), "site ({row}, {col}) out of range");
        row * self.row_len() + col
    }

    /// Manhattan distance between two defect sites, which equals the number of
    /// qubits on a shortest lattice path between them.
    ///
    /// Panics on out-of-range indices.
    #[inline]
    pub fn eval_d(&self, a: usize, b: usize) -> usize {
        self.check_site(a);
        self.check_site(b);
        let w = self.row_len();
        (a / w).abs_diff(b / w) + (a % w).abs_diff(b % w)
    }

    /// Qubits between a site and a boundary, plus the boundary that was used.
    pub fn boundary_distance(&self, s: usize, which: BoundaryQuery) -> (usize, Boundary) {
        let (_, col) = self.site_coords(s);
        self.column_boundary_distance(col, which)
    }

    /// [`SurfaceCode::boundary_distance`] for any site in defect column `col`.
    #[inline]
    pub fn column_boundary_distance(&self, col: usize, which: BoundaryQuery) -> (usize, Boundary) {
        debug_assert!(col < self.row_len());
        let left = col + 1;
        let right = self.row_len() - col;
        match which {
            BoundaryQuery::Left => (left, Boundary::Left),
            BoundaryQuery::Right => (right, Boundary::Right),
            BoundaryQuery::Nearest if right < left => (right, Boundary::Right),
            BoundaryQuery::Nearest => (left, Boundary::Left),
        }
    }

    pub fn horizontal_qubit(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.d && col < self.d);
        row * self.d + col
    }

    pub fn vertical_qubit(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.d - 1 && col < self.d - 1);
        self.d * self.d + row * self.row_len() + col
    }

    pub fn qubit_pos(&self, q: usize) -> QubitPos {
        self.check_qubit(q);
        let h = self.num_horizontal();
        if q < h {
            QubitPos::Horizontal {
                row: q / self.d,
                col: q % self.d,
            }
        } else {
            let v = q - h;
            QubitPos::Vertical {
                row: v / self.row_len(),
                col: v % self.row_len(),
            }
        }
    }

    /// 1-based column of a horizontal qubit; `None` for vertical qubits.
    pub fn column_of(&self, q: usize) -> Option<usize> {
        self.check_qubit(q);
        (q < self.num_horizontal()).then(|| q % self.d + 1)
    }

    /// Horizontal qubits of 1-based column `k`, top to bottom.
    pub fn column(&self, k: usize) -> Vec<usize> {
        assert!((1..=self.d).contains(&k), "column {k} out of range");
        (0..self.d).map(|row| self.horizontal_qubit(row, k - 1)).collect()
    }

    /// Maps a physical qubit index into the frame of `side` (and back).
    #[inline]
    pub fn to_frame(&self, side: Side, q: usize) -> usize {
        match side {
            Side::Primal => q,
            Side::Dual => {
                let h = self.num_horizontal();
                if q < h {
                    (q % self.d) * self.d + q / self.d
                } else {
                    let w = self.row_len();
                    let v = q - h;
                    h + (v % w) * w + v / w
                }
            }
        }
    }

    /// Defect sites flipped by an error on frame qubit `q`.
    pub fn frame_qubit_sites(&self, q: usize) -> ([usize; 2], usize) {
        match self.qubit_pos(q) {
            QubitPos::Horizontal { row, col } => {
                let mut out = [0; 2];
                let mut len = 0;
                if col >= 1 {
                    out[len] = self.site_index(row, col - 1);
                    len += 1;
                }
                if col + 1 < self.d {
                    out[len] = self.site_index(row, col);
                    len += 1;
                }
                (out, len)
            }
            QubitPos::Vertical { row, col } => {
                ([self.site_index(row, col), self.site_index(row + 1, col)], 2)
            }
        }
    }

    /// Defect sites on `side` flipped by an error on physical qubit `q`.
    pub fn qubit_sites(&self, side: Side, q: usize) -> Vec<usize> {
        let (sites, len) = self.frame_qubit_sites(self.to_frame(side, q));
        sites[..len].to_vec()
    }

    /// Syndrome of a single-type error on `side`. The error holds physical
    /// qubit indices (Z flips for [`Side::Primal`], X flips for [`Side::Dual`]).
    pub fn syndrome_of(&self, error: &QubitSet, side: Side) -> Syndrome {
        let mut bits = vec![false; self.num_defect_sites()];
        for q in error.iter() {
            let (sites, len) = self.frame_qubit_sites(self.to_frame(side, q));
            for &s in &sites[..len] {
                bits[s] ^= true;
            }
        }
        let defects = bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
            .collect();
        Syndrome { side, defects }
    }

    /// Minimum-weight Z_L representative: the top row of horizontal qubits.
    pub fn z_logical(&self) -> QubitSet {
        QubitSet::from_sorted((0..self.d).map(|c| self.horizontal_qubit(0, c)).collect())
    }

    /// Minimum-weight X_L representative: the leftmost column of horizontal qubits.
    pub fn x_logical(&self) -> QubitSet {
        QubitSet::from_sorted(self.column(1))
    }

    /// The logical representative a residual of `side` must commute with.
    pub fn crossing_logical(&self, side: Side) -> QubitSet {
        match side {
            Side::Primal => self.x_logical(),
            Side::Dual => self.z_logical(),
        }
    }

    /// Whether a syndrome-free residual on `side` implements a logical operator.
    pub fn is_logical_failure(&self, residual: &QubitSet, side: Side) -> Result<bool> {
        let syndrome = self.syndrome_of(residual, side);
        if !syndrome.is_empty() {
            return Err(Error::ContractViolation(format!(
                "residual on {side} side leaves {} defects",
                syndrome.len()
            )));
        }
        Ok(residual.intersection_len(&self.crossing_logical(side)) % 2 == 1)
    }

    /// Physical qubit supports of the generators of `side`, indexed by site.
    pub fn generator_supports(&self, side: Side) -> Vec<Vec<usize>> {
        let mut supports = vec![Vec::new(); self.num_defect_sites()];
        for q in 0..self.n {
            for s in self.qubit_sites(side, q) {
                supports[s].push(q);
            }
        }
        supports
    }

    /// Geometry dump for `describe`.
    pub fn describe(&self) -> LatticeDescription {
        let qubits = (0..self.n)
            .map(|q| {
                let (kind, row, col, x, y) = match self.qubit_pos(q) {
                    QubitPos::Horizontal { row, col } => ("horizontal", row, col, 2 * col, 2 * row),
                    QubitPos::Vertical { row, col } => {
                        ("vertical", row, col, 2 * col + 1, 2 * row + 1)
                    }
                };
                QubitDescription {
                    index: q,
                    kind,
                    row,
                    col,
                    x,
                    y,
                    column: self.column_of(q),
                }
            })
            .collect();
        let generators = |side: Side, kind: &'static str| {
            self.generator_supports(side)
                .into_iter()
                .enumerate()
                .map(|(site, support)| {
                    let (row, col) = self.site_coords(site);
                    GeneratorDescription {
                        site,
                        kind,
                        row,
                        col,
                        support,
                    }
                })
                .collect()
        };
        LatticeDescription {
            schema: LATTICE_SCHEMA,
            d: self.d,
            t: self.t,
            n: self.n,
            num_defect_sites: self.num_defect_sites(),
            qubits,
            x_generators: generators(Side::Primal, "X"),
            z_generators: generators(Side::Dual, "Z"),
            columns: (1..=self.d).map(|k| self.column(k)).collect(),
            z_logical: self.z_logical().into_vec(),
            x_logical: self.x_logical().into_vec(),
        }
    }
}

pub const LATTICE_SCHEMA: &str = "bubblecode-lattice/1";

#[derive(Clone, Debug, Serialize)]
pub struct LatticeDescription {
    pub schema: &'static str,
    pub d: usize,
    pub t: usize,
    pub n: usize,
    pub num_defect_sites: usize,
    pub qubits: Vec<QubitDescription>,
    /// Primal defect sites; `row`/`col` are primal frame coordinates.
    pub x_generators: Vec<GeneratorDescription>,
    /// Dual defect sites; `row`/`col` are dual (transposed) frame coordinates.
    pub z_generators: Vec<GeneratorDescription>,
    pub columns: Vec<Vec<usize>>,
    pub z_logical: Vec<usize>,
    pub x_logical: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QubitDescription {
    pub index: usize,
    pub kind: &'static str,
    pub row: usize,
    pub col: usize,
    pub x: usize,
    pub y: usize,
    pub column: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorDescription {
    pub site: usize,
    pub kind: &'static str,
    pub row: usize,
    pub col: usize,
    pub support: Vec<usize>,
}
