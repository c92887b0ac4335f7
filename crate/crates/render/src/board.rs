//! Board functions: cover a surface with boards, each cut from its own
//! hashed place in the tree.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use xylem::grid::{hash_u64, CellHashSeed};
use xylem::linalg::{Mat3, Vec3};
use xylem::FieldError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum BoardKind {
    /// Rows of boards along `u`, each row with a hashed stagger.
    #[default]
    Parallel,
    /// Square rings of boards around the origin, mitred on the diagonals,
    /// running clockwise.
    NestedSquare,
}

/// Axis-aligned box in tree space that board origins are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BoardPattern {
    #[serde(default)]
    pub kind: BoardKind,
    /// Board length and width in world units.
    pub board: [f64; 2],
    /// In-plane grain rotation applied to every board, radians.
    #[serde(default)]
    pub rotation: f64,
    pub region: Region,
}

impl Default for BoardPattern {
    fn default() -> Self {
        Self {
            kind: BoardKind::Parallel,
            board: [60.0, 8.0],
            rotation: 0.0,
            region: Region { min: [30.0, -20.0, -500.0], max: [80.0, 20.0, 500.0] },
        }
    }
}

impl BoardPattern {
    pub fn validate(&self, path: &str, errors: &mut Vec<FieldError>) {
        if !self.board.iter().all(|b| *b > 0.0 && b.is_finite()) {
            errors.push(FieldError::new(format!("{path}.board"), "board dimensions must be positive"));
        }
        if !self.rotation.is_finite() {
            errors.push(FieldError::new(format!("{path}.rotation"), "must be finite"));
        }
        let r = &self.region;
        if !(0..3).all(|a| r.min[a].is_finite() && r.max[a].is_finite() && r.min[a] <= r.max[a]) {
            errors.push(FieldError::new(format!("{path}.region"), "min must not exceed max"));
        }
    }
}

/// Identifies one board: row or ring, side of a ring, and slot along it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoardId {
    pub band: i64,
    pub side: i64,
    pub slot: i64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoardSample {
    pub id: BoardId,
    /// Tree-space point.
    pub tree: Vec3<f64>,
    /// Columns are the tree-space images of the surface `u`, `v` and normal.
    pub frame: Mat3<f64>,
    /// Surface direction of the board's length; across is this turned a
    /// quarter turn toward `v`.
    pub along: [f64; 2],
    /// Offset from the designated corner, along and across the board.
    pub offset: [f64; 2],
}

const BOARD_SALT: i64 = 0x626f_6172_64;

fn unit_hash(seed: CellHashSeed, parts: &[i64]) -> f64 {
    (hash_u64(seed.0, parts) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Where the board's designated corner sits in the tree.
pub fn board_origin(pattern: &BoardPattern, id: BoardId, seed: CellHashSeed) -> Vec3<f64> {
    let kind = pattern.kind as i64;
    let r = &pattern.region;
    let c = |axis: i64| {
        let a = axis as usize;
        r.min[a] + unit_hash(seed, &[BOARD_SALT, kind, id.band, id.side, id.slot, axis]) * (r.max[a] - r.min[a])
    };
    Vec3::new(c(0), c(1), c(2))
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Board, along-direction and corner containing surface point `s`.
fn locate(pattern: &BoardPattern, s: [f64; 2], seed: CellHashSeed) -> (BoardId, [f64; 2], [f64; 2]) {
    let [len, width] = pattern.board;
    match pattern.kind {
        BoardKind::Parallel => {
            let band = (s[1] / width).floor();
            let b = band as i64;
            let stagger = unit_hash(seed, &[BOARD_SALT, -1, b]) * len;
            let slot = ((s[0] + stagger) / len).floor();
            let corner = [slot * len - stagger, band * width];
            (BoardId { band: b, side: 0, slot: slot as i64 }, [1.0, 0.0], corner)
        }
        BoardKind::NestedSquare => {
            let ring = (s[0].abs().max(s[1].abs()) / width).floor();
            let half = (ring + 1.0) * width;
            // Right, bottom, left, top: along-direction and starting corner.
            let (side, along, start) = if s[0].abs() >= s[1].abs() {
                if s[0] >= 0.0 {
                    (0, [0.0, 1.0], [half, -half])
                } else {
                    (2, [0.0, -1.0], [-half, half])
                }
            } else if s[1] >= 0.0 {
                (1, [-1.0, 0.0], [half, half])
            } else {
                (3, [1.0, 0.0], [-half, -half])
            };
            let t = dot2([s[0] - start[0], s[1] - start[1]], along);
            let slot = (t / len).floor();
            let corner = [start[0] + along[0] * slot * len, start[1] + along[1] * slot * len];
            (BoardId { band: ring as i64, side, slot: slot as i64 }, along, corner)
        }
    }
}

/// Maps a surface point to the tree. Boards show tangential faces: the board
/// length follows the grain (`ẑ`) and the face normal is `x̂`, both turned
/// by the pattern's rotation about that normal.
pub fn board_map(pattern: &BoardPattern, s: [f64; 2], seed: CellHashSeed) -> BoardSample {
    let (id, along, corner) = locate(pattern, s, seed);
    let across = [-along[1], along[0]];
    let d = [s[0] - corner[0], s[1] - corner[1]];
    let offset = [dot2(d, along), dot2(d, across)];
    let (sr, cr) = pattern.rotation.sin_cos();
    let (z, neg_y) = (Vec3::z_axis(), -Vec3::y_axis());
    let grain = z * cr + neg_y * sr;
    let cross = z * -sr + neg_y * cr;
    let origin = board_origin(pattern, id, seed);
    let tree = origin + grain * offset[0] + cross * offset[1];
    // Surface axis e maps to grain·(e·along) + cross·(e·across).
    let u = grain * along[0] + cross * across[0];
    let v = grain * along[1] + cross * across[1];
    BoardSample { id, tree, frame: Mat3::from_cols(u, v, u.cross(v)), along, offset }
}
