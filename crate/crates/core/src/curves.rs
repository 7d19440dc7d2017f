//! Space-filling curves over a `2^n x 2^n` grid, materialized as lookup tables.
//!
//! Every curve starts at the top-left cell `(0, 0)`. Rows grow downward and
//! columns grow rightward. The Hilbert curve is oriented so that its first
//! half fills the top half of the grid, which makes the used region of a
//! partially filled image a prefix of rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported order. `4^15 = 2^30` cells still fit a `u32` index.
pub const MAX_ORDER: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Hilbert,
    Reshape,
    Snake,
    DiagSnake,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::Hilbert,
        CurveKind::Reshape,
        CurveKind::Snake,
        CurveKind::DiagSnake,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Hilbert => "hilbert",
            CurveKind::Reshape => "reshape",
            CurveKind::Snake => "snake",
            CurveKind::DiagSnake => "diagsnake",
        }
    }

    /// Whether consecutive indices always land on 4-neighbouring cells.
    pub fn is_continuous(self) -> bool {
        matches!(self, CurveKind::Hilbert | CurveKind::Snake)
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "hilbert" => Ok(CurveKind::Hilbert),
            "reshape" => Ok(CurveKind::Reshape),
            "snake" => Ok(CurveKind::Snake),
            "diagsnake" => Ok(CurveKind::DiagSnake),
            _ => Err(format!(
                "unknown curve {s:?} (expected hilbert, reshape, snake or diagsnake)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub row: u32,
    pub col: u32,
}

impl GridPoint {
    pub const fn new(row: u32, col: u32) -> Self {
        GridPoint { row, col }
    }

    pub fn euclidean(self, other: GridPoint) -> f64 {
        let dr = f64::from(self.row) - f64::from(other.row);
        let dc = f64::from(self.col) - f64::from(other.col);
        dr.hypot(dc)
    }

    pub fn manhattan(self, other: GridPoint) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A bijection between sequence indices `[0, 4^n)` and the cells of a
/// `2^n x 2^n` grid. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveMapping {
    kind: CurveKind,
    order: u32,
    side: u32,
    forward: Vec<GridPoint>,
    // row-major cell -> sequence index
    inverse: Vec<u32>,
}

/// Builds the lookup tables for `kind` at order `order`.
pub fn generate_curve(kind: CurveKind, order: u32) -> Result<CurveMapping> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        });
    }
    let side = 1u32 << order;
    let forward = match kind {
        CurveKind::Hilbert => hilbert_points(order),
        CurveKind::Reshape => reshape_points(side),
        CurveKind::Snake => snake_points(side),
        CurveKind::DiagSnake => diag_snake_points(side),
    };
    let mut inverse = vec![u32::MAX; forward.len()];
    for (i, p) in forward.iter().enumerate() {
        let cell = p.row as usize * side as usize + p.col as usize;
        debug_assert_eq!(inverse[cell], u32::MAX, "cell visited twice");
        inverse[cell] = i as u32;
    }
    Ok(CurveMapping {
        kind,
        order,
        side,
        forward,
        inverse,
    })
}

impl CurveMapping {
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Grid side length, `2^order`.
    pub fn side(&self) -> u32 {
        self.side
    }

    /// Number of cells, `4^order`.
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.forward
    }

    pub fn index_to_point(&self, index: usize) -> Result<GridPoint> {
        self.forward
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.forward.len(),
            })
    }

    pub fn point_to_index(&self, point: GridPoint) -> Result<usize> {
        if point.row >= self.side || point.col >= self.side {
            return Err(Error::PointOutOfRange {
                row: point.row,
                col: point.col,
                side: self.side,
            });
        }
        let cell = point.row as usize * self.side as usize + point.col as usize;
        Ok(self.inverse[cell] as usize)
    }
}

pub fn index_to_point(mapping: &CurveMapping, index: usize) -> Result<GridPoint> {
    mapping.index_to_point(index)
}

pub fn point_to_index(mapping: &CurveMapping, point: GridPoint) -> Result<usize> {
    mapping.point_to_index(point)
}

// Order n is four copies of order n-1: top-left (transposed), top-right,
// bottom-right, bottom-left (anti-transposed). The base curve starts at
// (0, 0) and ends at (side-1, 0).
fn hilbert_points(order: u32) -> Vec<GridPoint> {
    let mut points = vec![GridPoint::new(0, 0)];
    for level in 0..order {
        let s = 1u32 << level;
        let mut next = Vec::with_capacity(points.len() * 4);
        next.extend(points.iter().map(|p| GridPoint::new(p.col, p.row)));
        next.extend(points.iter().map(|p| GridPoint::new(p.row, p.col + s)));
        next.extend(points.iter().map(|p| GridPoint::new(p.row + s, p.col + s)));
        next.extend(
            points
                .iter()
                .map(|p| GridPoint::new(s + (s - 1 - p.col), s - 1 - p.row)),
        );
        points = next;
    }
    points
}

fn reshape_points(side: u32) -> Vec<GridPoint> {
    (0..side)
        .flat_map(|row| (0..side).map(move |col| GridPoint::new(row, col)))
        .collect()
}

fn snake_points(side: u32) -> Vec<GridPoint> {
    (0..side)
        .flat_map(|row| {
            (0..side).map(move |c| {
                let col = if row % 2 == 0 { c } else { side - 1 - c };
                GridPoint::new(row, col)
            })
        })
        .collect()
}

// Anti-diagonals r + c = d, alternating direction. Even diagonals run
// bottom-left to top-right, odd ones top-right to bottom-left.
fn diag_snake_points(side: u32) -> Vec<GridPoint> {
    let mut points = Vec::with_capacity(side as usize * side as usize);
    for d in 0..(2 * side - 1) {
        let lo = d.saturating_sub(side - 1);
        let hi = d.min(side - 1);
        if d % 2 == 0 {
            points.extend((lo..=hi).rev().map(|row| GridPoint::new(row, d - row)));
        } else {
            points.extend((lo..=hi).map(|row| GridPoint::new(row, d - row)));
        }
    }
    points
}
