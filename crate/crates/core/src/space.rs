//! Rectangular environments partitioned into unit squares.

use crate::error::{Error, Result};
use rand::Rng;

/// The half-open rectangle `[0, width) x [0, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Environment {
    width: u32,
    height: u32,
}

impl Environment {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid("width", "must be at least 1"));
        }
        if height == 0 {
            return Err(Error::invalid("height", "must be at least 1"));
        }
        Ok(Environment { width, height })
    }

    pub fn square(side: u32) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of unit squares.
    pub fn cells(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn area(&self) -> f64 {
        f64::from(self.width) * f64::from(self.height)
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < f64::from(self.width) && p.y < f64::from(self.height)
    }

    /// The unit square containing `p`. `p` must lie in the environment.
    pub fn neighborhood_of(&self, p: Position) -> Neighborhood {
        debug_assert!(self.contains(p), "{p:?} outside {self:?}");
        Neighborhood {
            i: (p.x.floor() as u32).min(self.width - 1),
            j: (p.y.floor() as u32).min(self.height - 1),
        }
    }

    /// Row-major index of a unit square.
    pub fn cell_index(&self, n: Neighborhood) -> usize {
        n.j as usize * self.width as usize + n.i as usize
    }

    pub fn is_valid_neighborhood(&self, n: Neighborhood) -> bool {
        n.i < self.width && n.j < self.height
    }

    pub fn sample_position<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        Position {
            x: rng.gen_range(0.0..f64::from(self.width)),
            y: rng.gen_range(0.0..f64::from(self.height)),
        }
    }

    /// `p` displaced by one unit in direction `theta`, or `p` itself when the
    /// displaced point leaves the environment.
    pub fn unit_step(&self, p: Position, theta: f64) -> Position {
        let moved = Position {
            x: p.x + theta.cos(),
            y: p.y + theta.sin(),
        };
        if self.contains(moved) {
            moved
        } else {
            p
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// The unit square `[i, i+1) x [j, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neighborhood {
    pub i: u32,
    pub j: u32,
}

impl Neighborhood {
    pub fn contains(&self, p: Position) -> bool {
        let (i, j) = (f64::from(self.i), f64::from(self.j));
        p.x >= i && p.x < i + 1.0 && p.y >= j && p.y < j + 1.0
    }
}
