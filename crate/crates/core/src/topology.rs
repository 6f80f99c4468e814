//! Sensor field generation and base-station placement.
//!
//! Nodes are placed uniformly at random in a `width x height` rectangle from
//! the placement stream of the master seed; the base station sits outside the
//! field at `(0.5*width, 1.75*height)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{Rng, StreamId};

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance. Written as `sqrt(dx^2 + dy^2)` rather than
    /// `hypot` so the result is bitwise identical across libm versions.
    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// A sensor node: position, residual energy and liveness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub pos: Point,
    /// Residual energy in joules, clamped at zero on death.
    pub energy: f64,
    pub alive: bool,
}

/// Field geometry and initial-energy configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub n_nodes: usize,
    pub width: f64,
    pub height: f64,
    /// Initial battery of every node, joules.
    pub initial_energy: f64,
    pub rng_seed: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            n_nodes: 500,
            width: 100.0,
            height: 100.0,
            initial_energy: 0.5,
            rng_seed: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("field.n_nodes must be at least 2 (got {0})")]
    TooFewNodes(usize),
    #[error("field.{0} must be strictly positive")]
    NonPositive(&'static str),
}

impl FieldConfig {
    pub fn validate(&self) -> Result<(), FieldError> {
        if self.n_nodes < 2 {
            return Err(FieldError::TooFewNodes(self.n_nodes));
        }
        if !(self.width > 0.0) {
            return Err(FieldError::NonPositive("width"));
        }
        if !(self.height > 0.0) {
            return Err(FieldError::NonPositive("height"));
        }
        if self.initial_energy < 0.0 {
            return Err(FieldError::NonPositive("initial_energy"));
        }
        Ok(())
    }

    pub fn diagonal(&self) -> f64 {
        (self.width * self.width + self.height * self.height).sqrt()
    }
}

/// Generate the node list for `cfg`. Deterministic for a fixed seed.
pub fn generate_field(cfg: &FieldConfig) -> Result<Vec<Node>, FieldError> {
    cfg.validate()?;
    let mut rng = Rng::stream(cfg.rng_seed, StreamId::Placement);
    let nodes = (0..cfg.n_nodes)
        .map(|id| {
            let x = rng.next_f64() * cfg.width;
            let y = rng.next_f64() * cfg.height;
            Node {
                id,
                pos: Point::new(x, y),
                energy: cfg.initial_energy,
                alive: cfg.initial_energy > 0.0,
            }
        })
        .collect();
    Ok(nodes)
}

/// Base station position: centered in x, half a field-height beyond the far
/// edge in y, so it always lies strictly outside the sensing area.
pub fn base_station_position(cfg: &FieldConfig) -> Point {
    Point::new(0.5 * cfg.width, 0.75 * cfg.height + cfg.height)
}
