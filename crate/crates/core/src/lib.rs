//! Constraint-grid puzzle engine.
//!
//! Generates, solves, renders and grades 20 grid-reasoning puzzle types, and
//! emits solution-target / reasoning-trace training records. The pipeline is
//! seed-deterministic end to end: identical inputs produce byte-identical
//! instances, renders, traces and reports.

pub mod constraint;
pub mod dataset;
pub mod generator;
pub mod grade;
pub mod grid;
pub mod instance;
pub mod query;
pub mod render;
pub mod rules;
pub mod sft;
pub mod solver;
pub mod symbol;

pub use grid::{CellState, Coord, Grid};
pub use instance::{Condition, Difficulty, PuzzleInstance, Structures};
pub use rules::PuzzleId;
pub use symbol::Symbol;
