//! Library half of the `aloha-lab` command-line tool: typed output records,
//! deterministic CSV/JSON rendering, grid parsing and the validation suites.

pub mod grid;
pub mod output;
pub mod records;
pub mod suites;
