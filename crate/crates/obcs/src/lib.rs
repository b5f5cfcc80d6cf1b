//! File formats, parallel experiment runners, SVG plots and the `obcs`
//! command-line tool built on [`obcs_core`].

pub mod cli;
pub mod formats;
pub mod runner;
pub mod svg;
