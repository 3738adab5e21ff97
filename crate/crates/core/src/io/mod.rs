//! File formats: TOML network documents, CSV ground profiles and
//! cross-section tables, JSON run reports and solutions, SVG profile plots.
//!
//! Floating-point values are written in Rust's shortest round-trip form, so
//! reading a written file gives back the same bits.

mod network;
mod report;
mod sections;
mod svg;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use network::{
    apply_profile, load_network, load_profile, network_from_toml, network_to_toml, read_profile,
    save_network, write_profile, GroundProfile, PROFILE_HEADER,
};
pub use report::{
    load_report, load_solution, summary_text, write_report, write_solution, InstanceSummary,
    Report, RoadResult, SolutionFile, SolverSummary, Timing,
};
pub use sections::{
    load_cross_sections, read_cross_sections, save_cross_sections, write_cross_sections,
    SECTION_HEADER,
};
pub use svg::{profile_plot, profile_svg, write_profile_svg, ProfilePlot, RoadPlot};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
