//! Site-file front end: parsing, validation, command dispatch, and reports.

pub mod commands;
pub mod model;
pub mod report;
pub mod syntax;
