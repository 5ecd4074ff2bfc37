//! Workspace management, batch commands and the HTTP API for
//! climate-vulnerability assessments built on `ccvi-core`.

pub mod api;
pub mod fire;
pub mod fixture;
pub mod ingest;
pub mod workspace;
