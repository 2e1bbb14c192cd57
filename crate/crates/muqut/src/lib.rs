//! File formats, bundled devices, LP export and the end-to-end mapping
//! pipeline on top of `muqut-core`.

pub mod device;
pub mod lp;
pub mod pipeline;
pub mod report;
pub mod text;

pub use muqut_core as core;
