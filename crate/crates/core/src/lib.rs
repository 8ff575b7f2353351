pub mod padic;
pub mod series;
pub mod log_transform;
pub mod oracle;
pub mod vanishing;
pub mod dieudonne;
pub mod report;
pub mod curve;
pub mod io;
pub mod acceptance;
