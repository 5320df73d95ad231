pub mod cli;
pub mod geometry;
pub mod oracle;
pub mod poly;
pub mod rdp;
pub mod winding;
