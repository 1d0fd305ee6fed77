//! Session files, external ingestion and report output.

mod ingest;
mod report;
mod session;

pub(crate) use session::encode_quads;
pub use ingest::{ingest_external, ColumnMap, TimeUnit};
pub use report::{format_distance, format_p, write_csv_table, ReportBundle, Table};
pub use session::{
    parse_session, read_session, session_to_string, write_session, Session, SessionHeader, FORMAT_VERSION,
};
