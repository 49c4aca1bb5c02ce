//! Library surface of the command-line tool: the report structure and the
//! check catalogs, reusable by integration tests and scripting.

pub mod report;
