//! Tables of counts along one comb parameter, cross-engine verification, a
//! persistent result cache and an OEIS lookup client.

pub mod cache;
pub mod fixtures;
pub mod oeis;
pub mod table;
pub mod verify;

pub use cache::{Cache, CacheError};
pub use oeis::{Lookup, OeisClient, OeisError, OeisMatch};
pub use table::{
    build_table, build_table_with, render, Axis, Format, MethodChoice, SequenceError, SequenceKey,
    SequenceRecord, Source, Span,
};
pub use verify::{verify_all, verify_with, CheckLine, Outcome, VerificationReport};
