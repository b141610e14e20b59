use serde::Serializer;
use std::fmt::Display;

/// Serializes through `Display`, for large integers and named types.
pub fn display<T: Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}
