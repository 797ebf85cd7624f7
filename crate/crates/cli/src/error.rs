use std::fmt;

use dlab_core::construction::ConstructionError;
use dlab_core::minpoints::MinpointsError;
use dlab_core::model::ModelError;
use dlab_core::spectra::SpectraError;
use dlab_core::transference::TransferenceError;
use serde::Serialize;

/// What a failed command prints as JSON on stderr.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn io(message: String) -> Self {
        CliError { kind: "Io".into(), message }
    }

    pub fn schema(message: String) -> Self {
        CliError { kind: "SchemaError".into(), message }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: "Usage".into(), message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

const WRAPPERS: [&str; 6] = ["Model", "Minpoints", "Rigorous", "Construction", "Transference", "Spectra"];

/// The innermost variant name of a nested error, from its `Debug` text.
fn leaf_kind(debug: &str) -> String {
    let mut s = debug;
    loop {
        let end = s.find(|c: char| !c.is_alphanumeric() && c != '_').unwrap_or(s.len());
        let name = &s[..end];
        if WRAPPERS.contains(&name) && s[end..].starts_with('(') {
            s = &s[end + 1..];
            continue;
        }
        return name.to_string();
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError { kind: leaf_kind(&format!("{e:?}")), message: e.to_string() }
            }
        }
    )*};
}

from_core!(ModelError, MinpointsError, ConstructionError, TransferenceError, SpectraError);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_kinds_unwrap() {
        assert_eq!(leaf_kind("Minpoints(Model(ZeroPoint))"), "ZeroPoint");
        assert_eq!(leaf_kind("SandwichViolated { x: 1.0 }"), "SandwichViolated");
        assert_eq!(leaf_kind("Domain(\"x\")"), "Domain");
    }
}
