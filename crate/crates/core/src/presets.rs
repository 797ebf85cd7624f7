//! Named targets used by the examples, the tests and the command line.

use crate::model::{load_target, ApproxSet, ModelError, TargetPoint};

/// `(1, sqrt 2)`
pub const SQRT2: &str = r#"{"n":1,"coords":[
  {"type":"rational","value":1},
  {"type":"algebraic","minpoly":[-2,0,1],"interval":[1,2]}]}"#;

/// `(1, 2^(1/3), 4^(1/3))`
pub const CUBIC: &str = r#"{"n":2,"coords":[
  {"type":"rational","value":1},
  {"type":"algebraic","minpoly":[-2,0,0,1],"interval":[1,2]},
  {"type":"algebraic","minpoly":[-4,0,0,1],"interval":[1,2]}]}"#;

/// `(1, sqrt 2)` restricted to even `x_0`.
pub const SQRT2_EVEN: &str = r#"{"n":1,"coords":[
  {"type":"rational","value":1},
  {"type":"algebraic","minpoly":[-2,0,1],"interval":[1,2]}],
  "S":{"type":"congruence","modulus":2,"residues":{"0":[0]}}}"#;

/// `(1, sqrt 2, sqrt 3)`
pub const SQRT2_SQRT3: &str = r#"{"n":2,"coords":[
  {"type":"rational","value":1},
  {"type":"algebraic","minpoly":[-2,0,1],"interval":[1,2]},
  {"type":"algebraic","minpoly":[-3,0,1],"interval":[1,2]}]}"#;

pub const NAMES: [&str; 4] = ["sqrt2", "cubic", "sqrt2-even", "sqrt2-sqrt3"];

pub fn document(name: &str) -> Option<&'static str> {
    match name {
        "sqrt2" => Some(SQRT2),
        "cubic" => Some(CUBIC),
        "sqrt2-even" => Some(SQRT2_EVEN),
        "sqrt2-sqrt3" => Some(SQRT2_SQRT3),
        _ => None,
    }
}

pub fn load(name: &str) -> Result<(TargetPoint, ApproxSet), ModelError> {
    let doc = document(name).ok_or_else(|| ModelError::Schema(format!("unknown preset {name:?}")))?;
    load_target(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_load() {
        for name in NAMES {
            let (xi, set) = load(name).unwrap();
            assert!(xi.n() >= 1);
            assert!(set.validate(xi.n() + 1).is_ok());
        }
        assert!(load("nope").is_err());
    }
}
