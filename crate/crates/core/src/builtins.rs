//! Pure Processing functions and constants shared by the static evaluator
//! and the runtime, so both agree on every value they can both compute.

use std::f64::consts::PI;

pub fn named_constant(name: &str) -> Option<f64> {
    Some(match name {
        "PI" => PI,
        "HALF_PI" => PI / 2.0,
        "QUARTER_PI" => PI / 4.0,
        "TWO_PI" | "TAU" => PI * 2.0,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum PureError {
    Arity {
        name: &'static str,
        expected: &'static str,
        found: usize,
    },
    Domain(&'static str),
}

/// Evaluates a side-effect-free numeric builtin. Returns `None` when `name`
/// is not one.
pub fn pure_numeric(name: &str, args: &[f64]) -> Option<Result<f64, PureError>> {
    let arity = |name: &'static str, expected: &'static str| {
        Err(PureError::Arity {
            name,
            expected,
            found: args.len(),
        })
    };
    let result = match (name, args) {
        ("abs", [x]) => Ok(x.abs()),
        ("abs", _) => arity("abs", "1"),
        ("sqrt", [x]) if *x < 0.0 => Err(PureError::Domain("sqrt of a negative number")),
        ("sqrt", [x]) => Ok(x.sqrt()),
        ("sqrt", _) => arity("sqrt", "1"),
        ("sq", [x]) => Ok(x * x),
        ("sq", _) => arity("sq", "1"),
        ("pow", [b, e]) => Ok(b.powf(*e)),
        ("pow", _) => arity("pow", "2"),
        ("floor", [x]) => Ok(x.floor()),
        ("floor", _) => arity("floor", "1"),
        ("ceil", [x]) => Ok(x.ceil()),
        ("ceil", _) => arity("ceil", "1"),
        ("round", [x]) => Ok((x + 0.5).floor()),
        ("round", _) => arity("round", "1"),
        ("int", [x]) => Ok(x.trunc()),
        ("int", _) => arity("int", "1"),
        ("float", [x]) => Ok(*x),
        ("float", _) => arity("float", "1"),
        ("min", [a, rest @ ..]) if !rest.is_empty() => Ok(rest.iter().fold(*a, |m, v| m.min(*v))),
        ("min", _) => arity("min", "2 or more"),
        ("max", [a, rest @ ..]) if !rest.is_empty() => Ok(rest.iter().fold(*a, |m, v| m.max(*v))),
        ("max", _) => arity("max", "2 or more"),
        ("constrain", [v, lo, hi]) => Ok(v.max(*lo).min(*hi)),
        ("constrain", _) => arity("constrain", "3"),
        ("dist", [x1, y1, x2, y2]) => Ok(((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt()),
        ("dist", _) => arity("dist", "4"),
        ("lerp", [a, b, t]) => Ok(a + (b - a) * t),
        ("lerp", _) => arity("lerp", "3"),
        ("map", [v, lo1, hi1, lo2, hi2]) => {
            if hi1 == lo1 {
                Err(PureError::Domain("map over an empty range"))
            } else {
                Ok(lo2 + (hi2 - lo2) * (v - lo1) / (hi1 - lo1))
            }
        }
        ("map", _) => arity("map", "5"),
        ("sin", [x]) => Ok(x.sin()),
        ("sin", _) => arity("sin", "1"),
        ("cos", [x]) => Ok(x.cos()),
        ("cos", _) => arity("cos", "1"),
        ("tan", [x]) => Ok(x.tan()),
        ("tan", _) => arity("tan", "1"),
        ("atan2", [y, x]) => Ok(y.atan2(*x)),
        ("atan2", _) => arity("atan2", "2"),
        ("radians", [x]) => Ok(x.to_radians()),
        ("radians", _) => arity("radians", "1"),
        ("degrees", [x]) => Ok(x.to_degrees()),
        ("degrees", _) => arity("degrees", "1"),
        _ => return None,
    };
    Some(result.and_then(|v| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(PureError::Domain("result is not a finite number"))
        }
    }))
}

impl std::fmt::Display for PureError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PureError::Arity { name, expected, found } => {
                write!(f, "{name}() takes {expected} argument(s), {found} given")
            }
            PureError::Domain(msg) => f.write_str(msg),
        }
    }
}
