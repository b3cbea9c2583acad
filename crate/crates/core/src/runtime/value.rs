use std::fmt;

use crate::arith::Num;
use crate::sketch::Builtin;

/// Set of globals and system variables a value was computed from.
///
/// Bits `0..7` are the builtins in [`Builtin::ALL`] order; globals follow in
/// declaration order. Globals past the capacity share the last bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Prov([u64; 4]);

pub const PROV_CAPACITY: usize = 256;

impl Prov {
    pub const EMPTY: Prov = Prov([0; 4]);

    pub fn single(bit: usize) -> Prov {
        let bit = bit.min(PROV_CAPACITY - 1);
        let mut p = Prov::EMPTY;
        p.0[bit / 64] |= 1 << (bit % 64);
        p
    }

    pub fn builtin(b: Builtin) -> Prov {
        let i = Builtin::ALL.iter().position(|x| *x == b).unwrap_or(0);
        Prov::single(i)
    }

    pub fn global(index: usize) -> Prov {
        Prov::single(Builtin::ALL.len() + index)
    }

    pub fn union(self, other: Prov) -> Prov {
        let mut out = self;
        for (a, b) in out.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        out
    }

    pub fn contains(self, other: Prov) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| a & b == b)
    }

    pub fn is_empty(self) -> bool {
        self.0 == [0; 4]
    }

    pub fn has_builtin(self, b: Builtin) -> bool {
        self.contains(Prov::builtin(b))
    }

    pub fn has_global(self, index: usize) -> bool {
        self.contains(Prov::global(index))
    }

    /// Global indices in this set, ascending.
    pub fn globals(self) -> impl Iterator<Item = usize> {
        (Builtin::ALL.len()..PROV_CAPACITY)
            .filter(move |bit| self.0[bit / 64] & (1 << (bit % 64)) != 0)
            .map(|bit| bit - Builtin::ALL.len())
    }

    pub fn builtins(self) -> impl Iterator<Item = Builtin> {
        Builtin::ALL.into_iter().filter(move |b| self.has_builtin(*b))
    }
}

impl fmt::Debug for Prov {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.builtins().map(Builtin::name))
            .entries(self.globals().map(|g| format!("g{g}")))
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(Num),
    Bool(bool),
    Text(String),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Number(n) if n.int => "int",
            Value::Number(_) => "float",
            Value::Bool(_) => "boolean",
            Value::Text(_) => "String",
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(n.v),
            _ => None,
        }
    }

    /// Java's string conversion, as used by `+` and `text()`.
    pub fn to_java_string(&self) -> String {
        match self {
            Value::Number(n) if n.int => format!("{}", n.v as i64),
            Value::Number(n) => java_float(n.v),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

fn java_float(v: f64) -> String {
    let f = v as f32;
    if f.fract() == 0.0 && f.abs() < 1e7 {
        format!("{f:.1}")
    } else {
        format!("{f}")
    }
}

/// A value with the provenance it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracked {
    pub value: Value,
    pub prov: Prov,
}

impl Tracked {
    pub fn plain(value: Value) -> Tracked {
        Tracked {
            value,
            prov: Prov::EMPTY,
        }
    }

    pub fn num(n: Num, prov: Prov) -> Tracked {
        Tracked {
            value: Value::Number(n),
            prov,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_sets() {
        let a = Prov::global(0).union(Prov::builtin(Builtin::Width));
        assert!(a.has_global(0));
        assert!(a.has_builtin(Builtin::Width));
        assert!(!a.has_global(1));
        assert_eq!(a.globals().collect::<Vec<_>>(), [0]);
        assert_eq!(Prov::global(10_000), Prov::single(PROV_CAPACITY - 1));
    }

    #[test]
    fn java_strings() {
        assert_eq!(Value::Number(Num::int(5.0)).to_java_string(), "5");
        assert_eq!(Value::Number(Num::float(5.0)).to_java_string(), "5.0");
        assert_eq!(Value::Number(Num::float(2.5)).to_java_string(), "2.5");
    }
}
