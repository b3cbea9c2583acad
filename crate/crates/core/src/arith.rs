//! Java numeric semantics for Processing's `int` and `float`.

use crate::sketch::{BinaryOp, TypeName};

/// A number tagged with whether Java would type it as `int`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num {
    pub v: f64,
    pub int: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithError {
    DivisionByZero,
    NotFinite,
}

impl std::fmt::Display for ArithError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArithError::DivisionByZero => "division by zero",
            ArithError::NotFinite => "arithmetic produced a non-finite value",
        })
    }
}

fn wrap_i32(v: i64) -> f64 {
    v as i32 as f64
}

impl Num {
    pub fn int(v: f64) -> Num {
        Num {
            v: wrap_i32(v as i64),
            int: true,
        }
    }

    pub fn float(v: f64) -> Num {
        Num { v, int: false }
    }

    /// Converts for storage in a variable of type `ty`; ints truncate.
    pub fn coerce(self, ty: TypeName) -> Num {
        match ty {
            TypeName::Int | TypeName::Color => Num::int(self.v.trunc()),
            _ => Num::float(self.v),
        }
    }

    /// Applies an arithmetic operator. Comparison and logical operators
    /// return `None`.
    pub fn binary(op: BinaryOp, a: Num, b: Num) -> Option<Result<Num, ArithError>> {
        if !op.is_arithmetic() {
            return None;
        }
        let both_int = a.int && b.int;
        let result = if both_int {
            let (x, y) = (a.v as i64, b.v as i64);
            match op {
                BinaryOp::Add => Ok(x.wrapping_add(y)),
                BinaryOp::Sub => Ok(x.wrapping_sub(y)),
                BinaryOp::Mul => Ok(x.wrapping_mul(y)),
                BinaryOp::Div if y == 0 => Err(ArithError::DivisionByZero),
                BinaryOp::Div => Ok((x as i32).wrapping_div(y as i32) as i64),
                BinaryOp::Rem if y == 0 => Err(ArithError::DivisionByZero),
                _ => Ok((x as i32).wrapping_rem(y as i32) as i64),
            }
            .map(|v| Num::int(v as f64))
        } else {
            let (x, y) = (a.v, b.v);
            let v = match op {
                BinaryOp::Add => Ok(x + y),
                BinaryOp::Sub => Ok(x - y),
                BinaryOp::Mul => Ok(x * y),
                BinaryOp::Div | BinaryOp::Rem if y == 0.0 => Err(ArithError::DivisionByZero),
                BinaryOp::Div => Ok(x / y),
                _ => Ok(x % y),
            };
            v.and_then(|v| {
                if v.is_finite() {
                    Ok(Num::float(v))
                } else {
                    Err(ArithError::NotFinite)
                }
            })
        };
        Some(result)
    }
}

/// Whether a pure builtin returns an `int` for arguments of the given kinds.
pub fn pure_returns_int(name: &str, args: &[Num]) -> bool {
    match name {
        "int" | "round" | "floor" | "ceil" => true,
        "abs" | "min" | "max" | "constrain" => args.iter().all(|a| a.int),
        _ => false,
    }
}

impl std::ops::Neg for Num {
    type Output = Num;

    fn neg(self) -> Num {
        if self.int {
            Num::int(-self.v)
        } else {
            Num::float(-self.v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(o: BinaryOp, a: Num, b: Num) -> Result<Num, ArithError> {
        Num::binary(o, a, b).unwrap()
    }

    #[test]
    fn integer_division_truncates_toward_zero() {
        assert_eq!(op(BinaryOp::Div, Num::int(7.0), Num::int(2.0)).unwrap(), Num::int(3.0));
        assert_eq!(
            op(BinaryOp::Div, Num::int(-7.0), Num::int(2.0)).unwrap(),
            Num::int(-3.0)
        );
        assert_eq!(
            op(BinaryOp::Rem, Num::int(-7.0), Num::int(2.0)).unwrap(),
            Num::int(-1.0)
        );
        assert_eq!(
            op(BinaryOp::Div, Num::int(7.0), Num::float(2.0)).unwrap(),
            Num::float(3.5)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            op(BinaryOp::Div, Num::float(1.0), Num::float(0.0)),
            Err(ArithError::DivisionByZero)
        );
        assert_eq!(
            op(BinaryOp::Rem, Num::int(1.0), Num::int(0.0)),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn int_overflow_wraps() {
        let max = Num::int(i32::MAX as f64);
        assert_eq!(op(BinaryOp::Add, max, Num::int(1.0)).unwrap().v, i32::MIN as f64);
    }

    #[test]
    fn comparison_is_not_arithmetic() {
        assert!(Num::binary(BinaryOp::Lt, Num::int(1.0), Num::int(2.0)).is_none());
    }
}
