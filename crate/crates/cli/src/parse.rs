//! Recursive-descent parser for the polynomial input language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr     := ("+" | "-")? term (("+" | "-") term)*
//! term     := factor ("*" factor)*
//! factor   := coef | var | "(" expr ")"
//! var      := "z" uint ("^" uint)?
//! coef     := rational "i"? | "i" | "(" rational ("+" | "-") rational "i" ")"
//! rational := "-"? uint ("/" uint)?
//! ```
//!
//! Variables are `z1..zd`, 1-based. Coefficients are exact rationals;
//! complex values use the parenthesized form `(re + im i)` or the bare
//! imaginary forms `i`, `2i`, `3/2 i`. Errors carry the byte offset of the
//! offending token.

use fischer_core::{ComplexRational, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses an expression into an exact polynomial in `dim` variables.
pub fn parse_expression(text: &str, dim: usize) -> Result<Polynomial, ParseError> {
    if dim == 0 {
        return Err(ParseError {
            offset: 0,
            message: "dimension must be positive".into(),
        });
    }
    let mut parser = Parser {
        input: text.as_bytes(),
        pos: 0,
        dim,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.input.len() {
        return Err(parser.err_here("unexpected trailing input"));
    }
    Ok(poly)
}

/// Canonical printer; `parse_expression(print_expression(p), p.dim()) == p`.
pub fn print_expression(p: &Polynomial) -> String {
    p.to_string()
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err_here(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn err_at(&self, offset: usize, message: &str) -> ParseError {
        ParseError {
            offset,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(&format!("expected '{}'", byte as char)))
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err_here("expected a digit"));
        }
        let s = std::str::from_utf8(&self.input[start..self.pos]).expect("ascii digits");
        Ok(s.parse::<BigInt>().expect("digit run"))
    }

    fn small_uint(&mut self, what: &str) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.digits()?;
        u32::try_from(n).map_err(|_| self.err_at(start, &format!("{what} out of range")))
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let negative = self.eat(b'-');
        let mut numer = self.digits()?;
        if negative {
            numer = -numer;
        }
        if self.eat(b'/') {
            self.skip_ws();
            let den_offset = self.pos;
            let denom = self.digits()?;
            if denom.is_zero() {
                return Err(self.err_at(den_offset, "division by zero in rational literal"));
            }
            Ok(BigRational::new(numer, denom))
        } else {
            Ok(BigRational::from_integer(numer))
        }
    }

    /// `( rational ± rational i )`, the parenthesized complex form.
    /// Leaves the position untouched on failure via caller backtracking.
    fn complex_coef(&mut self) -> Result<ComplexRational, ParseError> {
        self.expect(b'(')?;
        let re = self.rational()?;
        self.skip_ws();
        let sign = match self.peek() {
            Some(b'+') => 1,
            Some(b'-') => -1,
            _ => return Err(self.err_here("expected '+' or '-' in complex literal")),
        };
        self.pos += 1;
        let mut im = self.rational()?;
        if sign < 0 {
            im = -im;
        }
        self.expect(b'i')?;
        self.expect(b')')?;
        Ok(ComplexRational::new(re, im))
    }

    fn variable(&mut self) -> Result<Polynomial, ParseError> {
        self.expect(b'z')?;
        let index_offset = self.pos;
        let index = self.small_uint("variable index")? as usize;
        if index == 0 || index > self.dim {
            return Err(self.err_at(index_offset, "variable index out of range"));
        }
        let exponent = if self.eat(b'^') {
            self.small_uint("exponent")?
        } else {
            1
        };
        Ok(Polynomial::variable(self.dim, index - 1).pow(exponent))
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                let save = self.pos;
                if let Ok(c) = self.complex_coef() {
                    return Ok(Polynomial::constant(self.dim, c));
                }
                self.pos = save;
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'z') => self.variable(),
            Some(b'i') => {
                self.pos += 1;
                Ok(Polynomial::constant(self.dim, ComplexRational::i()))
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let r = self.rational()?;
                if self.eat(b'i') {
                    Ok(Polynomial::constant(
                        self.dim,
                        ComplexRational::new(BigRational::zero(), r),
                    ))
                } else {
                    Ok(Polynomial::constant(self.dim, ComplexRational::real(r)))
                }
            }
            _ => Err(self.err_here(
                "expected a coefficient, a variable like z1, or a parenthesized expression",
            )),
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let next = self.factor()?;
            acc = acc.mul(&next).expect("parser fixes the dimension");
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t).expect("same dim");
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t).expect("same dim");
                }
                _ => break,
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize, dim: usize) -> Polynomial {
        Polynomial::variable(dim, i)
    }

    #[test]
    fn parses_simple_sum() {
        let p = parse_expression("z1^2 + 1", 1).unwrap();
        let expected = z(0, 1).pow(2).add(&Polynomial::one(1)).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn parses_complex_coefficient_and_rational() {
        let p = parse_expression("(1+2i)*z1*z2 - 3/2*z2^4", 2).unwrap();
        let t1 = z(0, 2)
            .mul(&z(1, 2))
            .unwrap()
            .scale(&ComplexRational::from_parts(1, 1, 2, 1));
        let t2 = z(1, 2).pow(4).scale(&ComplexRational::from_ratio(3, 2));
        assert_eq!(p, t1.sub(&t2).unwrap());
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse_expression("z3", 2).unwrap_err();
        assert!(err.message.contains("variable index out of range"));
        assert_eq!(err.offset, 1);
    }

    #[test]
    fn division_by_zero_in_literal() {
        let err = parse_expression("1/0", 1).unwrap_err();
        assert!(err.message.contains("division by zero"));
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn syntax_error_has_offset() {
        let err = parse_expression("z1 + + 2 +", 1).unwrap_err();
        assert!(err.offset >= 5);
    }

    #[test]
    fn trailing_garbage_rejected() {
        let err = parse_expression("z1 z2", 2).unwrap_err();
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_expression("  z1 ^2+ 3/2 * z2 ", 2).unwrap();
        let b = parse_expression("z1^2+3/2*z2", 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn imaginary_literals() {
        assert_eq!(
            parse_expression("i", 1).unwrap(),
            Polynomial::constant(1, ComplexRational::i())
        );
        assert_eq!(
            parse_expression("2i*z1", 1).unwrap(),
            z(0, 1).scale(&ComplexRational::from_parts(0, 1, 2, 1))
        );
        assert_eq!(
            parse_expression("3/2i", 1).unwrap(),
            Polynomial::constant(1, ComplexRational::from_parts(0, 1, 3, 2))
        );
    }

    #[test]
    fn leading_sign() {
        assert_eq!(
            parse_expression("-z1^2", 1).unwrap(),
            z(0, 1).pow(2).neg()
        );
        assert_eq!(parse_expression("-2 + z1", 1).unwrap(), {
            z(0, 1)
                .add(&Polynomial::constant(1, ComplexRational::from_int(-2)))
                .unwrap()
        });
    }

    #[test]
    fn parenthesized_expression_vs_complex_literal() {
        // (1+2) is a grouped sum, (1+2i) is a complex scalar.
        assert_eq!(
            parse_expression("(1+2)", 1).unwrap(),
            Polynomial::constant(1, ComplexRational::from_int(3))
        );
        assert_eq!(
            parse_expression("(1+2i)", 1).unwrap(),
            Polynomial::constant(1, ComplexRational::from_parts(1, 1, 2, 1))
        );
        assert_eq!(
            parse_expression("(z1+1)*(z1-1)", 1).unwrap(),
            z(0, 1).pow(2).sub(&Polynomial::one(1)).unwrap()
        );
    }

    #[test]
    fn canonical_print_round_trips() {
        for (text, dim) in [
            ("z1^2 + 1", 1),
            ("(1 - 1 i)*z2", 2),
            ("0", 3),
            ("-3/2*z1*z2^2 + (0 + 1 i)*z3", 3),
            ("z1^2*z2 - z2 + 7/3", 2),
        ] {
            let p = parse_expression(text, dim).unwrap();
            let printed = print_expression(&p);
            let reparsed = parse_expression(&printed, dim).unwrap();
            assert_eq!(reparsed, p, "{text} → {printed}");
        }
    }

    #[test]
    fn zero_prints_as_zero() {
        assert_eq!(print_expression(&Polynomial::zero(2)), "0");
        assert_eq!(parse_expression("0", 2).unwrap(), Polynomial::zero(2));
    }
}
