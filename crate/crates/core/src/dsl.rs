//! Text syntax for model spaces.
//!
//! ```text
//! model  := product | 'CoshCyl(' product ',' 'alpha=' number ')'
//! product := factor ('x' factor)*
//! factor := 'S(' int ',' number ')' | 'CP(' int ',' number ')' | 'Circ(' number ')'
//! number := float | float? 'pi' | float '*pi' | number '/' float
//! ```
//!
//! Whitespace is free between tokens. `ModelSpace`'s `Display` output parses
//! back to the same model.

use crate::curvature::{Factor, ModelSpace};
use crate::error::{Error, Result};

/// A parsed but not yet validated model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelExpr {
    pub factors: Vec<Factor>,
    /// `Some(α)` for a cosh cylinder over `factors`.
    pub alpha: Option<f64>,
}

impl ModelExpr {
    /// Validates into a `ModelSpace`; cosh cylinders need an Einstein base.
    pub fn build(&self) -> Result<ModelSpace> {
        match self.alpha {
            None => ModelSpace::product(self.factors.clone()),
            Some(a) => ModelSpace::cosh_cylinder(self.factors.clone(), a),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected '{tok}'"))
        }
    }

    fn float_literal(&mut self) -> Option<f64> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut end = 0;
        let mut seen_digit = false;
        let mut seen_exp = false;
        while end < bytes.len() {
            let c = bytes[end];
            let ok = match c {
                b'0'..=b'9' => {
                    seen_digit = true;
                    true
                }
                b'.' => !seen_exp,
                b'+' | b'-' => end == 0 || matches!(bytes[end - 1], b'e' | b'E'),
                b'e' | b'E' => seen_digit && !seen_exp && {
                    seen_exp = true;
                    true
                },
                _ => false,
            };
            if !ok {
                break;
            }
            end += 1;
        }
        // a trailing exponent marker belongs to the next token
        while end > 0 && matches!(bytes[end - 1], b'e' | b'E' | b'+' | b'-') {
            end -= 1;
        }
        let text = &self.rest()[..end];
        let v = text.parse::<f64>().ok()?;
        self.pos += end;
        Some(v)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut v = match self.float_literal() {
            Some(x) => {
                if self.eat("*pi") || self.eat("pi") {
                    x * std::f64::consts::PI
                } else {
                    x
                }
            }
            None if self.eat("pi") => std::f64::consts::PI,
            None => return self.err("expected a number"),
        };
        while self.eat("/") {
            match self.float_literal() {
                Some(d) => v /= d,
                None => return self.err("expected a divisor"),
            }
        }
        if !v.is_finite() {
            self.pos = start;
            return self.err("number is not finite");
        }
        Ok(v)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.err("expected an integer");
        }
        let v = self.rest()[..digits].parse::<usize>();
        match v {
            Ok(v) => {
                self.pos += digits;
                Ok(v)
            }
            Err(_) => self.err("integer out of range"),
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        self.skip_ws();
        if self.eat("S(") {
            let m = self.integer()?;
            self.expect(",")?;
            let kappa = self.number()?;
            self.expect(")")?;
            Ok(Factor::Sphere { m, kappa })
        } else if self.eat("CP(") {
            let m = self.integer()?;
            self.expect(",")?;
            let c = self.number()?;
            self.expect(")")?;
            Ok(Factor::ComplexProjective { m, c })
        } else if self.eat("Circ(") {
            let length = self.number()?;
            self.expect(")")?;
            Ok(Factor::Circle { length })
        } else {
            self.err("expected 'S(', 'CP(' or 'Circ('")
        }
    }

    fn product(&mut self) -> Result<Vec<Factor>> {
        let mut out = vec![self.factor()?];
        while self.eat("x") {
            out.push(self.factor()?);
        }
        Ok(out)
    }

    fn model(&mut self) -> Result<ModelExpr> {
        self.skip_ws();
        if self.eat("CoshCyl(") {
            let factors = self.product()?;
            self.expect(",")?;
            self.expect("alpha")?;
            self.expect("=")?;
            let alpha = self.number()?;
            self.expect(")")?;
            Ok(ModelExpr {
                factors,
                alpha: Some(alpha),
            })
        } else {
            Ok(ModelExpr {
                factors: self.product()?,
                alpha: None,
            })
        }
    }
}

/// Parses the syntax without checking geometric constraints.
pub fn parse_expr(src: &str) -> Result<ModelExpr> {
    let mut p = Parser { src, pos: 0 };
    let m = p.model()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(m)
}

/// Parses and validates a model.
pub fn parse_model(src: &str) -> Result<ModelSpace> {
    parse_expr(src)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        let f = |s: &str| parse_expr(&format!("Circ({s})")).unwrap().factors[0];
        assert_eq!(f("2.5"), Factor::Circle { length: 2.5 });
        assert_eq!(f("pi"), Factor::Circle { length: std::f64::consts::PI });
        assert_eq!(f("3pi"), Factor::Circle { length: 3.0 * std::f64::consts::PI });
        assert_eq!(f("2*pi/3"), Factor::Circle { length: 2.0 * std::f64::consts::PI / 3.0 });
        assert_eq!(f("1e-3"), Factor::Circle { length: 1e-3 });
    }

    #[test]
    fn error_positions() {
        match parse_expr("S(3,1) x T(2)") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        match parse_expr("S(3,1)  junk") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("{other:?}"),
        }
    }
}
