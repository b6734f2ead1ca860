//! Textual cyclotomic expressions.
//!
//! ```text
//! expr   := sign? term (('+'|'-') term)*
//! term   := coeff ('*' atom)? | atom
//! atom   := 'E(' uint ')' ('^' uint)?
//! coeff  := uint | uint '/' uint
//! ```
//!
//! Whitespace is ignored. Rendering produces the same grammar with
//! exponents ascending, so `parse(render(a)) == a`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::{CycError, Cyclotomic};
use crate::scalar::Scalar;

pub fn parse_cyclotomic<T: Scalar>(text: &str) -> Result<Cyclotomic<T>, CycError> {
    let mut p = Parser { chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), at: 0, len: text.len() };
    let value = p.expr()?;
    if p.at < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn position(&self) -> usize {
        self.chars.get(self.at).map(|&(i, _)| i).unwrap_or(self.len)
    }

    fn error(&self, message: &str) -> CycError {
        CycError::Syntax { position: self.position(), message: message.to_string() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CycError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr<T: Scalar>(&mut self) -> Result<Cyclotomic<T>, CycError> {
        if self.peek().is_none() {
            return Err(self.error("empty expression"));
        }
        let mut negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = Cyclotomic::zero();
        loop {
            let t = self.term()?;
            acc = if negative { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<T: Scalar>(&mut self) -> Result<Cyclotomic<T>, CycError> {
        if self.peek() == Some('E') {
            return self.atom();
        }
        let coeff = self.coeff::<T>()?;
        if self.eat('*') {
            Ok(self.atom::<T>()?.scale(&coeff))
        } else {
            Ok(Cyclotomic::from_rational(coeff))
        }
    }

    fn atom<T: Scalar>(&mut self) -> Result<Cyclotomic<T>, CycError> {
        self.expect('E')?;
        self.expect('(')?;
        let n = self.uint()?;
        self.expect(')')?;
        let k = if self.eat('^') { self.uint()? } else { 1 };
        if n == 0 {
            return Err(self.error("E(0) is not a root of unity"));
        }
        Cyclotomic::root_of_unity(n, (k % n) as i64)
    }

    fn digits(&mut self) -> Result<String, CycError> {
        let start = self.at;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.error("expected digits"));
        }
        Ok(self.chars[start..self.at].iter().map(|&(_, c)| c).collect())
    }

    fn uint(&mut self) -> Result<u64, CycError> {
        let pos = self.position();
        let d = self.digits()?;
        d.parse().map_err(|_| CycError::Syntax { position: pos, message: "integer out of range".into() })
    }

    fn coeff<T: Scalar>(&mut self) -> Result<Ratio<T>, CycError> {
        let pos = self.position();
        let num = self.scalar::<T>(pos)?;
        if !self.eat('/') {
            return Ok(Ratio::from_integer(num));
        }
        let dpos = self.position();
        let den = self.scalar::<T>(dpos)?;
        if den.is_zero() {
            return Err(CycError::ZeroDenominator { position: dpos });
        }
        Ok(Ratio::new(num, den))
    }

    fn scalar<T: Scalar>(&mut self, pos: usize) -> Result<T, CycError> {
        let d = self.digits()?;
        T::from_str_radix(&d, 10)
            .map_err(|_| CycError::Syntax { position: pos, message: "integer out of range".into() })
    }
}

fn render_term<T: Scalar>(f: &mut fmt::Formatter<'_>, n: u64, k: u64, c: &Ratio<T>, first: bool) -> fmt::Result {
    let negative = c < &Ratio::zero();
    let mag = if negative { -c.clone() } else { c.clone() };
    if negative {
        f.write_str("-")?;
    } else if !first {
        f.write_str("+")?;
    }
    if k == 0 {
        return write!(f, "{mag}");
    }
    if !mag.is_one() {
        write!(f, "{mag}*")?;
    }
    if k == 1 {
        write!(f, "E({n})")
    } else {
        write!(f, "E({n})^{k}")
    }
}

impl<T: Scalar> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (&k, c)) in self.coeffs.iter().enumerate() {
            render_term(f, self.conductor, k, c, i == 0)?;
        }
        Ok(())
    }
}
