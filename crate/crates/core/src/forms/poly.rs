//! Forms with polynomial coefficients and a small text syntax for them.
//!
//! ```text
//! dx1^dx2 + dx2^dx3        constant 2-form
//! x2*dx1 - x1*dx2          rotation 1-form
//! 0.5*x1^2*x3*dx2          any monomial coefficient
//! 1                        constant section (p = 0)
//! ```
//! Indices are 1-based in the text; `^` between `dx` factors is the wedge,
//! after `x_k` it is a power.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forms::{sort_with_sign, FormModel, Layout};
use crate::math::powi;

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.powers.iter().zip(x).fold(self.coeff, |acc, (&p, &xi)| acc * powi(xi, p as i32))
    }

    /// `∂_k` of the monomial.
    pub fn partial(&self, k: usize, x: &[f64]) -> f64 {
        let pk = self.powers[k];
        if pk == 0 {
            return 0.0;
        }
        let mut v = self.coeff * pk as f64;
        for (i, (&p, &xi)) in self.powers.iter().zip(x).enumerate() {
            let e = if i == k { p - 1 } else { p };
            v *= powi(xi, e as i32);
        }
        v
    }
}

/// Each term adds a monomial to one canonical component slot.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    pub layout: Layout,
    pub terms: Vec<(usize, Monomial)>,
}

impl FormModel for PolyForm {
    fn dim(&self) -> usize {
        self.layout.dim
    }
    fn degree(&self) -> usize {
        self.layout.degree
    }
    fn rank(&self) -> usize {
        self.layout.rank
    }
    fn components(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.layout.len()];
        for (slot, mono) in &self.terms {
            out[*slot] += mono.eval(x);
        }
        out
    }
    fn derivatives(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let m = self.layout.dim;
        let mut out = vec![vec![0.0; self.layout.len()]; m];
        for (slot, mono) in &self.terms {
            for (k, d) in out.iter_mut().enumerate() {
                d[*slot] += mono.partial(k, x);
            }
        }
        Some(out)
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::InvalidInput(format!("form expression '{}': {what} at offset {}", self.text, self.pos))
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        self.text[start..self.pos].parse().map_err(|_| self.err("bad integer"))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'-' || c == b'+') && self.pos > start && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.text[start..self.pos].parse().map_err(|_| self.err("bad number"))
    }
}

/// Parse one expression per fiber slot into a polynomial form on `dim`
/// coordinates. All terms must share a degree.
pub fn parse_poly_form(dim: usize, slots: &[&str]) -> Result<PolyForm> {
    if slots.is_empty() {
        return Err(Error::InvalidInput("form needs at least one fiber slot".into()));
    }
    let rank = slots.len();
    let mut raw: Vec<(usize, Monomial, Vec<usize>)> = Vec::new();
    let mut degree: Option<usize> = None;
    for (a, text) in slots.iter().enumerate() {
        let mut lx = Lexer { s: text.as_bytes(), pos: 0, text };
        let mut first = true;
        loop {
            let mut sign = 1.0;
            match lx.peek() {
                None if first => return Err(lx.err("empty expression")),
                None => break,
                Some(b'+') => {
                    lx.pos += 1;
                }
                Some(b'-') => {
                    lx.pos += 1;
                    sign = -1.0;
                }
                Some(_) if first => {}
                Some(_) => return Err(lx.err("expected '+' or '-'")),
            }
            first = false;
            let mut mono = Monomial { coeff: sign, powers: vec![0; dim] };
            let mut dxs: Vec<usize> = Vec::new();
            loop {
                match lx.peek() {
                    Some(c) if c.is_ascii_digit() || c == b'.' => mono.coeff *= lx.number()?,
                    Some(b'd') => {
                        lx.pos += 1;
                        if lx.peek() != Some(b'x') {
                            return Err(lx.err("expected 'dx'"));
                        }
                        lx.pos += 1;
                        let k = lx.integer()?;
                        if k == 0 || k > dim {
                            return Err(lx.err("coordinate index out of range"));
                        }
                        dxs.push(k - 1);
                    }
                    Some(b'x') => {
                        lx.pos += 1;
                        let k = lx.integer()?;
                        if k == 0 || k > dim {
                            return Err(lx.err("coordinate index out of range"));
                        }
                        let mut p = 1u32;
                        let save = lx.pos;
                        if lx.peek() == Some(b'^') {
                            lx.pos += 1;
                            if lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                                p = lx.integer()? as u32;
                            } else {
                                lx.pos = save;
                            }
                        }
                        mono.powers[k - 1] += p;
                    }
                    _ => return Err(lx.err("expected a factor")),
                }
                match lx.peek() {
                    Some(b'*') | Some(b'^') => {
                        lx.pos += 1;
                    }
                    _ => break,
                }
            }
            let d = dxs.len();
            if *degree.get_or_insert(d) != d {
                return Err(lx.err("terms of different degree"));
            }
            raw.push((a, mono, dxs));
        }
    }
    let layout = Layout::new(dim, degree.unwrap_or(0), rank);
    if layout.degree > dim {
        return Err(Error::DegreeExceedsDimension { degree: layout.degree, dim });
    }
    let mut terms = Vec::new();
    for (a, mut mono, dxs) in raw {
        if let Some((sorted, sign)) = sort_with_sign(&dxs) {
            mono.coeff *= sign;
            let k = layout.position(&sorted).expect("sorted set");
            terms.push((k * rank + a, mono));
        }
    }
    Ok(PolyForm { layout, terms })
}

/// Text of a constant coordinate form `dx_{i1}^…^dx_{ip}` (0-based input).
pub fn coordinate_form_text(indices: &[usize]) -> String {
    if indices.is_empty() {
        return "1".into();
    }
    indices.iter().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("^")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rotation_form() {
        let f = parse_poly_form(2, &["x2*dx1 - x1*dx2"]).unwrap();
        assert_eq!(f.layout.degree, 1);
        assert_eq!(f.components(&[3.0, 5.0]), vec![5.0, -3.0]);
        let d = f.derivatives(&[3.0, 5.0]).unwrap();
        assert_eq!(d[0], vec![0.0, -1.0]);
        assert_eq!(d[1], vec![1.0, 0.0]);
    }

    #[test]
    fn wedge_order_sets_sign() {
        let f = parse_poly_form(3, &["dx2^dx1 + 2*dx1^dx3"]).unwrap();
        assert_eq!(f.components(&[0.0; 3]), vec![-1.0, 2.0, 0.0]);
    }

    #[test]
    fn powers_and_sections() {
        let f = parse_poly_form(2, &["0.5*x1^2*x2", "1"]).unwrap();
        assert_eq!(f.layout.degree, 0);
        assert_eq!(f.components(&[2.0, 3.0]), vec![6.0, 1.0]);
        let d = f.derivatives(&[2.0, 3.0]).unwrap();
        assert_eq!(d[0], vec![6.0, 0.0]);
        assert_eq!(d[1], vec![2.0, 0.0]);
    }

    #[test]
    fn rejects_mixed_degrees_and_bad_indices() {
        assert!(parse_poly_form(2, &["dx1 + 1"]).is_err());
        assert!(parse_poly_form(2, &["dx3"]).is_err());
        assert!(parse_poly_form(2, &[""]).is_err());
        assert!(parse_poly_form(2, &["dx1 dx2"]).is_err());
    }

    #[test]
    fn repeated_differential_vanishes() {
        let f = parse_poly_form(2, &["dx1^dx1"]).unwrap();
        assert!(f.terms.is_empty());
    }
}
