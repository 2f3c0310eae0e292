//! A small reader for polynomials written as `-3/2*x1^2*y3 + 5z1 - 7`.
//!
//! Coefficients may be juxtaposed with variables (`5x1`), factors are
//! separated by `*` or whitespace, and `^` gives exponents.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::field::Rationals;
use super::monomial::{Monomial, MAX_VARS};
use super::order::VariableOrder;
use super::polynomial::Polynomial;
use crate::error::AlgebraError;

pub fn parse_polynomial(text: &str, vars: &Arc<VariableOrder>) -> Result<Polynomial<Rationals>, AlgebraError> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace() || *c == ' ').collect();
    let mut pos = 0;
    let mut terms = Vec::new();
    skip_ws(&chars, &mut pos);
    if pos == chars.len() {
        return Err(AlgebraError::Parse("empty polynomial".into()));
    }
    let mut first = true;
    while pos < chars.len() {
        let mut negative = false;
        match chars[pos] {
            '+' => pos += 1,
            '-' => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            c => return Err(AlgebraError::Parse(format!("expected `+` or `-`, found `{c}`"))),
        }
        first = false;
        skip_ws(&chars, &mut pos);
        let (coef, mono) = parse_term(&chars, &mut pos, vars)?;
        terms.push((mono, if negative { -coef } else { coef }));
        skip_ws(&chars, &mut pos);
    }
    Ok(Polynomial::from_terms(Rationals, vars.clone(), terms))
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos] == ' ' {
        *pos += 1;
    }
}

fn parse_uint(chars: &[char], pos: &mut usize) -> Option<BigInt> {
    let start = *pos;
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        None
    } else {
        chars[start..*pos].iter().collect::<String>().parse().ok()
    }
}

fn parse_term(chars: &[char], pos: &mut usize, vars: &VariableOrder) -> Result<(BigRational, Monomial), AlgebraError> {
    let mut coef = BigRational::one();
    let mut exps = [0u8; MAX_VARS];
    let mut saw_factor = false;
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            break;
        }
        let c = chars[*pos];
        if c == '*' {
            if !saw_factor {
                return Err(AlgebraError::Parse("dangling `*`".into()));
            }
            *pos += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let num = parse_uint(chars, pos).expect("digit present");
            let mut value = BigRational::from_integer(num);
            if *pos < chars.len() && chars[*pos] == '/' {
                *pos += 1;
                let den = parse_uint(chars, pos).ok_or_else(|| AlgebraError::Parse("missing denominator".into()))?;
                if den == BigInt::from(0) {
                    return Err(AlgebraError::Parse("zero denominator".into()));
                }
                value /= BigRational::from_integer(den);
            }
            coef *= value;
            saw_factor = true;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = *pos;
            while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_') {
                *pos += 1;
            }
            let name: String = chars[start..*pos].iter().collect();
            let v = vars
                .index_of(&name)
                .ok_or_else(|| AlgebraError::Parse(format!("unknown variable `{name}`")))?;
            let mut e = 1u32;
            if *pos < chars.len() && chars[*pos] == '^' {
                *pos += 1;
                e = parse_uint(chars, pos)
                    .and_then(|b| u32::try_from(b).ok())
                    .ok_or_else(|| AlgebraError::Parse("bad exponent".into()))?;
            }
            let updated = exps[v] as u32 + e;
            exps[v] = u8::try_from(updated).map_err(|_| AlgebraError::Parse("exponent too large".into()))?;
            saw_factor = true;
            continue;
        }
        if c == '+' || c == '-' {
            break;
        }
        return Err(AlgebraError::Parse(format!("unexpected character `{c}`")));
    }
    if !saw_factor {
        return Err(AlgebraError::Parse("empty term".into()));
    }
    Ok((coef, Monomial::from_exponents(&exps[..vars.len()])))
}
