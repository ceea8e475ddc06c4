//! A small SMT-LIB2 reader that collects the polynomials appearing in
//! nonlinear real arithmetic atoms.
//!
//! Supported: `declare-fun`/`declare-const` of sort `Real`, `assert` over
//! `and`/`or`/`not`/`=>`, atoms built with `< > <= >= = distinct`, and terms
//! built from `+ - *`, numerals, decimals and `/` applied to constants. Each
//! atom `lhs ~ rhs` contributes `lhs - rhs`, scaled by the lcm of its
//! denominators and normalized to a positive leading coefficient. Variables
//! are numbered in declaration order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{PolySet, Polynomial};
use crate::error::{Error, Result};

#[derive(Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<Sexp>> {
    let bytes = text.as_bytes();
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                stack.push(Vec::new());
                i += 1;
            }
            b')' => {
                if stack.len() < 2 {
                    return Err(Error::Syntax { offset: i, message: "unbalanced `)`".into() });
                }
                let list = stack.pop().expect("checked");
                stack.last_mut().expect("checked").push(Sexp::List(list));
                i += 1;
            }
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'|' | b'"' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != c {
                    i += 1;
                }
                if i == bytes.len() {
                    return Err(Error::Syntax { offset: start, message: "unterminated literal".into() });
                }
                i += 1;
                let tok = &text[start..i];
                let tok = if c == b'|' { &tok[1..tok.len() - 1] } else { tok };
                stack.last_mut().expect("nonempty").push(Sexp::Atom(tok.to_string()));
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'(' | b')' | b';')
                {
                    i += 1;
                }
                stack.last_mut().expect("nonempty").push(Sexp::Atom(text[start..i].to_string()));
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::Syntax { offset: text.len(), message: "unbalanced `(`".into() });
    }
    Ok(stack.pop().expect("one level"))
}

type RatPoly = BTreeMap<Vec<u32>, BigRational>;

struct Reader {
    vars: HashMap<String, usize>,
    nvars: usize,
}

fn parse_numeral(s: &str) -> Option<BigRational> {
    if let Some((int, frac)) = s.split_once('.') {
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = format!("{int}{frac}").parse().ok()?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Some(BigRational::new(num, den));
    }
    if s.bytes().all(|b| b.is_ascii_digit()) && !s.is_empty() {
        return Some(BigRational::from_integer(s.parse().ok()?));
    }
    None
}

fn add_into(acc: &mut RatPoly, other: &RatPoly, sign: i32) {
    for (e, c) in other {
        let entry = acc.entry(e.clone()).or_insert_with(BigRational::zero);
        if sign >= 0 {
            *entry += c;
        } else {
            *entry -= c;
        }
    }
    acc.retain(|_, c| !c.is_zero());
}

fn mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut out = RatPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl Reader {
    fn constant(&self, c: BigRational) -> RatPoly {
        let mut p = RatPoly::new();
        if !c.is_zero() {
            p.insert(vec![0; self.nvars], c);
        }
        p
    }

    fn constant_value(&self, p: &RatPoly) -> Option<BigRational> {
        match p.len() {
            0 => Some(BigRational::zero()),
            1 => p.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    fn term(&self, t: &Sexp) -> Result<RatPoly> {
        match t {
            Sexp::Atom(a) => {
                if let Some(c) = parse_numeral(a) {
                    return Ok(self.constant(c));
                }
                let &v = self
                    .vars
                    .get(a)
                    .ok_or_else(|| Error::Smt(format!("undeclared symbol `{a}`")))?;
                let mut e = vec![0; self.nvars];
                e[v] = 1;
                Ok(RatPoly::from([(e, BigRational::one())]))
            }
            Sexp::List(items) => {
                let (head, args) = match items.split_first() {
                    Some((Sexp::Atom(h), args)) => (h.as_str(), args),
                    _ => return Err(Error::Smt("malformed term".into())),
                };
                if args.is_empty() {
                    return Err(Error::Smt(format!("`{head}` without arguments")));
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                match head {
                    "+" => {
                        let mut acc = RatPoly::new();
                        for a in &args {
                            add_into(&mut acc, a, 1);
                        }
                        Ok(acc)
                    }
                    "-" if args.len() == 1 => {
                        let mut acc = RatPoly::new();
                        add_into(&mut acc, &args[0], -1);
                        Ok(acc)
                    }
                    "-" => {
                        let mut acc = args[0].clone();
                        for a in &args[1..] {
                            add_into(&mut acc, a, -1);
                        }
                        Ok(acc)
                    }
                    "*" => Ok(args[1..].iter().fold(args[0].clone(), |acc, a| mul(&acc, a))),
                    "/" => {
                        let mut vals = Vec::with_capacity(args.len());
                        for a in &args {
                            vals.push(self.constant_value(a).ok_or_else(|| {
                                Error::Smt("non-polynomial term: division by a non-constant".into())
                            })?);
                        }
                        let mut q = vals[0].clone();
                        for d in &vals[1..] {
                            if d.is_zero() {
                                return Err(Error::Smt("division by zero".into()));
                            }
                            q /= d;
                        }
                        Ok(self.constant(q))
                    }
                    other => Err(Error::Smt(format!("unsupported operator `{other}`"))),
                }
            }
        }
    }

    fn formula(&self, f: &Sexp, out: &mut Vec<RatPoly>) -> Result<()> {
        let items = match f {
            Sexp::Atom(a) if a == "true" || a == "false" => return Ok(()),
            Sexp::Atom(a) => return Err(Error::Smt(format!("unsupported boolean atom `{a}`"))),
            Sexp::List(items) => items,
        };
        let (head, args) = match items.split_first() {
            Some((Sexp::Atom(h), args)) => (h.as_str(), args),
            _ => return Err(Error::Smt("malformed formula".into())),
        };
        match head {
            "and" | "or" | "not" | "=>" => {
                for a in args {
                    self.formula(a, out)?;
                }
                Ok(())
            }
            "<" | ">" | "<=" | ">=" | "=" => {
                let terms = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                for w in terms.windows(2) {
                    let mut d = w[0].clone();
                    add_into(&mut d, &w[1], -1);
                    out.push(d);
                }
                Ok(())
            }
            "distinct" => {
                let terms = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        let mut d = terms[i].clone();
                        add_into(&mut d, &terms[j], -1);
                        out.push(d);
                    }
                }
                Ok(())
            }
            other => Err(Error::Smt(format!("unsupported operator `{other}`"))),
        }
    }
}

fn clear_denominators(nvars: usize, p: &RatPoly) -> Polynomial {
    let lcm = p.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let poly = Polynomial::from_terms(
        nvars,
        p.iter().map(|(e, c)| (e.clone(), (c * BigRational::from_integer(lcm.clone())).to_integer())),
    );
    match poly.leading_coeff() {
        Some(c) if c.is_negative() => -&poly,
        _ => poly,
    }
}

fn sort_is_real(s: &Sexp) -> bool {
    matches!(s, Sexp::Atom(a) if a == "Real")
}

/// Extracts the set of atom polynomials from an SMT-LIB2 script.
pub fn parse_smtlib_atoms(text: &str) -> Result<PolySet> {
    let script = tokenize(text)?;
    let mut reader = Reader { vars: HashMap::new(), nvars: 0 };
    let mut names = Vec::new();
    for cmd in &script {
        if let Sexp::List(items) = cmd {
            match items.as_slice() {
                [Sexp::Atom(c), Sexp::Atom(name), Sexp::List(params), sort] if c == "declare-fun" => {
                    if !params.is_empty() || !sort_is_real(sort) {
                        return Err(Error::Smt(format!("`{name}` must be a constant of sort Real")));
                    }
                    names.push(name.clone());
                }
                [Sexp::Atom(c), Sexp::Atom(name), sort] if c == "declare-const" => {
                    if !sort_is_real(sort) {
                        return Err(Error::Smt(format!("`{name}` must have sort Real")));
                    }
                    names.push(name.clone());
                }
                _ => {}
            }
        }
    }
    for (i, n) in names.iter().enumerate() {
        reader.vars.insert(n.clone(), i);
    }
    reader.nvars = names.len();
    if reader.nvars == 0 {
        return Err(Error::Smt("no Real variables declared".into()));
    }

    let mut atoms = Vec::new();
    for cmd in &script {
        let Sexp::List(items) = cmd else {
            return Err(Error::Smt("top-level atom outside a command".into()));
        };
        match items.first() {
            Some(Sexp::Atom(c)) if c == "assert" => {
                let [_, body] = items.as_slice() else {
                    return Err(Error::Smt("assert takes one argument".into()));
                };
                reader.formula(body, &mut atoms)?;
            }
            Some(Sexp::Atom(c))
                if matches!(
                    c.as_str(),
                    "declare-fun" | "declare-const" | "set-logic" | "set-info" | "set-option"
                        | "check-sat" | "exit" | "get-model" | "push" | "pop"
                ) => {}
            Some(Sexp::Atom(c)) => return Err(Error::Smt(format!("unsupported command `{c}`"))),
            _ => return Err(Error::Smt("malformed command".into())),
        }
    }
    let polys = atoms.iter().filter(|a| !a.is_empty()).map(|a| clear_denominators(reader.nvars, a));
    PolySet::new(reader.nvars, polys)
}
