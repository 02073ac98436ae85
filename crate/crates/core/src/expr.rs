//! Surface syntax for ring elements.
//!
//! ```text
//! sum   := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | name | 'tau' | 'c'<i> '(' name ')'
//!        | ('td' | 'itd') '(' opname ')' | '(' sum ')'
//! ```
//!
//! `opname` is a preset name or `custom:<polynomial in u>`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::chern::{evaluate_genus, inverse_todd_of_operation, todd_of_operation, Bundle};
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::operations::{steenrod_total, OpMode, Operation};
use crate::ring::{same_ring, Elem, RingCtx};
use crate::spaces::{SupportedElem, ThomModule};

/// An operation reference inside `td(..)` / `itd(..)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpRef {
    pub name: String,
    /// The polynomial of a `custom:` operation.
    pub series: Option<Box<Expr>>,
}

impl fmt::Display for OpRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.series {
            Some(s) => write!(f, "{}:{}", self.name, s),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Var(String),
    Tau,
    Chern { index: usize, bundle: String },
    Td(OpRef),
    Itd(OpRef),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Tau => write!(f, "tau"),
            Expr::Chern { index, bundle } => write!(f, "c{index}({bundle})"),
            Expr::Td(op) => write!(f, "td({op})"),
            Expr::Itd(op) => write!(f, "itd({op})"),
            Expr::Neg(x) => {
                write!(f, "-")?;
                x.write_at(f, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { '+' } else { '-' })?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "*")?;
                b.write_at(f, 3)
            }
            Expr::Pow(a, e) => {
                a.write_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }

    /// Prefix form, e.g. `(+ (^ u 2) u)`.
    pub fn to_sexpr(&self) -> String {
        match self {
            Expr::Int(n) => n.to_string(),
            Expr::Var(v) => v.clone(),
            Expr::Tau => "tau".into(),
            Expr::Chern { index, bundle } => format!("(c{index} {bundle})"),
            Expr::Td(op) => format!("(td {op})"),
            Expr::Itd(op) => format!("(itd {op})"),
            Expr::Neg(x) => format!("(- {})", x.to_sexpr()),
            Expr::Add(a, b) => format!("(+ {} {})", a.to_sexpr(), b.to_sexpr()),
            Expr::Sub(a, b) => format!("(- {} {})", a.to_sexpr(), b.to_sexpr()),
            Expr::Mul(a, b) => format!("(* {} {})", a.to_sexpr(), b.to_sexpr()),
            Expr::Pow(a, e) => format!("(^ {} {e})", a.to_sexpr()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&mut self, what: &str) -> Error {
        match self.peek() {
            None => syntax(self.pos, format!("{what}, found end of input")),
            Some(c) => syntax(self.pos, format!("{what}, found `{c}`")),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let digits: String = self.src[start..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return Err(self.unexpected("expected an integer"));
        }
        self.pos += digits.len();
        digits
            .parse()
            .map_err(|_| syntax(start, "integer out of range"))
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let id: String = self.src[start..]
            .chars()
            .enumerate()
            .take_while(|(i, c)| c.is_ascii_alphabetic() || c == &'_' || (*i > 0 && c.is_ascii_digit()))
            .map(|(_, c)| c)
            .collect();
        if id.is_empty() {
            return Err(self.unexpected("expected a name"));
        }
        self.pos += id.len();
        Ok(id)
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = {
                self.skip_ws();
                self.pos
            };
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| syntax(at, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn op_ref(&mut self) -> Result<OpRef> {
        let name = self.ident()?;
        if name == "custom" {
            self.expect(':')?;
            let series = self.sum()?;
            return Ok(OpRef {
                name,
                series: Some(Box::new(series)),
            });
        }
        Ok(OpRef { name, series: None })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.unexpected("expected an expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let id = self.ident()?;
                let call = self.peek() == Some('(');
                if id == "tau" {
                    return Ok(Expr::Tau);
                }
                if call && (id == "td" || id == "itd") {
                    self.pos += 1;
                    let op = self.op_ref()?;
                    self.expect(')')?;
                    return Ok(if id == "td" { Expr::Td(op) } else { Expr::Itd(op) });
                }
                if call && id.len() > 1 && id.starts_with('c') && id[1..].chars().all(|c| c.is_ascii_digit()) {
                    let index: usize = id[1..]
                        .parse()
                        .map_err(|_| syntax(self.pos, "Chern index out of range"))?;
                    self.pos += 1;
                    let bundle = self.bundle_name()?;
                    self.expect(')')?;
                    return Ok(Expr::Chern { index, bundle });
                }
                Ok(Expr::Var(id))
            }
            Some(_) => Err(self.unexpected("expected an expression")),
        }
    }

    /// Bundle names may contain parentheses, as in `O(1)`.
    fn bundle_name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    let name = self.src[start..start + i].trim().to_string();
                    if name.is_empty() {
                        return Err(syntax(start, "expected a bundle name"));
                    }
                    self.pos = start + i;
                    return Ok(name);
                }
                ')' => depth -= 1,
                _ => {}
            }
        }
        Err(syntax(self.src.len(), "expected `)`, found end of input"))
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.sum()?;
    if p.peek().is_some() {
        return Err(p.unexpected("unexpected trailing input"));
    }
    Ok(e)
}

/// Integer coefficients of a polynomial in the single variable `var`.
pub fn polynomial_coefficients(e: &Expr, var: &str) -> Result<Vec<i64>> {
    fn add(a: &[i64], b: &[i64], sign: i64) -> Vec<i64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, x) in b.iter().enumerate() {
            out[i] += sign * x;
        }
        out
    }
    fn mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    Ok(match e {
        Expr::Int(n) => vec![*n as i64],
        Expr::Var(v) if v == var => vec![0, 1],
        Expr::Neg(x) => polynomial_coefficients(x, var)?.iter().map(|c| -c).collect(),
        Expr::Add(a, b) => add(&polynomial_coefficients(a, var)?, &polynomial_coefficients(b, var)?, 1),
        Expr::Sub(a, b) => add(&polynomial_coefficients(a, var)?, &polynomial_coefficients(b, var)?, -1),
        Expr::Mul(a, b) => mul(&polynomial_coefficients(a, var)?, &polynomial_coefficients(b, var)?),
        Expr::Pow(a, k) => {
            let base = polynomial_coefficients(a, var)?;
            let mut acc = vec![1];
            for _ in 0..*k {
                acc = mul(&acc, &base);
            }
            acc
        }
        other => {
            return Err(Error::usage(format!(
                "`{other}` is not a polynomial in {var}"
            )))
        }
    })
}

/// Resolves an operation name: a preset or `custom:<polynomial in u>`.
pub fn resolve_operation(name: &str, prime: Prime, char_equals_l: bool) -> Result<Operation> {
    let op = if let Some(rest) = name.strip_prefix("custom:") {
        OpRef {
            name: "custom".into(),
            series: Some(Box::new(parse(rest)?)),
        }
    } else {
        OpRef {
            name: name.to_string(),
            series: None,
        }
    };
    resolve_op_ref(&op, prime, char_equals_l)
}

fn resolve_op_ref(op: &OpRef, prime: Prime, char_equals_l: bool) -> Result<Operation> {
    let mode = match op.name.as_str() {
        "qmodl" => OpMode::QmodL,
        "qmodp" => OpMode::QmodP,
        "pmotivic" => OpMode::Pmotivic,
        "identity" => OpMode::Identity,
        "custom" => {
            let series = op
                .series
                .as_ref()
                .ok_or_else(|| Error::usage("custom operations need a series"))?;
            return Operation::custom(prime, &polynomial_coefficients(series, "u")?, char_equals_l);
        }
        other => {
            return Err(Error::usage(format!(
                "unknown operation `{other}` (expected qmodl, qmodp, pmotivic, identity or custom:<series>)"
            )))
        }
    };
    steenrod_total(mode, prime, char_equals_l)
}

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    /// An integer not yet placed in a ring.
    Scalar(i64),
    Plain(Elem),
    Supported(SupportedElem),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(n) => write!(f, "{n}"),
            Value::Plain(x) => write!(f, "{x}"),
            Value::Supported(t) => write!(f, "{t}"),
        }
    }
}

/// Names in scope during evaluation.
pub struct EvalContext<'a> {
    /// Ring in which generator names and bare integers live.
    pub ring: Arc<RingCtx>,
    pub bundles: HashMap<String, &'a Bundle>,
    pub thom: Option<Arc<ThomModule>>,
    /// Bundle on which `td(..)` and `itd(..)` are evaluated.
    pub genus_bundle: Option<&'a Bundle>,
    pub char_equals_l: bool,
}

impl<'a> EvalContext<'a> {
    pub fn new(ring: &Arc<RingCtx>) -> EvalContext<'a> {
        EvalContext {
            ring: ring.clone(),
            bundles: HashMap::new(),
            thom: None,
            genus_bundle: None,
            char_equals_l: false,
        }
    }

    /// Evaluates and places bare integers in the context ring.
    pub fn eval(&self, e: &Expr) -> Result<Value> {
        Ok(match self.eval_inner(e)? {
            Value::Scalar(n) => Value::Plain(Elem::constant(&self.ring, n)),
            v => v,
        })
    }

    fn eval_inner(&self, e: &Expr) -> Result<Value> {
        let prime = self.ring.prime();
        match e {
            Expr::Int(n) => Ok(Value::Scalar(prime.reduce(*n) as i64)),
            Expr::Var(name) => match self.ring.generator_index(name) {
                Some(i) => Ok(Value::Plain(Elem::generator_at(&self.ring, i))),
                None => Err(Error::usage(format!("unresolved name `{name}`"))),
            },
            Expr::Tau => match &self.thom {
                Some(m) => Ok(Value::Supported(SupportedElem::tau(m))),
                None => Err(Error::usage("tau used outside a Thom context")),
            },
            Expr::Chern { index, bundle } => {
                let b = self
                    .bundles
                    .get(bundle)
                    .ok_or_else(|| Error::usage(format!("unresolved bundle `{bundle}`")))?;
                Ok(Value::Plain(b.chern_class(*index)))
            }
            Expr::Td(op) | Expr::Itd(op) => {
                let b = self
                    .genus_bundle
                    .ok_or_else(|| Error::usage("td/itd need a bundle in scope"))?;
                let op = resolve_op_ref(op, prime, self.char_equals_l)?;
                let order = b.ring().top_weight() as usize;
                let g = if matches!(e, Expr::Td(_)) {
                    todd_of_operation(&op, order)?
                } else {
                    inverse_todd_of_operation(&op, order)?
                };
                Ok(Value::Plain(evaluate_genus(&g, b)?))
            }
            Expr::Neg(x) => self.combine_scale(self.eval_inner(x)?, -1),
            Expr::Add(a, b) => self.add(self.eval_inner(a)?, self.eval_inner(b)?, 1),
            Expr::Sub(a, b) => self.add(self.eval_inner(a)?, self.eval_inner(b)?, -1),
            Expr::Mul(a, b) => self.mul(self.eval_inner(a)?, self.eval_inner(b)?),
            Expr::Pow(a, k) => match self.eval_inner(a)? {
                Value::Scalar(n) => Ok(Value::Scalar(prime.pow(prime.reduce_signed(n), *k as u64) as i64)),
                Value::Plain(x) => Ok(Value::Plain(x.pow(*k))),
                Value::Supported(t) if *k == 1 => Ok(Value::Supported(t)),
                Value::Supported(_) => Err(Error::usage("powers of supported classes are not defined")),
            },
        }
    }

    fn combine_scale(&self, v: Value, c: i64) -> Result<Value> {
        Ok(match v {
            Value::Scalar(n) => Value::Scalar(n * c),
            Value::Plain(x) => Value::Plain(x.scale(c)),
            Value::Supported(t) => Value::Supported(t.scale(c)),
        })
    }

    fn add(&self, a: Value, b: Value, sign: i64) -> Result<Value> {
        let b = self.combine_scale(b, sign)?;
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
            (Value::Scalar(n), Value::Plain(x)) | (Value::Plain(x), Value::Scalar(n)) => {
                Ok(Value::Plain(x.checked_add(&Elem::constant(x.ring(), n))?))
            }
            (Value::Plain(x), Value::Plain(y)) => Ok(Value::Plain(x.checked_add(&y)?)),
            (Value::Supported(s), Value::Supported(t)) => Ok(Value::Supported(s.checked_add(&t)?)),
            _ => Err(Error::usage("cannot add a supported class to an unsupported one")),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value> {
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x * y)),
            (Value::Scalar(n), v) | (v, Value::Scalar(n)) => self.combine_scale(v, n),
            (Value::Plain(x), Value::Plain(y)) => Ok(Value::Plain(x.checked_mul(&y)?)),
            (Value::Plain(x), Value::Supported(t)) | (Value::Supported(t), Value::Plain(x)) => {
                let m = t.module();
                if same_ring(x.ring(), m.source().ring()) {
                    Ok(Value::Supported(t.mul_base(&x)?))
                } else if same_ring(x.ring(), m.target().ring()) {
                    Ok(Value::Supported(t.act(&x)?))
                } else {
                    Err(Error::usage("factor lives neither on the support nor on the ambient space"))
                }
            }
            (Value::Supported(_), Value::Supported(_)) => {
                Err(Error::usage("the product of two supported classes is not defined"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("u^2 + u").unwrap().to_sexpr(), "(+ (^ u 2) u)");
        assert_eq!(parse("c1(N)^2 * tau").unwrap().to_sexpr(), "(* (^ (c1 N) 2) tau)");
        assert_eq!(
            parse("u +"),
            Err(Error::Syntax {
                offset: 3,
                message: "expected an expression, found end of input".into()
            })
        );
    }

    #[test]
    fn precedence_and_printing() {
        let e = parse("-u^2*3 - (a - b) + c1(O(1))").unwrap();
        assert_eq!(e.to_sexpr(), "(+ (- (* (- (^ u 2)) 3) (- a b)) (c1 O(1)))");
        assert_eq!(e.to_string(), "-u^2*3 - (a - b) + c1(O(1))");
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn operations_in_expressions() {
        let e = parse("td(custom: u + 2*u^3) * itd(qmodp)").unwrap();
        assert_eq!(parse(&e.to_string()).unwrap(), e);
        let Expr::Mul(a, _) = e else { panic!() };
        let Expr::Td(op) = *a else { panic!() };
        assert_eq!(polynomial_coefficients(op.series.as_ref().unwrap(), "u").unwrap(), vec![0, 1, 0, 2]);
    }

    #[test]
    fn error_offsets() {
        assert!(matches!(parse("u ^ x"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("(u"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("u u"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
    }
}
