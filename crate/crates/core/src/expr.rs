//! Small S-expression language for rational functions, used to store
//! j-invariant formulas as data.
//!
//! ```text
//! expr := integer | integer/integer | symbol
//!       | (+ expr...) | (- expr expr...) | (- expr) | (* expr...)
//!       | (/ expr expr) | (^ expr natural)
//!       | (let ((symbol expr)...) expr)
//! ```
//!
//! `let` bindings are sequential, so later bindings may refer to earlier ones.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Field, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("expression syntax error: {0}")]
    Parse(String),
    #[error("unbound variable {0:?}")]
    UnboundVariable(String),
    #[error("constant {0} cannot be represented in the target field")]
    Constant(String),
    #[error("division by zero while evaluating {0}")]
    DivisionByZero(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Var(String),
    Add(Vec<Expr>),
    Sub(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Let(Vec<(String, Expr)>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut atom = String::new();
    let flush = |atom: &mut String, out: &mut Vec<Token>| {
        if !atom.is_empty() {
            out.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for c in text.chars() {
        match c {
            '(' | ')' => {
                flush(&mut atom, &mut out);
                out.push(if c == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => flush(&mut atom, &mut out),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut out);
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Result<Token, ExprError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ExprError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_close(&mut self) -> Result<(), ExprError> {
        match self.next()? {
            Token::Close => Ok(()),
            t => Err(ExprError::Parse(format!("expected ')', found {t:?}"))),
        }
    }

    fn peek_close(&self) -> bool {
        matches!(self.tokens.get(self.pos), Some(Token::Close))
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        match self.next()? {
            Token::Close => Err(ExprError::Parse("unexpected ')'".into())),
            Token::Atom(a) => atom(&a),
            Token::Open => {
                let head = match self.next()? {
                    Token::Atom(a) => a,
                    t => return Err(ExprError::Parse(format!("expected operator, found {t:?}"))),
                };
                if head == "let" {
                    return self.let_form();
                }
                let mut args = Vec::new();
                while !self.peek_close() {
                    args.push(self.expr()?);
                }
                self.expect_close()?;
                build(&head, args)
            }
        }
    }

    fn let_form(&mut self) -> Result<Expr, ExprError> {
        if self.next()? != Token::Open {
            return Err(ExprError::Parse("let expects a binding list".into()));
        }
        let mut bindings = Vec::new();
        while !self.peek_close() {
            if self.next()? != Token::Open {
                return Err(ExprError::Parse("malformed let binding".into()));
            }
            let name = match self.next()? {
                Token::Atom(a) if is_symbol(&a) => a,
                t => return Err(ExprError::Parse(format!("bad binding name {t:?}"))),
            };
            let value = self.expr()?;
            self.expect_close()?;
            bindings.push((name, value));
        }
        self.expect_close()?;
        let body = self.expr()?;
        self.expect_close()?;
        Ok(Expr::Let(bindings, Box::new(body)))
    }
}

fn is_symbol(a: &str) -> bool {
    let mut chars = a.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn atom(a: &str) -> Result<Expr, ExprError> {
    if is_symbol(a) {
        return Ok(Expr::Var(a.to_string()));
    }
    a.parse::<Rational>()
        .map(Expr::Const)
        .map_err(|_| ExprError::Parse(format!("bad atom {a:?}")))
}

fn build(head: &str, mut args: Vec<Expr>) -> Result<Expr, ExprError> {
    let arity = |ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(ExprError::Parse(format!("wrong number of arguments to {head}")))
        }
    };
    match head {
        "+" => Ok(Expr::Add(args)),
        "*" => Ok(Expr::Mul(args)),
        "-" => {
            arity(!args.is_empty())?;
            Ok(Expr::Sub(args))
        }
        "/" => {
            arity(args.len() == 2)?;
            let d = args.pop().unwrap();
            let n = args.pop().unwrap();
            Ok(Expr::Div(Box::new(n), Box::new(d)))
        }
        "^" => {
            arity(args.len() == 2)?;
            let e = match args.pop().unwrap() {
                Expr::Const(r) => r
                    .to_i128()
                    .and_then(|v| u32::try_from(v).ok())
                    .ok_or_else(|| ExprError::Parse(format!("exponent {r} is not a natural number")))?,
                e => return Err(ExprError::Parse(format!("exponent {e} is not a literal"))),
            };
            Ok(Expr::Pow(Box::new(args.pop().unwrap()), e))
        }
        _ => Err(ExprError::Parse(format!("unknown operator {head:?}"))),
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(text: &str) -> Result<Self, ExprError> {
        let mut p = Parser { tokens: tokenize(text), pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ExprError::Parse("trailing input".into()));
        }
        Ok(e)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, op: &str, args: &[Expr]) -> fmt::Result {
    write!(f, "({op}")?;
    for a in args {
        write!(f, " {a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a) => write_list(f, "+", a),
            Expr::Sub(a) => write_list(f, "-", a),
            Expr::Mul(a) => write_list(f, "*", a),
            Expr::Div(n, d) => write!(f, "(/ {n} {d})"),
            Expr::Pow(b, e) => write!(f, "(^ {b} {e})"),
            Expr::Let(bindings, body) => {
                write!(f, "(let (")?;
                for (i, (name, value)) in bindings.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({name} {value})")?;
                }
                write!(f, ") {body})")
            }
        }
    }
}

impl Expr {
    /// Evaluates with `vars` bound; `embed` maps rational constants into the
    /// target field. `one` fixes the field for empty sums and products.
    pub fn eval<F: Field>(
        &self,
        one: &F,
        vars: &HashMap<String, F>,
        embed: &dyn Fn(&Rational) -> Option<F>,
    ) -> Result<F, ExprError> {
        let mut env = vars.clone();
        self.eval_in(one, &mut env, embed)
    }

    fn eval_in<F: Field>(
        &self,
        one: &F,
        env: &mut HashMap<String, F>,
        embed: &dyn Fn(&Rational) -> Option<F>,
    ) -> Result<F, ExprError> {
        match self {
            Expr::Const(c) => embed(c).ok_or_else(|| ExprError::Constant(c.to_string())),
            Expr::Var(v) => env.get(v).cloned().ok_or_else(|| ExprError::UnboundVariable(v.clone())),
            Expr::Add(args) => {
                let mut acc = one.zero_like();
                for a in args {
                    acc = acc.add(&a.eval_in(one, env, embed)?);
                }
                Ok(acc)
            }
            Expr::Mul(args) => {
                let mut acc = one.clone();
                for a in args {
                    acc = acc.mul(&a.eval_in(one, env, embed)?);
                }
                Ok(acc)
            }
            Expr::Sub(args) => {
                let first = args[0].eval_in(one, env, embed)?;
                if args.len() == 1 {
                    return Ok(first.neg());
                }
                let mut acc = first;
                for a in &args[1..] {
                    acc = acc.sub(&a.eval_in(one, env, embed)?);
                }
                Ok(acc)
            }
            Expr::Div(n, d) => {
                let n = n.eval_in(one, env, embed)?;
                let dv = d.eval_in(one, env, embed)?;
                n.div(&dv).ok_or_else(|| ExprError::DivisionByZero(d.to_string()))
            }
            Expr::Pow(b, e) => Ok(b.eval_in(one, env, embed)?.pow_u32(*e)),
            Expr::Let(bindings, body) => {
                let saved = env.clone();
                for (name, value) in bindings {
                    let v = value.eval_in(one, env, embed)?;
                    env.insert(name.clone(), v);
                }
                let out = body.eval_in(one, env, embed);
                *env = saved;
                out
            }
        }
    }

    /// Free variables, sorted.
    pub fn free_variables(&self) -> Vec<String> {
        fn walk(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match e {
                Expr::Const(_) => {}
                Expr::Var(v) => {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Expr::Add(a) | Expr::Sub(a) | Expr::Mul(a) => a.iter().for_each(|x| walk(x, bound, out)),
                Expr::Div(n, d) => {
                    walk(n, bound, out);
                    walk(d, bound, out);
                }
                Expr::Pow(b, _) => walk(b, bound, out),
                Expr::Let(bindings, body) => {
                    let depth = bound.len();
                    for (name, value) in bindings {
                        walk(value, bound, out);
                        bound.push(name.clone());
                    }
                    walk(body, bound, out);
                    bound.truncate(depth);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldElement, FieldSpec};

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn eval_q(src: &str, x: i64) -> Result<Rational, ExprError> {
        let e: Expr = src.parse().unwrap();
        let vars = HashMap::from([("x".to_string(), q(x))]);
        e.eval(&q(1), &vars, &|r| Some(r.clone()))
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval_q("(+ x 1 2)", 3).unwrap(), q(6));
        assert_eq!(eval_q("(- x)", 3).unwrap(), q(-3));
        assert_eq!(eval_q("(- x 1 1)", 3).unwrap(), q(1));
        assert_eq!(eval_q("(/ x 2)", 3).unwrap(), Rational::new(3, 2));
        assert_eq!(eval_q("(^ (+ x 1) 3)", 1).unwrap(), q(8));
        assert_eq!(eval_q("(* -1/2 x)", 4).unwrap(), q(-2));
    }

    #[test]
    fn sequential_let() {
        let src = "(let ((t (* x 2)) (u (+ t 1))) (* t u))";
        assert_eq!(eval_q(src, 3).unwrap(), q(42));
        let e: Expr = src.parse().unwrap();
        assert_eq!(e.free_variables(), vec!["x".to_string()]);
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert!(matches!(eval_q("(/ 1 (- x 2))", 2), Err(ExprError::DivisionByZero(_))));
    }

    #[test]
    fn unbound_and_syntax_errors() {
        assert!(matches!(eval_q("(+ y 1)", 0), Err(ExprError::UnboundVariable(_))));
        for bad in ["(+ 1", "(% 1 2)", "(^ x y)", "(/ 1)", "1 2", ")", "(let (x 1) x)"] {
            assert!(bad.parse::<Expr>().is_err(), "{bad}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "(let ((t (/ (* x (+ x 4)) 2))) (/ (* 256 (^ t 3)) (- t 1/3)))";
        let e: Expr = src.parse().unwrap();
        assert_eq!(e.to_string(), src);
        assert_eq!(e.to_string().parse::<Expr>().unwrap(), e);
    }

    #[test]
    fn finite_field_evaluation() {
        let f5 = FieldSpec::prime(5).unwrap();
        let e: Expr = "(/ (+ x 6) 2)".parse().unwrap();
        let one = FieldElement::one(&f5);
        let vars = HashMap::from([("x".to_string(), FieldElement::from_int(&f5, 1))]);
        let v = e.eval(&one, &vars, &|r| r.reduce(&f5)).unwrap();
        // (1 + 6) / 2 = 7 * 3 = 21 = 1 mod 5
        assert_eq!(v.to_string(), "1");
        let e: Expr = "(/ 1 5)".parse().unwrap();
        assert!(matches!(e.eval(&one, &vars, &|r| r.reduce(&f5)), Err(ExprError::DivisionByZero(_))));
        let e: Expr = "1/5".parse().unwrap();
        assert!(matches!(e.eval(&one, &vars, &|r| r.reduce(&f5)), Err(ExprError::Constant(_))));
    }
}
