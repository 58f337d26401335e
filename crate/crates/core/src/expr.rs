//! A small arithmetic language for describing black-box models in files.
//!
//! One statement per line; `#` starts a comment.
//!
//! ```text
//! # constants and intermediate quantities
//! b1 = 0.5
//! z = x1^2 + 2*x2^2
//! # the model output
//! f = cos(z) + z - b1*x3
//! # optional block functions, over 1-based input indices
//! g[1,2] = cos(z) + z
//! g[3] = -b1*x3
//! ```
//!
//! Inputs are `x1, x2, …`. Operators: `+ - * /` (also `− × ÷`), `^` (right
//! associative, binds tighter than unary minus), parentheses, and the
//! functions `sin cos tan exp log sqrt abs`. The constant `pi` is predefined.
//! A name must be defined before it is used.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::mc::BlackBoxModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// A compiled expression. `Input(k)` reads the 0-based slot `k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Input(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Input(k) => x[*k],
            Expr::Neg(e) => -e.eval(x),
            Expr::Call(f, e) => f.apply(e.eval(x)),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
        }
    }

    /// 0-based input slots read by the expression, sorted.
    pub fn inputs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_inputs(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_inputs(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Input(k) => out.push(*k),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_inputs(out),
            Expr::Bin(_, a, b) => {
                a.collect_inputs(out);
                b.collect_inputs(out);
            }
        }
    }

    /// Rewrites input slots through `map` (old slot → new slot).
    pub fn remap(&self, map: &dyn Fn(usize) -> usize) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Input(k) => Expr::Input(map(*k)),
            Expr::Neg(e) => Expr::Neg(Box::new(e.remap(map))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.remap(map))),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.remap(map)), Box::new(b.remap(map))),
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b == 2.0 {
        a * a
    } else if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

/// A block function: 1-based input labels and an expression over the
/// block's local slots (slot `l` is the `l`-th label).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockExpr {
    pub labels: Vec<usize>,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    /// The model output `f`, over global slots.
    pub output: Option<Expr>,
    pub blocks: Vec<BlockExpr>,
    /// Largest input label referenced anywhere.
    pub max_input: usize,
}

impl Program {
    pub fn output_model(&self, p: usize) -> Option<BlackBoxModel> {
        let e = self.output.clone()?;
        Some(BlackBoxModel::new(p, move |x| e.eval(x)))
    }
}

impl BlockExpr {
    pub fn model(&self) -> BlackBoxModel {
        let e = self.expr.clone();
        BlackBoxModel::new(self.labels.len(), move |x| e.eval(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Op(c) => write!(f, "'{c}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eq => f.write_str("'='"),
        }
    }
}

/// Tokens of one line with their 1-based columns.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                line: line_no,
                column: col,
                message: format!("malformed number '{text}'"),
            })?;
            out.push((Tok::Num(value), col));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let tok = match c {
            '+' => Tok::Op('+'),
            '-' | '−' => Tok::Op('-'),
            '*' | '×' => Tok::Op('*'),
            '/' | '÷' => Tok::Op('/'),
            '^' => Tok::Op('^'),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            other => {
                return Err(ParseError {
                    line: line_no,
                    column: col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

fn input_label(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    line_len: usize,
    names: &'a HashMap<String, Expr>,
    max_input: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.line_len + 1, |(_, c)| *c)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let col = self.column();
        match self.next() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, _)) => Err(self.err(col, format!("expected {want}, found {t}"))),
            None => Err(self.err(col, format!("expected {want}, found end of line"))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := ('-'|'+') unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // power := atom ('^' unary)?
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.next() {
            Some((Tok::Num(v), _)) => Ok(Expr::Const(v)),
            Some((Tok::LParen, _)) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some((Tok::Ident(name), _)) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(label) = input_label(&name) {
                    self.max_input = self.max_input.max(label);
                    return Ok(Expr::Input(label - 1));
                }
                if let Some(e) = self.names.get(&name) {
                    for k in e.inputs() {
                        self.max_input = self.max_input.max(k + 1);
                    }
                    return Ok(e.clone());
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                Err(self.err(col, format!("undefined name '{name}'")))
            }
            Some((t, _)) => Err(self.err(col, format!("expected a value, found {t}"))),
            None => Err(self.err(col, "expected a value, found end of line")),
        }
    }
}

/// Parses a whole model file.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut names: HashMap<String, Expr> = HashMap::new();
    let mut program = Program::default();
    for (idx, line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ParseError {
            line: line_no,
            column,
            message,
        };
        let (name, name_col) = match &toks[0] {
            (Tok::Ident(n), c) => (n.clone(), *c),
            (t, c) => return Err(err(*c, format!("expected a name at start of statement, found {t}"))),
        };
        let mut pos = 1;
        let mut labels: Option<Vec<usize>> = None;
        if matches!(toks.get(pos), Some((Tok::LBracket, _))) {
            if name != "g" {
                return Err(err(toks[pos].1, "only block functions 'g[...]' take an index list".into()));
            }
            pos += 1;
            let mut ls = Vec::new();
            loop {
                match toks.get(pos) {
                    Some((Tok::Num(v), c)) => {
                        if v.fract() != 0.0 || *v < 1.0 {
                            return Err(err(*c, format!("input index {v} is not a positive integer")));
                        }
                        ls.push(*v as usize);
                        pos += 1;
                    }
                    Some((t, c)) => return Err(err(*c, format!("expected an input index, found {t}"))),
                    None => return Err(err(line.len() + 1, "unterminated index list".into())),
                }
                match toks.get(pos) {
                    Some((Tok::Comma, _)) => pos += 1,
                    Some((Tok::RBracket, _)) => {
                        pos += 1;
                        break;
                    }
                    Some((t, c)) => return Err(err(*c, format!("expected ',' or ']', found {t}"))),
                    None => return Err(err(line.len() + 1, "unterminated index list".into())),
                }
            }
            let mut sorted = ls.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != ls.len() {
                return Err(err(toks[1].1, "repeated input index".into()));
            }
            labels = Some(ls);
        }
        match toks.get(pos) {
            Some((Tok::Eq, _)) => pos += 1,
            Some((t, c)) => return Err(err(*c, format!("expected '=', found {t}"))),
            None => return Err(err(line.len() + 1, "expected '='".into())),
        }
        if Func::from_name(&name).is_some() || input_label(&name).is_some() || name == "pi" {
            return Err(err(name_col, format!("'{name}' is reserved")));
        }

        let mut parser = Parser {
            toks: &toks[pos..],
            pos: 0,
            line: line_no,
            line_len: line.chars().count(),
            names: &names,
            max_input: 0,
        };
        let expr = parser.expr()?;
        if let Some((t, c)) = parser.toks.get(parser.pos) {
            return Err(err(*c, format!("unexpected {t} after expression")));
        }
        program.max_input = program.max_input.max(parser.max_input);

        match labels {
            Some(labels) => {
                for &k in &expr.inputs() {
                    if !labels.contains(&(k + 1)) {
                        return Err(err(
                            name_col,
                            format!("block function reads x{} outside its index list", k + 1),
                        ));
                    }
                }
                for &l in &labels {
                    program.max_input = program.max_input.max(l);
                }
                let local = expr.remap(&|k| labels.iter().position(|&l| l == k + 1).unwrap());
                program.blocks.push(BlockExpr { labels, expr: local });
            }
            None if name == "f" => {
                if program.output.is_some() {
                    return Err(err(name_col, "output 'f' defined twice".into()));
                }
                program.output = Some(expr);
            }
            None => {
                names.insert(name, expr);
            }
        }
    }
    Ok(program)
}
