//! Surface syntax: a small expression grammar with a matching printer.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := primary ('^' INT)*
//! primary:= INT ['/' INT] | SYM | '(' expr ')' | '[' expr ',' expr ']'
//!         | '{' expr ',' expr '}' | 'Tr' '(' expr ')'
//! SYM    := theta | eps<k> | e<k> | x<k> ['@' '{' k (',' k)* '}']
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Theta,
    Eps(u32),
    Gen(u32),
    Var { index: u32, grade: Option<Vec<u32>> },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Comm(Box<Expr>, Box<Expr>),
    SComm(Box<Expr>, Box<Expr>),
    Tr(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Punct(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^()[]{},@".contains(c) {
            i += 1;
            Tok::Punct(c)
        } else {
            return Err(ParseError {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        };
        column += i - start;
        out.push(Token {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_punct(c) {
            self.bump();
            Ok(())
        } else {
            Err(Self::error_at(self.peek(), format!("expected `{c}`, found {}", describe(&self.peek().tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = if self.is_punct('-') {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.is_punct('+') {
                self.bump();
                left = Expr::Add(Box::new(left), Box::new(self.term()?));
            } else if self.is_punct('-') {
                self.bump();
                left = Expr::Sub(Box::new(left), Box::new(self.term()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.factor()?;
        while self.is_punct('*') {
            self.bump();
            left = Expr::Mul(Box::new(left), Box::new(self.factor()?));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.is_punct('^') {
            self.bump();
            let t = self.bump();
            let Tok::Int(k) = &t.tok else {
                return Err(Self::error_at(&t, "expected an exponent"));
            };
            let k = u32::try_from(k).map_err(|_| Self::error_at(&t, "exponent too large"))?;
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn index(t: &Token, digits: &str) -> Result<u32, ParseError> {
        match digits.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(Self::error_at(t, format!("invalid index `{digits}`"))),
        }
    }

    fn symbol(&mut self, t: &Token, name: &str) -> Result<Expr, ParseError> {
        let split = |prefix: &str| {
            name.strip_prefix(prefix)
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        };
        if name == "theta" {
            Ok(Expr::Theta)
        } else if let Some(d) = split("eps") {
            Ok(Expr::Eps(Self::index(t, d)?))
        } else if let Some(d) = split("e") {
            Ok(Expr::Gen(Self::index(t, d)?))
        } else if let Some(d) = split("x") {
            let index = Self::index(t, d)?;
            let grade = if self.is_punct('@') {
                self.bump();
                Some(self.grade()?)
            } else {
                None
            };
            Ok(Expr::Var { index, grade })
        } else if name == "Tr" {
            self.expect('(')?;
            let inner = self.expr()?;
            self.expect(')')?;
            Ok(Expr::Tr(Box::new(inner)))
        } else {
            Err(Self::error_at(t, format!("unknown symbol `{name}`")))
        }
    }

    fn grade(&mut self) -> Result<Vec<u32>, ParseError> {
        self.expect('{')?;
        let mut g = Vec::new();
        loop {
            let t = self.bump();
            let Tok::Int(k) = &t.tok else {
                return Err(Self::error_at(&t, "expected a grade index"));
            };
            let k = Self::index(&t, &k.to_string())?;
            if g.contains(&k) {
                return Err(Self::error_at(&t, format!("index {k} repeated in grade")));
            }
            g.push(k);
            if self.is_punct(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect('}')?;
        g.sort_unstable();
        Ok(g)
    }

    fn pair(&mut self, close: char) -> Result<(Box<Expr>, Box<Expr>), ParseError> {
        let a = self.expr()?;
        self.expect(',')?;
        let b = self.expr()?;
        self.expect(close)?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Int(n) => {
                if self.is_punct('/') {
                    self.bump();
                    let d = self.bump();
                    let Tok::Int(den) = &d.tok else {
                        return Err(Self::error_at(&d, "expected a denominator"));
                    };
                    if den.is_zero() {
                        return Err(Self::error_at(&d, "zero denominator"));
                    }
                    Ok(Expr::Ratio(n.clone(), den.clone()))
                } else {
                    Ok(Expr::Int(n.clone()))
                }
            }
            Tok::Ident(name) => self.symbol(&t, name),
            Tok::Punct('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Punct('[') => {
                let (a, b) = self.pair(']')?;
                Ok(Expr::Comm(a, b))
            }
            Tok::Punct('{') => {
                let (a, b) = self.pair('}')?;
                Ok(Expr::SComm(a, b))
            }
            other => Err(Self::error_at(&t, format!("unexpected {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    if p.peek().tok == Tok::End {
        return Err(Parser::error_at(p.peek(), "empty expression"));
    }
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(Parser::error_at(p.peek(), format!("unexpected {}", describe(&p.peek().tok))));
    }
    Ok(e)
}

// Binding strength of the printed form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Product,
    Power,
    Atom,
}

fn level(e: &Expr) -> Level {
    match e {
        Expr::Neg(_) | Expr::Add(..) | Expr::Sub(..) => Level::Sum,
        Expr::Mul(..) => Level::Product,
        Expr::Pow(..) => Level::Power,
        _ => Level::Atom,
    }
}

fn wrap(e: &Expr, min: Level) -> String {
    if level(e) >= min {
        render(e)
    } else {
        format!("({})", render(e))
    }
}

fn render_sum_left(e: &Expr) -> String {
    match e {
        Expr::Neg(_) | Expr::Add(..) | Expr::Sub(..) => render(e),
        _ => wrap(e, Level::Product),
    }
}

pub fn render(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Ratio(n, d) => format!("{n}/{d}"),
        Expr::Theta => "theta".to_string(),
        Expr::Eps(k) => format!("eps{k}"),
        Expr::Gen(k) => format!("e{k}"),
        Expr::Var { index, grade: None } => format!("x{index}"),
        Expr::Var {
            index,
            grade: Some(g),
        } => {
            let g: Vec<String> = g.iter().map(|k| k.to_string()).collect();
            format!("x{index}@{{{}}}", g.join(","))
        }
        Expr::Neg(a) => format!("-{}", wrap(a, Level::Product)),
        Expr::Add(a, b) => format!("{} + {}", render_sum_left(a), wrap(b, Level::Product)),
        Expr::Sub(a, b) => format!("{} - {}", render_sum_left(a), wrap(b, Level::Product)),
        Expr::Mul(a, b) => format!("{}*{}", wrap(a, Level::Product), wrap(b, Level::Power)),
        Expr::Pow(a, k) => {
            let base = match **a {
                Expr::Ratio(..) => format!("({})", render(a)),
                _ => wrap(a, Level::Atom),
            };
            format!("{base}^{k}")
        }
        Expr::Comm(a, b) => format!("[{},{}]", render(a), render(b)),
        Expr::SComm(a, b) => format!("{{{},{}}}", render(a), render(b)),
        Expr::Tr(a) => format!("Tr({})", render(a)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl Expr {
    /// Largest variable index, 0 if none.
    pub fn max_var(&self) -> u32 {
        self.fold_vars(0, &mut |acc, i, _| acc.max(i))
    }

    fn fold_vars<T>(&self, init: T, f: &mut impl FnMut(T, u32, Option<&Vec<u32>>) -> T) -> T {
        match self {
            Expr::Var { index, grade } => f(init, *index, grade.as_ref()),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Tr(a) => a.fold_vars(init, f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Comm(a, b) | Expr::SComm(a, b) => {
                let acc = a.fold_vars(init, f);
                b.fold_vars(acc, f)
            }
            _ => init,
        }
    }

    /// Grade annotations by variable, erroring on conflicting ones.
    pub fn annotations(&self) -> Result<std::collections::BTreeMap<u32, Vec<u32>>, String> {
        self.fold_vars(Ok(Default::default()), &mut |acc, i, g| {
            let mut map = acc?;
            if let Some(g) = g {
                if let Some(old) = map.insert(i, g.clone()) {
                    if &old != g {
                        return Err(format!("conflicting grade annotations on x{i}"));
                    }
                }
            }
            Ok(map)
        })
    }
}
