//! Rule predicate language.
//!
//! ```text
//! expr       := or
//! or         := and ("||" and)*
//! and        := unary ("&&" unary)*
//! unary      := "!" unary | primary
//! primary    := "(" expr ")" | "true" | "false" | quantifier | comparison
//! quantifier := ("any" | "all") "(" scope "," expr ")"
//! scope      := "objective" | "variable" | "constraint"
//! comparison := feature op literal
//! op         := "==" | "!=" | "<" | "<=" | ">" | ">="
//! literal    := identifier | number | "\"" text "\""
//! ```
//!
//! Features are resolved against the innermost quantifier scope first and
//! spec level second; quantifiers do not nest. Enumerated features only
//! accept their listed values and only `==`/`!=`. A comparison against a
//! missing value is false whatever the operator.

use std::fmt;

use super::features::{lookup, FeatureKind, FeatureValue, Features, Item, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Text(String),
    Number(f64),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !s.is_empty() => {
                f.write_str(s)
            }
            Literal::Text(s) => write!(f, "{s:?}"),
            Literal::Number(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(bool),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Cmp {
        feature: String,
        scope: Scope,
        op: CmpOp,
        literal: Literal,
    },
    Quant {
        all: bool,
        scope: Scope,
        body: Box<Expr>,
    },
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, parts: &[Expr], sep: &str| -> fmt::Result {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                match p {
                    Expr::And(_) | Expr::Or(_) => write!(f, "({p})")?,
                    _ => write!(f, "{p}")?,
                }
            }
            Ok(())
        };
        match self {
            Expr::Const(b) => write!(f, "{b}"),
            Expr::Not(inner) => match **inner {
                Expr::Const(_) | Expr::Quant { .. } | Expr::Not(_) => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            Expr::And(parts) => join(f, parts, " && "),
            Expr::Or(parts) => join(f, parts, " || "),
            Expr::Cmp {
                feature, op, literal, ..
            } => write!(f, "{feature} {} {literal}", op.as_str()),
            Expr::Quant { all, scope, body } => {
                write!(f, "{}({}, {body})", if *all { "all" } else { "any" }, scope.as_str())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Str(String),
    Op(&'static str),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position, message: String| SyntaxError { position, message };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            i += 1;
            while i < bytes.len() && matches!(bytes[i], b'0'..=b'9' | b'.' | b'e' | b'E' | b'-' | b'+') {
                // a sign is only part of the number right after an exponent marker
                if matches!(bytes[i], b'-' | b'+') && !matches!(bytes[i - 1], b'e' | b'E') {
                    break;
                }
                i += 1;
            }
            let n: f64 = src[start..i]
                .parse()
                .map_err(|_| err(start, format!("invalid number {:?}", &src[start..i])))?;
            out.push((start, Token::Number(n)));
            continue;
        }
        if c == '"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            if i == bytes.len() {
                return Err(err(start, "unterminated string".into()));
            }
            out.push((start, Token::Str(src[start + 1..i].to_string())));
            i += 1;
            continue;
        }
        let two = src.get(i..i + 2).unwrap_or("");
        let op = ["&&", "||", "==", "!=", "<=", ">="].into_iter().find(|o| *o == two);
        if let Some(op) = op {
            out.push((start, Token::Op(op)));
            i += 2;
            continue;
        }
        let tok = match c {
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '!' => Token::Op("!"),
            '<' => Token::Op("<"),
            '>' => Token::Op(">"),
            _ => return Err(err(start, format!("unexpected character {c:?}"))),
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    scope: Scope,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn or(&mut self) -> Result<Expr, SyntaxError> {
        let mut parts = vec![self.and()?];
        while self.peek() == Some(&Token::Op("||")) {
            self.pos += 1;
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Or(parts)
        })
    }

    fn and(&mut self) -> Result<Expr, SyntaxError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Token::Op("&&")) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(&Token::Op("!")) {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let at = self.offset();
        match self.next() {
            Some(Token::LParen) => {
                let e = self.or()?;
                self.expect(Token::RParen, "')'")?;
                Ok(e)
            }
            Some(Token::Ident(id)) if id == "true" => Ok(Expr::Const(true)),
            Some(Token::Ident(id)) if id == "false" => Ok(Expr::Const(false)),
            Some(Token::Ident(id)) if (id == "any" || id == "all") && self.peek() == Some(&Token::LParen) => {
                self.pos += 1;
                if self.scope != Scope::Spec {
                    return Err(SyntaxError {
                        position: at,
                        message: "quantifiers cannot be nested".into(),
                    });
                }
                let scope = match self.next() {
                    Some(Token::Ident(s)) => Scope::parse(&s),
                    _ => None,
                };
                let Some(scope) = scope else {
                    self.pos -= 1;
                    return self.error("expected objective, variable or constraint");
                };
                self.expect(Token::Comma, "','")?;
                self.scope = scope;
                let body = self.or()?;
                self.scope = Scope::Spec;
                self.expect(Token::RParen, "')'")?;
                Ok(Expr::Quant {
                    all: id == "all",
                    scope,
                    body: Box::new(body),
                })
            }
            Some(Token::Ident(feature)) => self.comparison(feature, at),
            _ => Err(SyntaxError {
                position: at,
                message: "expected an expression".into(),
            }),
        }
    }

    fn comparison(&mut self, feature: String, at: usize) -> Result<Expr, SyntaxError> {
        let Some(def) = lookup(&feature, self.scope) else {
            return Err(SyntaxError {
                position: at,
                message: format!("unknown feature {feature:?} in {} scope", self.scope.as_str()),
            });
        };
        let op = match self.next() {
            Some(Token::Op("==")) => CmpOp::Eq,
            Some(Token::Op("!=")) => CmpOp::Ne,
            Some(Token::Op("<")) => CmpOp::Lt,
            Some(Token::Op("<=")) => CmpOp::Le,
            Some(Token::Op(">")) => CmpOp::Gt,
            Some(Token::Op(">=")) => CmpOp::Ge,
            _ => {
                self.pos -= 1;
                return self.error("expected a comparison operator");
            }
        };
        let lit_at = self.offset();
        let literal = match self.next() {
            Some(Token::Ident(s)) | Some(Token::Str(s)) => Literal::Text(s),
            Some(Token::Number(n)) => Literal::Number(n),
            _ => {
                self.pos -= 1;
                return self.error("expected a literal");
            }
        };
        let bad = |message: String| {
            Err(SyntaxError {
                position: lit_at,
                message,
            })
        };
        match (def.kind, &literal) {
            (FeatureKind::Number, Literal::Number(_)) => {}
            (FeatureKind::Number, _) => return bad(format!("{feature} is numeric")),
            (_, Literal::Number(_)) => return bad(format!("{feature} is not numeric")),
            (_, _) if !matches!(op, CmpOp::Eq | CmpOp::Ne) => return bad(format!("{feature} only supports == and !=")),
            (FeatureKind::Enum(values), Literal::Text(s)) if !values.contains(&s.as_str()) => {
                return bad(format!("{s:?} is not a value of {feature} ({})", values.join(", ")))
            }
            _ => {}
        }
        Ok(Expr::Cmp {
            feature,
            scope: if def.scope == Scope::Spec {
                Scope::Spec
            } else {
                self.scope
            },
            op,
            literal,
        })
    }
}

pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let mut parser = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        end: src.len(),
        scope: Scope::Spec,
    };
    let expr = parser.or()?;
    if parser.pos < parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(expr)
}

fn compare(value: &FeatureValue, op: CmpOp, literal: &Literal) -> bool {
    match (value, literal) {
        (FeatureValue::Text(v), Literal::Text(l)) => match op {
            CmpOp::Eq => v == l,
            CmpOp::Ne => v != l,
            _ => false,
        },
        (FeatureValue::Number(v), Literal::Number(l)) => match op {
            CmpOp::Eq => v == l,
            CmpOp::Ne => v != l,
            CmpOp::Lt => v < l,
            CmpOp::Le => v <= l,
            CmpOp::Gt => v > l,
            CmpOp::Ge => v >= l,
        },
        _ => false,
    }
}

/// Evaluates `expr`, appending a `feature=value` note for each comparison
/// that supports the result.
pub fn evaluate(expr: &Expr, features: &Features, matched: &mut Vec<String>) -> bool {
    eval(expr, features, None, matched)
}

fn eval(expr: &Expr, features: &Features, item: Option<&Item>, matched: &mut Vec<String>) -> bool {
    match expr {
        Expr::Const(b) => *b,
        Expr::Not(inner) => {
            let result = !eval(inner, features, item, &mut Vec::new());
            if result {
                let prefix = item.map(|i| format!("{}: ", i.label)).unwrap_or_default();
                matched.push(format!("{prefix}not ({inner})"));
            }
            result
        }
        Expr::And(parts) => {
            let mark = matched.len();
            let ok = parts.iter().all(|p| eval(p, features, item, matched));
            if !ok {
                matched.truncate(mark);
            }
            ok
        }
        Expr::Or(parts) => {
            for p in parts {
                let mark = matched.len();
                if eval(p, features, item, matched) {
                    return true;
                }
                matched.truncate(mark);
            }
            false
        }
        Expr::Cmp {
            feature,
            scope,
            op,
            literal,
        } => {
            let (value, prefix) = match (scope, item) {
                (Scope::Spec, _) | (_, None) => (features.spec.get(feature.as_str()), String::new()),
                (_, Some(item)) => (item.values.get(feature.as_str()), format!("{}: ", item.label)),
            };
            let value = value.cloned().unwrap_or(FeatureValue::Missing);
            let ok = compare(&value, *op, literal);
            if ok {
                matched.push(format!("{prefix}{feature}={value}"));
            }
            ok
        }
        Expr::Quant { all, scope, body } => {
            let items = features.items(*scope);
            let mark = matched.len();
            if *all {
                let ok = items.iter().all(|it| eval(body, features, Some(it), matched));
                if !ok {
                    matched.truncate(mark);
                }
                ok
            } else {
                for it in items {
                    let inner = matched.len();
                    if eval(body, features, Some(it), matched) {
                        return true;
                    }
                    matched.truncate(inner);
                }
                false
            }
        }
    }
}
