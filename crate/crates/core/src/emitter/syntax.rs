//! Tokenizer and Pratt parser for the subset of MiniZinc the emitter writes.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    /// Punctuation and operators, including keyword operators like `in`.
    Sym(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: [&str; 24] = [
    "<->", "[|", "|]", "->", "/\\", "\\/", "!=", "<=", ">=", "==", "..", "(", ")", "[", "]", "{", "}", ",", ";", ":",
    "=", "<", ">", "|",
];
const SINGLE: [&str; 2] = [".", "-"];
const WORD_OPS: [&str; 6] = ["in", "subset", "superset", "union", "diff", "intersect"];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut stack: Vec<(char, usize, usize)> = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line_no, col) = (li + 1, i + 1);
            let err = |message: String| SyntaxError { line: line_no, column: col, message };
            if c == '%' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match WORD_OPS.iter().find(|w| **w == word) {
                    Some(w) => Tok::Sym(w),
                    None => Tok::Ident(word),
                }
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                Tok::Int(digits.parse().map_err(|_| err(format!("integer `{digits}` out of range")))?)
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(err("unterminated string".into()));
                }
                i += 1;
                Tok::Str(chars[start..i - 1].iter().collect())
            } else {
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                let sym = SYMBOLS
                    .iter()
                    .chain(SINGLE.iter())
                    .filter(|s| rest.starts_with(**s))
                    .max_by_key(|s| s.len())
                    .ok_or_else(|| err(format!("unexpected character `{c}`")))?;
                i += sym.chars().count();
                Tok::Sym(sym)
            };
            if let Tok::Sym(s) = &tok {
                match *s {
                    "(" | "[" | "{" | "[|" => stack.push((s.chars().next().unwrap(), line_no, col)),
                    ")" | "]" | "}" | "|]" => {
                        let want = match *s {
                            ")" => '(',
                            "}" => '{',
                            _ => '[',
                        };
                        match stack.pop() {
                            Some((open, ..)) if open == want => {}
                            _ => return Err(err(format!("unbalanced `{s}`"))),
                        }
                    }
                    _ => {}
                }
            }
            out.push(Token { tok, line: line_no, column: col });
        }
    }
    if let Some((open, line, column)) = stack.pop() {
        return Err(SyntaxError { line, column, message: format!("unclosed `{open}`") });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Ident(String),
    Set(Vec<Expr>),
    Array(Vec<Expr>),
    Tuple(Vec<Expr>),
    Index(Box<Expr>, Vec<Expr>),
    Field(Box<Expr>, usize),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Binary(&'static str, Box<Expr>, Box<Expr>),
    /// `forall` / `exists` over generators with an optional filter.
    Quant { name: String, gens: Vec<(String, Expr)>, filter: Option<Box<Expr>>, body: Box<Expr> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeInst {
    Int,
    Bool,
    Named(String),
    Range(Expr, Expr),
    Set(Box<TypeInst>),
    Array(Vec<TypeInst>, Box<TypeInst>),
    Tuple(Vec<TypeInst>),
    Var(Box<TypeInst>),
}

impl TypeInst {
    pub fn is_var(&self) -> bool {
        match self {
            TypeInst::Var(_) => true,
            TypeInst::Array(_, t) => t.is_var(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Include(String),
    Enum { name: String, members: Option<Vec<String>> },
    Decl { ty: TypeInst, name: String, value: Option<Expr> },
    Assign { name: String, value: Expr },
    Constraint(Expr),
    Solve(Option<(String, Expr)>),
    Output(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located<T> {
    pub item: T,
    pub line: usize,
}

pub fn parse(src: &str) -> Result<Vec<Located<Item>>, SyntaxError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut items = Vec::new();
    while p.pos < p.tokens.len() {
        let line = p.tokens[p.pos].line;
        let item = p.item()?;
        p.expect(";")?;
        items.push(Located { item, line });
    }
    Ok(items)
}

#[cfg(test)]
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser { tokens: tokenize(src)?, pos: 0 };
    let e = p.expr(0)?;
    if p.pos < p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn binary_power(op: &str) -> Option<(u8, u8)> {
    // (left, right) binding power; higher binds tighter
    Some(match op {
        "<->" => (10, 11),
        "->" => (20, 21),
        "\\/" => (30, 31),
        "/\\" => (40, 41),
        "=" | "==" | "!=" | "<" | "<=" | ">" | ">=" => (50, 51),
        "in" | "subset" | "superset" => (60, 61),
        "union" | "diff" => (70, 71),
        ".." => (80, 81),
        "intersect" => (100, 101),
        "-" => (90, 91),
        _ => return None,
    })
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn error(&self, message: &str) -> SyntaxError {
        let (line, column) = match self.tokens.get(self.pos).or(self.tokens.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        };
        let found = match self.peek() {
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Int(i)) => format!("`{i}`"),
            Some(Tok::Str(s)) => format!("\"{s}\""),
            Some(Tok::Sym(s)) => format!("`{s}`"),
            None => "end of input".into(),
        };
        SyntaxError { line, column, message: format!("{message}, found {found}") }
    }

    fn expect(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.peek_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        let hit = self.peek_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn peek_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn item(&mut self) -> Result<Item, SyntaxError> {
        if self.peek_ident("include") {
            self.pos += 1;
            return match self.peek().cloned() {
                Some(Tok::Str(s)) => {
                    self.pos += 1;
                    Ok(Item::Include(s))
                }
                _ => Err(self.error("expected a file name")),
            };
        }
        if self.peek_ident("enum") {
            self.pos += 1;
            let name = self.ident()?;
            let members = if self.eat("=") {
                self.expect("{")?;
                let mut m = Vec::new();
                while !self.peek_sym("}") {
                    m.push(self.ident()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                Some(m)
            } else {
                None
            };
            return Ok(Item::Enum { name, members });
        }
        if self.peek_ident("constraint") {
            self.pos += 1;
            return Ok(Item::Constraint(self.expr(0)?));
        }
        if self.peek_ident("solve") {
            self.pos += 1;
            if self.peek_ident("satisfy") {
                self.pos += 1;
                return Ok(Item::Solve(None));
            }
            let goal = self.ident()?;
            if goal != "minimize" && goal != "maximize" {
                return Err(self.error("expected satisfy, minimize or maximize"));
            }
            return Ok(Item::Solve(Some((goal, self.expr(0)?))));
        }
        if self.peek_ident("output") {
            self.pos += 1;
            return Ok(Item::Output(self.expr(0)?));
        }
        if let (Some(Tok::Ident(name)), Some(Token { tok: Tok::Sym("="), .. })) =
            (self.peek().cloned(), self.tokens.get(self.pos + 1))
        {
            self.pos += 2;
            return Ok(Item::Assign { name, value: self.expr(0)? });
        }
        let ty = self.type_inst()?;
        self.expect(":")?;
        let name = self.ident()?;
        let value = if self.eat("=") { Some(self.expr(0)?) } else { None };
        Ok(Item::Decl { ty, name, value })
    }

    fn type_inst(&mut self) -> Result<TypeInst, SyntaxError> {
        if self.peek_ident("var") {
            self.pos += 1;
            return Ok(TypeInst::Var(Box::new(self.type_inst()?)));
        }
        if self.peek_ident("array") {
            self.pos += 1;
            self.expect("[")?;
            let mut dims = vec![self.type_inst()?];
            while self.eat(",") {
                dims.push(self.type_inst()?);
            }
            self.expect("]")?;
            if !self.peek_ident("of") {
                return Err(self.error("expected `of`"));
            }
            self.pos += 1;
            return Ok(TypeInst::Array(dims, Box::new(self.type_inst()?)));
        }
        if self.peek_ident("set") {
            self.pos += 1;
            if !self.peek_ident("of") {
                return Err(self.error("expected `of`"));
            }
            self.pos += 1;
            return Ok(TypeInst::Set(Box::new(self.type_inst()?)));
        }
        if self.peek_ident("tuple") {
            self.pos += 1;
            self.expect("(")?;
            let mut parts = vec![self.type_inst()?];
            while self.eat(",") {
                parts.push(self.type_inst()?);
            }
            self.expect(")")?;
            return Ok(TypeInst::Tuple(parts));
        }
        if self.peek_ident("int") {
            self.pos += 1;
            return Ok(TypeInst::Int);
        }
        if self.peek_ident("bool") {
            self.pos += 1;
            return Ok(TypeInst::Bool);
        }
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            if !matches!(self.tokens.get(self.pos + 1), Some(Token { tok: Tok::Sym(".."), .. })) {
                self.pos += 1;
                return Ok(TypeInst::Named(name));
            }
        }
        let lo = self.expr(81)?;
        self.expect("..")?;
        let hi = self.expr(81)?;
        Ok(TypeInst::Range(lo, hi))
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.prefix()?;
        loop {
            if self.peek_sym("[") {
                self.pos += 1;
                let idx = self.list("]")?;
                lhs = Expr::Index(Box::new(lhs), idx);
                continue;
            }
            if self.peek_sym(".") {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Int(k)) if k >= 1 => {
                        self.pos += 1;
                        lhs = Expr::Field(Box::new(lhs), k as usize);
                        continue;
                    }
                    _ => return Err(self.error("expected a tuple field number")),
                }
            }
            let Some(Tok::Sym(op)) = self.peek().cloned() else { break };
            let Some((l, r)) = binary_power(op) else { break };
            if l < min_bp {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(r)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    /// Comma-separated expressions up to the closing symbol.
    fn list(&mut self, close: &str) -> Result<Vec<Expr>, SyntaxError> {
        let mut out = Vec::new();
        while !self.peek_sym(close) {
            out.push(self.expr(0)?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    fn prefix(&mut self) -> Result<Expr, SyntaxError> {
        let Some(tok) = self.peek().cloned() else { return Err(self.error("expected an expression")) };
        self.pos += 1;
        match tok {
            Tok::Int(i) => Ok(Expr::Int(i)),
            Tok::Sym("-") => Ok(Expr::Neg(Box::new(self.expr(95)?))),
            Tok::Sym("{") => Ok(Expr::Set(self.list("}")?)),
            Tok::Sym("[") => Ok(Expr::Array(self.list("]")?)),
            Tok::Sym("(") => {
                let items = self.list(")")?;
                match items.len() {
                    1 => Ok(items.into_iter().next().unwrap()),
                    0 => Err(self.error("empty parentheses")),
                    _ => Ok(Expr::Tuple(items)),
                }
            }
            Tok::Ident(word) if word == "not" => Ok(Expr::Not(Box::new(self.expr(95)?))),
            Tok::Ident(word) if (word == "forall" || word == "exists") && self.peek_sym("(") => self.quantifier(word),
            Tok::Ident(word) => Ok(Expr::Ident(word)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected an expression"))
            }
        }
    }

    fn quantifier(&mut self, name: String) -> Result<Expr, SyntaxError> {
        self.expect("(")?;
        let mut gens = Vec::new();
        loop {
            let var = self.ident()?;
            self.expect("in")?;
            gens.push((var, self.expr(61)?));
            if !self.eat(",") {
                break;
            }
        }
        let filter = if self.peek_ident("where") {
            self.pos += 1;
            Some(Box::new(self.expr(0)?))
        } else {
            None
        };
        self.expect(")")?;
        self.expect("(")?;
        let body = self.expr(0)?;
        self.expect(")")?;
        Ok(Expr::Quant { name, gens, filter, body: Box::new(body) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_follows_minizinc() {
        let e = parse_expr("a in s /\\ b = c union { d } -> not x").unwrap();
        let Expr::Binary("->", lhs, rhs) = e else { panic!() };
        assert!(matches!(*rhs, Expr::Not(_)));
        let Expr::Binary("/\\", l, r) = *lhs else { panic!() };
        assert!(matches!(*l, Expr::Binary("in", ..)));
        let Expr::Binary("=", _, u) = *r else { panic!() };
        assert!(matches!(*u, Expr::Binary("union", ..)));
    }

    #[test]
    fn index_arithmetic_and_fields() {
        let e = parse_expr("known_points[i-1]").unwrap();
        let Expr::Index(_, idx) = e else { panic!() };
        assert!(matches!(idx[0], Expr::Binary("-", ..)));
        assert_eq!(parse_expr("t.2").unwrap(), Expr::Field(Box::new(Expr::Ident("t".into())), 2));
    }

    #[test]
    fn quantifier_with_filter() {
        let e = parse_expr("forall(i in 1..m where i <= n)(x[i] = 0)").unwrap();
        let Expr::Quant { name, gens, filter, .. } = e else { panic!() };
        assert_eq!(name, "forall");
        assert_eq!(gens[0].0, "i");
        assert!(filter.is_some());
    }

    #[test]
    fn unbalanced_delimiters_are_located() {
        let err = tokenize("constraint (a = b;\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        let err = tokenize("x = [1, 2);").unwrap_err();
        assert!(err.message.contains("unbalanced"));
    }

    #[test]
    fn items() {
        let src = "enum Point;\nint: n = 3;\narray[0..n] of var set of Point: known;\nconstraint known[0] = {};\nsolve satisfy;\n";
        let items = parse(src).unwrap();
        assert_eq!(items.len(), 5);
        assert!(matches!(&items[2].item, Item::Decl { ty, .. } if ty.is_var()));
        assert_eq!(items[3].line, 4);
    }
}
