use super::lexer::{lex, Tok};
use super::{Binder, Expr, FrontendError, Pattern, Pos, Program, Rhs, Stmt, Var};
use crate::signature::SortId;

const KEYWORDS: [&str; 3] = ["proc", "do", "return"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

/// Parses one program.
pub fn parse(source: &str) -> Result<Program, FrontendError> {
    let mut p = Parser {
        toks: lex(source)?,
        at: 0,
    };
    let program = p.program()?;
    p.expect(&Tok::Eof)?;
    Ok(program)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.at + n).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> FrontendError {
        FrontendError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), FrontendError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), FrontendError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => Err(self.error(&format!("`{kw}`"))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), FrontendError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (Tok::Ident(s), pos) = self.next() else {
                    unreachable!()
                };
                Ok((s, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        let name = if matches!(self.peek(), Tok::Ident(s) if s != "proc") && *self.peek_at(1) == Tok::Equals {
            let (name, _) = self.ident("a program name")?;
            self.next();
            Some(name)
        } else {
            None
        };
        self.keyword("proc")?;
        let params = self.pattern()?;
        self.expect(&Tok::Arrow)?;
        self.keyword("do")?;
        let braced = self.eat(&Tok::LBrace);
        let mut stmts = Vec::new();
        while !self.is_keyword("return") {
            if *self.peek() == Tok::Eof || *self.peek() == Tok::RBrace {
                return Err(self.error("a statement or `return`"));
            }
            stmts.push(self.stmt()?);
            while self.eat(&Tok::Semi) {}
        }
        self.keyword("return")?;
        let result = self.expr()?;
        while self.eat(&Tok::Semi) {}
        if braced {
            self.expect(&Tok::RBrace)?;
        }
        Ok(Program {
            name,
            params,
            stmts,
            result,
        })
    }

    fn binder(&mut self) -> Result<Binder, FrontendError> {
        let (name, pos) = self.ident("a variable")?;
        let sort = if self.eat(&Tok::Colon) {
            Some(SortId::new(self.ident("a sort")?.0))
        } else {
            None
        };
        Ok(Binder { name, sort, pos })
    }

    fn pattern(&mut self) -> Result<Pattern, FrontendError> {
        let binders = if self.eat(&Tok::LParen) {
            let mut binders = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    binders.push(self.binder()?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(&Tok::Comma)?;
                }
            }
            binders
        } else {
            vec![self.binder()?]
        };
        Ok(Pattern { binders })
    }

    /// Comma-separated variables up to `)`, which is consumed.
    fn vars_until_close(&mut self) -> Result<Vec<Var>, FrontendError> {
        let mut vars = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(vars);
        }
        loop {
            let (name, pos) = self.ident("a variable")?;
            vars.push(Var { name, pos });
            if self.eat(&Tok::RParen) {
                return Ok(vars);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        let vars = if self.eat(&Tok::LParen) {
            self.vars_until_close()?
        } else {
            let (name, pos) = self.ident("a variable or `()`")?;
            vec![Var { name, pos }]
        };
        Ok(Expr { vars })
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let pos = self.pos();
        let pattern = self.pattern()?;
        self.expect(&Tok::Bind)?;
        let rhs = match self.peek().clone() {
            Tok::Str(text) => {
                self.next();
                Rhs::Literal(text)
            }
            Tok::Ident(_) => {
                let (gen, _) = self.ident("a generator")?;
                if self.eat(&Tok::Feed) {
                    Rhs::Effect {
                        gen,
                        arg: self.expr()?,
                    }
                } else if self.eat(&Tok::LParen) {
                    Rhs::Pure {
                        gen,
                        args: Expr {
                            vars: self.vars_until_close()?,
                        },
                    }
                } else {
                    return Err(self.error("`(` or `-<` after the generator"));
                }
            }
            _ => return Err(self.error("a generator or a string literal")),
        };
        Ok(Stmt { pattern, rhs, pos })
    }
}
