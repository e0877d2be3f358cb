use super::{FrontendError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Equals,
    /// `<-`
    Bind,
    /// `-<`
    Feed,
    /// `->`
    Arrow,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "a string literal".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Bind => "`<-`".into(),
            Tok::Feed => "`-<`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub(super) fn lex(source: &str) -> Result<Vec<(Tok, Pos)>, FrontendError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let syntax = |pos: Pos, message: &str| FrontendError::Syntax {
        pos,
        message: message.to_owned(),
    };
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '(' | ')' | '{' | '}' | ',' | ':' | ';' | '=' => {
                bump(&mut chars);
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    _ => Tok::Equals,
                }
            }
            '<' => {
                bump(&mut chars);
                if bump(&mut chars) != Some('-') {
                    return Err(syntax(pos, "expected `<-`"));
                }
                Tok::Bind
            }
            '-' => {
                bump(&mut chars);
                match bump(&mut chars) {
                    Some('<') => Tok::Feed,
                    Some('>') => Tok::Arrow,
                    Some('-') => {
                        while chars.peek().is_some_and(|&c| c != '\n') {
                            bump(&mut chars);
                        }
                        continue;
                    }
                    _ => return Err(syntax(pos, "expected `-<`, `->` or a `--` comment")),
                }
            }
            '"' => {
                bump(&mut chars);
                let mut text = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\\') => match bump(&mut chars) {
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            Some(c @ ('"' | '\\')) => text.push(c),
                            _ => return Err(syntax(pos, "unknown escape in string literal")),
                        },
                        Some('\n') | None => return Err(syntax(pos, "unterminated string literal")),
                        Some(c) => text.push(c),
                    }
                }
                Tok::Str(text)
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek().filter(|&&c| is_ident_char(c)) {
                    name.push(c);
                    bump(&mut chars);
                }
                Tok::Ident(name)
            }
            c => return Err(syntax(pos, &format!("unexpected character `{c}`"))),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            toks("x <- f -< y -- note\n->"),
            vec![
                Tok::Ident("x".into()),
                Tok::Bind,
                Tok::Ident("f".into()),
                Tok::Feed,
                Tok::Ident("y".into()),
                Tok::Arrow,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn strings_and_positions() {
        let out = lex("a\n  \"What's \\\"up\\\"?\"").unwrap();
        assert_eq!(out[1].0, Tok::Str("What's \"up\"?".into()));
        assert_eq!((out[1].1.line, out[1].1.col), (2, 3));
        assert!(lex("\"open").is_err());
    }
}
