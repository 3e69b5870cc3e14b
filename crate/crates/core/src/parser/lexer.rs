use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Lex {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Semi,
}

#[derive(Clone, Debug)]
pub(super) struct Item {
    pub lex: Lex,
    pub line: usize,
    pub col: usize,
}

pub(super) fn error(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

pub(super) fn lex(src: &str) -> Result<Vec<Item>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let (l0, c0) = (line, col);
        if c == b'\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // line continuation as written by InputForm
        if c == b'\\' && bytes.get(i + 1) == Some(&b'\n') {
            i += 2;
            line += 1;
            col = 1;
            continue;
        }
        let single = match c {
            b'+' => Some(Lex::Plus),
            b'-' => Some(Lex::Minus),
            b'*' => Some(Lex::Star),
            b'/' => Some(Lex::Slash),
            b'^' => Some(Lex::Caret),
            b'(' => Some(Lex::LParen),
            b')' => Some(Lex::RParen),
            b';' => Some(Lex::Semi),
            _ => None,
        };
        let lex = if let Some(l) = single {
            i += 1;
            col += 1;
            l
        } else if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += i - s;
            Lex::Number(src[s..i].to_string())
        } else if c.is_ascii_alphabetic() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            col += i - s;
            Lex::Ident(src[s..i].to_string())
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(error(l0, c0, format!("unexpected symbol {ch:?}")));
        };
        out.push(Item { lex, line: l0, col: c0 });
    }
    Ok(out)
}
