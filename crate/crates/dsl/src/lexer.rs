//! Tokenizer for model files and queries.

use std::fmt;

use crate::error::DslError;

/// 1-based line and column of a token.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Ne,
    Bang,
    Amp,
    Pipe,
    /// `->`
    Implies,
    /// `<->`
    Iff,
    /// `<-`
    Assign,
    Lt,
    Gt,
    /// `=>`
    FatArrow,
    Plus,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(i) => return write!(f, "`{i}`"),
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::Ne => "`!=`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::Assign => "`<-`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::FatArrow => "`=>`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits `text` into tokens. `#` and `//` start comments running to the
/// end of the line. The result always ends with [`Tok::Eof`].
pub fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = |k: usize| chars.get(i + k).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && peek(1) == Some('/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<i64>().map_err(|_| DslError::Syntax {
                pos,
                message: format!("integer literal `{digits}` is too large"),
                expected: Vec::new(),
            })?;
            col += i - start;
            out.push(Token { tok: Tok::Int(n), pos });
            continue;
        }
        let (tok, len) = match (c, peek(1), peek(2)) {
            ('<', Some('-'), Some('>')) => (Tok::Iff, 3),
            ('<', Some('-'), _) => (Tok::Assign, 2),
            ('-', Some('>'), _) => (Tok::Implies, 2),
            ('=', Some('>'), _) => (Tok::FatArrow, 2),
            ('!', Some('='), _) => (Tok::Ne, 2),
            ('<', ..) => (Tok::Lt, 1),
            ('>', ..) => (Tok::Gt, 1),
            ('=', ..) => (Tok::Eq, 1),
            ('!', ..) => (Tok::Bang, 1),
            ('-', ..) => (Tok::Minus, 1),
            ('+', ..) => (Tok::Plus, 1),
            ('&', ..) => (Tok::Amp, 1),
            ('|', ..) => (Tok::Pipe, 1),
            ('{', ..) => (Tok::LBrace, 1),
            ('}', ..) => (Tok::RBrace, 1),
            ('(', ..) => (Tok::LParen, 1),
            (')', ..) => (Tok::RParen, 1),
            ('[', ..) => (Tok::LBracket, 1),
            (']', ..) => (Tok::RBracket, 1),
            (',', ..) => (Tok::Comma, 1),
            (';', ..) => (Tok::Semi, 1),
            (':', ..) => (Tok::Colon, 1),
            _ => {
                return Err(DslError::Syntax {
                    pos,
                    message: format!("unexpected character `{c}`"),
                    expected: Vec::new(),
                })
            }
        };
        i += len;
        col += len;
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_take_the_longest_match() {
        assert_eq!(
            kinds("<X<-1> a<->b -> c=>d"),
            vec![
                Tok::Lt,
                Tok::Ident("X".into()),
                Tok::Assign,
                Tok::Int(1),
                Tok::Gt,
                Tok::Ident("a".into()),
                Tok::Iff,
                Tok::Ident("b".into()),
                Tok::Implies,
                Tok::Ident("c".into()),
                Tok::FatArrow,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_and_comments() {
        let toks = lex("model m { # note\n  var X : {0};\n}").unwrap();
        let var = toks.iter().find(|t| t.tok == Tok::Ident("var".into())).unwrap();
        assert_eq!(var.pos, Pos { line: 2, col: 3 });
        assert!(lex("a $ b").is_err());
    }
}
