use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::error::ParseError;
use super::span::{Pos, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    Fn,
    Let,
    If,
    Else,
    While,
    Return,
    Break,
    Continue,
    True,
    False,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl TokenKind {
    /// How the token is shown in diagnostics.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Int(v) => format!("integer `{v}`"),
            TokenKind::Str(_) => String::from("string literal"),
            TokenKind::Eof => String::from("end of input"),
            other => format!("\"{}\"", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            TokenKind::Fn => "fn",
            TokenKind::Let => "let",
            TokenKind::If => "if",
            TokenKind::Else => "else",
            TokenKind::While => "while",
            TokenKind::Return => "return",
            TokenKind::Break => "break",
            TokenKind::Continue => "continue",
            TokenKind::True => "true",
            TokenKind::False => "false",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Assign => "=",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Percent => "%",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::EqEq => "==",
            TokenKind::NotEq => "!=",
            TokenKind::AndAnd => "&&",
            TokenKind::OrOr => "||",
            TokenKind::Bang => "!",
            TokenKind::Ident(_) => "identifier",
            TokenKind::Int(_) => "integer",
            TokenKind::Str(_) => "string",
            TokenKind::Eof => "end of input",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    pos: Pos,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += c.len_utf8() as u32;
        }
        Some(c)
    }

    fn span_from(&self, start: usize, start_pos: Pos) -> Span {
        Span {
            start,
            end: self.offset,
            start_pos,
            end_pos: self.pos,
        }
    }
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "fn" => TokenKind::Fn,
        "let" => TokenKind::Let,
        "if" => TokenKind::If,
        "else" => TokenKind::Else,
        "while" => TokenKind::While,
        "return" => TokenKind::Return,
        "break" => TokenKind::Break,
        "continue" => TokenKind::Continue,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        _ => return None,
    })
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `src` into tokens. The last token is always `Eof`.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        src,
        offset: 0,
        pos: Pos { line: 1, col: 1 },
    };
    let mut tokens = Vec::new();
    loop {
        // whitespace and `//` comments
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '/' && cur.peek_second() == Some('/') {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.offset;
        let start_pos = cur.pos;
        let Some(c) = cur.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: cur.span_from(start, start_pos),
            });
            return Ok(tokens);
        };
        let kind = match c {
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &src[start..cur.offset];
                keyword(word).unwrap_or_else(|| TokenKind::Ident(String::from(word)))
            }
            c if c.is_ascii_digit() => {
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                if cur.peek().is_some_and(is_ident_start) {
                    return Err(ParseError::syntax(
                        cur.pos,
                        cur.peek().map(String::from).unwrap_or_default(),
                        vec![String::from("digit")],
                    ));
                }
                let digits = &src[start..cur.offset];
                match digits.parse::<i64>() {
                    Ok(v) => TokenKind::Int(v),
                    Err(_) => {
                        return Err(ParseError::syntax(
                            start_pos,
                            format!("integer `{digits}` (out of range)"),
                            vec![String::from("64-bit integer literal")],
                        ))
                    }
                }
            }
            '"' => {
                let mut value = String::new();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\\') => {
                            let esc_pos = cur.pos;
                            match cur.bump() {
                                Some('n') => value.push('\n'),
                                Some('t') => value.push('\t'),
                                Some('"') => value.push('"'),
                                Some('\\') => value.push('\\'),
                                other => {
                                    return Err(ParseError::syntax(
                                        esc_pos,
                                        other.map(String::from).unwrap_or_else(|| String::from("end of input")),
                                        vec![String::from("escape (\\n, \\t, \\\", \\\\)")],
                                    ))
                                }
                            }
                        }
                        Some('\n') | None => {
                            return Err(ParseError::syntax(
                                start_pos,
                                String::from("unterminated string literal"),
                                vec![String::from("\"")],
                            ))
                        }
                        Some(c) => value.push(c),
                    }
                }
                TokenKind::Str(value)
            }
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            ',' => TokenKind::Comma,
            ';' => TokenKind::Semi,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '%' => TokenKind::Percent,
            '<' | '>' | '=' | '!' => {
                let eq = cur.peek() == Some('=');
                if eq {
                    cur.bump();
                }
                match (c, eq) {
                    ('<', false) => TokenKind::Lt,
                    ('<', true) => TokenKind::Le,
                    ('>', false) => TokenKind::Gt,
                    ('>', true) => TokenKind::Ge,
                    ('=', false) => TokenKind::Assign,
                    ('=', true) => TokenKind::EqEq,
                    ('!', false) => TokenKind::Bang,
                    _ => TokenKind::NotEq,
                }
            }
            '&' | '|' => {
                if cur.peek() == Some(c) {
                    cur.bump();
                    if c == '&' {
                        TokenKind::AndAnd
                    } else {
                        TokenKind::OrOr
                    }
                } else {
                    let expected = if c == '&' { "&&" } else { "||" };
                    return Err(ParseError::syntax(
                        start_pos,
                        String::from(c),
                        vec![String::from(expected)],
                    ));
                }
            }
            other => {
                return Err(ParseError::syntax(
                    start_pos,
                    String::from(other),
                    vec![String::from("token")],
                ))
            }
        };
        tokens.push(Token {
            kind,
            span: cur.span_from(start, start_pos),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            kinds("a<=b // c\n!=!"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Le,
                TokenKind::Ident("b".into()),
                TokenKind::NotEq,
                TokenKind::Bang,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            kinds(r#""a\"b\n""#),
            vec![TokenKind::Str("a\"b\n".into()), TokenKind::Eof]
        );
    }

    #[test]
    fn positions_track_lines() {
        let toks = tokenize("fn\n  x").unwrap();
        assert_eq!(toks[1].span.start_pos, Pos { line: 2, col: 3 });
        assert_eq!(toks[1].span.end_pos, Pos { line: 2, col: 4 });
    }

    #[test]
    fn out_of_range_literal() {
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("9223372036854775807").is_ok());
    }

    #[test]
    fn single_ampersand_rejected() {
        let err = tokenize("a & b").unwrap_err();
        assert_eq!(err.position(), Pos { line: 1, col: 3 });
    }
}
