//! Tokeniser for the text format.

use crate::{Diagnostic, Pos};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Define, // :=
    Eq,     // =
    Arrow,  // ->
    Less,   // <
    Tilde,  // ~
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "'{s}'"),
            TokenKind::Number(s) => write!(f, "number {s}"),
            TokenKind::Str(_) => write!(f, "string"),
            TokenKind::LBrace => write!(f, "'{{'"),
            TokenKind::RBrace => write!(f, "'}}'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Semi => write!(f, "';'"),
            TokenKind::Colon => write!(f, "':'"),
            TokenKind::Define => write!(f, "':='"),
            TokenKind::Eq => write!(f, "'='"),
            TokenKind::Arrow => write!(f, "'->'"),
            TokenKind::Less => write!(f, "'<'"),
            TokenKind::Tilde => write!(f, "'~'"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

/// Words with fixed meaning; they cannot name variables, models or plans.
pub const KEYWORDS: &[&str] = &[
    "model", "policy", "plans", "annotations", "space", "property", "suite", "actions",
    "background", "consequences", "mechanisms", "utilities", "intentions", "mode", "exactly_one",
    "power_set", "principle", "for", "plan", "violates", "tasks", "laws", "law", "backgrounds",
    "availability", "where", "forall", "exists", "scenario", "check", "over", "not", "and", "or",
    "implies", "true", "false",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Splits a document into tokens. `#` starts a comment running to the end of
/// the line. Returns a positioned diagnostic for any unrecognised character
/// or unterminated string.
pub fn lex(origin: &str, text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let pos = Pos { line, col };
        let Some(&c) = chars.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                pos,
            });
            return Ok(tokens);
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '(' | ')' | ',' | ';' | '=' | '<' | '~' => {
                bump!();
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semi,
                    '=' => TokenKind::Eq,
                    '<' => TokenKind::Less,
                    _ => TokenKind::Tilde,
                };
                tokens.push(Token { kind, pos });
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    tokens.push(Token {
                        kind: TokenKind::Define,
                        pos,
                    });
                } else {
                    tokens.push(Token {
                        kind: TokenKind::Colon,
                        pos,
                    });
                }
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    tokens.push(Token {
                        kind: TokenKind::Arrow,
                        pos,
                    });
                } else if chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let mut number = String::from("-");
                    read_number(&mut number, &mut chars, &mut line, &mut col);
                    tokens.push(Token {
                        kind: TokenKind::Number(number),
                        pos,
                    });
                } else {
                    return Err(Diagnostic {
                        origin: origin.to_string(),
                        pos,
                        message: "expected '->' or a number after '-'".to_string(),
                    });
                }
            }
            '"' => {
                bump!();
                let mut value = String::new();
                loop {
                    match bump!() {
                        None | Some('\n') => {
                            return Err(Diagnostic {
                                origin: origin.to_string(),
                                pos,
                                message: "unterminated string".to_string(),
                            });
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            other => {
                                return Err(Diagnostic {
                                    origin: origin.to_string(),
                                    pos,
                                    message: format!(
                                        "unsupported escape {:?} in string",
                                        other.map(String::from).unwrap_or_default()
                                    ),
                                });
                            }
                        },
                        Some(c) => value.push(c),
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    pos,
                });
            }
            c if c.is_ascii_digit() => {
                let mut number = String::new();
                read_number(&mut number, &mut chars, &mut line, &mut col);
                tokens.push(Token {
                    kind: TokenKind::Number(number),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(word),
                    pos,
                });
            }
            other => {
                return Err(Diagnostic {
                    origin: origin.to_string(),
                    pos,
                    message: format!("unexpected character {other:?}"),
                });
            }
        }
    }
}

fn read_number(
    out: &mut String,
    chars: &mut std::iter::Peekable<std::str::Chars<'_>>,
    line: &mut u32,
    col: &mut u32,
) {
    let mut seen_dot = false;
    while let Some(&c) = chars.peek() {
        if c.is_ascii_digit() || (c == '.' && !seen_dot) {
            if c == '.' {
                seen_dot = true;
            }
            out.push(c);
            chars.next();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        } else {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let tokens = lex("test", "model M {\n  actions a\n}").unwrap();
        assert_eq!(tokens[0].pos, Pos { line: 1, col: 1 });
        assert_eq!(tokens[2].pos, Pos { line: 1, col: 9 });
        assert_eq!(tokens[3].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn numbers_and_arrows() {
        let tokens = lex("test", "a -> b : -1.5").unwrap();
        assert!(matches!(tokens[1].kind, TokenKind::Arrow));
        assert!(matches!(tokens[3].kind, TokenKind::Colon));
        assert_eq!(tokens[4].kind, TokenKind::Number("-1.5".to_string()));
    }

    #[test]
    fn comments_are_skipped() {
        let tokens = lex("test", "a # comment\nb").unwrap();
        assert_eq!(tokens.len(), 3); // a, b, eof
    }

    #[test]
    fn unterminated_string_is_diagnosed() {
        let err = lex("test", "\"oops").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 1 });
    }
}
