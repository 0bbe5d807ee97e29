//! Line-oriented tokenizer shared by every text format in the crate.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Arrow,
    ColonDash,
    Colon,
    Pipe,
    Amp,
    Eq,
    Dot,
    Bang,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Quoted(s) => write!(f, "\"{s}\""),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Arrow => f.write_str("`->`"),
            Token::ColonDash => f.write_str("`:-`"),
            Token::Colon => f.write_str("`:`"),
            Token::Pipe => f.write_str("`|`"),
            Token::Amp => f.write_str("`&`"),
            Token::Eq => f.write_str("`=`"),
            Token::Dot => f.write_str("`.`"),
            Token::Bang => f.write_str("`!`"),
        }
    }
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Removes a trailing `#` comment.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Non-empty lines with comments removed, paired with 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = strip_comment(l).trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            ',' => {
                chars.next();
                out.push(Token::Comma);
            }
            '|' => {
                chars.next();
                out.push(Token::Pipe);
            }
            '&' => {
                chars.next();
                out.push(Token::Amp);
            }
            '=' => {
                chars.next();
                out.push(Token::Eq);
            }
            '.' => {
                chars.next();
                out.push(Token::Dot);
            }
            '!' => {
                chars.next();
                out.push(Token::Bang);
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, '>')) => out.push(Token::Arrow),
                    _ => return Err(format!("stray `-` at column {}", i + 1)),
                }
            }
            ':' => {
                chars.next();
                if let Some(&(_, '-')) = chars.peek() {
                    chars.next();
                    out.push(Token::ColonDash);
                } else {
                    out.push(Token::Colon);
                }
            }
            '"' | '\'' => {
                let quote = c;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, ch)) if ch == quote => break,
                        Some((_, ch)) => s.push(ch),
                        None => return Err("unterminated quoted constant".into()),
                    }
                }
                out.push(Token::Quoted(s));
            }
            c if is_ident_char(c) => {
                let mut s = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if is_ident_char(ch) {
                        s.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(s));
            }
            other => return Err(format!("unexpected character `{other}` at column {}", i + 1)),
        }
    }
    Ok(out)
}

/// A cursor over one line's tokens.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(line: &str) -> Result<Self, String> {
        Ok(Self {
            tokens: tokenize(line)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Token) -> Result<(), String> {
        match self.next() {
            Some(t) if &t == tok => Ok(()),
            Some(t) => Err(format!("expected {tok}, found {t}")),
            None => Err(format!("expected {tok}, found end of line")),
        }
    }

    pub fn ident(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Token::Ident(s)) => Ok(s),
            Some(t) => Err(format!("expected identifier, found {t}")),
            None => Err("expected identifier, found end of line".into()),
        }
    }

    pub fn finish(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("unexpected trailing {t}")),
        }
    }
}
