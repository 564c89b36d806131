use super::LangError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Identifier, keyword, or `@`-prefixed reserved variable.
    Ident(String),
    Placeholder(String),
    Int(i64),
    Float(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Star,
    Eq,
    Dash,
    /// `->`
    Arrow,
    /// `<-`
    LArrow,
    Semicolon,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let err = |msg: String| LangError::Syntax {
            line: tline,
            column: tcol,
            message: msg,
        };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = if c.is_ascii_alphabetic() || c == '_' || c == '@' || c == '$' {
            let start = i;
            bump!();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            if (c == '@' || c == '$') && word.len() == 1 {
                return Err(err(format!("expected a name after `{c}`")));
            }
            match c {
                '$' => Tok::Placeholder(word[1..].to_string()),
                _ => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let mut is_float = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_float = true;
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    while i < j {
                        bump!();
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        bump!();
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            if is_float {
                Tok::Float(text.parse().map_err(|_| err(format!("bad number `{text}`")))?)
            } else {
                Tok::Int(text.parse().map_err(|_| err(format!("integer `{text}` out of range")))?)
            }
        } else if c == '\'' || c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(err("unterminated string".into()));
                }
                let ch = chars[i];
                bump!();
                if ch == c {
                    break;
                }
                if ch == '\\' {
                    if i >= chars.len() {
                        return Err(err("unterminated string".into()));
                    }
                    let esc = chars[i];
                    bump!();
                    s.push(match esc {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                } else {
                    s.push(ch);
                }
            }
            Tok::Str(s)
        } else {
            let (tok, width) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('-')) => (Tok::LArrow, 2),
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (':', _) => (Tok::Colon, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('*', _) => (Tok::Star, 1),
                ('=', _) => (Tok::Eq, 1),
                ('-', _) => (Tok::Dash, 1),
                (';', _) => (Tok::Semicolon, 1),
                _ => return Err(err(format!("unexpected character `{c}`"))),
            };
            for _ in 0..width {
                bump!();
            }
            tok
        };
        out.push(Token {
            tok,
            line: tline,
            column: tcol,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}
