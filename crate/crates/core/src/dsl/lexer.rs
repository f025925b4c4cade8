//! Line-level tokenizer with 1-based columns.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifier, number, or `inf`.
    Word(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Equals,
    Arrow,
    /// Any character the grammar never uses.
    Stray(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Lexeme {
    pub tok: Tok,
    pub column: usize,
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '/')
}

/// Tokenizes one line, dropping a trailing `#` comment.
pub(crate) fn lex_line(line: &str) -> Vec<Lexeme> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Lexeme { tok: Tok::Arrow, column });
            i += 2;
            continue;
        }
        if word_char(c) {
            let start = i;
            while i < chars.len() && word_char(chars[i]) && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>')) {
                i += 1;
            }
            out.push(Lexeme { tok: Tok::Word(chars[start..i].iter().collect()), column });
            continue;
        }
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '=' => Tok::Equals,
            other => Tok::Stray(other),
        };
        out.push(Lexeme { tok, column });
        i += 1;
    }
    out
}

/// `[A-Za-z][A-Za-z0-9_-]*`
pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// An identifier, optionally qualified by a block name: `common.P2`.
pub(crate) fn is_reference(s: &str) -> bool {
    match s.split_once('.') {
        Some((block, id)) => is_identifier(block) && is_identifier(id),
        None => is_identifier(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(line: &str) -> Vec<Tok> {
        lex_line(line).into_iter().map(|l| l.tok).collect()
    }

    #[test]
    fn arcs_without_spaces() {
        assert_eq!(
            toks("arc stop-piston->t12 # c"),
            [Tok::Word("arc".into()), Tok::Word("stop-piston".into()), Tok::Arrow, Tok::Word("t12".into())]
        );
    }

    #[test]
    fn columns_are_one_based() {
        let l = lex_line("  trans t interval=[5,2]");
        assert_eq!(l[0].column, 3);
        assert_eq!(l[3].tok, Tok::Equals);
        assert_eq!(l[3].column, 19);
    }

    #[test]
    fn identifier_rules() {
        assert!(is_identifier("stop-piston"));
        assert!(!is_identifier("1p"));
        assert!(is_reference("common.P2"));
        assert!(!is_reference("a.b.c"));
    }
}
