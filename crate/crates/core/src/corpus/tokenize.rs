use super::Token;

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Combining diacritics (U+0300..U+036F) stay attached to the word they
/// follow, so decomposed `ș`/`ț` do not split a word.
fn is_combining_mark(c: char) -> bool {
    ('\u{0300}'..='\u{036F}').contains(&c)
}

/// Rule-based tokenizer: maximal runs of letters/digits form a token, every
/// other non-whitespace character is a token on its own, whitespace
/// separates. Offsets are character offsets.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_at(text, 0)
}

/// As [`tokenize`], with every offset shifted by `base`.
pub fn tokenize_at(text: &str, base: usize) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut word: Option<(usize, String)> = None;
    for (pos, c) in text.chars().enumerate() {
        let continues_word = is_word_char(c) || (word.is_some() && is_combining_mark(c));
        if continues_word {
            word.get_or_insert_with(|| (pos, String::new())).1.push(c);
            continue;
        }
        if let Some((start, w)) = word.take() {
            tokens.push(Token::new(w, base + start, base + pos));
        }
        if !c.is_whitespace() {
            tokens.push(Token::new(c.to_string(), base + pos, base + pos + 1));
        }
    }
    if let Some((start, w)) = word {
        let len = w.chars().count();
        tokens.push(Token::new(w, base + start, base + start + len));
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spans(tokens: &[Token]) -> Vec<(&str, usize, usize)> {
        tokens.iter().map(|t| (t.text.as_str(), t.start, t.end)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(
            spans(&tokenize("Anul 1848.")),
            vec![("Anul", 0, 4), ("1848", 5, 9), (".", 9, 10)]
        );
        assert!(tokenize("").is_empty());
        let t = tokenize("a-b");
        assert_eq!(
            t.iter().map(|t| t.text.as_str()).collect::<Vec<_>>(),
            ["a", "-", "b"]
        );
    }

    #[test]
    fn offsets_are_characters_not_bytes() {
        let t = tokenize("țara și „Basarabia”");
        assert_eq!(
            spans(&t),
            vec![
                ("țara", 0, 4),
                ("și", 5, 7),
                ("„", 8, 9),
                ("Basarabia", 9, 18),
                ("”", 18, 19)
            ]
        );
    }

    #[test]
    fn combining_marks_stay_in_word() {
        let decomposed = "s\u{0326}i";
        let t = tokenize(decomposed);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].end, 3);
    }

    proptest! {
        #[test]
        fn offsets_reconstruct_non_whitespace(text in "[a-zA-Z0-9ăîșțâ .,;:!?()\\-\n\t]{0,60}") {
            let chars: Vec<char> = text.chars().collect();
            let tokens = tokenize(&text);
            let mut rebuilt = String::new();
            let mut prev_end = 0;
            for t in &tokens {
                prop_assert!(t.start < t.end);
                prop_assert!(t.start >= prev_end);
                prop_assert!(chars[prev_end..t.start].iter().all(|c| c.is_whitespace()));
                let slice: String = chars[t.start..t.end].iter().collect();
                prop_assert_eq!(&slice, &t.text);
                rebuilt.push_str(&slice);
                prev_end = t.end;
            }
            prop_assert!(chars[prev_end..].iter().all(|c| c.is_whitespace()));
            let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(rebuilt, expected);
        }
    }
}
