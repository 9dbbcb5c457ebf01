mod common;

use intentflow::llm::extract_code;
use intentflow::script::{parse_source, tokenize, unparse, TokenKind};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn unparse_then_parse_is_identity(prog in common::program()) {
        let text = unparse(&prog);
        let back = parse_source(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &prog, "{}", text);
        prop_assert_eq!(unparse(&back), text);
    }

    #[test]
    fn lexer_and_parser_never_panic(src in "\\PC{0,80}") {
        let _ = parse_source(&src);
    }

    #[test]
    fn structured_noise_never_panics(
        parts in prop::collection::vec(
            prop::sample::select(vec![
                "if", "x", ":", "\n", "    ", "(", ")", "[", "]", "f'{", "}'", "\"", "'", "1", "+",
                "not", "in", "is", "None", "=", "+=", ".", "append", ",", "\t", "\\", "#", "elif", "else",
                "for", "while", "break", "import", "from",
            ]),
            0..40,
        )
    ) {
        let src: String = parts.concat();
        let _ = parse_source(&src);
    }

    #[test]
    fn tokens_end_with_eof_and_balanced_indents(src in "[a-z =:\n ]{0,60}") {
        if let Ok(tokens) = tokenize(&src) {
            prop_assert!(matches!(tokens.last().map(|t| &t.kind), Some(TokenKind::Eof)));
            let indents = tokens.iter().filter(|t| t.kind == TokenKind::Indent).count();
            let dedents = tokens.iter().filter(|t| t.kind == TokenKind::Dedent).count();
            prop_assert_eq!(indents, dedents);
        }
    }

    #[test]
    fn extract_code_is_idempotent(raw in "(```[a-z]{0,6}\n)?[ -~\n]{0,60}(\n```)?[ -~\n]{0,20}") {
        if let Ok(once) = extract_code(&raw) {
            prop_assert_eq!(extract_code(&once), Ok(once.clone()));
        }
    }
}

#[test]
fn fixture_corpus_round_trips() {
    let corpus = common::fixture_corpus();
    assert!(corpus.len() >= 20);
    for (path, raw) in corpus {
        let code = extract_code(&raw).unwrap();
        let Ok(prog) = parse_source(&code) else { continue };
        let text = unparse(&prog);
        assert_eq!(parse_source(&text).unwrap(), prog, "{}", path.display());
    }
}
