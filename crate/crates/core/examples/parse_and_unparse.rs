//! Tokenize, parse, and pretty-print a program, and show how unsupported
//! constructs are reported.

use intentflow::script::{parse_source, tokenize, unparse};

const SOURCE: &str = r#"
names = ["a", "b"]
count = 0
for name in names:
    if (name == "a") or (count > 1):
        count += 1
print_screen(f"{count} matched out of {len(names)}")
"#;

fn main() {
    let tokens = tokenize(SOURCE).expect("lexes");
    println!("{} tokens, first few:", tokens.len());
    for t in tokens.iter().take(8) {
        println!("  {}:{} {t}", t.line, t.col);
    }

    let program = parse_source(SOURCE).expect("parses");
    println!("\ncanonical form:\n{}", unparse(&program));
    assert_eq!(parse_source(&unparse(&program)).unwrap(), program);

    for bad in ["def f():\n    pass", "x = [i for i in y]", "x = (", "x = 1.5"] {
        println!("\n{bad:?}\n  -> {}", parse_source(bad).unwrap_err());
    }
}
