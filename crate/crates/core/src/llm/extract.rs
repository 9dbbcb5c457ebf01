use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("model output contains no code")]
pub struct NoCode;

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Pulls the program out of raw model output.
///
/// If the text contains a ``` fence, the body of the first fenced block is
/// returned (an unclosed fence runs to the end). Otherwise the whole text is
/// used. Leading and trailing blank lines are removed, and lines are joined
/// with `\n` with no final newline.
pub fn extract_code(raw_text: &str) -> Result<String, NoCode> {
    let lines: Vec<&str> = raw_text.lines().collect();
    let body: &[&str] = match lines.iter().position(|l| is_fence(l)) {
        Some(open) => {
            let rest = &lines[open + 1..];
            let close = rest.iter().position(|l| is_fence(l)).unwrap_or(rest.len());
            &rest[..close]
        }
        None => &lines,
    };
    let blank = |l: &&str| l.trim().is_empty();
    let start = body.iter().position(|l| !blank(l)).ok_or(NoCode)?;
    let end = body.iter().rposition(|l| !blank(l)).unwrap_or(start);
    Ok(body[start..=end].join("\n"))
}
