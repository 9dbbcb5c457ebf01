use std::io::{self, Write};

fn main() {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let env = |k: &str| std::env::var(k).ok();
    let code = {
        let mut io = intentflow::cli::Io {
            input: &mut input,
            out: &mut out,
            err: &mut err,
        };
        intentflow::cli::main_with(std::env::args_os(), &env, &mut io)
    };
    let _ = out.flush();
    std::process::exit(code);
}
