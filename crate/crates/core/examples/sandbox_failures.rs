//! Each failure class of the executor, triggered by a tiny program.

use intentflow::consent::ConsentPolicy;
use intentflow::executor::{execute, Limits, Status};
use intentflow::script::parse_source;
use intentflow::stubs::default_stub_table;

fn main() {
    let table = default_stub_table();
    let limits = Limits::default().with_max_steps(100);
    let cases = [
        "import os\nprint_screen(os.getcwd())",
        "if find_file_id(\"x\") is None:\n    files = \"none\"\nprint_screen(files)",
        "open(\"/etc/passwd\")",
        "print_screen(1)",
        "x = 10 / 0",
        "while True:\n    pass",
        "items = []\nfor i in range(20000):\n    pass",
        "shell(\"rm -rf ~\")",
    ];
    for src in cases {
        let program = parse_source(src).expect("parses");
        let result = execute(&program, &table, limits, &mut ConsentPolicy::AutoDeny);
        match result.status {
            Status::Success => println!("{src:?}: success"),
            Status::Failure { kind, message, line } => println!("{kind:<22} line {line}: {message}"),
        }
    }
}
