pub mod cli;
pub mod consent;
pub mod executor;
pub mod function_table;
pub mod harness;
pub mod llm;
pub mod prompting;
pub mod script;
pub mod stubs;
pub mod trace;
pub mod value;
