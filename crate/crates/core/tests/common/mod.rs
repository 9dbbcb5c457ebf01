//! Shared helpers for integration tests: fixture paths and a grammar-driven
//! generator of random programs.

#![allow(dead_code)]

use std::path::PathBuf;

use intentflow::script::{
    is_keyword, AssignOp, BinOp, Expr, FStringPart, IfArm, Import, Program, Stmt, StmtKind, UnaryOp,
};
use proptest::prelude::*;

pub fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn bench_fixtures() -> PathBuf {
    fixture_root().join("bench")
}

/// Every program-like text file under `fixtures/`, with its path.
pub fn fixture_corpus() -> Vec<(PathBuf, String)> {
    let mut out = Vec::new();
    let mut stack = vec![fixture_root()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "txt")
                && path.parent().is_some_and(|p| p != fixture_root())
            {
                let text = std::fs::read_to_string(&path).unwrap();
                out.push((path, text));
            }
        }
    }
    out.sort();
    out
}

pub fn ident() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,5}".prop_filter("not a keyword", |s| !is_keyword(s))
}

pub fn text() -> impl Strategy<Value = String> {
    const CHARS: &[char] = &[
        'a', 'b', 'Z', '0', ' ', '"', '\'', '\\', '{', '}', '\n', '\t', '\r', '#', ':', 'é', '€', '😀',
    ];
    prop::collection::vec(prop::sample::select(CHARS), 0..8).prop_map(|v| v.into_iter().collect())
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Null),
        any::<bool>().prop_map(Expr::Bool),
        prop_oneof![0..1000i64, Just(i64::MAX)].prop_map(Expr::Int),
        text().prop_map(Expr::Str),
        ident().prop_map(Expr::Name),
    ]
}

fn binop() -> impl Strategy<Value = BinOp> {
    use BinOp::*;
    prop::sample::select(vec![Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, In, IsNone, IsNotNone])
}

/// Expressions without f-strings, so they can sit inside f-string fields.
pub fn plain_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        let args = prop::collection::vec(inner.clone(), 0..3);
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::List),
            (ident(), args.clone()).prop_map(|(callee, args)| Expr::Call { callee, args }),
            (inner.clone(), ident(), args).prop_map(|(r, method, args)| Expr::MethodCall {
                receiver: Box::new(r),
                method,
                args
            }),
            (inner.clone(), inner.clone()).prop_map(|(r, i)| Expr::Index {
                receiver: Box::new(r),
                index: Box::new(i)
            }),
            (prop::sample::select(vec![UnaryOp::Not, UnaryOp::Neg]), inner.clone())
                .prop_map(|(op, e)| Expr::unary(op, e)),
            (binop(), inner.clone(), inner).prop_map(|(op, l, r)| match op {
                BinOp::IsNone | BinOp::IsNotNone => Expr::binary(op, l, Expr::Null),
                _ => Expr::binary(op, l, r),
            }),
        ]
    })
}

fn normalize_parts(parts: Vec<FStringPart>) -> Vec<FStringPart> {
    let mut out: Vec<FStringPart> = Vec::new();
    for p in parts {
        match p {
            FStringPart::Literal(s) if s.is_empty() => {}
            FStringPart::Literal(s) => match out.last_mut() {
                Some(FStringPart::Literal(prev)) => prev.push_str(&s),
                _ => out.push(FStringPart::Literal(s)),
            },
            e => out.push(e),
        }
    }
    out
}

pub fn fstring() -> impl Strategy<Value = Expr> {
    prop::collection::vec(
        prop_oneof![text().prop_map(FStringPart::Literal), plain_expr().prop_map(FStringPart::Expr)],
        0..4,
    )
    .prop_map(|parts| Expr::FString(normalize_parts(parts)))
}

pub fn expr() -> impl Strategy<Value = Expr> {
    prop_oneof![
        4 => plain_expr(),
        1 => fstring(),
        1 => (fstring(), plain_expr()).prop_map(|(f, e)| Expr::binary(BinOp::Add, f, e)),
        1 => (ident(), fstring()).prop_map(|(callee, f)| Expr::call(callee, vec![f])),
    ]
}

fn dotted() -> impl Strategy<Value = String> {
    prop::collection::vec(ident(), 1..3).prop_map(|v| v.join("."))
}

fn simple_stmt(in_loop: bool) -> BoxedStrategy<StmtKind> {
    let mut options: Vec<(u32, BoxedStrategy<StmtKind>)> = vec![
        (
            4,
            (ident(), prop::sample::select(vec![AssignOp::Set, AssignOp::Add]), expr())
                .prop_map(|(target, op, value)| StmtKind::Assign { target, op, value })
                .boxed(),
        ),
        (3, expr().prop_map(StmtKind::Expr).boxed()),
        (1, Just(StmtKind::Pass).boxed()),
        (
            1,
            prop_oneof![
                prop::collection::vec(dotted(), 1..3).prop_map(|names| Import { from: None, names }),
                (dotted(), prop::collection::vec(ident(), 1..3))
                    .prop_map(|(m, names)| Import { from: Some(m), names }),
            ]
            .prop_map(StmtKind::Import)
            .boxed(),
        ),
    ];
    if in_loop {
        options.push((1, Just(StmtKind::Break).boxed()));
        options.push((1, Just(StmtKind::Continue).boxed()));
    }
    prop::strategy::Union::new_weighted(options).boxed()
}

fn to_stmts(kinds: Vec<StmtKind>) -> Vec<Stmt> {
    kinds.into_iter().map(Stmt::from).collect()
}

fn body(depth: u32, in_loop: bool) -> BoxedStrategy<Vec<Stmt>> {
    prop::collection::vec(stmt(depth, in_loop), 1..4).prop_map(to_stmts).boxed()
}

fn stmt(depth: u32, in_loop: bool) -> BoxedStrategy<StmtKind> {
    if depth == 0 {
        return simple_stmt(in_loop);
    }
    let d = depth - 1;
    prop_oneof![
        4 => simple_stmt(in_loop),
        1 => (
            prop::collection::vec((expr(), body(d, in_loop)), 1..3),
            prop::option::of(body(d, in_loop)),
        )
            .prop_map(|(arms, else_body)| StmtKind::If {
                arms: arms.into_iter().map(|(cond, body)| IfArm { cond, body }).collect(),
                else_body,
            }),
        1 => (expr(), body(d, true)).prop_map(|(cond, body)| StmtKind::While { cond, body }),
        1 => (ident(), expr(), body(d, true))
            .prop_map(|(var, iterable, body)| StmtKind::For { var, iterable, body }),
    ]
    .boxed()
}

pub fn program() -> impl Strategy<Value = Program> {
    prop::collection::vec(stmt(3, false), 0..6).prop_map(|kinds| Program { statements: to_stmts(kinds) })
}
