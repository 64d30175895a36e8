//! Parse a program with a node call, normalize it, and run both versions
//! side by side through the interpreter.

use std::collections::BTreeMap;

use ivc_kind::lustre::interp::Interpreter;
use ivc_kind::lustre::{normalize, parse};
use ivc_kind::value::Value;

const SRC: &str = "
node edge(x: bool) returns (e: bool);
let
  e = x and not (false -> pre x);
tel;

node main(b: bool) returns (n: int);
let
  n = 0 -> if edge(b) then pre n + 1 else pre n;
tel;
";

fn main() {
    let program = parse(SRC).expect("parses");
    let flat = normalize(&program).expect("normalizes");
    println!("{flat}");

    let mut a = Interpreter::new(&program);
    let mut b = Interpreter::new(&flat);
    for (i, bit) in [true, true, false, true, false, true].into_iter().enumerate() {
        let input = BTreeMap::from([("b".to_string(), Value::Bool(bit))]);
        let (sa, sb) = (a.step(&input), b.step(&input));
        assert_eq!(sa["n"], sb["n"]);
        println!("step {i}: b = {bit}, n = {}", sa["n"]);
    }
}
