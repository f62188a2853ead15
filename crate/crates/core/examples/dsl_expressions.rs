//! Parsing and evaluating metric expressions.

use causal_surgery::dsl::{eval_expression, parse_expression, Bindings, Var};

fn main() {
    let sources = ["1+2*3", "exp(2*t)", "-2^2", "max(1, 9, x1)", "(1 + t^2)^(1/2) * cos(x2)", "sqrt(0-1)", "1/(t-1)"];
    let at = Bindings::new().with(Var::T, 1.0).with(Var::X1, 3.0).with(Var::X2, 0.5);
    for src in sources {
        match parse_expression(src) {
            Err(e) => println!("{src:<28} parse error: {e}"),
            Ok(e) => {
                let vars: Vec<&str> = e.free_variables().iter().map(|v| v.name()).collect();
                match eval_expression(&e, &at) {
                    Ok(v) => println!("{src:<28} {e:<40} vars {vars:?} = {v}"),
                    Err(err) => println!("{src:<28} {e:<40} error: {err}"),
                }
            }
        }
    }
    for bad in ["exp(", "2 ** 3", "sin(t", "foo(t)", "min(1)"] {
        let e = parse_expression(bad).unwrap_err();
        println!("{bad:<10} -> offset {}: {e}", e.offset());
    }
}
