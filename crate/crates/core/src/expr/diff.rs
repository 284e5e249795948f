use super::{BinOp, Expr, ExprError, Func};

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Mul, a, b)
}

fn div(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Div, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Add, a, b)
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Sub, a, b)
}

fn pow(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Pow, a, b)
}

fn neg(a: Expr) -> Expr {
    Expr::Neg(Box::new(a))
}

impl Expr {
    /// Exact partial derivative with respect to `var`. The result is not
    /// simplified.
    ///
    /// `abs`, `min` and `max` are rejected when their arguments depend on
    /// `var`.
    pub fn differentiate(&self, var: &str) -> Result<Expr, ExprError> {
        if !self.depends_on(var) {
            return Ok(num(0.0));
        }
        Ok(match self {
            Expr::Num(_) | Expr::Const(_) => num(0.0),
            Expr::Var(name) => num(if name == var { 1.0 } else { 0.0 }),
            Expr::Neg(inner) => neg(inner.differentiate(var)?),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.as_ref(), r.as_ref());
                match op {
                    BinOp::Add => add(l.differentiate(var)?, r.differentiate(var)?),
                    BinOp::Sub => sub(l.differentiate(var)?, r.differentiate(var)?),
                    BinOp::Mul => add(
                        mul(l.differentiate(var)?, r.clone()),
                        mul(l.clone(), r.differentiate(var)?),
                    ),
                    BinOp::Div => div(
                        sub(
                            mul(l.differentiate(var)?, r.clone()),
                            mul(l.clone(), r.differentiate(var)?),
                        ),
                        pow(r.clone(), num(2.0)),
                    ),
                    BinOp::Pow if matches!(r, Expr::Num(c) if *c == 0.0) => num(0.0),
                    BinOp::Pow if matches!(r, Expr::Num(_)) => {
                        let Expr::Num(c) = r else { unreachable!() };
                        mul(mul(num(*c), pow(l.clone(), num(c - 1.0))), l.differentiate(var)?)
                    }
                    BinOp::Pow if !r.depends_on(var) => mul(
                        mul(r.clone(), pow(l.clone(), sub(r.clone(), num(1.0)))),
                        l.differentiate(var)?,
                    ),
                    BinOp::Pow if !l.depends_on(var) => mul(
                        mul(self.clone(), Expr::call(Func::Log, vec![l.clone()])),
                        r.differentiate(var)?,
                    ),
                    // d(l^r) = l^r (r' log l + r l'/l)
                    BinOp::Pow => mul(
                        self.clone(),
                        add(
                            mul(r.differentiate(var)?, Expr::call(Func::Log, vec![l.clone()])),
                            div(mul(r.clone(), l.differentiate(var)?), l.clone()),
                        ),
                    ),
                }
            }
            Expr::Call(func, args) => {
                let arg = &args[0];
                let outer = match func {
                    Func::Sin => Expr::call(Func::Cos, vec![arg.clone()]),
                    Func::Cos => neg(Expr::call(Func::Sin, vec![arg.clone()])),
                    Func::Tan => div(
                        num(1.0),
                        pow(Expr::call(Func::Cos, vec![arg.clone()]), num(2.0)),
                    ),
                    Func::Exp => self.clone(),
                    Func::Log => div(num(1.0), arg.clone()),
                    Func::Sqrt => div(num(1.0), mul(num(2.0), self.clone())),
                    Func::Tanh => sub(num(1.0), pow(self.clone(), num(2.0))),
                    Func::Abs | Func::Min | Func::Max => {
                        return Err(ExprError::NotDifferentiable(func.name()))
                    }
                };
                mul(outer, arg.differentiate(var)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn at(e: &Expr, x: f64) -> f64 {
        let env: HashMap<String, f64> = [("x".to_string(), x)].into();
        e.eval(&env).unwrap()
    }

    #[test]
    fn square_derivative() {
        let d = parse("x^2", &["x"]).unwrap().differentiate("x").unwrap();
        for x in [-2.0, -0.5, 0.0, 1.0, 3.7] {
            assert!((at(&d, x) - 2.0 * x).abs() < 1e-14);
        }
    }

    #[test]
    fn low_powers_at_origin() {
        for (src, want) in [("x^0", 0.0), ("x^1", 1.0), ("3*x^0 + x^1", 1.0)] {
            let d = parse(src, &["x"]).unwrap().differentiate("x").unwrap();
            assert_eq!(at(&d, 0.0), want, "{src}");
        }
    }

    #[test]
    fn sin_derivative() {
        let d = parse("sin(u)", &["u"]).unwrap().differentiate("u").unwrap();
        let env: HashMap<String, f64> = [("u".to_string(), 0.4)].into();
        assert!((d.eval(&env).unwrap() - 0.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn non_smooth_builtins_rejected() {
        for src in ["abs(x)", "min(x, 1)", "max(2, x*x)"] {
            let e = parse(src, &["x"]).unwrap();
            assert!(matches!(e.differentiate("x"), Err(ExprError::NotDifferentiable(_))), "{src}");
        }
        // constant in `x`
        let e = parse("abs(u) + x", &["x", "u"]).unwrap();
        assert!((at(&e.differentiate("x").unwrap(), 0.3) - 1.0).abs() < 1e-15);
    }

    fn central(e: &Expr, x: f64, h: f64) -> f64 {
        (at(e, x + h) - at(e, x - h)) / (2.0 * h)
    }

    /// Random smooth expressions in `x` that stay away from domain edges on
    /// [-1, 1].
    fn smooth_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("x".to_string()),
            (-3.0..3.0f64).prop_map(|c| format!("{c:.3}")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + sin({b}))")),
                inner.clone().prop_map(|a| format!("sin({a})")),
                inner.clone().prop_map(|a| format!("cos({a})")),
                inner.clone().prop_map(|a| format!("tanh({a})")),
                inner.clone().prop_map(|a| format!("exp(sin({a}))")),
                inner.clone().prop_map(|a| format!("log(2 + cos({a}))")),
                inner.clone().prop_map(|a| format!("sqrt(1.5 + sin({a}))")),
                inner.clone().prop_map(|a| format!("({a})^3")),
                inner.prop_map(|a| format!("(2 + cos({a}))^(0.5 + x*x)")),
            ]
        })
    }

    proptest! {
        #[test]
        fn derivative_matches_central_differences(src in smooth_expr(), x in -1.0..1.0f64) {
            let e = parse(&src, &["x"]).unwrap();
            let d = e.differentiate("x").unwrap();
            let fd = central(&e, x, 1e-5);
            let exact = at(&d, x);
            prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{src}: {exact} vs {fd}");
        }

        #[test]
        fn print_parse_value_equivalent(src in smooth_expr(), seed in 0u64..1000) {
            let e = parse(&src, &["x"]).unwrap();
            let back = parse(&e.to_string(), &["x"]).unwrap();
            for k in 0..100 {
                let x = -1.0 + 2.0 * (((seed + k) * 7919 % 1000) as f64) / 1000.0;
                prop_assert_eq!(at(&e, x).to_bits(), at(&back, x).to_bits());
            }
        }

        #[test]
        fn evaluation_is_pure(src in smooth_expr(), x in -1.0..1.0f64) {
            let e = parse(&src, &["x"]).unwrap();
            prop_assert_eq!(at(&e, x).to_bits(), at(&e, x).to_bits());
        }
    }
}
