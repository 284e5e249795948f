use std::collections::HashMap;

use super::{BinOp, Expr, ExprError, Func};

fn domain(msg: impl Into<String>) -> ExprError {
    ExprError::Domain(msg.into())
}

fn binary(op: BinOp, l: f64, r: f64) -> Result<f64, ExprError> {
    let v = match op {
        BinOp::Add => l + r,
        BinOp::Sub => l - r,
        BinOp::Mul => l * r,
        BinOp::Div => {
            if r == 0.0 {
                return Err(domain("division by zero"));
            }
            l / r
        }
        BinOp::Pow => {
            let v = l.powf(r);
            if v.is_nan() {
                return Err(domain(format!("{l}^{r} is undefined")));
            }
            v
        }
    };
    finite(v, op_name(op))
}

fn op_name(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Pow => "^",
    }
}

fn finite(v: f64, what: &str) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("non-finite result from `{what}`")))
    }
}

fn call(func: Func, args: &[f64]) -> Result<f64, ExprError> {
    let x = args[0];
    let v = match func {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log => {
            if x <= 0.0 {
                return Err(domain(format!("log of non-positive argument {x}")));
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(domain(format!("sqrt of negative argument {x}")));
            }
            x.sqrt()
        }
        Func::Tanh => x.tanh(),
        Func::Abs => x.abs(),
        Func::Min => x.min(args[1]),
        Func::Max => x.max(args[1]),
    };
    finite(v, func.name())
}

impl Expr {
    /// Evaluates the tree with variables looked up in `env`.
    pub fn eval(&self, env: &HashMap<String, f64>) -> Result<f64, ExprError> {
        self.eval_with(&|name| env.get(name).copied())
    }

    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, ExprError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Const(c) => Ok(c.value()),
            Expr::Var(name) => lookup(name).ok_or_else(|| ExprError::MissingBinding(name.clone())),
            Expr::Neg(inner) => Ok(-inner.eval_with(lookup)?),
            Expr::Binary(op, lhs, rhs) => binary(*op, lhs.eval_with(lookup)?, rhs.eval_with(lookup)?),
            Expr::Call(func, args) => {
                let mut vals = [0.0; 2];
                for (slot, arg) in vals.iter_mut().zip(args) {
                    *slot = arg.eval_with(lookup)?;
                }
                call(*func, &vals[..args.len()])
            }
        }
    }

    /// Resolves variable names to positions in `slots` for repeated fast
    /// evaluation.
    pub fn bind(&self, slots: &[&str]) -> Result<BoundExpr, ExprError> {
        Ok(BoundExpr {
            root: Node::lower(self, slots)?,
            arity: slots.len(),
        })
    }
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Slot(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn lower(expr: &Expr, slots: &[&str]) -> Result<Node, ExprError> {
        Ok(match expr {
            Expr::Num(v) => Node::Num(*v),
            Expr::Const(c) => Node::Num(c.value()),
            Expr::Var(name) => Node::Slot(
                slots
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| ExprError::MissingBinding(name.clone()))?,
            ),
            Expr::Neg(inner) => Node::Neg(Box::new(Node::lower(inner, slots)?)),
            Expr::Binary(op, l, r) => Node::Binary(
                *op,
                Box::new(Node::lower(l, slots)?),
                Box::new(Node::lower(r, slots)?),
            ),
            Expr::Call(func, args) => Node::Call(
                *func,
                args.iter()
                    .map(|a| Node::lower(a, slots))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    fn eval(&self, values: &[f64]) -> Result<f64, ExprError> {
        match self {
            Node::Num(v) => Ok(*v),
            Node::Slot(k) => Ok(values[*k]),
            Node::Neg(inner) => Ok(-inner.eval(values)?),
            Node::Binary(op, l, r) => binary(*op, l.eval(values)?, r.eval(values)?),
            Node::Call(func, args) => {
                let mut vals = [0.0; 2];
                for (slot, arg) in vals.iter_mut().zip(args) {
                    *slot = arg.eval(values)?;
                }
                call(*func, &vals[..args.len()])
            }
        }
    }
}

/// An expression with its variables resolved to positional slots.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    root: Node,
    arity: usize,
}

impl BoundExpr {
    /// `values[k]` is the value of the k-th slot name passed to [`Expr::bind`].
    pub fn eval(&self, values: &[f64]) -> Result<f64, ExprError> {
        debug_assert_eq!(values.len(), self.arity);
        self.root.eval(values)
    }
}
