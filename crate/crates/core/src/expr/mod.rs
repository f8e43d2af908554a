//! Scalar expressions over chart coordinates.
//!
//! Every scalar input of a scenario (metric components, map components,
//! frame coefficients, the Clairaut function, potential fields) is an
//! [`Expr`]. Expressions evaluate to plain values or to second-order
//! [`Jet2`]s, which carry exact gradients and Hessians.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          exponent must be constant
//! atom    := number | name | func '(' sum ')' | '(' sum ')'
//! func    := exp | log | sin | cos | tan | sqrt | tanh
//! ```

mod jet;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use jet::Jet2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("exponent at byte {offset} is not constant; write exp(b*log(a)) instead")]
    NonConstantExponent { offset: usize },
    #[error("constant `{name}` shadows a coordinate")]
    ShadowedCoordinate { name: String },
    #[error("point has {got} coordinates, expression expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("domain violation in `{subexpr}`: {message}")]
    Domain { subexpr: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Num(f64),
    Const { name: String, value: f64 },
    Coord(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

impl Node {
    /// Value of a coordinate-free subtree.
    fn constant_value(&self) -> Option<f64> {
        Some(match self {
            Node::Num(v) => *v,
            Node::Const { value, .. } => *value,
            Node::Coord(_) => return None,
            Node::Neg(a) => -a.constant_value()?,
            Node::Bin(op, a, b) => {
                let (a, b) = (a.constant_value()?, b.constant_value()?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Node::Pow(a, c) => a.constant_value()?.powf(*c),
            Node::Call(f, a) => {
                let a = a.constant_value()?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Sqrt => a.sqrt(),
                    Func::Tanh => a.tanh(),
                }
            }
        })
    }
}

/// Immutable parsed expression. Cloning is cheap (shared tree).
#[derive(Clone)]
pub struct Expr {
    root: Arc<Node>,
    coords: Arc<[String]>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && (Arc::ptr_eq(&self.root, &other.root) || self.root == other.root)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Parses `text` against the coordinate names `coords` and the named
/// `constants`.
pub fn parse(text: &str, coords: &[String], constants: &BTreeMap<String, f64>) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    if let Some(name) = constants.keys().find(|k| coords.contains(k)) {
        return Err(ExprError::ShadowedCoordinate { name: name.clone() });
    }
    let mut parser = parse::Parser::new(text, coords, constants)?;
    let root = parser.parse_all()?;
    Ok(Expr {
        root: Arc::new(root),
        coords: coords.to_vec().into(),
    })
}

fn int_exponent(c: f64) -> Option<i32> {
    (c.fract() == 0.0 && c.abs() <= i32::MAX as f64).then_some(c as i32)
}

impl Expr {
    /// Constant expression over the given coordinates.
    pub fn constant(value: f64, coords: &[String]) -> Self {
        Self {
            root: Arc::new(Node::Num(value)),
            coords: coords.to_vec().into(),
        }
    }

    /// The coordinate function `coords[index]`.
    pub fn coordinate(index: usize, coords: &[String]) -> Self {
        assert!(index < coords.len());
        Self {
            root: Arc::new(Node::Coord(index)),
            coords: coords.to_vec().into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    /// True when the expression does not depend on any coordinate.
    pub fn is_constant(&self) -> bool {
        self.root.constant_value().is_some()
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), ExprError> {
        if p.len() != self.dim() {
            return Err(ExprError::Dimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    fn domain(&self, node: &Node, message: impl Into<String>) -> ExprError {
        ExprError::Domain {
            subexpr: Printer {
                node,
                coords: &self.coords,
            }
            .to_string(),
            message: message.into(),
        }
    }

    /// Plain value at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64, ExprError> {
        self.check_dim(p)?;
        self.eval_node(&self.root, p)
    }

    fn eval_node(&self, node: &Node, p: &[f64]) -> Result<f64, ExprError> {
        Ok(match node {
            Node::Num(v) => *v,
            Node::Const { value, .. } => *value,
            Node::Coord(i) => p[*i],
            Node::Neg(a) => -self.eval_node(a, p)?,
            Node::Bin(op, a, b) => {
                let x = self.eval_node(a, p)?;
                let y = self.eval_node(b, p)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.domain(b, "division by zero"));
                        }
                        x / y
                    }
                }
            }
            Node::Pow(a, c) => {
                let x = self.eval_node(a, p)?;
                self.check_pow(node, x, *c)?;
                match int_exponent(*c) {
                    Some(k) => x.powi(k),
                    None => x.powf(*c),
                }
            }
            Node::Call(f, a) => {
                let x = self.eval_node(a, p)?;
                self.check_call(a, *f, x)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Sqrt => x.sqrt(),
                    Func::Tanh => x.tanh(),
                }
            }
        })
    }

    fn check_pow(&self, node: &Node, x: f64, c: f64) -> Result<(), ExprError> {
        match int_exponent(c) {
            Some(k) if k < 0 && x == 0.0 => Err(self.domain(node, "negative power of zero")),
            Some(_) => Ok(()),
            None if x <= 0.0 => Err(self.domain(node, "fractional power of a nonpositive base")),
            None => Ok(()),
        }
    }

    fn check_call(&self, arg: &Node, f: Func, x: f64) -> Result<(), ExprError> {
        match f {
            Func::Log if x <= 0.0 => Err(self.domain(arg, "log of a nonpositive argument")),
            Func::Sqrt if x <= 0.0 => Err(self.domain(arg, "sqrt needs a positive argument")),
            Func::Tan if x.cos() == 0.0 => Err(self.domain(arg, "tan at a pole")),
            _ => Ok(()),
        }
    }

    /// Value, gradient and Hessian at `p`, by forward propagation of
    /// second-order jets.
    pub fn eval_jet2(&self, p: &[f64]) -> Result<Jet2, ExprError> {
        self.check_dim(p)?;
        self.jet_node(&self.root, p)
    }

    fn jet_node(&self, node: &Node, p: &[f64]) -> Result<Jet2, ExprError> {
        let n = p.len();
        Ok(match node {
            Node::Num(v) => Jet2::constant(*v, n),
            Node::Const { value, .. } => Jet2::constant(*value, n),
            Node::Coord(i) => Jet2::variable(p[*i], *i, n),
            Node::Neg(a) => self.jet_node(a, p)?.neg(),
            Node::Bin(op, a, b) => {
                let x = self.jet_node(a, p)?;
                let y = self.jet_node(b, p)?;
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => {
                        if y.value == 0.0 {
                            return Err(self.domain(b, "division by zero"));
                        }
                        x.div(&y)
                    }
                }
            }
            Node::Pow(a, c) => {
                let x = self.jet_node(a, p)?;
                let u = x.value;
                self.check_pow(node, u, *c)?;
                let c = *c;
                if c == 0.0 {
                    Jet2::constant(1.0, n)
                } else {
                    let pw = |e: f64| match int_exponent(e) {
                        Some(k) => u.powi(k),
                        None => u.powf(e),
                    };
                    x.chain(pw(c), c * pw(c - 1.0), c * (c - 1.0) * pw(c - 2.0))
                }
            }
            Node::Call(f, a) => {
                let x = self.jet_node(a, p)?;
                let u = x.value;
                self.check_call(a, *f, u)?;
                let (f0, f1, f2) = match f {
                    Func::Exp => {
                        let e = u.exp();
                        (e, e, e)
                    }
                    Func::Log => (u.ln(), 1.0 / u, -1.0 / (u * u)),
                    Func::Sin => (u.sin(), u.cos(), -u.sin()),
                    Func::Cos => (u.cos(), -u.sin(), -u.cos()),
                    Func::Tan => {
                        let t = u.tan();
                        let s = 1.0 + t * t;
                        (t, s, 2.0 * t * s)
                    }
                    Func::Sqrt => {
                        let r = u.sqrt();
                        (r, 0.5 / r, -0.25 / (r * u))
                    }
                    Func::Tanh => {
                        let t = u.tanh();
                        let s = 1.0 - t * t;
                        (t, s, -2.0 * t * s)
                    }
                };
                x.chain(f0, f1, f2)
            }
        })
    }
}

struct Printer<'a> {
    node: &'a Node,
    coords: &'a [String],
}

impl Printer<'_> {
    fn sub<'b>(&'b self, node: &'b Node) -> Printer<'b> {
        Printer {
            node,
            coords: self.coords,
        }
    }
}

impl fmt::Display for Printer<'_> {
    // Fully parenthesized so that re-parsing reproduces the tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Const { name, .. } => write!(f, "{name}"),
            Node::Coord(i) => write!(f, "{}", self.coords[*i]),
            Node::Neg(a) => write!(f, "(-{})", self.sub(a)),
            Node::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({} {sym} {})", self.sub(a), self.sub(b))
            }
            Node::Pow(a, c) => write!(f, "({}^({c:?}))", self.sub(a)),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), self.sub(a)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            node: &self.root,
            coords: &self.coords,
        }
        .fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords3() -> Vec<String> {
        vec!["u1".into(), "u2".into(), "u3".into()]
    }

    fn p(text: &str) -> Result<Expr, ExprError> {
        parse(text, &coords3(), &BTreeMap::new())
    }

    #[test]
    fn parses_example_metric_component() {
        let e = p("exp(-2*u1)").unwrap();
        assert!((e.eval(&[1.0, 0.0, 0.0]).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn identity_expression() {
        let e = p("u1").unwrap();
        assert_eq!(e.eval(&[4.5, 0.0, 0.0]).unwrap(), 4.5);
        let j = e.eval_jet2(&[4.5, 0.0, 0.0]).unwrap();
        assert_eq!(j.gradient, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        match p("1/(u1") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stray_close_paren() {
        assert!(matches!(p("u1)"), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unknown_identifier_is_named() {
        match p("u1 + w") {
            Err(ExprError::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "w");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(p("foo(u1)"), Err(ExprError::UnknownFunction { .. })));
    }

    #[test]
    fn constants_cannot_shadow_coordinates() {
        let mut c = BTreeMap::new();
        c.insert("u2".to_string(), 1.0);
        assert!(matches!(
            parse("u1", &coords3(), &c),
            Err(ExprError::ShadowedCoordinate { .. })
        ));
    }

    #[test]
    fn named_constants_resolve() {
        let mut c = BTreeMap::new();
        c.insert("k".to_string(), 2.5);
        let e = parse("k*u1", &coords3(), &c).unwrap();
        assert_eq!(e.eval(&[2.0, 0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(e.to_string(), "(k * u1)");
    }

    #[test]
    fn precedence_and_associativity() {
        let e = p("-u1^2").unwrap();
        assert_eq!(e.eval(&[3.0, 0.0, 0.0]).unwrap(), -9.0);
        let e = p("u1 - u2 - u3").unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0]).unwrap(), -4.0);
        let e = p("u1 / u2 / u3").unwrap();
        assert_eq!(e.eval(&[12.0, 2.0, 3.0]).unwrap(), 2.0);
        let e = p("2^3^2").unwrap();
        assert_eq!(e.eval(&[0.0; 3]).unwrap(), 512.0);
        let e = p("u1^-1").unwrap();
        assert_eq!(e.eval(&[4.0, 0.0, 0.0]).unwrap(), 0.25);
        let e = p("1e-2*u1 + 2.5E1").unwrap();
        assert_eq!(e.eval(&[100.0, 0.0, 0.0]).unwrap(), 26.0);
    }

    #[test]
    fn exponent_must_be_constant() {
        assert!(matches!(p("u1^u2"), Err(ExprError::NonConstantExponent { offset: 3 })));
        assert!(p("u1^(1/2)").is_ok());
    }

    #[test]
    fn jet_of_exponential_at_origin() {
        let j = p("exp(-2*u1)").unwrap().eval_jet2(&[0.0; 3]).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient, vec![-2.0, 0.0, 0.0]);
        assert_eq!(j.hessian(0, 0), 4.0);
        for (i, k) in [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2)] {
            assert_eq!(j.hessian(i, k), 0.0);
        }
    }

    #[test]
    fn jet_of_bilinear_product() {
        let j = p("u1*u2").unwrap().eval_jet2(&[3.0, 5.0, 0.0]).unwrap();
        assert_eq!(j.value, 15.0);
        assert_eq!(j.gradient, vec![5.0, 3.0, 0.0]);
        assert_eq!(j.hessian(0, 1), 1.0);
        assert_eq!(j.hessian(1, 0), 1.0);
        assert_eq!(j.hessian(0, 0), 0.0);
        assert_eq!(j.hessian(2, 2), 0.0);
    }

    #[test]
    fn pythagorean_identity_jet_vanishes() {
        let e = p("sin(u1)^2+cos(u1)^2").unwrap();
        let x = [0.7, 0.0, 0.0];
        let j = e.eval_jet2(&x).unwrap();
        assert!((j.value - 1.0).abs() < 1e-14);
        for i in 0..3 {
            assert!(j.gradient[i].abs() < 1e-14);
            for k in 0..3 {
                assert!(j.hessian(i, k).abs() < 1e-14);
            }
        }
        // Finite-difference cross-check with step 1e-5.
        let h = 1e-5;
        let f = |t: f64| e.eval(&[t, 0.0, 0.0]).unwrap();
        let fd1 = (f(0.7 + h) - f(0.7 - h)) / (2.0 * h);
        let fd2 = (f(0.7 + h) - 2.0 * f(0.7) + f(0.7 - h)) / (h * h);
        assert!(fd1.abs() < 1e-9);
        assert!(fd2.abs() < 1e-5);
    }

    #[test]
    fn domain_errors_name_subexpression() {
        let e = p("log(u1 - 1)").unwrap();
        match e.eval_jet2(&[0.5, 0.0, 0.0]) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "(u1 - 1.0)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(p("1/u2").unwrap().eval(&[1.0, 0.0, 0.0]).is_err());
        assert!(p("sqrt(u1)").unwrap().eval(&[-1.0, 0.0, 0.0]).is_err());
        assert!(p("u1^0.5").unwrap().eval(&[-1.0, 0.0, 0.0]).is_err());
        assert!(p("u1^-2").unwrap().eval(&[0.0, 0.0, 0.0]).is_err());
        assert_eq!(p("u1^2").unwrap().eval(&[-3.0, 0.0, 0.0]).unwrap(), 9.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            p("u1").unwrap().eval(&[1.0]),
            Err(ExprError::Dimension { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn round_trip_through_display() {
        let e = p("-(u1 + 2*u2)^3 / (1 + tanh(u3)^2) - sqrt(exp(u1)) * tan(0.3*u2)").unwrap();
        let again = p(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }
}
