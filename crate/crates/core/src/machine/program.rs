use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::machine::pairing::{pair_big, unpair_big};

/// Programs of the unary combinator language. Every program denotes a
/// partial function on naturals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Zero,
    Succ,
    Id,
    Left,
    Right,
    Const(BigUint),
    /// Lookup in a finite list, 0 past its end.
    Seq(Vec<u64>),
    Comp(Box<Program>, Box<Program>),
    Pair(Box<Program>, Box<Program>),
    Rec(Box<Program>, Box<Program>),
    Min(Box<Program>),
    Mu(Box<Program>),
    Apply(Box<Program>, Box<Program>),
}

const LEAVES: u32 = 5;
const TAGS: u32 = 8;

/// Finite lists of naturals, numbered bijectively by the set bits of the
/// code: entry `i` is the gap before the `i`-th set bit.
fn list_code(list: &[u64]) -> BigUint {
    let mut code = BigUint::zero();
    let mut bit = 0u64;
    for (i, &gap) in list.iter().enumerate() {
        bit += gap + u64::from(i > 0);
        code.set_bit(bit, true);
    }
    code
}

fn list_decode(code: &BigUint) -> Vec<u64> {
    let mut out = Vec::new();
    let mut last: Option<u64> = None;
    for bit in 0..code.bits() {
        if code.bit(bit) {
            out.push(match last {
                None => bit,
                Some(l) => bit - l - 1,
            });
            last = Some(bit);
        }
    }
    out
}

impl Program {
    pub fn comp(f: Program, g: Program) -> Program {
        Program::Comp(Box::new(f), Box::new(g))
    }

    pub fn pair(f: Program, g: Program) -> Program {
        Program::Pair(Box::new(f), Box::new(g))
    }

    pub fn rec(f: Program, g: Program) -> Program {
        Program::Rec(Box::new(f), Box::new(g))
    }

    pub fn min(f: Program) -> Program {
        Program::Min(Box::new(f))
    }

    pub fn mu(f: Program) -> Program {
        Program::Mu(Box::new(f))
    }

    pub fn apply(f: Program, g: Program) -> Program {
        Program::Apply(Box::new(f), Box::new(g))
    }

    pub fn constant(c: u64) -> Program {
        Program::Const(BigUint::from(c))
    }

    pub fn index(&self) -> BigUint {
        let node = |q: BigUint, tag: u32| q * TAGS + tag + LEAVES;
        let two = |f: &Program, g: &Program| pair_big(&f.index(), &g.index());
        match self {
            Program::Zero => BigUint::from(0u32),
            Program::Succ => BigUint::from(1u32),
            Program::Id => BigUint::from(2u32),
            Program::Left => BigUint::from(3u32),
            Program::Right => BigUint::from(4u32),
            Program::Const(c) => node(c.clone(), 0),
            Program::Seq(list) => node(list_code(list), 1),
            Program::Comp(f, g) => node(two(f, g), 2),
            Program::Pair(f, g) => node(two(f, g), 3),
            Program::Rec(f, g) => node(two(f, g), 4),
            Program::Min(f) => node(f.index(), 5),
            Program::Mu(f) => node(f.index(), 6),
            Program::Apply(f, g) => node(two(f, g), 7),
        }
    }

    /// The program numbered `index`; every natural numbers some program.
    pub fn from_index(index: &BigUint) -> Program {
        if let Some(leaf) = index.to_u32().filter(|&c| c < LEAVES) {
            return [
                Program::Zero,
                Program::Succ,
                Program::Id,
                Program::Left,
                Program::Right,
            ][leaf as usize]
                .clone();
        }
        let rest = index - LEAVES;
        let tag = (&rest % TAGS).to_u32().expect("small");
        let q = rest / TAGS;
        let two = |q: &BigUint| {
            let (a, b) = unpair_big(q);
            (
                Box::new(Program::from_index(&a)),
                Box::new(Program::from_index(&b)),
            )
        };
        match tag {
            0 => Program::Const(q),
            1 => Program::Seq(list_decode(&q)),
            2 => {
                let (f, g) = two(&q);
                Program::Comp(f, g)
            }
            3 => {
                let (f, g) = two(&q);
                Program::Pair(f, g)
            }
            4 => {
                let (f, g) = two(&q);
                Program::Rec(f, g)
            }
            5 => Program::Min(Box::new(Program::from_index(&q))),
            6 => Program::Mu(Box::new(Program::from_index(&q))),
            _ => {
                let (f, g) = two(&q);
                Program::Apply(f, g)
            }
        }
    }

    pub fn from_u64(index: u64) -> Program {
        Program::from_index(&BigUint::from(index))
    }

    /// Whether the program avoids unbounded search and self-application,
    /// the only sources of divergence.
    pub fn is_total_fragment(&self) -> bool {
        match self {
            Program::Mu(_) | Program::Apply(..) => false,
            Program::Comp(f, g) | Program::Pair(f, g) | Program::Rec(f, g) => {
                f.is_total_fragment() && g.is_total_fragment()
            }
            Program::Min(f) => f.is_total_fragment(),
            _ => true,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Zero => write!(f, "zero"),
            Program::Succ => write!(f, "succ"),
            Program::Id => write!(f, "id"),
            Program::Left => write!(f, "left"),
            Program::Right => write!(f, "right"),
            Program::Const(c) => write!(f, "(const {c})"),
            Program::Seq(list) => {
                write!(f, "(seq")?;
                for x in list {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Program::Comp(a, b) => write!(f, "(comp {a} {b})"),
            Program::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Program::Rec(a, b) => write!(f, "(rec {a} {b})"),
            Program::Min(a) => write!(f, "(min {a})"),
            Program::Mu(a) => write!(f, "(mu {a})"),
            Program::Apply(a, b) => write!(f, "(apply {a} {b})"),
        }
    }
}

enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut atom = String::new();
    let flush = |atom: &mut String, out: &mut Vec<Token>| {
        if !atom.is_empty() {
            out.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                flush(&mut atom, &mut out);
                out.push(if ch == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => flush(&mut atom, &mut out),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut out);
    out
}

struct Parser {
    tokens: std::vec::IntoIter<Token>,
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::ProgramSyntax(msg.into())
}

impl Parser {
    fn expr(&mut self) -> Result<Program> {
        match self.tokens.next() {
            None => Err(syntax("unexpected end of input")),
            Some(Token::Close) => Err(syntax("unexpected `)`")),
            Some(Token::Atom(a)) => match a.as_str() {
                "zero" => Ok(Program::Zero),
                "succ" => Ok(Program::Succ),
                "id" => Ok(Program::Id),
                "left" => Ok(Program::Left),
                "right" => Ok(Program::Right),
                other => Err(syntax(format!("unknown atom `{other}`"))),
            },
            Some(Token::Open) => {
                let Some(Token::Atom(head)) = self.tokens.next() else {
                    return Err(syntax("expected an operator after `(`"));
                };
                let p = match head.as_str() {
                    "const" => Program::Const(self.number()?),
                    "seq" => {
                        let mut list = Vec::new();
                        loop {
                            match self.tokens.next() {
                                Some(Token::Close) => return Ok(Program::Seq(list)),
                                Some(Token::Atom(a)) => list.push(
                                    a.parse()
                                        .map_err(|_| syntax(format!("bad list entry `{a}`")))?,
                                ),
                                _ => return Err(syntax("unterminated seq")),
                            }
                        }
                    }
                    "comp" => Program::comp(self.expr()?, self.expr()?),
                    "pair" => Program::pair(self.expr()?, self.expr()?),
                    "rec" => Program::rec(self.expr()?, self.expr()?),
                    "min" => Program::min(self.expr()?),
                    "mu" => Program::mu(self.expr()?),
                    "apply" => Program::apply(self.expr()?, self.expr()?),
                    other => return Err(syntax(format!("unknown operator `{other}`"))),
                };
                match self.tokens.next() {
                    Some(Token::Close) => Ok(p),
                    _ => Err(syntax(format!(
                        "`{head}` takes a fixed number of arguments"
                    ))),
                }
            }
        }
    }

    fn number(&mut self) -> Result<BigUint> {
        match self.tokens.next() {
            Some(Token::Atom(a)) => a.parse().map_err(|_| syntax(format!("bad number `{a}`"))),
            _ => Err(syntax("expected a number")),
        }
    }
}

impl FromStr for Program {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser {
            tokens: tokenize(s).into_iter(),
        };
        let p = parser.expr()?;
        match parser.tokens.next() {
            None => Ok(p),
            Some(_) => Err(syntax("trailing input")),
        }
    }
}
