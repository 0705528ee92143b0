//! Worlds and propositions over boolean variables.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use crate::error::{Error, Result};

/// Largest model the engine will enumerate.
pub const MAX_VARS: usize = 24;

/// A truth assignment, stored as a bitmask. Bit `i` holds variable `i`.
///
/// Worlds are enumerated by binary counting, so `World(k)` is the `k`-th
/// world in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World(pub u32);

impl World {
    pub fn get(self, var: usize) -> bool {
        self.0 >> var & 1 == 1
    }

    pub fn with(self, var: usize, value: bool) -> World {
        if value {
            World(self.0 | 1 << var)
        } else {
            World(self.0 & !(1 << var))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All `2^n` worlds in canonical order.
    pub fn all(n: usize) -> impl Iterator<Item = World> + Clone {
        assert!(n <= MAX_VARS, "too many variables");
        (0..1u32 << n).map(World)
    }

    /// `1`/`0` per variable, variable 0 leftmost.
    pub fn bitstring(self, n: usize) -> String {
        (0..n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Literal listing such as `u n !l`.
    pub fn describe(self, names: &[String]) -> String {
        names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                if self.get(i) {
                    name.clone()
                } else {
                    format!("!{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn world_count(n: usize) -> Result<usize> {
    if n > MAX_VARS {
        return Err(Error::TooManyVariables { n, limit: MAX_VARS });
    }
    Ok(1usize << n)
}

/// Propositional formula over variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    True,
    False,
    Var(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn var(i: usize) -> Prop {
        Prop::Var(i)
    }

    pub fn lit(i: usize, value: bool) -> Prop {
        if value {
            Prop::Var(i)
        } else {
            !Prop::Var(i)
        }
    }

    /// Conjunction of all items, `True` when empty.
    pub fn all<I: IntoIterator<Item = Prop>>(items: I) -> Prop {
        items.into_iter().reduce(|a, b| a & b).unwrap_or(Prop::True)
    }

    /// Disjunction of all items, `False` when empty.
    pub fn any<I: IntoIterator<Item = Prop>>(items: I) -> Prop {
        items.into_iter().reduce(|a, b| a | b).unwrap_or(Prop::False)
    }

    /// The formula satisfied by exactly one world.
    pub fn world(w: World, n: usize) -> Prop {
        Prop::all((0..n).map(|i| Prop::lit(i, w.get(i))))
    }

    pub fn eval(&self, w: World) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Var(i) => w.get(*i),
            Prop::Not(p) => !p.eval(w),
            Prop::And(a, b) => a.eval(w) && b.eval(w),
            Prop::Or(a, b) => a.eval(w) || b.eval(w),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Prop::True | Prop::False => None,
            Prop::Var(i) => Some(*i),
            Prop::Not(p) => p.max_var(),
            Prop::And(a, b) | Prop::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Every referenced variable must be below `n`.
    pub fn check(&self, n: usize) -> Result<()> {
        match self.max_var() {
            Some(i) if i >= n => Err(Error::UnknownVariable(i)),
            _ => Ok(()),
        }
    }

    /// Same model set over `n` variables.
    pub fn equivalent(&self, other: &Prop, n: usize) -> bool {
        World::all(n).all(|w| self.eval(w) == other.eval(w))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PropDisplay<'a> {
        PropDisplay { prop: self, names }
    }
}

/// Checked evaluation.
pub fn eval_prop(w: World, p: &Prop, n: usize) -> Result<bool> {
    p.check(n)?;
    Ok(p.eval(w))
}

impl Not for Prop {
    type Output = Prop;
    fn not(self) -> Prop {
        Prop::Not(Box::new(self))
    }
}

impl BitAnd for Prop {
    type Output = Prop;
    fn bitand(self, rhs: Prop) -> Prop {
        Prop::And(Box::new(self), Box::new(rhs))
    }
}

impl BitOr for Prop {
    type Output = Prop;
    fn bitor(self, rhs: Prop) -> Prop {
        Prop::Or(Box::new(self), Box::new(rhs))
    }
}

/// Prints a formula in the model-file syntax with minimal parentheses.
pub struct PropDisplay<'a> {
    prop: &'a Prop,
    names: &'a [String],
}

impl PropDisplay<'_> {
    fn write(&self, p: &Prop, outer: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = match p {
            Prop::Or(..) => 1,
            Prop::And(..) => 2,
            _ => 3,
        };
        if prec < outer {
            f.write_str("(")?;
        }
        match p {
            Prop::True => f.write_str("true")?,
            Prop::False => f.write_str("false")?,
            Prop::Var(i) => match self.names.get(*i) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "x{i}")?,
            },
            Prop::Not(inner) => {
                f.write_str("!")?;
                self.write(inner, 3, f)?;
            }
            Prop::And(a, b) => {
                self.write(a, 2, f)?;
                f.write_str(" & ")?;
                self.write(b, 3, f)?;
            }
            Prop::Or(a, b) => {
                self.write(a, 1, f)?;
                f.write_str(" | ")?;
                self.write(b, 2, f)?;
            }
        }
        if prec < outer {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.prop, 0, f)
    }
}
