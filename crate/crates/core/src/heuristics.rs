//! Human-designed ordering heuristics: Brown, gmods and T1.
//!
//! Each heuristic ranks variables by a chain of criteria and projects the
//! minimal one first. Criterion chains are compared lexicographically; a tie
//! through the whole chain is broken uniformly at random from a seed.
//!
//! * Brown: max degree of `x_i`; max total degree of a monomial containing
//!   `x_i`; number of monomials containing `x_i`.
//! * gmods: degree of `x_i` in the product of all polynomials.
//! * T1: degree in the product; average over polynomials of the average
//!   degree of `x_i`; sum of all degrees of `x_i`.
//!
//! By default the full ordering is chosen on the input set. With
//! [`Mode::Projected`] the criteria are recomputed on the projected set after
//! every choice.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::features::{aggregate_exact, extraction_vector, IVector, Op};
use crate::polyset::{PolySet, VariableOrdering};
use crate::projection::project_step;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct TieBreaker {
    pub seed: u64,
}

impl TieBreaker {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Original,
    Projected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    Brown,
    Gmods,
    T1,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::Brown, Heuristic::Gmods, Heuristic::T1];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Brown => "brown",
            Heuristic::Gmods => "gmods",
            Heuristic::T1 => "t1",
        }
    }

    /// The criterion chain for `var`; smaller is projected earlier.
    pub fn criteria(self, set: &PolySet, var: usize) -> Vec<BigRational> {
        let agg = |outer, inner, kind| aggregate_exact(outer, inner, &extraction_vector(set, var, kind));
        match self {
            Heuristic::Brown => vec![
                agg(Op::Max, Op::Max, IVector::I1),
                agg(Op::Max, Op::Max, IVector::I2),
                agg(Op::Sum, Op::Sum, IVector::I3),
            ],
            Heuristic::Gmods => vec![agg(Op::Sum, Op::Max, IVector::I1)],
            Heuristic::T1 => vec![
                agg(Op::Sum, Op::Max, IVector::I1),
                agg(Op::Avg, Op::Avg, IVector::I1),
                agg(Op::Sum, Op::Sum, IVector::I1),
            ],
        }
    }

    pub fn order(self, set: &PolySet, tb: TieBreaker) -> VariableOrdering {
        self.order_with(set, tb, Mode::Original)
    }

    pub fn order_with(self, set: &PolySet, tb: TieBreaker, mode: Mode) -> VariableOrdering {
        let mut rng = ChaCha8Rng::seed_from_u64(tb.seed);
        let mut current = set.clone();
        let mut remaining: Vec<usize> = (0..set.nvars()).collect();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let keys: Vec<Vec<BigRational>> = remaining.iter().map(|&v| self.criteria(&current, v)).collect();
            let best = keys.iter().min().expect("nonempty").clone();
            let tied: Vec<usize> = remaining
                .iter()
                .zip(&keys)
                .filter(|(_, k)| **k == best)
                .map(|(&v, _)| v)
                .collect();
            let pick = if tied.len() == 1 { tied[0] } else { tied[rng.gen_range(0..tied.len())] };
            order.push(pick);
            remaining.retain(|&v| v != pick);
            if mode == Mode::Projected && !remaining.is_empty() {
                current = project_step(&current, pick);
            }
        }
        VariableOrdering::new(order).expect("each variable chosen once")
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "brown" => Ok(Heuristic::Brown),
            "gmods" => Ok(Heuristic::Gmods),
            "t1" => Ok(Heuristic::T1),
            other => Err(Error::Config(format!("unknown heuristic `{other}`"))),
        }
    }
}

pub fn brown_order(set: &PolySet, tb: TieBreaker) -> VariableOrdering {
    Heuristic::Brown.order(set, tb)
}

pub fn gmods_order(set: &PolySet, tb: TieBreaker) -> VariableOrdering {
    Heuristic::Gmods.order(set, tb)
}

pub fn t1_order(set: &PolySet, tb: TieBreaker) -> VariableOrdering {
    Heuristic::T1.order(set, tb)
}
