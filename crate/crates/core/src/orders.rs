//! Decision procedures for the five stochastic orders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pwl::{merged_knots, PiecewiseLinearFn};
use crate::quantile::StepQuantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderRelation {
    /// Usual stochastic order: `q_a <= q_b`.
    St,
    /// Increasing convex order: `Q_a <= Q_b`.
    Icx,
    /// Convex order: equal means and `icx`.
    Cx,
    /// Increasing concave order: `Q̄_a <= Q̄_b`.
    Icv,
    /// Dispersive order: every quantile increment of `a` is at most that of `b`.
    Disp,
}

impl OrderRelation {
    pub const ALL: [OrderRelation; 5] = [
        OrderRelation::St,
        OrderRelation::Icx,
        OrderRelation::Cx,
        OrderRelation::Icv,
        OrderRelation::Disp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderRelation::St => "st",
            OrderRelation::Icx => "icx",
            OrderRelation::Cx => "cx",
            OrderRelation::Icv => "icv",
            OrderRelation::Disp => "disp",
        }
    }
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "st" => Ok(OrderRelation::St),
            "icx" => Ok(OrderRelation::Icx),
            "cx" => Ok(OrderRelation::Cx),
            "icv" => Ok(OrderRelation::Icv),
            "disp" => Ok(OrderRelation::Disp),
            other => Err(Error::UnknownRelation(other.to_string())),
        }
    }
}

/// Where a dominance check fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    /// `0 < u < v < 1` with `q_a(v) - q_a(u) > q_b(v) - q_b(u)`.
    Pair { u: f64, v: f64 },
    /// A single level; `u = 0` stands for the limit `0+`.
    Point { u: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: OrderRelation,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Smallest signed slack `b - a` over the check; negative on failure.
    pub margin: f64,
}

impl OrderVerdict {
    fn from_gap(relation: OrderRelation, margin: f64, witness: Witness, tol: f64) -> Self {
        let holds = margin >= -tol;
        Self {
            relation,
            holds,
            witness: if holds { None } else { Some(witness) },
            margin,
        }
    }
}

/// Decides `a ≼ b` for `rel`, allowing a violation of at most `tol`.
pub fn check_order(rel: OrderRelation, a: &StepQuantile, b: &StepQuantile, tol: f64) -> OrderVerdict {
    match rel {
        OrderRelation::St => {
            let (margin, u) = st_gap(a, b);
            OrderVerdict::from_gap(rel, margin, Witness::Point { u }, tol)
        }
        OrderRelation::Icx => {
            let (margin, u) = icx_gap(a, b);
            OrderVerdict::from_gap(rel, margin, Witness::Point { u }, tol)
        }
        OrderRelation::Icv => {
            let (margin, u) = icv_gap(a, b);
            OrderVerdict::from_gap(rel, margin, Witness::Point { u }, tol)
        }
        OrderRelation::Cx => {
            let (icx_margin, u) = icx_gap(a, b);
            let mean_gap = -(a.mean() - b.mean()).abs();
            if mean_gap < -tol && mean_gap <= icx_margin {
                OrderVerdict::from_gap(rel, mean_gap, Witness::Point { u: 0.0 }, tol)
            } else {
                OrderVerdict::from_gap(rel, icx_margin, Witness::Point { u }, tol)
            }
        }
        OrderRelation::Disp => {
            let (margin, u, v) = disp_gap(a, b);
            OrderVerdict::from_gap(rel, margin, Witness::Pair { u, v }, tol)
        }
    }
}

// min over merged pieces (w_{k-1}, w_k] of q_b - q_a, with the piece midpoint
fn st_gap(a: &StepQuantile, b: &StepQuantile) -> (f64, f64) {
    let grid = merged_knots([a.breakpoints(), b.breakpoints()].into_iter());
    let mut worst = (f64::INFINITY, 0.5);
    let mut lo = 0.0;
    for &w in &grid {
        let gap = b.at(w) - a.at(w);
        if gap < worst.0 {
            worst = (gap, 0.5 * (lo + w));
        }
        lo = w;
    }
    worst
}

fn knot_gap(fa: &PiecewiseLinearFn, fb: &PiecewiseLinearFn, skip: f64) -> (f64, f64) {
    let grid = merged_knots([fa.knots(), fb.knots()].into_iter());
    let mut worst = (f64::INFINITY, 0.0);
    for &w in grid.iter().filter(|&&w| w != skip) {
        let gap = fb.eval(w) - fa.eval(w);
        if gap < worst.0 {
            worst = (gap, w);
        }
    }
    worst
}

fn icx_gap(a: &StepQuantile, b: &StepQuantile) -> (f64, f64) {
    knot_gap(&a.integrated(), &b.integrated(), 1.0)
}

// Q̄(u) = L(1 - u): compare lower integrals and map the knot back to u
fn icv_gap(a: &StepQuantile, b: &StepQuantile) -> (f64, f64) {
    let (gap, w) = knot_gap(&a.lower_integrated(), &b.lower_integrated(), 0.0);
    (gap, 1.0 - w)
}

/// Merged interior breakpoints with the jump of each quantile there.
pub(crate) fn merged_jumps(members: &[&StepQuantile]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let grid = merged_knots(members.iter().map(|q| q.interior_breakpoints()));
    let jumps = members
        .iter()
        .map(|q| grid.iter().map(|&w| q.jump_at(w)).collect())
        .collect();
    (grid, jumps)
}

// min over windows p..=r of Σ (j_b - j_a); witness pair brackets the window
fn disp_gap(a: &StepQuantile, b: &StepQuantile) -> (f64, f64, f64) {
    let (grid, jumps) = merged_jumps(&[a, b]);
    let m = grid.len();
    if m == 0 {
        return (0.0, 0.25, 0.75);
    }
    let mut prefix = vec![0.0; m + 1];
    for k in 0..m {
        prefix[k + 1] = prefix[k] + (jumps[1][k] - jumps[0][k]);
    }
    let mut worst = (f64::INFINITY, 0, 0);
    for p in 0..m {
        for r in p..m {
            let slack = prefix[r + 1] - prefix[p];
            if slack < worst.0 {
                worst = (slack, p, r);
            }
        }
    }
    let (slack, p, r) = worst;
    let next = if r + 1 < m { grid[r + 1] } else { 1.0 };
    (slack, grid[p], 0.5 * (grid[r] + next))
}
