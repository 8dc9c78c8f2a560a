//! Integer weight systems on the 18 coordinates, the relation lattice between
//! them, the nine equation degrees, and the anticanonical constant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Degree, SIGMA_VARS};
use crate::varieties::KeyVarietyPresentation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error("w(p1) <= w(p2) <= w(p3) violated: ({0}, {1}, {2})")]
    UnorderedP(i64, i64, i64),
    #[error("equation `{label}` is inhomogeneous (degree {seen} vs {and})")]
    Inhomogeneous { label: String, seen: i64, and: i64 },
    #[error("equation `{label}` has degree {got}, expected {expected}")]
    DegreeMismatch {
        label: String,
        got: i64,
        expected: i64,
    },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
}

/// Weights for all 18 coordinates, stored by coordinate name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSystem {
    #[serde(flatten)]
    weights: BTreeMap<String, i64>,
}

/// The constants derived from a weight system: the nine equation degrees, the
/// total shift, and the anticanonical constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedConstants {
    pub degrees: [i64; 9],
    pub delta: i64,
    pub k: i64,
}

impl WeightSystem {
    /// Builds the full system from the free generators: the pairing degree
    /// d0 = w(p_i) + w(q_i), the three p-weights, w(r), and w(u).
    pub fn from_free(
        d0: i64,
        wp1: i64,
        wp2: i64,
        wp3: i64,
        wr: i64,
        wu: i64,
    ) -> Result<Self, GradingError> {
        if !(wp1 <= wp2 && wp2 <= wp3) {
            return Err(GradingError::UnorderedP(wp1, wp2, wp3));
        }
        let mut w = BTreeMap::new();
        let wq1 = d0 - wp1;
        let wq2 = d0 - wp2;
        let wq3 = d0 - wp3;
        w.insert("p1".into(), wp1);
        w.insert("p2".into(), wp2);
        w.insert("p3".into(), wp3);
        w.insert("q1".into(), wq1);
        w.insert("q2".into(), wq2);
        w.insert("q3".into(), wq3);
        w.insert("r".into(), wr);
        w.insert("u".into(), wu);
        w.insert("p4".into(), 2 * wr - wu);
        w.insert("s12".into(), wr - wq3);
        w.insert("s13".into(), wr - wq2);
        w.insert("s23".into(), wr - wq1);
        w.insert("s11".into(), wr + wp2 - wp1 - wq3);
        w.insert("s22".into(), wr + wp3 - wp2 - wq1);
        w.insert("s33".into(), wr + wp1 - wp3 - wq2);
        w.insert("t1".into(), wu + wp2 - wr - wq3);
        w.insert("t2".into(), wu + wp3 - wr - wq1);
        w.insert("t3".into(), wu + wp1 - wr - wq2);
        Ok(WeightSystem { weights: w })
    }

    /// Builds a system directly from explicit weights (one per coordinate);
    /// the relation lattice is not enforced here, `validate` reports on it.
    pub fn from_map(weights: BTreeMap<String, i64>) -> Result<Self, GradingError> {
        for name in SIGMA_VARS {
            if !weights.contains_key(name) {
                return Err(GradingError::UnknownCoordinate(name.to_string()));
            }
        }
        Ok(WeightSystem { weights })
    }

    pub fn weight_of(&self, name: &str) -> Option<i64> {
        self.weights.get(name).copied()
    }

    fn w(&self, name: &str) -> i64 {
        self.weights[name]
    }

    pub fn weights(&self) -> &BTreeMap<String, i64> {
        &self.weights
    }

    pub fn has_negative(&self) -> bool {
        self.weights.values().any(|&v| v < 0)
    }

    /// Degree d0 of the pairing equation.
    pub fn d0(&self) -> i64 {
        self.w("p1") + self.w("q1")
    }

    pub fn derived(&self) -> DerivedConstants {
        let d0 = self.d0();
        let wr = self.w("r");
        let wu = self.w("u");
        let wp = [self.w("p1"), self.w("p2"), self.w("p3")];
        let wp_sum: i64 = wp.iter().sum();
        let degrees = [
            d0,
            wr + wp[0],
            wr + wp[1],
            wr + wp[2],
            -d0 + wp_sum + wr,
            wu + wp[0],
            wu + wp[1],
            wu + wp[2],
            2 * wr,
        ];
        let delta = 2 * wr + wu + wp_sum;
        let k = 3 * delta - 2 * wr - 6 * d0 - wu;
        DerivedConstants { degrees, delta, k }
    }

    /// Sum of all 18 coordinate weights; equals delta + k on valid systems.
    pub fn total_coordinate_weight(&self) -> i64 {
        SIGMA_VARS.iter().map(|n| self.w(n)).sum()
    }

    /// The multiset of the nine equation degrees, sorted ascending.
    pub fn degree_multiset(&self) -> Vec<i64> {
        let mut d = self.derived().degrees.to_vec();
        d.sort();
        d
    }

    /// Checks every relation of the lattice plus the two formulas for the
    /// anticanonical constant; returns one line per relation.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let mut push = |name: &str, lhs: i64, rhs: i64| {
            checks.push(RelationCheck {
                relation: name.to_string(),
                lhs,
                rhs,
                ok: lhs == rhs,
            });
        };
        let d0 = self.d0();
        push("w(p2)+w(q2) = d0", self.w("p2") + self.w("q2"), d0);
        push("w(p3)+w(q3) = d0", self.w("p3") + self.w("q3"), d0);
        push("w(s12) = w(r)-w(q3)", self.w("s12"), self.w("r") - self.w("q3"));
        push("w(s13) = w(r)-w(q2)", self.w("s13"), self.w("r") - self.w("q2"));
        push("w(s23) = w(r)-w(q1)", self.w("s23"), self.w("r") - self.w("q1"));
        push(
            "w(s11) = w(r)+w(p2)-w(p1)-w(q3)",
            self.w("s11"),
            self.w("r") + self.w("p2") - self.w("p1") - self.w("q3"),
        );
        push(
            "w(s22) = w(r)+w(p3)-w(p2)-w(q1)",
            self.w("s22"),
            self.w("r") + self.w("p3") - self.w("p2") - self.w("q1"),
        );
        push(
            "w(s33) = w(r)+w(p1)-w(p3)-w(q2)",
            self.w("s33"),
            self.w("r") + self.w("p1") - self.w("p3") - self.w("q2"),
        );
        push("w(p4) = 2w(r)-w(u)", self.w("p4"), 2 * self.w("r") - self.w("u"));
        push(
            "w(t1) = w(u)+w(p2)-w(r)-w(q3)",
            self.w("t1"),
            self.w("u") + self.w("p2") - self.w("r") - self.w("q3"),
        );
        push(
            "w(t2) = w(u)+w(p3)-w(r)-w(q1)",
            self.w("t2"),
            self.w("u") + self.w("p3") - self.w("r") - self.w("q1"),
        );
        push(
            "w(t3) = w(u)+w(p1)-w(r)-w(q2)",
            self.w("t3"),
            self.w("u") + self.w("p1") - self.w("r") - self.w("q2"),
        );
        let derived = self.derived();
        push(
            "sum(d_i) = 3 delta",
            derived.degrees.iter().sum::<i64>(),
            3 * derived.delta,
        );
        push(
            "d4 = -d0 + w(p1 p2 p3) + w(r)",
            derived.degrees[4],
            -d0 + self.w("p1") + self.w("p2") + self.w("p3") + self.w("r"),
        );
        push(
            "k agrees with sum(coord weights) - delta",
            derived.k,
            self.total_coordinate_weight() - derived.delta,
        );
        ValidationReport { derived, checks }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub derived: DerivedConstants,
    pub checks: Vec<RelationCheck>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Computes the weighted degree of every equation and checks it equals the
/// expected (d0..d8) in equation order.
pub fn check_homogeneous(
    pres: &KeyVarietyPresentation,
    ws: &WeightSystem,
) -> Result<Vec<(String, i64)>, GradingError> {
    let derived = ws.derived();
    let mut out = Vec::new();
    for (i, (label, eq)) in pres.equations.iter().enumerate() {
        let deg = eq.weighted_degree(|n| ws.weight_of(n).unwrap_or(0));
        let expected = derived.degrees[i];
        match deg {
            Degree::Any => out.push((label.clone(), expected)),
            Degree::Homogeneous(d) if d == expected => out.push((label.clone(), d)),
            Degree::Homogeneous(d) => {
                return Err(GradingError::DegreeMismatch {
                    label: label.clone(),
                    got: d,
                    expected,
                })
            }
            Degree::Inhomogeneous { seen, and } => {
                return Err(GradingError::Inhomogeneous {
                    label: label.clone(),
                    seen,
                    and,
                })
            }
        }
    }
    Ok(out)
}
