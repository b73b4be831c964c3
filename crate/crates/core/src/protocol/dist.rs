//! Joint outcome distributions of the two- and three-measurement protocols
//! and the scalar quantities extracted from them.

use crate::measurement::Outcome;
use crate::{Error, Result};

/// Which pair of measurement times a two-measurement table refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimePair {
    /// Measurements at `0` and `t`.
    First,
    /// Measurements at `t` and `t + τ`.
    Second,
    /// Measurements at `0` and `t + τ`.
    Full,
}

/// Entries below this are treated as exact zeros; anything more negative is
/// an invariant violation.
const NEG_CLAMP: f64 = 1e-12;

fn clean_probability(p: f64, what: &str) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvariantViolation(format!("{what}: non-finite entry")));
    }
    if p < -NEG_CLAMP {
        return Err(Error::InvariantViolation(format!(
            "{what}: negative probability {p:.3e}"
        )));
    }
    Ok(p.max(0.0))
}

/// Joint probabilities over the three outcomes `(z, y, x) ∈ {±1}³`.
#[derive(Debug, Clone)]
pub struct JointDist3 {
    probs: [[[f64; 2]; 2]; 2],
    pub t: f64,
    pub tau: f64,
}

impl JointDist3 {
    /// Validates nonnegativity (to the clamp tolerance) and normalization.
    pub fn new(probs: [[[f64; 2]; 2]; 2], t: f64, tau: f64, sum_tol: f64) -> Result<Self> {
        let mut cleaned = probs;
        let mut sum = 0.0;
        for z in 0..2 {
            for y in 0..2 {
                for x in 0..2 {
                    let p = clean_probability(probs[z][y][x], "P3")?;
                    cleaned[z][y][x] = p;
                    sum += p;
                }
            }
        }
        if (sum - 1.0).abs() > sum_tol {
            return Err(Error::InvariantViolation(format!(
                "P3 sums to {sum} (tolerance {sum_tol:.1e})"
            )));
        }
        Ok(Self {
            probs: cleaned,
            t,
            tau,
        })
    }

    pub fn get(&self, z: Outcome, y: Outcome, x: Outcome) -> f64 {
        self.probs[z.index()][y.index()][x.index()]
    }

    pub fn entries(&self) -> &[[[f64; 2]; 2]; 2] {
        &self.probs
    }

    pub fn sum(&self) -> f64 {
        self.probs
            .iter()
            .flat_map(|zz| zz.iter().flat_map(|yy| yy.iter()))
            .sum()
    }
}

/// Joint probabilities over two outcomes `(second, first)`, labeled with the
/// time pair they were measured at.
#[derive(Debug, Clone)]
pub struct JointDist2 {
    probs: [[f64; 2]; 2],
    pub pair: TimePair,
    pub t: f64,
    pub tau: f64,
}

impl JointDist2 {
    pub fn new(
        probs: [[f64; 2]; 2],
        pair: TimePair,
        t: f64,
        tau: f64,
        sum_tol: f64,
    ) -> Result<Self> {
        let mut cleaned = probs;
        let mut sum = 0.0;
        for b in 0..2 {
            for a in 0..2 {
                let p = clean_probability(probs[b][a], "P2")?;
                cleaned[b][a] = p;
                sum += p;
            }
        }
        if (sum - 1.0).abs() > sum_tol {
            return Err(Error::InvariantViolation(format!(
                "P2 sums to {sum} (tolerance {sum_tol:.1e})"
            )));
        }
        Ok(Self {
            probs: cleaned,
            pair,
            t,
            tau,
        })
    }

    /// Probability of `(second, first)`.
    pub fn get(&self, second: Outcome, first: Outcome) -> f64 {
        self.probs[second.index()][first.index()]
    }

    /// Marginal over the second outcome.
    pub fn first_marginal(&self, first: Outcome) -> f64 {
        self.probs[0][first.index()] + self.probs[1][first.index()]
    }

    /// `⟨O_b O_a⟩ = Σ ba·P₂(b,a)`.
    pub fn correlator(&self) -> f64 {
        let mut acc = 0.0;
        for b in Outcome::BOTH {
            for a in Outcome::BOTH {
                acc += b.value() * a.value() * self.get(b, a);
            }
        }
        acc
    }
}

/// Marginal `P₃(z,x) = Σ_y P₃(z,y,x)`, a two-measurement-shaped table at the
/// outer time pair.
pub fn marginal_zx(p3: &JointDist3) -> JointDist2 {
    let mut probs = [[0.0; 2]; 2];
    for z in Outcome::BOTH {
        for x in Outcome::BOTH {
            let mut acc = 0.0;
            for y in Outcome::BOTH {
                acc += p3.get(z, y, x);
            }
            probs[z.index()][x.index()] = acc;
        }
    }
    JointDist2 {
        probs,
        pair: TimePair::Full,
        t: p3.t,
        tau: p3.tau,
    }
}

/// Invasiveness distance `I = Σ_zx |P₃(z,x) - P₂(z,x)| ∈ [0, 2]`.
pub fn invasiveness(p3zx: &JointDist2, p2zx: &JointDist2) -> Result<f64> {
    if p3zx.pair != TimePair::Full || p2zx.pair != TimePair::Full {
        return Err(Error::InvalidParameter(
            "invasiveness needs both tables at the outer (0, t+τ) time pair".into(),
        ));
    }
    if (p3zx.t - p2zx.t).abs() > 1e-12 || (p3zx.tau - p2zx.tau).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "invasiveness tables come from different schemes".into(),
        ));
    }
    let mut acc = 0.0;
    for z in Outcome::BOTH {
        for x in Outcome::BOTH {
            acc += (p3zx.get(z, x) - p2zx.get(z, x)).abs();
        }
    }
    Ok(acc)
}

/// Coefficients of the multilinear expansion of a normalized three-outcome
/// table: `c_S = Σ (∏_{m∈S} m) P₃(z,y,x)`.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatorSet {
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
    pub c_yx: f64,
    pub c_zy: f64,
    pub c_zx: f64,
    pub c_zyx: f64,
}

pub fn correlators(p3: &JointDist3) -> CorrelatorSet {
    let mut c = CorrelatorSet {
        c_x: 0.0,
        c_y: 0.0,
        c_z: 0.0,
        c_yx: 0.0,
        c_zy: 0.0,
        c_zx: 0.0,
        c_zyx: 0.0,
    };
    for z in Outcome::BOTH {
        for y in Outcome::BOTH {
            for x in Outcome::BOTH {
                let p = p3.get(z, y, x);
                let (zv, yv, xv) = (z.value(), y.value(), x.value());
                c.c_x += xv * p;
                c.c_y += yv * p;
                c.c_z += zv * p;
                c.c_yx += yv * xv * p;
                c.c_zy += zv * yv * p;
                c.c_zx += zv * xv * p;
                c.c_zyx += zv * yv * xv * p;
            }
        }
    }
    c
}

/// Invert `c_zx = ½sin²θ [d(t+τ) + cos(2φ) d(t,τ)]` for `d(t,τ)`, given the
/// summed-interval decay `d_sum = d(t+τ)`.
pub fn extract_d_ttau(cs: &CorrelatorSet, theta: f64, phi: f64, d_sum: f64) -> Result<f64> {
    let s = theta.sin();
    let c2 = (2.0 * phi).cos();
    if s.abs() < 1e-8 || c2.abs() < 1e-8 {
        return Err(Error::AngleNotInvertible(format!(
            "need sinθ and cos2φ away from zero, got sinθ={s:.2e}, cos2φ={c2:.2e}"
        )));
    }
    Ok((2.0 * cs.c_zx / (s * s) - d_sum) / c2)
}

/// Leggett-Garg parameter `K = ⟨O_yO_x⟩ + ⟨O_zO_y⟩ - ⟨O_zO_x⟩`, classically
/// bounded in `[-3, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct LgiResult {
    pub k: f64,
    pub violated: bool,
    pub c_yx: f64,
    pub c_zy: f64,
    pub c_zx: f64,
}

const LGI_TOL: f64 = 1e-12;

pub fn lgi_value(c_yx: f64, c_zy: f64, c_zx: f64) -> LgiResult {
    let k = c_yx + c_zy - c_zx;
    LgiResult {
        k,
        violated: !(-3.0 - LGI_TOL..=1.0 + LGI_TOL).contains(&k),
        c_yx,
        c_zy,
        c_zx,
    }
}
