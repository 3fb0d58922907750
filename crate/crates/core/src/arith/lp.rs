//! Exact simplex method over the rationals.
//!
//! Problems have the form: maximize `<c, x>` subject to `<a_i, x> <= b_i`,
//! with every structural variable free. The solver works on a dictionary
//! (basic variables expressed through nonbasic ones), so a pivot costs
//! `rows * (structural + 1)` rational operations regardless of how many slack
//! variables exist. Infeasible starting dictionaries go through a single
//! auxiliary-variable phase. Pivoting follows Bland's rule throughout; free
//! variables never leave the basis once they enter, so after at most `n` such
//! entries the iteration is plain Bland on nonnegative variables.

use num_traits::{Signed, Zero};

use super::{Rational, RationalVector};

/// One row `<coeffs, x> <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpConstraint {
    pub coeffs: RationalVector,
    pub bound: Rational,
}

impl LpConstraint {
    pub fn new(coeffs: RationalVector, bound: Rational) -> Self {
        Self { coeffs, bound }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: RationalVector,
    },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Maximizes `objective` over `{x : <a, x> <= b for every constraint}`.
pub fn solve_lp_exact(objective: &[Rational], constraints: &[LpConstraint]) -> LpOutcome {
    let n = objective.len();
    debug_assert!(constraints.iter().all(|c| c.coeffs.len() == n));
    let mut dict = Dictionary::new(n, constraints);

    let needs_phase_one = constraints.iter().any(|c| c.bound.is_negative());
    if needs_phase_one && !dict.phase_one() {
        return LpOutcome::Infeasible;
    }

    dict.set_objective(objective);
    match dict.run() {
        Termination::Optimal => LpOutcome::Optimal {
            value: dict.obj[0].clone(),
            point: dict.structural_values(),
        },
        Termination::Unbounded => LpOutcome::Unbounded,
    }
}

enum Termination {
    Optimal,
    Unbounded,
}

struct Dictionary {
    structural: usize,
    /// Basic variable of each row.
    basis: Vec<usize>,
    /// Nonbasic variable of each column (column `j` is stored at index `j + 1`).
    nonbasis: Vec<usize>,
    /// `basis[r] = table[r][0] + sum_j table[r][j + 1] * nonbasis[j]`.
    table: Vec<Vec<Rational>>,
    /// `z = obj[0] + sum_j obj[j + 1] * nonbasis[j]`.
    obj: Vec<Rational>,
}

impl Dictionary {
    fn new(n: usize, constraints: &[LpConstraint]) -> Self {
        let table = constraints
            .iter()
            .map(|c| {
                let mut row = Vec::with_capacity(n + 1);
                row.push(c.bound.clone());
                row.extend(c.coeffs.iter().map(|a| -a));
                row
            })
            .collect();
        Self {
            structural: n,
            basis: (n..n + constraints.len()).collect(),
            nonbasis: (0..n).collect(),
            table,
            obj: vec![Rational::zero(); n + 1],
        }
    }

    fn is_free(&self, var: usize) -> bool {
        var < self.structural
    }

    /// Returns false if the constraints are infeasible. On success the
    /// dictionary is feasible and the auxiliary variable is gone.
    fn phase_one(&mut self) -> bool {
        let aux = self.structural + self.table.len();
        for row in &mut self.table {
            row.push(Rational::from_integer(1.into()));
        }
        self.nonbasis.push(aux);
        let aux_col = self.nonbasis.len() - 1;
        self.obj = vec![Rational::zero(); self.nonbasis.len() + 1];
        self.obj[aux_col + 1] = Rational::from_integer((-1).into());

        // Most negative bound leaves; ties go to the lowest basic index.
        let leave = (0..self.table.len())
            .min_by(|&a, &b| {
                self.table[a][0]
                    .cmp(&self.table[b][0])
                    .then(self.basis[a].cmp(&self.basis[b]))
            })
            .expect("phase one requires at least one row");
        self.pivot(leave, aux_col);

        if let Termination::Unbounded = self.run() {
            unreachable!("auxiliary objective is bounded by zero");
        }
        if self.obj[0].is_negative() {
            return false;
        }

        if let Some(r) = self.basis.iter().position(|&v| v == aux) {
            let col = (0..self.nonbasis.len())
                .filter(|&j| !self.table[r][j + 1].is_zero())
                .min_by_key(|&j| self.nonbasis[j]);
            match col {
                Some(col) => self.pivot(r, col),
                None => {
                    self.table.remove(r);
                    self.basis.remove(r);
                }
            }
        }
        let col = self
            .nonbasis
            .iter()
            .position(|&v| v == aux)
            .expect("auxiliary variable is nonbasic");
        self.nonbasis.remove(col);
        for row in &mut self.table {
            row.remove(col + 1);
        }
        true
    }

    fn set_objective(&mut self, objective: &[Rational]) {
        let mut obj = vec![Rational::zero(); self.nonbasis.len() + 1];
        for (var, c) in objective.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some(col) = self.nonbasis.iter().position(|&v| v == var) {
                obj[col + 1] += c;
            } else {
                let r = self
                    .basis
                    .iter()
                    .position(|&v| v == var)
                    .expect("variable is basic or nonbasic");
                for (o, t) in obj.iter_mut().zip(&self.table[r]) {
                    *o += c * t;
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self) -> Termination {
        loop {
            let entering = (0..self.nonbasis.len())
                .filter(|&j| {
                    let c = &self.obj[j + 1];
                    c.is_positive() || (self.is_free(self.nonbasis[j]) && !c.is_zero())
                })
                .min_by_key(|&j| self.nonbasis[j]);
            let Some(col) = entering else {
                return Termination::Optimal;
            };
            let increasing = self.obj[col + 1].is_positive();

            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.table.len() {
                if self.is_free(self.basis[r]) {
                    continue;
                }
                let coef = &self.table[r][col + 1];
                let shrinking = if increasing {
                    coef.is_negative()
                } else {
                    coef.is_positive()
                };
                if !shrinking {
                    continue;
                }
                let ratio = &self.table[r][0] / coef.abs();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return Termination::Unbounded,
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let width = self.nonbasis.len() + 1;
        let c = col + 1;
        let t = self.table[r][c].clone();
        debug_assert!(!t.is_zero());
        let inv = t.recip();
        let mut new_row = Vec::with_capacity(width);
        for j in 0..width {
            if j == c {
                new_row.push(inv.clone());
            } else {
                new_row.push(-(&self.table[r][j] * &inv));
            }
        }

        let substitute = |row: &mut Vec<Rational>| {
            let s = std::mem::take(&mut row[c]);
            if s.is_zero() {
                return;
            }
            for j in 0..width {
                if j == c {
                    row[j] = &s * &new_row[c];
                } else if !new_row[j].is_zero() {
                    row[j] += &s * &new_row[j];
                }
            }
        };
        for (i, row) in self.table.iter_mut().enumerate() {
            if i != r {
                substitute(row);
            }
        }
        substitute(&mut self.obj);

        self.table[r] = new_row;
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[col]);
    }

    fn structural_values(&self) -> RationalVector {
        let mut x = vec![Rational::zero(); self.structural];
        for (r, &var) in self.basis.iter().enumerate() {
            if var < self.structural {
                x[var] = self.table[r][0].clone();
            }
        }
        x
    }
}
