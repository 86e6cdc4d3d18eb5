use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Handle of a variable registered in a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// `Σ coef · var + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearExpr {
    terms: Vec<(VarId, f64)>,
    constant: f64,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    /// Builder form of [`LinearExpr::add_term`].
    pub fn term(mut self, var: VarId, coef: f64) -> Self {
        self.add_term(var, coef);
        self
    }

    pub fn add_term(&mut self, var: VarId, coef: f64) {
        self.terms.push((var, coef));
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant += value;
    }

    pub fn terms(&self) -> &[(VarId, f64)] {
        &self.terms
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    /// Merge repeated variables (keeping first-appearance order) and drop
    /// zero coefficients.
    pub fn normalized(&self) -> Self {
        let mut slot: HashMap<VarId, usize> = HashMap::with_capacity(self.terms.len());
        let mut terms: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match slot.get(&v) {
                Some(&i) => terms[i].1 += c,
                None => {
                    slot.insert(v, terms.len());
                    terms.push((v, c));
                }
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        Self {
            terms,
            constant: self.constant,
        }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<f64>() + self.constant
    }
}

impl From<VarId> for LinearExpr {
    fn from(v: VarId) -> Self {
        LinearExpr::new().term(v, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        })
    }
}

/// `expr sense rhs`, stored with the expression's constant folded into `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinearExpr,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl Constraint {
    /// Amount by which `values` violate this constraint (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.expr.eval(values);
        match self.sense {
            ConstraintSense::Le => (lhs - self.rhs).max(0.0),
            ConstraintSense::Ge => (self.rhs - lhs).max(0.0),
            ConstraintSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimisation MILP over continuous and binary variables.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    vars: Vec<Variable>,
    var_index: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    constraint_names: HashSet<String>,
    objective: LinearExpr,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        let name = name.into();
        if self.var_index.contains_key(&name) {
            return Err(Error::Model(format!("duplicate variable name `{name}`")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::Model(format!(
                "variable `{name}` has empty bounds [{lower}, {upper}]"
            )));
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(Error::Model(format!("binary `{name}` bounds must lie within [0, 1]")));
        }
        let id = VarId(self.vars.len());
        self.var_index.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    /// Continuous variable with `lower <= x` and no upper bound.
    pub fn continuous(&mut self, name: impl Into<String>, lower: f64) -> Result<VarId> {
        self.add_var(name, VarKind::Continuous, lower, f64::INFINITY)
    }

    pub fn binary(&mut self, name: impl Into<String>) -> Result<VarId> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinearExpr,
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<()> {
        let name = name.into();
        if !self.constraint_names.insert(name.clone()) {
            return Err(Error::Model(format!("duplicate constraint name `{name}`")));
        }
        let expr = expr.normalized();
        if !rhs.is_finite() || !expr.constant.is_finite() || expr.terms.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::Model(format!(
                "constraint `{name}` has a non-finite coefficient"
            )));
        }
        let rhs = rhs - expr.constant;
        self.constraints.push(Constraint {
            name,
            expr: LinearExpr {
                terms: expr.terms,
                constant: 0.0,
            },
            sense,
            rhs,
        });
        Ok(())
    }

    pub fn set_objective(&mut self, expr: LinearExpr) -> Result<()> {
        let expr = expr.normalized();
        if !expr.constant.is_finite() || expr.terms.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::Model("objective has a non-finite coefficient".into()));
        }
        self.objective = expr;
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinearExpr {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Check that every referenced variable is registered in this model.
    pub fn validate(&self) -> Result<()> {
        let n = self.vars.len();
        for c in &self.constraints {
            if c.expr.terms.iter().any(|(v, _)| v.0 >= n) {
                return Err(Error::UnregisteredVariable {
                    constraint: c.name.clone(),
                });
            }
        }
        if self.objective.terms.iter().any(|(v, _)| v.0 >= n) {
            return Err(Error::UnregisteredVariable {
                constraint: "objective".into(),
            });
        }
        Ok(())
    }

    /// Dense objective coefficient vector, one entry per variable.
    pub fn objective_coefficients(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.vars.len()];
        for &(v, coef) in &self.objective.terms {
            c[v.0] += coef;
        }
        c
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.eval(values)
    }

    /// Largest constraint or bound violation of `values`, with the offending
    /// constraint (or variable) name.
    pub fn max_violation(&self, values: &[f64], exec: Execution) -> (f64, Option<String>) {
        let worst = exec.max_by(&self.constraints, 0.0, |c| c.violation(values));
        let bound_worst = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        let value = worst.max(bound_worst);
        if value == 0.0 {
            return (0.0, None);
        }
        let name = if worst >= bound_worst {
            self.constraints
                .iter()
                .find(|c| c.violation(values) == worst)
                .map(|c| c.name.clone())
        } else {
            self.vars
                .iter()
                .zip(values)
                .find(|(v, &x)| (v.lower - x).max(x - v.upper) == bound_worst)
                .map(|(v, _)| v.name.clone())
        };
        (value, name)
    }

    /// Largest distance of a binary variable from {0, 1}.
    pub fn max_integrality_violation(&self, values: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(values)
            .filter(|(v, _)| v.kind == VarKind::Binary)
            .map(|(_, &x)| (x - x.round()).abs())
            .fold(0.0, f64::max)
    }

    /// Copy of the model with every binary relaxed or fixed by `fix`.
    ///
    /// `fix(id)` returns `Some(value)` to pin a variable to `value`.
    pub fn with_fixed(&self, fix: impl Fn(VarId, &Variable) -> Option<f64>) -> Self {
        let mut out = self.clone();
        for (i, v) in out.vars.iter_mut().enumerate() {
            if let Some(x) = fix(VarId(i), v) {
                v.lower = x;
                v.upper = x;
            }
        }
        out
    }
}
