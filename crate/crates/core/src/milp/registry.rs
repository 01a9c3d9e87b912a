use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Col, MilpError, MilpProblem, VarKind};

/// Bidirectional map between variable names and columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableRegistry {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Col>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a named column on `problem`.
    pub fn add_variable(
        &mut self,
        problem: &mut MilpProblem,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<Col, MilpError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        debug_assert_eq!(
            self.names.len(),
            problem.num_vars(),
            "registry out of step with problem"
        );
        let col = problem.add_column(kind, lower, upper)?;
        self.index.insert(name.clone(), col);
        self.names.push(name);
        Ok(col)
    }

    pub fn column(&self, name: &str) -> Option<Col> {
        self.index.get(name).copied()
    }

    pub fn name(&self, col: Col) -> &str {
        &self.names[col.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Rebuild the name index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Col(i)))
            .collect();
    }
}
