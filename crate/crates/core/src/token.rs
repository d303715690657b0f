//! Token containers for the decoder.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenRole {
    SamOutput,
    Prompt,
    VnsMask,
    VnsEdge,
}

/// Ordered list of D-dimensional tokens with per-token roles.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSet {
    dim: usize,
    tokens: Vec<Vec<f64>>,
    roles: Vec<TokenRole>,
}

impl TokenSet {
    pub fn new(tokens: Vec<Vec<f64>>, roles: Vec<TokenRole>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::shape("token set must be nonempty".to_string()));
        }
        if tokens.len() != roles.len() {
            return Err(Error::shape(format!(
                "token count {} != role count {}",
                tokens.len(),
                roles.len()
            )));
        }
        let dim = tokens[0].len();
        for t in &tokens {
            if t.len() != dim {
                return Err(Error::shape(format!(
                    "token dim {} != {dim}",
                    t.len()
                )));
            }
            if let Some(v) = t.iter().find(|v| !v.is_finite()) {
                return Err(Error::shape(format!("non-finite token value {v}")));
            }
        }
        Ok(TokenSet { dim, tokens, roles })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, i: usize) -> &[f64] {
        &self.tokens[i]
    }

    pub fn role(&self, i: usize) -> TokenRole {
        self.roles[i]
    }

    pub fn tokens(&self) -> &[Vec<f64>] {
        &self.tokens
    }

    pub fn roles(&self) -> &[TokenRole] {
        &self.roles
    }

    pub(crate) fn set_token(&mut self, i: usize, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.dim);
        self.tokens[i] = values;
    }

    /// Index of the unique token with the given role; errors if absent or
    /// duplicated.
    pub fn unique_role_index(&self, role: TokenRole) -> Result<usize> {
        let mut found = None;
        for (i, &r) in self.roles.iter().enumerate() {
            if r == role {
                if found.is_some() {
                    return Err(Error::Config(format!("duplicate {role:?} token")));
                }
                found = Some(i);
            }
        }
        found.ok_or_else(|| Error::Config(format!("missing {role:?} token")))
    }
}
