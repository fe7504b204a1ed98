//! Boolean formulas in conjunctive normal form over bit-string assignments,
//! conflict counting, and the brute-force solution oracle the rest of the
//! crate is verified against.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Hard cap for brute-force enumeration; the oracle only needs desk scale.
pub const MAX_ENUM_VARS: usize = 24;

/// A variable or its negation. Variables are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: usize,
    negated: bool,
}

impl Literal {
    pub fn new(var: usize, negated: bool) -> Result<Self> {
        if var == 0 {
            return Err(Error::InvalidLiteral {
                token: "0".to_string(),
            });
        }
        Ok(Literal { var, negated })
    }

    pub fn positive(var: usize) -> Result<Self> {
        Literal::new(var, false)
    }

    pub fn negative(var: usize) -> Result<Self> {
        Literal::new(var, true)
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// Truth value under `a`; a positive literal is true iff its variable bit is set.
    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        a.get(self.var) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A disjunction of literals. Duplicate literals are kept as written; the
/// disjunction is idempotent so they do not change the clause's truth value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::EmptyClause { index: 0 });
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(a))
    }

    fn max_var(&self) -> usize {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A conjunction of clauses over variables 1..=n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVariables);
        }
        for c in &clauses {
            if c.max_var() > n {
                return Err(Error::VariableOutOfRange {
                    var: c.max_var(),
                    max: n,
                });
            }
        }
        Ok(Formula { n, clauses })
    }

    /// Variable count n.
    pub fn var_count(&self) -> usize {
        self.n
    }

    /// Clause count m.
    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Every clause has exactly one literal.
    pub fn is_one_sat(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.len() == 1)
    }

    /// 1-SAT with every clause on a distinct variable; exactly the class for
    /// which the single-step search guarantee holds (satisfiable, |S| = 2^(n-m)).
    pub fn is_guaranteed_one_sat(&self) -> bool {
        if !self.is_one_sat() {
            return false;
        }
        let mut seen = vec![false; self.n + 1];
        for c in &self.clauses {
            let v = c.literals()[0].var();
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// Number of clauses evaluating false under `s`.
    pub fn conflicts(&self, s: &Assignment) -> Result<usize> {
        if s.width() != self.n {
            return Err(Error::BitLengthMismatch {
                left: self.n,
                right: s.width(),
            });
        }
        Ok(self.clauses.iter().filter(|c| !c.satisfied_by(s)).count())
    }

    /// Brute-force oracle: every assignment with zero conflicts, in index order.
    pub fn enumerate_solutions(&self) -> Result<Vec<Assignment>> {
        if self.n > MAX_ENUM_VARS {
            return Err(Error::TooManyVariables {
                context: "solution enumeration",
                n: self.n,
                max: MAX_ENUM_VARS,
            });
        }
        let mut out = Vec::new();
        for index in 0..(1usize << self.n) {
            let a = Assignment::new(self.n, index)?;
            if self.conflicts(&a)? == 0 {
                out.push(a);
            }
        }
        Ok(out)
    }
}

/// Canonical form: explicit `n=`, clauses comma-separated, literals
/// space-separated. `parse` is a left inverse of this printing.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};", self.n)?;
        let parts: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        if !parts.is_empty() {
            write!(f, " {}", parts.join(", "))?;
        }
        Ok(())
    }
}

impl FromStr for Formula {
    type Err = Error;

    /// Grammar: optional `n=<count>;` prefix, then clauses separated by
    /// commas, each clause whitespace-separated signed nonzero integers
    /// (`-v` negates variable v). Without the prefix, n is the maximum
    /// variable index.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyFormula);
        }

        let (declared_n, body) = match text.strip_prefix("n=") {
            Some(rest) => {
                let (count_text, body) =
                    rest.split_once(';').ok_or_else(|| Error::InvalidVarCount {
                        text: text.to_string(),
                    })?;
                let n: usize = count_text
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidVarCount {
                        text: count_text.trim().to_string(),
                    })?;
                if n == 0 {
                    return Err(Error::NoVariables);
                }
                (Some(n), body.trim())
            }
            None => (None, text),
        };

        let mut clauses = Vec::new();
        if !body.is_empty() {
            for (index, clause_text) in body.split(',').enumerate() {
                let mut literals = Vec::new();
                for token in clause_text.split_whitespace() {
                    let value: i64 = token.parse().map_err(|_| Error::InvalidLiteral {
                        token: token.to_string(),
                    })?;
                    if value == 0 {
                        return Err(Error::InvalidLiteral {
                            token: token.to_string(),
                        });
                    }
                    literals.push(Literal::new(value.unsigned_abs() as usize, value < 0)?);
                }
                if literals.is_empty() {
                    return Err(Error::EmptyClause { index });
                }
                clauses.push(Clause { literals });
            }
        }

        let max_var = clauses.iter().map(|c| c.max_var()).max().unwrap_or(0);
        let n = match declared_n {
            Some(n) => {
                if max_var > n {
                    return Err(Error::VariableOutOfRange {
                        var: max_var,
                        max: n,
                    });
                }
                n
            }
            None => {
                if max_var == 0 {
                    return Err(Error::EmptyFormula);
                }
                max_var
            }
        };
        Formula::new(n, clauses)
    }
}

/// One of the 2^n assignments, stored as a basis index. Variable 1 is the
/// most significant bit, so index order is lexicographic on bit strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    index: usize,
}

impl Assignment {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVariables);
        }
        if n > usize::BITS as usize - 1 || index >= (1usize << n) {
            return Err(Error::AssignmentOutOfRange { index, n });
        }
        Ok(Assignment { n, index })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut index = 0usize;
        for &b in bits {
            index = (index << 1) | usize::from(b);
        }
        Assignment::new(bits.len(), index)
    }

    /// Bit count n.
    pub fn width(&self) -> usize {
        self.n
    }

    /// Basis index in lexicographic bit-string order.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Truth value of variable `var` (1-based, variable 1 = high bit).
    pub fn get(&self, var: usize) -> bool {
        assert!(var >= 1 && var <= self.n, "variable out of range");
        (self.index >> (self.n - var)) & 1 == 1
    }

    /// Copy with variable `var` flipped.
    pub fn flip(&self, var: usize) -> Self {
        assert!(var >= 1 && var <= self.n, "variable out of range");
        Assignment {
            n: self.n,
            index: self.index ^ (1 << (self.n - var)),
        }
    }

    /// Number of set bits (Hamming weight |r|).
    pub fn weight(&self) -> usize {
        self.index.count_ones() as usize
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for var in 1..=self.n {
            write!(f, "{}", u8::from(self.get(var)))?;
        }
        Ok(())
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::InvalidLiteral {
                        token: text.to_string(),
                    })
                }
            }
        }
        Assignment::from_bits(&bits)
    }
}

/// Number of differing bit positions; `hamming(r, 0…0)` is the weight |r|.
pub fn hamming(r: &Assignment, s: &Assignment) -> Result<usize> {
    if r.width() != s.width() {
        return Err(Error::BitLengthMismatch {
            left: r.width(),
            right: s.width(),
        });
    }
    Ok((r.index() ^ s.index()).count_ones() as usize)
}
