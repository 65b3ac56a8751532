use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

/// Ordered list of named tensor factors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<Register> = Vec::new();
        for (name, dim) in registers {
            let name = name.into();
            if dim == 0 {
                return Err(Error::InvalidParameter(alloc::format!("register `{name}` has dimension 0")));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(Error::InvalidParameter(alloc::format!("duplicate register `{name}`")));
            }
            out.push(Register { name, dim });
        }
        Ok(Self { registers: out })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(name: &str, dim: usize) -> Self {
        Self::new([(name, dim)]).expect("single register layout")
    }

    /// One qubit per name.
    pub fn qubits(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(|n| (*n, 2usize)))
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let p = self.position(n.as_ref())?;
            if out.contains(&p) {
                return Err(Error::InvalidParameter(alloc::format!("register `{}` listed twice", n.as_ref())));
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn register_dim(&self, name: &str) -> Result<usize> {
        Ok(self.registers[self.position(name)?].dim)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    /// `self ⊗ other`.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        Self::new(
            self.registers
                .iter()
                .chain(other.registers.iter())
                .map(|r| (r.name.clone(), r.dim)),
        )
    }

    /// Sub-layout of the named registers, in the order given.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let pos = self.positions(names)?;
        Ok(Self { registers: pos.iter().map(|&p| self.registers[p].clone()).collect() })
    }

    /// Layout with the named registers removed, others in original order.
    pub fn without<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let pos = self.positions(names)?;
        Ok(Self {
            registers: self
                .registers
                .iter()
                .enumerate()
                .filter(|(i, _)| !pos.contains(i))
                .map(|(_, r)| r.clone())
                .collect(),
        })
    }

    /// Row-major strides: the last register varies fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = alloc::vec![1usize; self.registers.len()];
        for i in (0..self.registers.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.registers[i + 1].dim;
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = alloc::vec![0usize; self.registers.len()];
        for i in (0..self.registers.len()).rev() {
            let dim = self.registers[i].dim;
            d[i] = index % dim;
            index /= dim;
        }
        d
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(self.registers.iter())
            .fold(0, |acc, (&d, r)| acc * r.dim + d)
    }
}
