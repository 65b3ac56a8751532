use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::hilbert::{Pvm, RegisterLayout};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Source of uniformly random members of a family of `N`-outcome projective
/// measurements. Members carry a stable identifier for logging.
pub trait PvmSampler {
    fn outcomes(&self) -> usize;
    fn sample(&self, rng: &mut StreamRng) -> Result<(u64, Arc<Pvm>)>;
}

/// Explicitly enumerated family.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    members: Vec<Arc<Pvm>>,
}

impl ProjectionFamily {
    pub fn new(members: Vec<Pvm>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidParameter("empty projection family".into()))?;
        let (layout, n): (RegisterLayout, usize) = (first.layout().clone(), first.outcomes());
        if members.iter().any(|m| m.layout() != &layout || m.outcomes() != n) {
            return Err(Error::InvalidParameter("family members differ in layout or outcome count".into()));
        }
        Ok(Self { members: members.into_iter().map(Arc::new).collect() })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &Pvm {
        &self.members[i]
    }

    pub fn members(&self) -> impl Iterator<Item = &Pvm> {
        self.members.iter().map(|m| m.as_ref())
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.members[0].layout()
    }
}

impl PvmSampler for ProjectionFamily {
    fn outcomes(&self) -> usize {
        self.members[0].outcomes()
    }

    fn sample(&self, rng: &mut StreamRng) -> Result<(u64, Arc<Pvm>)> {
        let i = rng.below(self.members.len());
        Ok((i as u64, self.members[i].clone()))
    }
}
