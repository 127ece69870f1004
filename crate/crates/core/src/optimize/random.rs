use rand_chacha::ChaCha8Rng;

use super::{uniform_valid, Evaluator, OptimizeError, Policy};
use crate::design_space::{ArchId, DesignSpace};

/// One uniformly drawn valid architecture per iteration, with replacement.
pub(super) struct RandomSampling;

impl Policy for RandomSampling {
    fn iterate(
        &mut self,
        _iteration: u64,
        space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError> {
        let id = uniform_valid(space, rng);
        eval.evaluate(id);
        Ok(Some(vec![id]))
    }
}
