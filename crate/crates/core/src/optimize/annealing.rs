use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{uniform_valid, AnnealingParams, Evaluator, OptimizeError, Policy, RESAMPLE_BUDGET};
use crate::design_space::{distance, ArchId, Architecture, DesignSpace, Variable, NUM_VARIABLES};

/// Spaces up to this many valid architectures are scanned directly.
const LISTED_LIMIT: u64 = 50_000;

/// `exp(delta / t)`; a candidate is accepted when this exceeds a uniform
/// draw.
pub fn acceptance_probability(delta: f64, t: f64) -> f64 {
    (delta / t).exp()
}

/// Uniform draws from the valid architectures at an exact distance from a
/// center.
pub enum ShellSampler {
    Listed {
        ids: Vec<ArchId>,
        coords: Vec<[u8; NUM_VARIABLES]>,
    },
    /// Uniform over the cross-product shell by counting, then rule rejection.
    Lattice,
}

impl ShellSampler {
    pub fn new(space: &DesignSpace) -> Self {
        if space.valid_count() <= LISTED_LIMIT {
            Self::listed(space)
        } else {
            ShellSampler::Lattice
        }
    }

    pub fn listed(space: &DesignSpace) -> Self {
        let ids = space.valid_ids().to_vec();
        let coords = ids
            .iter()
            .map(|&id| Architecture::from_id(id).expect("valid id").coordinates())
            .collect();
        ShellSampler::Listed { ids, coords }
    }

    /// Valid architectures at distance `d`; only available for scanned spaces.
    pub fn shell(&self, center: &Architecture, d: u32) -> Option<Vec<ArchId>> {
        match self {
            ShellSampler::Listed { ids, coords } => {
                let c = center.coordinates();
                Some(
                    ids.iter()
                        .zip(coords)
                        .filter(|(_, x)| l1(x, &c) == d)
                        .map(|(&id, _)| id)
                        .collect(),
                )
            }
            ShellSampler::Lattice => None,
        }
    }

    /// `None` when the shell is empty, or when rejection sampling found no
    /// valid member within the draw budget.
    pub fn sample(
        &self,
        space: &DesignSpace,
        center: &Architecture,
        d: u32,
        rng: &mut ChaCha8Rng,
    ) -> Option<ArchId> {
        match self {
            ShellSampler::Listed { .. } => {
                let shell = self.shell(center, d).expect("listed");
                if shell.is_empty() {
                    None
                } else {
                    Some(shell[rng.random_range(0..shell.len())])
                }
            }
            ShellSampler::Lattice => lattice_sample(space, center, d, rng),
        }
    }
}

fn l1(a: &[u8; NUM_VARIABLES], b: &[u8; NUM_VARIABLES]) -> u32 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as i32 - y as i32).unsigned_abs())
        .sum()
}

fn lattice_sample(
    space: &DesignSpace,
    center: &Architecture,
    d: u32,
    rng: &mut ChaCha8Rng,
) -> Option<ArchId> {
    let d = d as usize;
    // (code, offset) per variable
    let options: Vec<Vec<(i32, usize)>> = Variable::ALL
        .iter()
        .map(|&v| {
            let here = v.ordinal(center.get(v)).expect("in domain");
            space
                .domain(v)
                .iter()
                .map(|&code| (code, v.ordinal(code).expect("in domain").abs_diff(here)))
                .collect()
        })
        .collect();
    // ways[v][r]: assignments of variables v.. with offsets summing to r
    let mut ways = vec![vec![0u64; d + 1]; NUM_VARIABLES + 1];
    ways[NUM_VARIABLES][0] = 1;
    for v in (0..NUM_VARIABLES).rev() {
        for r in 0..=d {
            ways[v][r] = options[v]
                .iter()
                .filter(|&&(_, off)| off <= r)
                .map(|&(_, off)| ways[v + 1][r - off])
                .sum();
        }
    }
    if ways[0][d] == 0 {
        return None;
    }
    for _ in 0..RESAMPLE_BUDGET {
        let mut codes = [0i32; NUM_VARIABLES];
        let mut r = d;
        for v in 0..NUM_VARIABLES {
            let mut pick = rng.random_range(0..ways[v][r]);
            for &(code, off) in &options[v] {
                if off > r {
                    continue;
                }
                let w = ways[v + 1][r - off];
                if pick < w {
                    codes[v] = code;
                    r -= off;
                    break;
                }
                pick -= w;
            }
        }
        if space.rules().is_valid_codes(&codes) {
            let arch = Architecture::from_codes(&codes).expect("domain values");
            debug_assert_eq!(distance(&arch, center) as usize, d);
            return Some(arch.id());
        }
    }
    None
}

pub(super) struct Annealing {
    params: AnnealingParams,
    sampler: ShellSampler,
    current: Option<(ArchId, f64)>,
}

impl Annealing {
    pub(super) fn new(params: AnnealingParams, space: &DesignSpace) -> Self {
        Annealing {
            params,
            sampler: ShellSampler::new(space),
            current: None,
        }
    }
}

impl Policy for Annealing {
    fn iterate(
        &mut self,
        iteration: u64,
        space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError> {
        let Some((cur, cur_score)) = self.current else {
            let id = uniform_valid(space, rng);
            let score = eval.evaluate(id).score;
            self.current = Some((id, score));
            return Ok(Some(vec![id]));
        };
        if space.valid_count() == 1 {
            return Ok(None);
        }
        let step = (iteration - 1) as f64;
        let t = self.params.t_start / step;
        let center = Architecture::from_id(cur).expect("valid id");
        let normal = Normal::new(1.0, 1.0).expect("unit normal");
        let mut candidate = None;
        for _ in 0..RESAMPLE_BUDGET {
            let d = (normal.sample(rng) * self.params.step_size)
                .max(1.0)
                .round() as u32;
            if let Some(id) = self.sampler.sample(space, &center, d, rng) {
                candidate = Some(id);
                break;
            }
        }
        let Some(cand) = candidate else {
            return Err(OptimizeError::ResampleBudget {
                what: "annealing shell",
                budget: RESAMPLE_BUDGET,
            });
        };
        let score = eval.evaluate(cand).score;
        let u: f64 = rng.random();
        if acceptance_probability(score - cur_score, t) > u {
            self.current = Some((cand, score));
        }
        Ok(Some(vec![cand]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn temperature_schedule() {
        assert_eq!(20.0 / 10.0, 2.0);
        assert!(acceptance_probability(0.1, 2.0) > 1.0);
        assert!((acceptance_probability(-2.0, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn lattice_matches_listed_shell() {
        let space = DesignSpace::shipped()
            .restrict_spec("degree=4,8")
            .unwrap()
            .restrict_spec("xyD=-1,100")
            .unwrap();
        let listed = ShellSampler::listed(&space);
        let center = Architecture::from_id(space.valid_ids()[7]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..6 {
            let shell = listed.shell(&center, d).unwrap();
            for _ in 0..50 {
                match lattice_sample(&space, &center, d, &mut rng) {
                    Some(id) => assert!(shell.contains(&id)),
                    None => assert!(shell.is_empty()),
                }
            }
        }
    }
}
