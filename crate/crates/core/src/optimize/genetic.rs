use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    uniform_valid, unsampled_valid, Evaluator, GeneticParams, OptimizeError, Policy,
    RESAMPLE_BUDGET,
};
use crate::design_space::{ArchId, Architecture, DesignSpace, Variable, NUM_VARIABLES};

/// Elite, crossover and mutation counts for a population of `n`.
pub fn generation_counts(n: usize) -> (usize, usize, usize) {
    let elite = (0.15 * n as f64).round() as usize;
    let cross = (0.30 * n as f64).round() as usize;
    (elite, cross, n - elite - cross)
}

/// Single-point crossover: the first `point` variables from `a`, the rest
/// from `b`.
pub fn crossover(a: &Architecture, b: &Architecture, point: usize) -> [i32; NUM_VARIABLES] {
    let mut codes = b.codes();
    codes[..point].copy_from_slice(&a.codes()[..point]);
    codes
}

pub(super) struct Genetic {
    params: GeneticParams,
    population: Vec<ArchId>,
}

impl Genetic {
    pub(super) fn new(params: GeneticParams) -> Self {
        Genetic {
            params,
            population: Vec::new(),
        }
    }
}

fn arch(id: ArchId) -> Architecture {
    Architecture::from_id(id).expect("valid id")
}

/// Higher score first, then lower id.
fn rank(eval: &Evaluator<'_>, a: ArchId, b: ArchId) -> std::cmp::Ordering {
    let (sa, sb) = (
        eval.get(a).expect("cached").score,
        eval.get(b).expect("cached").score,
    );
    sb.total_cmp(&sa).then(a.cmp(&b))
}

impl Genetic {
    fn next_generation(
        &self,
        space: &DesignSpace,
        eval: &Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<ArchId>, OptimizeError> {
        let n = self.params.population;
        let (n_elite, n_cross, n_mut) = generation_counts(n);
        let mut ranked = self.population.clone();
        ranked.sort_by(|&a, &b| rank(eval, a, b));
        let elites: Vec<ArchId> = ranked[..n_elite.min(ranked.len())].to_vec();

        let mut pool: Vec<ArchId> = self.population.clone();
        pool.sort_unstable();
        pool.dedup();
        let n_parents = ((0.5 * n as f64).round() as usize).min(pool.len());
        let mut parents = Vec::with_capacity(n_parents);
        while parents.len() < n_parents {
            let k = self.params.tournament.min(pool.len());
            let entrants: Vec<usize> = rand::seq::index::sample(rng, pool.len(), k).into_vec();
            let winner = *entrants
                .iter()
                .min_by(|&&i, &&j| rank(eval, pool[i], pool[j]))
                .expect("nonempty tournament");
            parents.push(pool.swap_remove(winner));
        }

        let mut children = Vec::with_capacity(n_cross);
        for _ in 0..n_cross {
            let mut child = None;
            for _ in 0..RESAMPLE_BUDGET {
                let (a, b) = if parents.len() >= 2 {
                    let pair: Vec<&ArchId> = parents.choose_multiple(rng, 2).collect();
                    (*pair[0], *pair[1])
                } else {
                    (parents[0], parents[0])
                };
                let point = rng.random_range(1..=NUM_VARIABLES);
                let codes = crossover(&arch(a), &arch(b), point);
                if space.rules().is_valid_codes(&codes) {
                    child = Some(Architecture::from_codes(&codes).expect("parent codes").id());
                    break;
                }
            }
            children.push(child.ok_or(OptimizeError::ResampleBudget {
                what: "crossover",
                budget: RESAMPLE_BUDGET,
            })?);
        }

        let bases: Vec<ArchId> = elites.iter().chain(&children).copied().collect();
        let mut mutants = Vec::with_capacity(n_mut);
        for _ in 0..n_mut {
            let mut child = None;
            for _ in 0..RESAMPLE_BUDGET {
                let base = match bases.choose(rng) {
                    Some(&b) => arch(b),
                    None => arch(uniform_valid(space, rng)),
                };
                let mut codes = base.codes();
                for var in Variable::ALL {
                    let dom = space.domain(var);
                    if dom.len() > 1 && rng.random_bool(self.params.p_mut) {
                        let here = codes[var.index()];
                        let others: Vec<i32> = dom.iter().copied().filter(|&c| c != here).collect();
                        codes[var.index()] = *others.choose(rng).expect("two or more values");
                    }
                }
                if space.rules().is_valid_codes(&codes) {
                    child = Some(Architecture::from_codes(&codes).expect("domain codes").id());
                    break;
                }
            }
            mutants.push(child.ok_or(OptimizeError::ResampleBudget {
                what: "mutation",
                budget: RESAMPLE_BUDGET,
            })?);
        }

        Ok(elites.into_iter().chain(children).chain(mutants).collect())
    }
}

impl Policy for Genetic {
    fn iterate(
        &mut self,
        iteration: u64,
        space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError> {
        let next = if iteration == 1 {
            let n = self.params.population;
            let mut init = unsampled_valid(space, eval, n, rng);
            while init.len() < n {
                init.push(uniform_valid(space, rng));
            }
            init
        } else {
            self.next_generation(space, eval, rng)?
        };
        eval.evaluate_batch(&next);
        self.population = next.clone();
        Ok(Some(next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(generation_counts(100), (15, 30, 55));
        assert_eq!(generation_counts(50), (8, 15, 27));
    }

    #[test]
    fn crossover_bounds() {
        let a = Architecture::fully_parallel();
        let b = Architecture::from_id(ArchId(0)).unwrap();
        assert_eq!(crossover(&a, &b, NUM_VARIABLES), a.codes());
        let c = crossover(&a, &b, 1);
        assert_eq!(c[0], a.codes()[0]);
        assert_eq!(c[1..], b.codes()[1..]);
    }
}
