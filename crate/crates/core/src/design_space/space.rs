//! Variable domains, enumeration of valid architectures and distances.

use std::sync::OnceLock;

use super::arch::{ArchId, Architecture, Variable, NUM_VARIABLES};
use super::rules::RuleSet;
use super::{DesignSpaceError, DomainError};

pub const DOMAINS_FORMAT_TAG: &str = "spindse-domains/1";

/// Ordered value lists for every variable plus the rule set that filters
/// their cross-product.
#[derive(Debug)]
pub struct DesignSpace {
    domains: [Vec<i32>; NUM_VARIABLES],
    rules: RuleSet,
    valid: OnceLock<Vec<ArchId>>,
}

impl Clone for DesignSpace {
    fn clone(&self) -> Self {
        DesignSpace {
            domains: self.domains.clone(),
            rules: self.rules.clone(),
            valid: self.valid.clone(),
        }
    }
}

impl DesignSpace {
    pub fn new(rules: RuleSet) -> Self {
        DesignSpace {
            domains: Variable::ALL.map(|v| v.canonical_domain().to_vec()),
            rules,
            valid: OnceLock::new(),
        }
    }

    /// Canonical domains with the shipped rules.
    pub fn shipped() -> Self {
        DesignSpace::new(RuleSet::shipped())
    }

    pub fn with_domains(
        domains: [Vec<i32>; NUM_VARIABLES],
        rules: RuleSet,
    ) -> Result<Self, DesignSpaceError> {
        for (var, dom) in Variable::ALL.iter().zip(&domains) {
            for &code in dom {
                var.check(code)?;
            }
            let mut seen = dom.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != dom.len() {
                return Err(DesignSpaceError::DuplicateValue(var.name().to_string()));
            }
        }
        Ok(DesignSpace {
            domains,
            rules,
            valid: OnceLock::new(),
        })
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn domain(&self, var: Variable) -> &[i32] {
        &self.domains[var.index()]
    }

    pub fn domains(&self) -> &[Vec<i32>; NUM_VARIABLES] {
        &self.domains
    }

    /// Narrows one variable to the listed values, keeping domain order.
    pub fn restrict(&self, var: Variable, values: &[i32]) -> Result<DesignSpace, DesignSpaceError> {
        for &v in values {
            var.check(v)?;
        }
        let mut domains = self.domains.clone();
        domains[var.index()].retain(|c| values.contains(c));
        DesignSpace::with_domains(domains, self.rules.clone())
    }

    /// Parses `var=v1,v2,...` and applies it with [`DesignSpace::restrict`].
    pub fn restrict_spec(&self, spec: &str) -> Result<DesignSpace, DesignSpaceError> {
        let (name, values) = spec
            .split_once('=')
            .ok_or_else(|| DesignSpaceError::BadRestriction(spec.to_string()))?;
        let var = Variable::from_name(name)
            .ok_or_else(|| DesignSpaceError::BadRestriction(spec.to_string()))?;
        let codes = values
            .split(',')
            .map(|v| var.parse_value(v))
            .collect::<Result<Vec<_>, _>>()?;
        self.restrict(var, &codes)
    }

    pub fn with_rules(&self, rules: RuleSet) -> DesignSpace {
        DesignSpace {
            domains: self.domains.clone(),
            rules,
            valid: OnceLock::new(),
        }
    }

    /// Size of the unconstrained cross-product of the (possibly restricted)
    /// domains.
    pub fn cardinality(&self) -> u64 {
        self.domains.iter().map(|d| d.len() as u64).product()
    }

    /// Whether every field lies in this space's domains and no rule fails.
    pub fn contains(&self, arch: &Architecture) -> bool {
        let codes = arch.codes();
        self.in_domains(&codes) && self.rules.is_valid_codes(&codes)
    }

    pub fn in_domains(&self, codes: &[i32; NUM_VARIABLES]) -> bool {
        codes
            .iter()
            .zip(&self.domains)
            .all(|(c, dom)| dom.contains(c))
    }

    /// Lexicographic stream (declared variable order, domain order) of the
    /// valid architectures.
    pub fn enumerate(&self) -> Enumerate<'_> {
        Enumerate {
            space: self,
            digits: [0; NUM_VARIABLES],
            done: self.domains.iter().any(|d| d.is_empty()),
        }
    }

    /// Ids of all valid architectures in enumeration order, computed once.
    pub fn valid_ids(&self) -> &[ArchId] {
        self.valid
            .get_or_init(|| self.enumerate().map(|a| a.id()).collect())
    }

    pub fn valid_count(&self) -> u64 {
        self.valid_ids().len() as u64
    }

    /// Parses a domains file.
    pub fn parse_domains(text: &str) -> Result<[Vec<i32>; NUM_VARIABLES], DesignSpaceError> {
        let mut domains: [Option<Vec<i32>>; NUM_VARIABLES] = Default::default();
        let mut saw_format = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| DesignSpaceError::Parse {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `name = values`".into()))?;
            let key = key.trim();
            if key == "format" {
                if value.trim() != DOMAINS_FORMAT_TAG {
                    return Err(err(format!(
                        "unsupported format tag, expected `{DOMAINS_FORMAT_TAG}`"
                    )));
                }
                saw_format = true;
                continue;
            }
            let var =
                Variable::from_name(key).ok_or_else(|| err(format!("unknown variable `{key}`")))?;
            let values = value
                .split(',')
                .map(|v| var.parse_value(v))
                .collect::<Result<Vec<_>, DomainError>>()
                .map_err(|e| err(e.to_string()))?;
            if domains[var.index()].replace(values).is_some() {
                return Err(err(format!("`{key}` listed twice")));
            }
        }
        if !saw_format {
            return Err(DesignSpaceError::Parse {
                line: 0,
                message: format!("missing `format = {DOMAINS_FORMAT_TAG}` line"),
            });
        }
        let mut out: [Vec<i32>; NUM_VARIABLES] = Default::default();
        for var in Variable::ALL {
            out[var.index()] =
                domains[var.index()]
                    .take()
                    .ok_or_else(|| DesignSpaceError::Parse {
                        line: 0,
                        message: format!("missing domain for `{}`", var.name()),
                    })?;
        }
        Ok(out)
    }

    pub fn serialize_domains(&self) -> String {
        let mut out = format!("format = {DOMAINS_FORMAT_TAG}\n");
        for var in Variable::ALL {
            let values: Vec<String> = self
                .domain(var)
                .iter()
                .map(|&c| var.format_value(c))
                .collect();
            out.push_str(&format!("{} = {}\n", var.name(), values.join(", ")));
        }
        out
    }
}

/// Iterator returned by [`DesignSpace::enumerate`].
pub struct Enumerate<'a> {
    space: &'a DesignSpace,
    digits: [usize; NUM_VARIABLES],
    done: bool,
}

impl Iterator for Enumerate<'_> {
    type Item = Architecture;

    fn next(&mut self) -> Option<Architecture> {
        while !self.done {
            let mut codes = [0i32; NUM_VARIABLES];
            for (i, dom) in self.space.domains.iter().enumerate() {
                codes[i] = dom[self.digits[i]];
            }
            // odometer, last variable fastest
            let mut pos = NUM_VARIABLES;
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.digits[pos] += 1;
                if self.digits[pos] < self.space.domains[pos].len() {
                    break;
                }
                self.digits[pos] = 0;
            }
            if self.space.rules.is_valid_codes(&codes) {
                return Some(Architecture::from_codes(&codes).expect("domain values checked"));
            }
        }
        None
    }
}

/// Sum over all variables of the index difference on each variable's
/// ordinal scale.
pub fn distance(a: &Architecture, b: &Architecture) -> u32 {
    a.coordinates()
        .iter()
        .zip(b.coordinates().iter())
        .map(|(&x, &y)| (x as i32 - y as i32).unsigned_abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_space::arch::{Cap, Degree, Router};

    fn singleton_space() -> DesignSpace {
        let arch = Architecture::fully_parallel();
        let domains = Variable::ALL.map(|v| vec![arch.get(v)]);
        DesignSpace::with_domains(domains, RuleSet::shipped()).unwrap()
    }

    #[test]
    fn singleton_restriction_yields_one() {
        assert_eq!(singleton_space().valid_count(), 1);
        let mut domains = singleton_space().domains().clone();
        domains[Variable::Degree.index()] = vec![4];
        domains[Variable::Router.index()] = vec![1];
        let space = DesignSpace::with_domains(domains, RuleSet::shipped()).unwrap();
        let all: Vec<_> = space.enumerate().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].degree, Degree::Four);
        assert_eq!(all[0].router, Router::Snake);
    }

    #[test]
    fn empty_rule_set_enumerates_cross_product() {
        let space = DesignSpace::new(RuleSet::empty())
            .restrict(Variable::XyD, &[-1, 50])
            .unwrap()
            .restrict(Variable::ZD, &[100])
            .unwrap()
            .restrict(Variable::TqgD, &[25, 75])
            .unwrap();
        assert_eq!(space.valid_count(), space.cardinality());
        assert_eq!(
            space.cardinality(),
            2 * 2 * 2 * 2 * 2 * 2 * 6 * 4 * 2 * 3 * 2 * 2
        );
    }

    #[test]
    fn enumeration_is_sorted_by_id_and_valid() {
        let space = DesignSpace::shipped()
            .restrict(Variable::SD, &[100])
            .unwrap()
            .restrict(Variable::TqgD, &[50])
            .unwrap();
        let ids = space.valid_ids();
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
        for arch in space.enumerate() {
            assert!(space.rules().validate(&arch).valid);
        }
    }

    #[test]
    fn distance_examples() {
        let a = Architecture::fully_parallel();
        assert_eq!(distance(&a, &a), 0);
        let mut b = a;
        b.degree = Degree::Four;
        assert_eq!(distance(&a, &b), 2);
        let mut c = a;
        c.degree = Degree::Six;
        c.xy_d = Cap::new(1).unwrap();
        // degree: one step; xyD: 100 -> 1 is four steps
        assert_eq!(distance(&a, &c), 5);
    }

    #[test]
    fn domains_file_round_trips() {
        let space = DesignSpace::shipped()
            .restrict(Variable::Degree, &[6, 8])
            .unwrap();
        let parsed = DesignSpace::parse_domains(&space.serialize_domains()).unwrap();
        assert_eq!(&parsed, space.domains());
        assert!(DesignSpace::parse_domains("xy_z = 0,1\n").is_err());
    }

    #[test]
    fn restrict_spec_parses() {
        let s = DesignSpace::shipped()
            .restrict_spec("router=Snake")
            .unwrap();
        assert_eq!(s.domain(Variable::Router), &[1]);
        assert!(DesignSpace::shipped().restrict_spec("router").is_err());
        assert!(DesignSpace::shipped().restrict_spec("bogus=1").is_err());
    }
}
