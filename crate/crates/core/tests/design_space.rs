use proptest::prelude::*;
use spindse::design_space::{
    canonical_cardinality, distance, ArchId, Architecture, DesignSpace, RuleSet, Variable,
    NUM_VARIABLES,
};

fn code(var: Variable, text: &str) -> i32 {
    var.parse_value(text).unwrap()
}

/// The shipped rules written out by hand over raw codes.
fn oracle_valid(a: &Architecture) -> bool {
    use Variable::*;
    let c = a.codes();
    let v = |var: Variable| c[var.index()];
    let sqi = v(SingleQubitImpl);
    let global = sqi == code(SingleQubitImpl, "Global");
    let semi = sqi == code(SingleQubitImpl, "SemiGlobal");
    let sequential = sqi == code(SingleQubitImpl, "Sequential");
    let pulse = v(ZRotImpl) == code(ZRotImpl, "PulseBased");
    let swap_router = v(Router) == code(Router, "ShuttleBasedSwap");
    let snake = v(Router) == code(Router, "Snake");
    !((global || semi) && v(XyD) != -1)
        && !(semi && pulse && v(ZD) != -1)
        && !(pulse && v(XyZ) != 1)
        && !(sequential
            && (v(XyZ) != 0
                || v(XyTqg) != 0
                || v(ZTqg) != 0
                || v(XyZTqg) != 0
                || v(XyD) != -1
                || v(ZD) != -1))
        && !(semi && !swap_router)
        && !(swap_router && v(SwapOpt) != 0)
        && !(v(SwapOpt) == 1 && !snake)
}

#[test]
fn shipped_count_matches_hand_written_rules() {
    let mut expected = Vec::new();
    for id in 0..canonical_cardinality() as u32 {
        let a = Architecture::from_id(ArchId(id)).unwrap();
        if oracle_valid(&a) {
            expected.push(ArchId(id));
        }
    }
    let space = DesignSpace::shipped();
    assert_eq!(space.valid_ids(), expected.as_slice());
    assert_eq!(space.valid_count(), 338_148);
}

#[test]
fn empty_rules_keep_every_architecture() {
    let space = DesignSpace::new(RuleSet::empty());
    assert_eq!(space.valid_count(), canonical_cardinality());
    assert_eq!(canonical_cardinality(), 1_990_656);
}

#[test]
fn restriction_only_removes() {
    let full = DesignSpace::shipped();
    let small = full
        .restrict_spec("degree=4,8")
        .unwrap()
        .restrict_spec("sD=100")
        .unwrap();
    assert!(small.valid_count() < full.valid_count());
    for id in small.valid_ids() {
        assert!(full.valid_ids().binary_search(id).is_ok());
        let a = Architecture::from_id(*id).unwrap();
        assert!(a.get(Variable::Degree) != 6);
        assert_eq!(a.get(Variable::SD), 100);
    }
}

#[test]
fn degree_distance_counts_ordinal_steps() {
    let base = Architecture::fully_parallel();
    let d4 = base.with(Variable::Degree, 4).unwrap();
    let d6 = base.with(Variable::Degree, 6).unwrap();
    let d8 = base.with(Variable::Degree, 8).unwrap();
    assert_eq!(distance(&d4, &d6), 1);
    assert_eq!(distance(&d4, &d8), 2);
    let open = d4.with(Variable::XyD, -1).unwrap();
    assert_eq!(distance(&d4.with(Variable::XyD, 1).unwrap(), &open), 1);
    assert_eq!(distance(&d4.with(Variable::XyD, 25).unwrap(), &open), 2);
}

fn arb_arch() -> impl Strategy<Value = Architecture> {
    (0..canonical_cardinality() as u32).prop_map(|id| Architecture::from_id(ArchId(id)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn distance_is_a_metric(a in arb_arch(), b in arb_arch(), c in arb_arch()) {
        prop_assert_eq!(distance(&a, &a), 0);
        prop_assert_eq!(distance(&a, &b) == 0, a == b);
        prop_assert_eq!(distance(&a, &b), distance(&b, &a));
        prop_assert!(distance(&a, &c) <= distance(&a, &b) + distance(&b, &c));
    }

    #[test]
    fn distance_is_l1_over_ordinals(a in arb_arch(), b in arb_arch()) {
        let expected: u32 = (0..NUM_VARIABLES)
            .map(|i| (a.coordinates()[i] as i32 - b.coordinates()[i] as i32).unsigned_abs())
            .sum();
        prop_assert_eq!(distance(&a, &b), expected);
    }

    #[test]
    fn ids_round_trip(a in arb_arch()) {
        prop_assert_eq!(Architecture::from_id(a.id()), Some(a));
        prop_assert_eq!(Architecture::from_codes(&a.codes()).unwrap(), a);
    }

    #[test]
    fn repair_lands_in_the_shipped_space(a in arb_arch()) {
        let rules = RuleSet::shipped();
        let fixed = rules.repair(&a);
        prop_assert!(rules.validate(&fixed).valid);
        if rules.validate(&a).valid {
            prop_assert_eq!(fixed, a);
        }
    }
}
