mod common;

use lstm_mtf::tracklets::{AssociationConfig, TrackletTuple};
use lstm_mtf::{Point, TargetId};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Survive(Point, f64),
    Freeze(Point),
}

fn op() -> impl Strategy<Value = Op> {
    let p = (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| [x, y]);
    prop_oneof![
        (p.clone(), 0.0..50.0f64).prop_map(|(z, g)| Op::Survive(z, g)),
        p.prop_map(Op::Freeze),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tuple_operations_keep_invariants(
        ops in prop::collection::vec(op(), 0..40),
        max_batch in 1usize..12,
        m_max in 2i32..12,
    ) {
        let cfg = AssociationConfig { max_batch, m_max, ..AssociationConfig::default() };
        let mut t = TrackletTuple::birth([0.0, 0.0], &cfg, TargetId(9));
        let mut history = vec![[0.0, 0.0]];
        for op in &ops {
            let before = t.maturity;
            match *op {
                Op::Survive(z, g) => {
                    t.apply_survival(z, g, &cfg);
                    prop_assert!(!t.frozen);
                    prop_assert_eq!(t.maturity, (before + 1).min(m_max));
                    prop_assert_eq!(t.genuinity, g);
                    history.push(z);
                }
                Op::Freeze(x) => {
                    let g = t.genuinity;
                    t.apply_freeze(x, &cfg);
                    prop_assert!(t.frozen);
                    prop_assert_eq!(t.maturity, before - 1);
                    prop_assert_eq!(t.genuinity, g);
                    history.push(x);
                }
            }
            prop_assert_eq!(t.id(), TargetId(9));
            let len = t.patch().len();
            prop_assert!((1..=max_batch).contains(&len));
            // Chronological: the patch is the tail of everything appended.
            let tail: Vec<Point> = history[history.len() - len..].to_vec();
            prop_assert_eq!(t.rows(), tail);
        }
    }

    #[test]
    fn association_lifecycle_invariants(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let cfg = common::random_assoc_config(&mut r);
        let steps = common::random_lifecycle(&mut r, 12);
        if let Err(e) = common::check_lifecycle(&cfg, &steps) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn default_birth_is_alive_and_mature() {
    let cfg = AssociationConfig::default();
    let t = TrackletTuple::birth([1.0, 2.0], &cfg, TargetId(0));
    assert!(!t.is_dead(&cfg) && t.is_mature(&cfg));
    assert_eq!(t.patch().len(), 1);
}

#[test]
fn frozen_newborn_dies_after_grace_steps() {
    let cfg = AssociationConfig::default();
    let mut t = TrackletTuple::birth([0.0, 0.0], &cfg, TargetId(0));
    let mut alive_steps = 0;
    while !t.is_dead(&cfg) {
        t.apply_freeze([0.0, 0.0], &cfg);
        alive_steps += 1;
    }
    // m_init + 1 freezes take maturity below the death floor of 0.
    assert_eq!(alive_steps, cfg.m_init - cfg.death_floor + 1);
}
