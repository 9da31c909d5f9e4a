mod support;

use ltlstep::ltl::{evaluate, parse, Formula, StepRange, Trace};
use proptest::prelude::*;

const ATOMS: [&str; 3] = ["p", "q", "r"];

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        (0usize..ATOMS.len()).prop_map(|i| Formula::atom(ATOMS[i])),
    ];
    leaf.prop_recursive(4, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            (1usize..=5, 0usize..=4, inner.clone()).prop_map(|(a, d, f)| {
                Formula::Eventually(StepRange::new(a, a + d), Box::new(f))
            }),
            (1usize..=5, 0usize..=4, inner.clone()).prop_map(|(a, d, f)| {
                Formula::Always(StepRange::new(a, a + d), Box::new(f))
            }),
            inner
                .clone()
                .prop_map(|f| Formula::AlwaysEventually(Box::new(f))),
            inner.prop_map(|f| Formula::EventuallyAlways(Box::new(f))),
        ]
    })
}

fn arb_trace() -> impl Strategy<Value = Trace> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), ATOMS.len()).prop_map(
            move |cols| {
                Trace::new(
                    n,
                    ATOMS
                        .iter()
                        .zip(cols)
                        .map(|(a, c)| (a.to_string(), c)),
                )
                .unwrap()
            },
        )
    })
}

proptest! {
    /// Printing and re-parsing reconstructs the identical AST.
    #[test]
    fn parser_round_trip(f in arb_formula()) {
        let printed = f.to_string();
        let reparsed = parse(&printed).unwrap_or_else(|e| panic!("`{printed}` failed: {e}"));
        prop_assert_eq!(reparsed, f);
    }

    /// Desugaring `->`/`<->` never changes the truth value.
    #[test]
    fn desugar_preserves_semantics((f, t) in (arb_formula(), arb_trace())) {
        let d = f.desugar();
        for k in 1..=t.len() {
            prop_assert_eq!(
                evaluate(&f, &t, k).unwrap(),
                evaluate(&d, &t, k).unwrap(),
                "formula {} desugared to {} differs at step {}", f, d, k
            );
        }
    }

    /// □φ = ¬◇¬φ under the finite-trace semantics.
    #[test]
    fn always_eventually_duality((f, t) in (arb_formula(), arb_trace())) {
        let always = Formula::always(f.clone());
        let dual = Formula::not(Formula::eventually(Formula::not(f)));
        for k in 1..=t.len() {
            prop_assert_eq!(
                evaluate(&always, &t, k).unwrap(),
                evaluate(&dual, &t, k).unwrap()
            );
        }
    }

    /// The until expansion law, with the base case at the horizon.
    #[test]
    fn until_expansion_law((a, b, t) in (arb_formula(), arb_formula(), arb_trace())) {
        let until = Formula::until(a.clone(), b.clone());
        let n = t.len();
        for k in 1..=n {
            let lhs = evaluate(&until, &t, k).unwrap();
            if k < n {
                let expansion = Formula::Or(vec![
                    b.clone(),
                    Formula::And(vec![a.clone(), Formula::next(until.clone())]),
                ]);
                prop_assert_eq!(lhs, evaluate(&expansion, &t, k).unwrap());
            } else {
                prop_assert_eq!(lhs, evaluate(&b, &t, n).unwrap());
            }
        }
    }

    /// On finite traces, `GF φ` collapses to φ at the final step.
    #[test]
    fn always_eventually_is_final_step((f, t) in (arb_formula(), arb_trace())) {
        let gf = Formula::AlwaysEventually(Box::new(f.clone()));
        for k in 1..=t.len() {
            prop_assert_eq!(
                evaluate(&gf, &t, k).unwrap(),
                evaluate(&f, &t, t.len()).unwrap()
            );
        }
    }

    /// `FG φ` is monotone in k: once a suffix witnesses it, later suffixes do too.
    #[test]
    fn eventually_always_suffix_monotone((f, t) in (arb_formula(), arb_trace())) {
        let fg = Formula::EventuallyAlways(Box::new(f));
        let mut prev = evaluate(&fg, &t, 1).unwrap();
        for k in 2..=t.len() {
            let cur = evaluate(&fg, &t, k).unwrap();
            prop_assert!(!prev || cur);
            prev = cur;
        }
    }
}

/// The concrete formulas shipped in the scenario corpus re-parse from their
/// printed forms.
#[test]
fn corpus_formulas_round_trip() {
    for text in [
        "F (p_R3 | p_R4)",
        "(p_R1 | p_R2) U p_R3",
        "G[7,15] p_R2",
        "F[1,5] p_R2",
        "G (p_lleg | p_rleg)",
        "true",
        "GF p_R1",
        "FG p_R2",
        "!p_R1 & X (p_R2 -> F p_R3)",
    ] {
        let f = parse(text).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f, "round trip of `{text}`");
    }
}
