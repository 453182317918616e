use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use boxdiag::engine::{bounded_model, solve, Budget, NodeOutcome};
use boxdiag::kernel::{is_instance_of, is_variant, unify, Program, Query, Term};
use boxdiag_testgen::{random_program, Shape};

fn budget() -> Budget {
    Budget { max_steps: 5_000, max_depth: 100, max_answers: 200 }
}

fn program(seed: u64) -> (Program, Shape) {
    let shape = Shape::default();
    let mut rng = StdRng::seed_from_u64(seed);
    (random_program(&mut rng, &shape), shape)
}

fn clause_term(head: &Term, body: &[Term]) -> Term {
    let mut args = vec![head.clone()];
    args.extend(body.iter().cloned());
    Term::app("cl", args)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Ground queries succeed exactly on the bounded model, and ground
    /// answers of general queries lie in it.
    #[test]
    fn solve_agrees_with_the_fixpoint(seed in any::<u64>()) {
        let (p, shape) = program(seed);
        let model = bounded_model(&p, &shape.signature(), 3, 64);
        prop_assume!(model.is_exact_for(&p));
        for a in shape.ground_atoms(2) {
            let run = solve(&Query::atom(a.clone()), &p, Budget { max_answers: 1, ..budget() });
            if !run.answers.is_empty() {
                prop_assert!(model.contains(&a), "{} computed but not in the model\n{}", a, p);
            } else if !run.is_truncated() {
                prop_assert!(!model.contains(&a), "{} in the model but fails\n{}", a, p);
            }
        }
        for g in shape.general_atoms() {
            let run = solve(&Query::atom(g.clone()), &p, budget());
            for ans in run.answer_atoms() {
                prop_assert!(is_instance_of(&ans, &g));
                if ans.is_ground() && ans.atom_depth() <= 3 {
                    prop_assert!(model.contains(&ans), "{} computed but not in the model\n{}", ans, p);
                }
            }
        }
    }

    /// Re-applying each recorded step to the previous query gives the next
    /// one, along every branch of the tree.
    #[test]
    fn derivations_replay(seed in any::<u64>()) {
        let (p, shape) = program(seed);
        for g in shape.general_atoms() {
            let run = solve(&Query::atom(g), &p, Budget { max_steps: 1_000, ..budget() });
            let leaves: Vec<_> = run.tree.leaves().take(100).collect();
            for leaf in leaves {
                let d = run.tree.derivation_to(leaf);
                prop_assert_eq!(d.steps.len() + 1, d.queries.len());
                for (i, step) in d.steps.iter().enumerate() {
                    let q = &d.queries[i];
                    let selected = q.first().unwrap();
                    let c = p.clause(step.clause);
                    prop_assert!(is_variant(
                        &clause_term(&step.renamed.head, &step.renamed.body),
                        &clause_term(&c.head, &c.body)
                    ));
                    prop_assert!(unify(selected, &step.renamed.head).is_ok());
                    prop_assert_eq!(step.mgu.apply(selected), step.mgu.apply(&step.renamed.head));
                    let mut atoms = step.renamed.body.clone();
                    atoms.extend(q.atoms[1..].iter().cloned());
                    let next = Query::new(step.mgu.apply_all(&atoms));
                    prop_assert_eq!(&next, &d.queries[i + 1]);
                }
                if run.tree.node(leaf).outcome == NodeOutcome::Success {
                    prop_assert!(d.queries.last().unwrap().is_empty());
                }
            }
        }
    }
}
