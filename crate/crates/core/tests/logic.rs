use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toposbench_core::category::{monoid_to_category, FinCategory, FinMonoid};
use toposbench_core::logic::{holds_with, parse_formula, LType, Mode, Signature, Universe};
use toposbench_core::nat::DEFAULT_BUDGET;
use toposbench_core::sample::all_presheaves;
use toposbench_core::{NatTrans, Presheaf};

/// First-order sentences over one sort with two unary function symbols.
#[derive(Debug, Clone)]
enum Fo {
    Eq(Tm, Tm),
    Not(Box<Fo>),
    And(Box<Fo>, Box<Fo>),
    Or(Box<Fo>, Box<Fo>),
    Imp(Box<Fo>, Box<Fo>),
    All(usize, Box<Fo>),
    Ex(usize, Box<Fo>),
}

#[derive(Debug, Clone)]
enum Tm {
    Var(usize),
    App(usize, Box<Tm>),
}

const FUNS: [&str; 2] = ["f", "g"];

fn random_term(rng: &mut impl Rng, bound: usize, depth: usize) -> Tm {
    let v = Tm::Var(rng.gen_range(0..bound));
    if depth == 0 || rng.gen_bool(0.6) {
        v
    } else {
        Tm::App(rng.gen_range(0..2), Box::new(random_term(rng, bound, depth - 1)))
    }
}

fn random_formula(rng: &mut ChaCha8Rng, bound: usize, depth: usize) -> Fo {
    if depth == 0 || bound > 0 && rng.gen_bool(0.2) {
        if bound == 0 {
            return Fo::All(0, Box::new(random_formula(rng, 1, 0)));
        }
        return Fo::Eq(random_term(rng, bound, 2), random_term(rng, bound, 2));
    }
    let choice = rng.gen_range(0..6);
    let mut sub = |b: usize| Box::new(random_formula(rng, b, depth - 1));
    match choice {
        0 => Fo::Not(sub(bound)),
        1 => Fo::And(sub(bound), sub(bound)),
        2 => Fo::Or(sub(bound), sub(bound)),
        3 => Fo::Imp(sub(bound), sub(bound)),
        4 => Fo::Ex(bound, sub(bound + 1)),
        _ => Fo::All(bound, sub(bound + 1)),
    }
}

fn show_term(t: &Tm) -> String {
    match t {
        Tm::Var(i) => format!("x{i}"),
        Tm::App(f, a) => format!("{}({})", FUNS[*f], show_term(a)),
    }
}

fn show(f: &Fo) -> String {
    match f {
        Fo::Eq(a, b) => format!("{} = {}", show_term(a), show_term(b)),
        Fo::Not(a) => format!("~({})", show(a)),
        Fo::And(a, b) => format!("({}) /\\ ({})", show(a), show(b)),
        Fo::Or(a, b) => format!("({}) \\/ ({})", show(a), show(b)),
        Fo::Imp(a, b) => format!("({}) => ({})", show(a), show(b)),
        Fo::All(i, a) => format!("forall x{i}:A. ({})", show(a)),
        Fo::Ex(i, a) => format!("exists x{i}:A. ({})", show(a)),
    }
}

fn value(t: &Tm, env: &[usize], tables: &[Vec<usize>; 2]) -> usize {
    match t {
        Tm::Var(i) => env[*i],
        Tm::App(f, a) => tables[*f][value(a, env, tables)],
    }
}

fn classical(f: &Fo, env: &mut Vec<usize>, n: usize, tables: &[Vec<usize>; 2]) -> bool {
    match f {
        Fo::Eq(a, b) => value(a, env, tables) == value(b, env, tables),
        Fo::Not(a) => !classical(a, env, n, tables),
        Fo::And(a, b) => classical(a, env, n, tables) && classical(b, env, n, tables),
        Fo::Or(a, b) => classical(a, env, n, tables) || classical(b, env, n, tables),
        Fo::Imp(a, b) => !classical(a, env, n, tables) || classical(b, env, n, tables),
        Fo::All(i, a) | Fo::Ex(i, a) => {
            let universal = matches!(f, Fo::All(..));
            let mut results = (0..n).map(|x| {
                env.truncate(*i);
                env.push(x);
                classical(a, env, n, tables)
            });
            if universal {
                results.all(|b| b)
            } else {
                results.any(|b| b)
            }
        }
    }
}

fn sets_signature(n: usize, tables: &[Vec<usize>; 2]) -> Signature {
    let base = Arc::new(FinCategory::trivial());
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let a = Arc::new(Presheaf::constant("A", &base, &refs));
    let mut sig = Signature::new(base).with_ground("A", a.clone()).unwrap();
    for (name, table) in FUNS.iter().zip(tables) {
        let m = NatTrans::new(a.clone(), a.clone(), vec![table.clone()]).unwrap();
        sig.bind_function(*name, "A", "A", m).unwrap();
    }
    sig
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agrees_with_classical_model_checking_in_sets(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = [0, 1].map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>());
        let f = random_formula(&mut rng, 0, 3);
        let sig = sets_signature(n, &tables);
        let src = show(&f);
        let expected = classical(&f, &mut Vec::new(), n, &tables);
        for mode in [Mode::Expand, Mode::Direct] {
            let (ok, tv) = holds_with(&parse_formula(&src).unwrap(), &sig, mode).unwrap();
            prop_assert_eq!(ok, expected, "{}", src);
            prop_assert!(ok || tv.is_bottom(), "Sets is two-valued: {}", src);
        }
    }
}

fn substitution_signatures() -> Vec<Signature> {
    let mut bases = vec![
        Arc::new(FinCategory::arrow_category()),
        Arc::new(FinCategory::trivial()),
    ];
    bases.push(Arc::new(monoid_to_category(&FinMonoid::chain_join(2))));
    let mut out = Vec::new();
    for base in bases {
        for y in all_presheaves(&base, 2, DEFAULT_BUDGET)
            .unwrap()
            .into_iter()
            .filter(|y| y.total_size() <= 3)
        {
            out.push(Signature::new(base.clone()).with_ground("Y", y).unwrap());
        }
    }
    out
}

#[test]
fn substitution_lemma() {
    let cases: [(LType, &[&str], &[&str]); 2] = [
        (
            LType::Omega,
            &[
                "x /\\ (forall y:Y. y = y)",
                "x => false",
                "~x",
                "exists y:Y. x",
                "forall y:Y. x \\/ y = y",
            ],
            &["true", "false", "exists y:Y. true", "forall y:Y. forall z:Y. y = z"],
        ),
        (
            LType::power(LType::ground("Y")),
            &[
                "forall y:Y. y in x",
                "exists y:Y. y in x",
                "{y:Y | ~(y in x)} = x",
                "x = {y:Y | true}",
            ],
            &["{y:Y | true}", "{y:Y | false}", "{y:Y | exists z:Y. ~(z = y)}"],
        ),
    ];
    let mut checked = 0;
    for sig in substitution_signatures() {
        let u = Universe::new(&sig).unwrap();
        for (ty, terms, closed) in &cases {
            let ctx = vec![("x".to_string(), ty.clone())];
            for t in *terms {
                let t = parse_formula(t).unwrap();
                let open = u.denote(&t, &ctx, Mode::Expand).unwrap();
                for s in *closed {
                    let s = parse_formula(s).unwrap();
                    let point = u.denote(&s, &[], Mode::Expand).unwrap();
                    let substituted = u.denote(&t.substitute("x", &s), &[], Mode::Expand).unwrap();
                    for c in 0..sig.base().num_objects() {
                        assert_eq!(
                            open.apply(c, point.apply(c, 0)),
                            substituted.apply(c, 0),
                            "{t} with {s}"
                        );
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "{checked}");
}
