mod common;

use std::collections::BTreeSet;

use cnlasp_cnl::assets::STUDENTS;
use cnlasp_cnl::frontend::sentences;
use cnlasp_cnl::meta::{evaluate, evaluate_facts, object_model, reify_program};
use cnlasp_cnl::reifier::{emit_facts, read_facts};
use cnlasp_cnl::{tokenize, Agreement, Assets, Category, LexEntry, Lexicon, Semantics, Workbench, WorkbenchConfig};
use cnlasp_core::{parse_program, solve, EngineConfig, Exec, ExternalRegistry, Program};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn assets() -> &'static Assets {
    static ASSETS: OnceLock<Assets> = OnceLock::new();
    ASSETS.get_or_init(Assets::builtin)
}

fn corpus_kb() -> &'static Program {
    static KB: OnceLock<Program> = OnceLock::new();
    KB.get_or_init(|| {
        let mut wb = Workbench::builtin();
        wb.add_text(STUDENTS).unwrap();
        emit_facts(wb.rules())
    })
}

fn surfaces() -> Vec<String> {
    assets()
        .lexicon
        .entries
        .iter()
        .filter(|e| !e.is_lookahead())
        .map(|e| e.surface.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn entry() -> impl Strategy<Value = LexEntry> {
    (
        prop::sample::select(Category::ALL.to_vec()),
        "[A-Za-z]{1,6}( [A-Z][a-z]{1,4})?",
        prop::option::of("[a-z]{1,6}"),
        prop::sample::select(vec![Agreement::Sg, Agreement::Pl, Agreement::N]),
        prop::sample::select(vec![Semantics::Forall, Semantics::N]),
    )
        .prop_map(|(category, surface, base, agreement, semantics)| LexEntry {
            category,
            surface,
            base,
            agreement,
            semantics,
        })
}

/// Sentences that reify on their own, in any order.
const STANDALONE: [&str; 8] = [
    "Every student who works and who is not provably absent is successful.",
    "If a student does not provably work then the student does not work.",
    "John is a student who works.",
    "Sue is a student and works.",
    "Mary Ann who is a student is absent.",
    "Exclude that a student who cheats is successful.",
    "Ray cheats.",
    "Every student who is successful works.",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tokens_tile_each_sentence(words in prop::collection::vec(prop::sample::select(surfaces()), 0..24)) {
        let text = words.join(" ");
        let toks = tokenize(&text, &assets().lexicon).unwrap();
        let got: Vec<&str> = toks.iter().map(|t| t.surface.as_str()).collect();
        prop_assert_eq!(&got, &words.iter().map(String::as_str).collect::<Vec<_>>());
        for (i, s) in sentences(&toks).iter().enumerate() {
            for (k, t) in s.iter().enumerate() {
                prop_assert_eq!(t.sentence_no, i as u32 + 1);
                prop_assert_eq!((t.start, t.end), (k as u32 + 1, k as u32 + 2));
            }
        }
    }

    #[test]
    fn lexicon_renders_and_reloads(entries in prop::collection::vec(entry(), 0..12)) {
        if let Ok(lex) = Lexicon::from_entries(entries) {
            let again = Lexicon::load(&lex.render()).unwrap();
            prop_assert_eq!(&again.entries, &lex.entries);
            prop_assert_eq!(again.render(), lex.render());
        }
    }

    #[test]
    fn body_order_does_not_matter(seed in any::<u64>()) {
        let mut rules = corpus_kb().rules.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(&mut rules[..], &mut rng);
        let shuffled = Program::new(rules);
        let cfg = EngineConfig::default();
        let base = evaluate_facts(corpus_kb().clone(), assets(), &cfg).unwrap();
        prop_assert_eq!(evaluate_facts(shuffled, assets(), &cfg).unwrap(), base);
    }

    #[test]
    fn reification_is_deterministic(order in Just((0..STANDALONE.len()).collect::<Vec<_>>()).prop_shuffle(), take in 1..=STANDALONE.len()) {
        let text: Vec<&str> = order[..take].iter().map(|i| STANDALONE[*i]).collect();
        let run = |exec| {
            let mut config = WorkbenchConfig::default();
            config.engine.exec = exec;
            let mut wb = Workbench::new(Arc::new(Assets::builtin()), config).unwrap();
            wb.add_text(&text.join(" ")).unwrap();
            (wb.kb_text(), wb.result().clone(), wb.rules().to_vec())
        };
        let (kb, result, rules) = run(Exec::Parallel);
        prop_assert_eq!(run(Exec::Sequential), (kb.clone(), result, rules.clone()));
        let ids: Vec<i64> = rules.iter().map(|r| r.id).collect();
        prop_assert_eq!(ids, (1..=rules.len() as i64).collect::<Vec<_>>());
        prop_assert_eq!(read_facts(&parse_program(&kb).unwrap()), rules);
    }

    #[test]
    fn meta_matches_object_level(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = common::single_variable_program(&mut rng, true);
        let referee = common::referee(&src, 20);
        prop_assume!(referee.is_some());
        let p = parse_program(&src).unwrap();
        let meta = evaluate(&reify_program(&p).unwrap(), assets(), &EngineConfig::default()).unwrap();
        let got: BTreeSet<Vec<String>> = meta.models.iter().map(|m| object_model(m)).collect();
        prop_assert_eq!(&got, &common::model_set(&referee.unwrap()));
        for m in &meta.models {
            for t in m {
                prop_assert!(!t.to_string().contains("sk("), "skolem left in {}", t);
            }
        }
    }
}

#[test]
fn object_program_and_reified_text_agree() {
    let mut wb = Workbench::builtin();
    wb.add_text(STUDENTS).unwrap();
    let p = parse_program(cnlasp_cnl::assets::ENGINE_DEMO).unwrap();
    let direct = solve(&p, &mut ExternalRegistry::new(), &EngineConfig::default()).unwrap();
    assert_eq!(vec![object_model(&wb.result().model)], direct.rendered());
}
