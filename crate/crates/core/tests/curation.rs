use std::collections::BTreeSet;

use proptest::prelude::*;

use profilekit_core::curate::{
    atomic_questions, build_stage1, build_stage2, composite_question, filter_low_entropy, AtomicProfile,
    CurationConfig, Judge, MockConfig, MockTeacher, Question, Schema, StageDataset,
};
use profilekit_core::rng::seeded;

fn questions(s: &Schema, users: usize) -> Vec<Question> {
    let label = AtomicProfile::default()
        .with("gender", "Male")
        .with("marital_status", "Married")
        .with("has_children", "Yes")
        .with("hobbies", "cycling")
        .completed(s);
    (0..users)
        .flat_map(|u| atomic_questions(&format!("u{u}"), "", &label, s))
        .chain((0..users).map(|u| composite_question(&format!("u{u}"), "", &label)))
        .collect()
}

fn ids(d: &StageDataset) -> BTreeSet<String> {
    d.samples.iter().map(|x| x.question.question_id.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stages_recheck_and_nest(
        seed in any::<u64>(),
        vote in 0.0f64..1.0,
        malformed in 0.0f64..0.3,
        resynth in 0.0f64..1.0,
        label in 0.0f64..1.0,
    ) {
        let s = Schema::builtin();
        let judge = Judge::new(&s);
        let m = MockTeacher::new(
            MockConfig { seed, vote_agree_rate: vote, malformed_rate: malformed, resynth_agree_rate: resynth, label_agree_rate: label, ..Default::default() },
            s.clone(),
        ).unwrap();
        let all = questions(&s, 3);
        let qs = filter_low_entropy(&all, &m, &judge);
        prop_assert!(qs.len() <= all.len());

        let loose_cfg = CurationConfig::default();
        let strict_cfg = CurationConfig { stage1_threshold: 5, ..Default::default() };
        let loose = build_stage1(&qs, &m, &judge, &loose_cfg, &mut seeded(seed)).unwrap();
        let strict = build_stage1(&qs, &m, &judge, &strict_cfg, &mut seeded(seed)).unwrap();
        prop_assert!(ids(&strict.dataset).is_subset(&ids(&loose.dataset)));
        prop_assert_eq!(&loose.votes, &strict.votes);
        prop_assert!(loose.dataset.recheck(&judge, &loose_cfg).is_ok());
        prop_assert!(strict.dataset.recheck(&judge, &strict_cfg).is_ok());

        let two = build_stage2(&qs, &loose.votes, &m, &judge, &loose_cfg).unwrap();
        prop_assert!(two.recheck(&judge, &loose_cfg).is_ok());
        prop_assert!(ids(&two).is_disjoint(&ids(&loose.dataset)));
        prop_assert_eq!(build_stage1(&qs, &m, &judge, &loose_cfg, &mut seeded(seed)).unwrap(), loose);
    }
}
