use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::schema::{AtomicProfile, Schema, Value};

pub const ATOMIC_TEMPLATE: &str = "atomic-v1";
pub const COMPOSITE_TEMPLATE: &str = "composite-v1";

/// One synthesis prompt: a user's MUB corpus plus the attribute asked about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub user_id: String,
    /// `None` asks for the composite profile.
    pub attribute_id: Option<String>,
    pub mub_context: String,
    pub prompt_template_id: String,
    /// RULE(U) for the user.
    pub pseudo_label: AtomicProfile,
}

impl Question {
    /// The pseudo-label this question is judged against: one attribute, or
    /// the whole profile for composite questions.
    pub fn target(&self) -> AtomicProfile {
        match &self.attribute_id {
            Some(a) => {
                let mut p = AtomicProfile::default();
                p.set(a, self.pseudo_label.get(a).clone());
                p
            }
            None => self.pseudo_label.clone(),
        }
    }

    pub fn target_value(&self) -> Option<&Value> {
        self.attribute_id.as_deref().map(|a| self.pseudo_label.get(a))
    }

    pub fn prompt(&self, schema: &Schema) -> String {
        let ask = match self.attribute_id.as_deref().and_then(|a| schema.get(a)) {
            Some(spec) => alloc::format!("Infer the user's {} from the behavior below.", spec.label),
            None => String::from("Write a profile summary covering every attribute, from the behavior below."),
        };
        alloc::format!("{ask}\n{}", self.mub_context)
    }
}

/// One atomic question per schema attribute.
pub fn atomic_questions(user_id: &str, mub: &str, pseudo_label: &AtomicProfile, schema: &Schema) -> Vec<Question> {
    schema
        .ids()
        .map(|a| Question {
            question_id: alloc::format!("{user_id}:{a}"),
            user_id: user_id.into(),
            attribute_id: Some(a.into()),
            mub_context: mub.into(),
            prompt_template_id: ATOMIC_TEMPLATE.into(),
            pseudo_label: pseudo_label.clone(),
        })
        .collect()
}

pub fn composite_question(user_id: &str, mub: &str, pseudo_label: &AtomicProfile) -> Question {
    Question {
        question_id: alloc::format!("{user_id}:composite"),
        user_id: user_id.into(),
        attribute_id: None,
        mub_context: mub.into(),
        prompt_template_id: COMPOSITE_TEMPLATE.into(),
        pseudo_label: pseudo_label.clone(),
    }
}
