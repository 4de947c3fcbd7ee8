//! Ground-truth atomic profiles read straight off a simulated persona.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::schema::{AtomicProfile, Value};
use crate::date::Date;
use crate::sim::persona::{CityTier, Gender, LifeStage, PersonaState, Tri};

fn age_group(age: i32) -> &'static str {
    match age {
        i32::MIN..=17 => "Under 18",
        18..=24 => "18-24",
        25..=29 => "25-29",
        30..=34 => "30-34",
        35..=39 => "35-39",
        40..=44 => "40-44",
        45..=49 => "45-49",
        50..=54 => "50-54",
        55..=59 => "55-59",
        _ => "60+",
    }
}

fn child_stage(months: i32) -> &'static str {
    match months {
        i32::MIN..=11 => "Infant",
        12..=35 => "Toddler",
        36..=71 => "Preschool",
        72..=143 => "Primary School",
        144..=215 => "Secondary School",
        _ => "Adult",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

fn education(occupation: &str, age: i32) -> Option<&'static str> {
    match occupation {
        "student" if age >= 22 => Some("Postgraduate"),
        "student" => Some("High school or below"),
        "sales" | "driver" => Some("High school or below"),
        "engineer" | "teacher" | "nurse" | "designer" | "civil servant" | "accountant" => Some("Bachelor's"),
        _ => None,
    }
}

/// The profile a perfect annotator would give `p` on `on`.
///
/// Marital status follows life stage (family-oriented means married, the
/// three pre-family stages mean unmarried, retirees are unknown). The
/// consumption tier tracks city tier. Brand preference has no persona
/// counterpart and stays NA.
pub fn persona_profile(p: &PersonaState, on: Date) -> AtomicProfile {
    let age = p.age_at(on);
    let mut out = AtomicProfile::default();
    let mut put = |id: &str, v: Option<&str>| {
        out.set(id, v.map_or(Value::Na, Value::known));
    };
    let stage = match p.life_stage {
        LifeStage::Student => "Student",
        LifeStage::Single => "Single",
        LifeStage::InRelationship => "In a relationship",
        LifeStage::FamilyOriented => "Family-oriented",
        LifeStage::Retired => "Retired",
    };
    put("life_stage", Some(stage));
    put(
        "marital_status",
        match p.life_stage {
            LifeStage::FamilyOriented => Some("Married"),
            LifeStage::Retired => None,
            _ => Some("Unmarried"),
        },
    );
    put("age_group", Some(age_group(age)));
    put(
        "gender",
        Some(match p.demographics.gender {
            Gender::Female => "Female",
            Gender::Male => "Male",
        }),
    );
    let mut born: Vec<_> = p
        .household
        .children
        .iter()
        .filter(|c| c.age_months(on) >= 0)
        .collect();
    born.sort_by_key(|c| c.birth_date);
    put("has_children", Some(yes_no(!born.is_empty())));
    put(
        "child_count",
        Some(match born.len() {
            0 => "0",
            1 => "1",
            2 => "2",
            _ => "3+",
        }),
    );
    let youngest = born.last();
    put("youngest_child_stage", youngest.map(|c| child_stage(c.age_months(on))));
    put(
        "youngest_child_gender",
        youngest.map(|c| match c.gender {
            Gender::Female => "Girl",
            Gender::Male => "Boy",
        }),
    );
    put("expecting", Some(yes_no(p.pending_birth.is_some_and(|d| d > on))));
    put(
        "consumption_tier",
        Some(match p.demographics.city_tier {
            CityTier::Tier1 => "Premium",
            CityTier::Tier2 => "Quality-conscious",
            CityTier::Tier3 => "Mass-market",
            CityTier::Tier4 => "Budget",
        }),
    );
    let hobbies: Vec<&str> = ["coffee", "fitness", "reading", "travel"]
        .into_iter()
        .filter(|h| p.consumption_needs.contains(*h))
        .collect();
    let hobbies = (!hobbies.is_empty()).then(|| hobbies.join(", "));
    put("hobbies", hobbies.as_deref());
    put("brand_preference", None);
    put("pet_owner", Some(yes_no(p.consumption_needs.contains("pet-owner"))));
    put(
        "is_student",
        match p.is_student {
            Tri::Yes => Some("Yes"),
            Tri::No => Some("No"),
            Tri::Na => None,
        },
    );
    let occ = (!p.occupation.is_empty() && p.occupation != "unknown").then_some(p.occupation.as_str());
    put("occupation", occ);
    put("education", occ.and_then(|o| education(o, age)));
    put(
        "city_tier",
        Some(match p.demographics.city_tier {
            CityTier::Tier1 => "Tier 1",
            CityTier::Tier2 => "Tier 2",
            CityTier::Tier3 => "Tier 3",
            CityTier::Tier4 => "Tier 4",
        }),
    );
    let region: String = {
        let n = p.demographics.region.name();
        let mut c = n.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_else(|| n.to_string())
    };
    put("region", Some(&region));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curate::{check_conflicts, Schema};
    use crate::rng::seeded;
    use crate::sim::{sample_persona, SimConfig};

    #[test]
    fn sampled_personas_give_valid_consistent_profiles() {
        let cfg = SimConfig::shipped();
        let s = Schema::builtin();
        for u in 0..300u64 {
            let p = sample_persona(&alloc::format!("u{u}"), &cfg.population, &mut seeded(u)).unwrap();
            let t = persona_profile(&p, cfg.engine.start);
            t.validate(&s).unwrap();
            let conflicts = check_conflicts(&t);
            assert!(conflicts.is_empty(), "{conflicts:?} {t:?}");
        }
    }

    #[test]
    fn buckets() {
        assert_eq!(age_group(17), "Under 18");
        assert_eq!(age_group(18), "18-24");
        assert_eq!(age_group(60), "60+");
        assert_eq!(child_stage(11), "Infant");
        assert_eq!(child_stage(12), "Toddler");
        assert_eq!(child_stage(216), "Adult");
    }
}
