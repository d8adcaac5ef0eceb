//! Golden results for the hotel toy example and the fifteen-airport case.

mod common;

use std::collections::BTreeMap;

use common::fixture;
use electre_tri_me::config::read_override;
use electre_tri_me::io::{
    credibility_fraction, read_credibility_csv, read_evaluations_csv, read_modes_csv,
    read_sensitivity_csv, DatasetSettings,
};
use electre_tri_me::{
    apply_group_override, build_sensitivity_matrix, cluster_alternatives, credibility_table,
    recommend, sort_all, transition_profile, Action, BoundaryProfile, CategorySet, CutLevel,
    GroupModeTable, LambdaGrid, Linkage, Scale,
};

fn toy_settings() -> DatasetSettings {
    DatasetSettings {
        categories: CategorySet::from_labels(&["Very good", "Good", "Middle", "Poor", "Very poor"])
            .unwrap(),
        boundaries: BoundaryProfile::parse_uniform("4.5, 3.5, 2.5, 1.5").unwrap(),
        ..DatasetSettings::default()
    }
}

fn cut(milli: u32) -> CutLevel {
    CutLevel::from_milli(milli).unwrap()
}

#[test]
fn toy_credibility_is_exact() {
    let ds = read_evaluations_csv(
        &fixture("toy_evaluations.csv"),
        Some(&fixture("toy_weights.csv")),
        &toy_settings(),
    )
    .unwrap();
    let table = credibility_table(&ds).unwrap();
    let x = table.get("X").unwrap();
    let shown: Vec<String> = (1..=4).map(|p| credibility_fraction(x, p)).collect();
    assert_eq!(shown, ["17/64", "17/64", "35/64", "54/64"]);
    let (n, d) = x.lowest_floor();
    assert_eq!(n, d, "every grade clears the lowest category floor");

    let a = sort_all(&table, cut(700), 5).unwrap();
    assert_eq!(a[0].category, 4);
    assert_eq!(ds.categories().get(4).unwrap().label, "Poor");
}

fn airports() -> electre_tri_me::CredibilityTable {
    read_credibility_csv(&fixture("airports_credibility.csv")).unwrap()
}

#[test]
fn airports_at_one_half() {
    let a = sort_all(&airports(), cut(500), 5).unwrap();
    let got: BTreeMap<&str, usize> = a
        .iter()
        .map(|x| (x.alternative.as_str(), x.category))
        .collect();
    let expected = [
        ("BSB", 1),
        ("BEL", 2),
        ("CNF", 1),
        ("CWB", 1),
        ("GIG", 1),
        ("GRU", 2),
        ("FLN", 1),
        ("FOR", 1),
        ("MCZ", 1),
        ("MAO", 1),
        ("NAT", 1),
        ("POA", 1),
        ("REC", 2),
        ("SSA", 2),
        ("VCP", 1),
    ];
    assert_eq!(got, expected.into_iter().collect());
}

#[test]
fn belem_transition_profile() {
    let sm = build_sensitivity_matrix(&airports(), &LambdaGrid::default(), 5).unwrap();
    let p = transition_profile("BEL", sm.row("BEL").unwrap(), 5);
    assert_eq!(p.counts, [9, 6, 3, 1, 1]);
}

/// The printed sensitivity table disagrees with its own credibility input in
/// five cells; the recomputation is exact, so the diff is pinned.
#[test]
fn printed_sensitivity_table_diff() {
    let categories = CategorySet::default();
    let sm = build_sensitivity_matrix(&airports(), &LambdaGrid::default(), 5).unwrap();
    let printed =
        read_sensitivity_csv(&fixture("airports_sensitivity_printed.csv"), &categories).unwrap();
    let diff: Vec<String> = sm.diff(&printed).iter().map(ToString::to_string).collect();
    assert_eq!(
        diff,
        [
            "CWB@0.95: computed C3, reference C2",
            "POA@0.85: computed C3, reference C2",
            "POA@0.95: computed C4, reference C3",
            "SSA@0.80: computed C3, reference C2",
            "VCP@0.70: computed C2, reference C1",
        ]
    );
}

#[test]
fn override_groups_rank_a_to_d() {
    let groups = read_override(&fixture("airports_groups.conf")).unwrap();
    let g = apply_group_override(&airports(), &groups).unwrap();
    assert_eq!(g.ranking, ["A", "B", "C", "D"]);
    assert_eq!(g.members("A").unwrap(), ["CWB", "VCP"]);
}

/// Clustering does not rediscover the published grouping; this pins what
/// average linkage actually produces on the same input.
#[test]
fn average_linkage_on_airports() {
    let g = cluster_alternatives(&airports(), 4, Linkage::Average).unwrap();
    let blocks: Vec<Vec<&str>> = g
        .ranking
        .iter()
        .map(|l| g.members(l).unwrap().iter().map(String::as_str).collect())
        .collect();
    let mut sorted = blocks.clone();
    sorted.sort();
    assert_eq!(
        sorted,
        [
            vec!["BEL", "BSB", "FLN", "FOR", "GIG", "GRU", "MAO", "NAT", "POA", "REC"],
            vec!["CNF", "MCZ", "VCP"],
            vec!["CWB"],
            vec!["SSA"],
        ]
    );
    assert_eq!(blocks[0], ["CWB"]);
}

fn published_modes() -> GroupModeTable {
    read_modes_csv(&fixture("airports_modes.csv")).unwrap()
}

fn actions(table: &GroupModeTable, group: &str, action: Action) -> Vec<String> {
    let ranking: Vec<String> = ["A", "B", "C", "D"].map(String::from).to_vec();
    recommend(table, &ranking, &Scale::default())
        .unwrap()
        .into_iter()
        .filter(|r| r.group == group && r.action == action)
        .map(|r| r.criterion)
        .collect()
}

#[test]
fn recommendations_for_best_and_worst_groups() {
    let t = published_modes();
    assert_eq!(actions(&t, "A", Action::Priority), ["Cr21", "Cr24"]);
    assert_eq!(actions(&t, "A", Action::Improve), ["Cr19", "Cr20", "Cr22"]);
    assert_eq!(
        actions(&t, "D", Action::Priority),
        ["Cr5", "Cr6", "Cr8", "Cr9", "Cr10", "Cr13", "Cr15", "Cr18"]
    );
    assert_eq!(
        actions(&t, "D", Action::Improve),
        ["Cr17", "Cr19", "Cr20", "Cr21", "Cr22", "Cr23", "Cr24"]
    );
}

#[test]
fn maintain_exactly_where_mode_is_top() {
    let t = published_modes();
    let ranking: Vec<String> = t.groups().to_vec();
    for r in recommend(&t, &ranking, &Scale::default()).unwrap() {
        let m = t.mode(&r.group, &r.criterion).unwrap();
        assert_eq!(
            r.action == Action::Maintain,
            m == 5,
            "{} {}",
            r.group,
            r.criterion
        );
    }
    assert!(t
        .criteria()
        .iter()
        .all(|c| !c.starts_with("Overall") || t.criteria().last() == Some(c)));
}

#[test]
fn lowered_mode_in_worst_group_becomes_priority() {
    let t = published_modes();
    let entries = t.groups().iter().flat_map(|g| {
        let t = &t;
        t.criteria().iter().filter_map(move |c| {
            let m = if g == "D" && c == "Cr5" {
                Some(4)
            } else {
                t.mode(g, c)
            };
            m.map(|m| (g.clone(), c.clone(), m))
        })
    });
    let changed = GroupModeTable::new(t.groups().to_vec(), entries.collect::<Vec<_>>());
    assert_eq!(changed.mode("C", "Cr5"), Some(5));
    assert!(actions(&changed, "D", Action::Priority).contains(&"Cr5".to_string()));
}
