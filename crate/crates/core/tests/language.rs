#[path = "support/listings.rs"]
mod listings;
#[path = "support/statements.rs"]
mod statements;

use pgview_core::lang::{parse, render, Statement};
use pgview_core::views::templates::{gen_delete_node_template, gen_update_edge_template, TemplateSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn indirect_know_templates_match_reference() {
    let v = listings::view(listings::INDIRECT_KNOW);
    let del: Vec<_> = gen_delete_node_template(&v).into_iter().map(|t| t.statement).collect();
    assert_eq!(del, listings::queries(&listings::DELETE_NODE));
    let cre: Vec<_> = gen_update_edge_template(&v, true).into_iter().map(|t| t.statement).collect();
    assert_eq!(cre, listings::queries(&listings::CREATE_EDGE));
    // Deleting an edge reuses the create-edge match with the delete action.
    let dele = gen_update_edge_template(&v, false);
    assert_eq!(dele.len(), 3);
    assert!(dele
        .iter()
        .all(|t| t.statement.to_string().ends_with("MATCH (s)-[r:INDIRECT_KNOW NoDupEdge]->(d) DELETE r")));
}

#[test]
fn root_post_template_counts() {
    let set = TemplateSet::generate(&listings::view(listings::ROOT_POST));
    assert_eq!(set.counts(), (3, 1, 1));
    assert_eq!(
        set.delete_node[2].statement.to_string(),
        "MATCH (c:Comment)-[:replyOf*1..]->(:$L{$K: $V})-[:replyOf*1..]->(p:Post) \
         WITH c, p MATCH (c)-[r:ROOT_POST NoDupEdge]->(p) DELETE r"
    );
    assert_eq!(
        set.create_edge[0].statement.to_string(),
        "MATCH (c:Comment)-[:replyOf*0..]->(:$SL{$SK: $SV})-[@R:replyOf]->(:$DL{$DK: $DV})-[:replyOf*0..]->(p:Post) \
         WHERE id(@R) = $RID WITH c, p CREATE (c)-[r:ROOT_POST]->(p)"
    );
}

fn round_trips(text: &str) {
    let first = parse(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    let rendered = render(&first);
    let second = parse(&rendered).unwrap_or_else(|e| panic!("{rendered}: {e}"));
    assert_eq!(first, second, "{text}");
    assert_eq!(render(&second), rendered);
}

#[test]
fn reference_statements_round_trip() {
    for t in listings::DELETE_NODE.iter().chain(&listings::CREATE_EDGE) {
        round_trips(t);
    }
    round_trips(listings::INDIRECT_KNOW);
    round_trips(listings::ROOT_POST);
    round_trips("DROP VIEW ROOT_POST");
    round_trips("MATCH (a:A {id: 'x\\'y', w: -1.5, f: false}) RETURN count(*)");
}

#[test]
fn generated_statements_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        round_trips(&statements::gen_statement(&mut rng));
    }
}

#[test]
fn template_statements_round_trip() {
    for def in [listings::INDIRECT_KNOW, listings::ROOT_POST] {
        let set = TemplateSet::generate(&listings::view(def));
        for t in set.delete_node.iter().chain(&set.create_edge).chain(&set.delete_edge) {
            round_trips(&t.statement.to_string());
            assert_eq!(parse(&t.statement.to_string()).unwrap(), Statement::Query(t.statement.clone()));
        }
    }
}
