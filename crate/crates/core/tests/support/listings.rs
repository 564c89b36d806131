//! Reference statements for the INDIRECT_KNOW and ROOT_POST example views.

#![allow(dead_code)]

use pgview_core::lang::{parse, parse_query, Query, Statement, ViewDefinition};

pub const INDIRECT_KNOW: &str = "CREATE VIEW INDIRECT_KNOW AS (
    CONSTRUCT (s)-[r:INDIRECT_KNOW]->(d)
    MATCH (s:Person)-[:knows*3..]->(d:Person)
)";

pub const ROOT_POST: &str = "CREATE VIEW ROOT_POST AS (
    CONSTRUCT (c)-[r:ROOT_POST]->(p)
    MATCH (c:Comment)-[:replyOf*..]->(p:Post)
)";

/// Delete-node statements for INDIRECT_KNOW, in generation order.
pub const DELETE_NODE: [&str; 4] = [
    "MATCH (s:Person:$L{$K:$V})-[:knows*3..]->(d:Person)
     WITH s,d MATCH (s)-[r:INDIRECT_KNOW NoDupEdge]->(d) DELETE r",
    "MATCH (s:Person)-[:knows*3..]->(d:Person:$L{$K:$V})
     WITH s,d MATCH (s)-[r:INDIRECT_KNOW NoDupEdge]->(d) DELETE r",
    "MATCH (s:Person)-[:knows*1]->(:$L{$K:$V})-[:knows*2..]->(d:Person)
     WITH s,d MATCH (s)-[r:INDIRECT_KNOW NoDupEdge]->(d) DELETE r",
    "MATCH (s:Person)-[:knows*2..]->(:$L{$K:$V})-[:knows*1..]->(d:Person)
     WITH s,d MATCH (s)-[r:INDIRECT_KNOW NoDupEdge ]->(d) DELETE r",
];

/// Create-edge statements for INDIRECT_KNOW. The segment after the changed
/// edge carries the relationship type of the view path.
pub const CREATE_EDGE: [&str; 3] = [
    "MATCH (s:Person)-[:knows*0]->(:$SL{$SK:$SV})-[@R:knows]->(:$DL{$DK:$DV})-[:knows*2..]->(d:Person) WHERE id(@R)=$RID
     WITH s,d CREATE (s)-[r:INDIRECT_KNOW]->(d)",
    "MATCH (s:Person)-[:knows*1]->(:$SL{$SK:$SV})-[@R:knows]->(:$DL{$DK:$DV})-[:knows*1..]->(d:Person) WHERE id(@R)=$RID
     WITH s,d CREATE (s)-[r:INDIRECT_KNOW]->(d)",
    "MATCH (s:Person)-[:knows*2..]->(:$SL{$SK:$SV})-[@R:knows]->(:$DL{$DK:$DV})-[:knows*0..]->(d:Person) WHERE id(@R)=$RID
     WITH s,d CREATE (s)-[r:INDIRECT_KNOW]->(d)",
];

pub fn view(text: &str) -> ViewDefinition {
    match parse(text).expect("view parses") {
        Statement::CreateView(v) => v,
        other => panic!("not a view definition: {other:?}"),
    }
}

pub fn queries(texts: &[&str]) -> Vec<Query> {
    texts.iter().map(|t| parse_query(t).expect("listing parses")).collect()
}
