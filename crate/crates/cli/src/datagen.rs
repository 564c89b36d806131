//! Synthetic datasets: reply trees under posts, and layered `knows` graphs.

use pgview_core::store::GraphSchema;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csvio::{Dataset, Table, EDGE_HEADER};

/// Posts, each the root of a complete reply tree of `Comment`s.
///
/// Comment ids are assigned breadth first, post by post, so a comment's
/// parent always has a smaller id. With `persons > 0`, every post and
/// comment also gets a `hasCreator` edge to a random person.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommentTree {
    pub posts: u64,
    pub fanout: u64,
    pub depth: u32,
    pub persons: u64,
    pub seed: u64,
}

impl CommentTree {
    pub fn comments_per_post(&self) -> u64 {
        (1..=self.depth).map(|l| self.fanout.pow(l)).sum()
    }

    pub fn comment_count(&self) -> u64 {
        self.posts * self.comments_per_post()
    }

    /// Post id and, for a reply to a comment, the parent comment id.
    pub fn parent_of(&self, comment: u64) -> (u64, Option<u64>) {
        let per = self.comments_per_post();
        let (post, i) = (comment / per, comment % per);
        if i < self.fanout {
            (post, None)
        } else {
            (post, Some(post * per + (i - self.fanout) / self.fanout))
        }
    }

    /// Tree level of a comment; direct replies to the post are level 1.
    pub fn level_of(&self, comment: u64) -> u32 {
        let mut i = comment % self.comments_per_post();
        let mut level = 1;
        let mut width = self.fanout;
        while i >= width {
            i -= width;
            width *= self.fanout;
            level += 1;
        }
        level
    }

    pub fn schema() -> GraphSchema {
        GraphSchema::new()
            .with_node_label("Person", "id")
            .with_node_label("Post", "id")
            .with_node_label("Comment", "id")
            .with_edge_label("replyOf")
            .with_edge_label("hasCreator")
    }

    pub fn generate(&self) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut nodes = table(&["label", "id", "name"]);
        let mut edges = table(&EDGE_HEADER);
        for p in 0..self.persons {
            nodes.rows.push(vec!["Person".into(), p.to_string(), format!("person{p}")]);
        }
        let mut creator = |edges: &mut Table, label: &str, id: u64| {
            if self.persons > 0 {
                let who = rng.gen_range(0..self.persons);
                edges.rows.push(edge(label, id, "hasCreator", "Person", who));
            }
        };
        for p in 0..self.posts {
            nodes.rows.push(vec!["Post".into(), p.to_string(), String::new()]);
            creator(&mut edges, "Post", p);
        }
        for c in 0..self.comment_count() {
            nodes.rows.push(vec!["Comment".into(), c.to_string(), String::new()]);
            match self.parent_of(c) {
                (post, None) => edges.rows.push(edge("Comment", c, "replyOf", "Post", post)),
                (_, Some(parent)) => edges.rows.push(edge("Comment", c, "replyOf", "Comment", parent)),
            }
            creator(&mut edges, "Comment", c);
        }
        Dataset {
            schema: Self::schema(),
            nodes,
            edges,
        }
    }
}

/// `Person` nodes split into `layers` consecutive layers; every person
/// outside the last layer `knows` `degree` distinct people of the next
/// layer. The longest path has `layers - 1` edges. Ids increase with the
/// layer, so every edge goes from a smaller to a larger id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowsGraph {
    pub persons: u64,
    pub layers: u64,
    pub degree: u64,
    pub seed: u64,
}

impl KnowsGraph {
    pub fn layer_of(&self, person: u64) -> u64 {
        person * self.layers / self.persons
    }

    fn layer_range(&self, layer: u64) -> std::ops::Range<u64> {
        let start = (layer * self.persons).div_ceil(self.layers);
        let end = ((layer + 1) * self.persons).div_ceil(self.layers);
        start..end
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.layers.saturating_sub(1))
            .map(|l| {
                let next = self.layer_range(l + 1);
                self.layer_range(l).count() as u64 * self.degree.min(next.end - next.start)
            })
            .sum()
    }

    pub fn schema() -> GraphSchema {
        GraphSchema::new().with_node_label("Person", "id").with_edge_label("knows")
    }

    pub fn generate(&self) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut nodes = table(&["label", "id", "name"]);
        let mut edges = table(&EDGE_HEADER);
        for p in 0..self.persons {
            nodes.rows.push(vec!["Person".into(), p.to_string(), format!("person{p}")]);
        }
        for l in 0..self.layers.saturating_sub(1) {
            let next = self.layer_range(l + 1);
            let width = (next.end - next.start) as usize;
            let k = (self.degree as usize).min(width);
            for p in self.layer_range(l) {
                let mut targets: Vec<usize> = sample(&mut rng, width, k).into_vec();
                targets.sort_unstable();
                for t in targets {
                    edges.rows.push(edge("Person", p, "knows", "Person", next.start + t as u64));
                }
            }
        }
        Dataset {
            schema: Self::schema(),
            nodes,
            edges,
        }
    }
}

fn table(header: &[&str]) -> Table {
    Table {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
    }
}

fn edge(src_label: &str, src: u64, label: &str, dst_label: &str, dst: u64) -> Vec<String> {
    vec![
        src_label.to_string(),
        src.to_string(),
        label.to_string(),
        dst_label.to_string(),
        dst.to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_arithmetic() {
        let t = CommentTree { posts: 2, fanout: 2, depth: 3, persons: 0, seed: 1 };
        assert_eq!(t.comments_per_post(), 14);
        assert_eq!(t.parent_of(1), (0, None));
        assert_eq!(t.parent_of(2), (0, Some(0)));
        assert_eq!(t.parent_of(5), (0, Some(1)));
        assert_eq!(t.parent_of(13), (0, Some(5)));
        assert_eq!(t.parent_of(16), (1, Some(14)));
        assert_eq!(t.level_of(0), 1);
        assert_eq!(t.level_of(5), 2);
        assert_eq!(t.level_of(13), 3);
        assert_eq!(t.level_of(20), 3);
    }

    #[test]
    fn layers_partition_people() {
        let k = KnowsGraph { persons: 10, layers: 3, degree: 2, seed: 1 };
        let sizes: Vec<usize> = (0..3).map(|l| k.layer_range(l).count()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 10);
        for p in 0..10 {
            assert!(k.layer_range(k.layer_of(p)).contains(&p), "{p}");
        }
        assert_eq!(k.generate().edges.rows.len() as u64, k.edge_count());
    }
}
