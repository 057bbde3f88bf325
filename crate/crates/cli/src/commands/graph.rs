//! `graph`: retweet-graph communities, centralities, layout, and the edge
//! list itself.

use std::path::PathBuf;

use trendlens_core::graphx::{
    betweenness, build_user_graph, community_isolation, fr_layout, hits, pagerank, walktrap,
};

use super::{ensure_out_dir, out_path, write_text};
use crate::error::Error;
use crate::io::{corpus_file, csvx, edgelist};

pub struct GraphOpts {
    pub corpus: PathBuf,
    pub walktrap_steps: usize,
    pub damping: f64,
    pub iterations: usize,
    pub isolation_threshold: f64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run(opts: &GraphOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let graph = build_user_graph(&corpus);
    if graph.is_empty() {
        return Err(Error::input("corpus yields an empty user graph"));
    }
    ensure_out_dir(&opts.out)?;

    edgelist::write_user_graph(&out_path(&opts.out, "edges.csv"), &graph)?;

    let partition = walktrap(&graph, opts.walktrap_steps)?;
    let isolation = community_isolation(&graph, &partition, opts.isolation_threshold)?;
    let conductance_of = |community: usize| {
        isolation
            .iter()
            .find(|c| c.community == community)
            .expect("isolation covers every community")
    };
    let mut csv = String::from("vertex,community,conductance_of_community,flag\n");
    for v in 0..graph.vertex_count() {
        let community = partition.assignment[v];
        let iso = conductance_of(community);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            csvx::escape(graph.vertex_name(v)),
            community,
            iso.conductance,
            if iso.suspicious {
                "suspicious-isolated"
            } else {
                ""
            }
        ));
    }
    write_text(&out_path(&opts.out, "communities.csv"), &csv)?;

    let rank = pagerank(&graph, opts.damping, 1e-10)?;
    let (hub, authority) = hits(&graph, 1e-10)?;
    let between = betweenness(&graph);
    let mut csv = String::from("vertex,pagerank,hub,authority,betweenness\n");
    for v in 0..graph.vertex_count() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            csvx::escape(graph.vertex_name(v)),
            rank[v],
            hub[v],
            authority[v],
            between[v]
        ));
    }
    write_text(&out_path(&opts.out, "centralities.csv"), &csv)?;

    let layout = fr_layout(&graph, opts.iterations, opts.seed)?;
    let mut csv = String::from("vertex,x,y\n");
    for v in 0..graph.vertex_count() {
        let (x, y) = layout.positions[v];
        csv.push_str(&format!("{},{x},{y}\n", csvx::escape(graph.vertex_name(v))));
    }
    write_text(&out_path(&opts.out, "layout.csv"), &csv)?;
    Ok(())
}
