//! End-to-end witness construction on `G(n, p)`.

use serde::Serialize;

use super::embedding::{embed_forest, EmbedFailure, ExposureOracle, ForestEmbedding, Stage};
use super::matching::max_bipartite_matching;
use crate::acquisition::{verify_protocol, Protocol};
use crate::cutoff::{
    build_tree, calibrate, extract_protocol, multi_root_table, prune_bereft, CutoffTree, ParamSet,
    SequenceTable,
};
use crate::graph::{Graph, Vertex};
use crate::random::RandomSource;
use crate::sample::{sample_gnp, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Witness,
    EmbedFailed,
    MatchIncomplete,
}

/// One pipeline run. Serializes to a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub outcome: Outcome,
    pub stage: Option<Stage>,
    pub depth: Option<u32>,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub sigma: u64,
    pub levels: usize,
    pub bad_max: usize,
    pub bad_histogram: Vec<usize>,
    #[serde(rename = "B_size")]
    pub b_size: usize,
    #[serde(rename = "R_size")]
    pub r_size: usize,
    pub matched: usize,
    /// Residual size after replaying the protocol; `None` without one.
    pub residual_size: Option<usize>,
    /// Exposed vertices found in `R` or `B` right before matching.
    pub exposure_violations: usize,
    /// Multi-root runs: copies attempted and copies fully embedded.
    pub trees: usize,
    pub trees_embedded: usize,
    #[serde(skip)]
    pub protocol: Option<Protocol>,
}

impl PipelineReport {
    fn new(n: usize, p: f64, seed: u64, sigma: u64) -> Self {
        Self {
            outcome: Outcome::EmbedFailed,
            stage: None,
            depth: None,
            n,
            p,
            seed,
            sigma,
            levels: 0,
            bad_max: 0,
            bad_histogram: Vec::new(),
            b_size: 0,
            r_size: 0,
            matched: 0,
            residual_size: None,
            exposure_violations: 0,
            trees: 0,
            trees_embedded: 0,
            protocol: None,
        }
    }

    fn fail(&mut self, f: EmbedFailure) {
        self.outcome = Outcome::EmbedFailed;
        self.stage = Some(f.stage);
        self.depth = Some(f.depth);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Calibrated, built and pruned tree for `params`.
pub fn pipeline_tree(params: &ParamSet) -> Option<(SequenceTable, CutoffTree)> {
    let table = calibrate(params).ok()?;
    let tree = build_tree(&table).ok()?;
    Some((table, prune_bereft(&tree)))
}

/// Matches `R` into `B`, re-attaches matched `R` vertices as leaves of their
/// bereft partners and emits the protocol: first every matched leaf sends
/// its unit to its partner, then each tree folds onto its root.
fn finish(
    g: &Graph,
    oracle: &ExposureOracle<'_>,
    t: &CutoffTree,
    forest: &ForestEmbedding,
    report: &mut PipelineReport,
) -> Protocol {
    let embedded: Vec<Vec<Vertex>> = forest.trees.iter().filter_map(|e| e.complete()).collect();
    let bereft_nodes: Vec<usize> = (0..t.len()).filter(|&x| t.nodes[x].bereft).collect();
    let b: Vec<(usize, usize)> = (0..embedded.len())
        .flat_map(|k| bereft_nodes.iter().map(move |&x| (k, x)))
        .collect();
    let b_vertices: Vec<Vertex> = b.iter().map(|&(k, x)| embedded[k][x]).collect();
    let r: Vec<Vertex> = (0..g.n()).filter(|&v| forest.pool[v]).collect();
    report.b_size = b.len();
    report.r_size = r.len();
    report.exposure_violations = oracle.exposed_among(&r) + oracle.exposed_among(&b_vertices);

    let adj = oracle.bipartite(&r, &b_vertices);
    let m = max_bipartite_matching(&adj, b.len());
    report.matched = m.size();

    let mut feed: Vec<Vec<(usize, Vertex)>> = vec![Vec::new(); embedded.len()];
    for &(ri, bi) in &m.pairs {
        let (k, x) = b[bi];
        feed[k].push((x, r[ri]));
    }
    let mut front = Vec::new();
    let mut rest = Vec::new();
    for (k, emb) in embedded.iter().enumerate() {
        let parents: Vec<usize> = feed[k].iter().map(|&(x, _)| x).collect();
        let (full, added) = t.attach_leaves(&parents);
        let mut image = emb.clone();
        image.extend(feed[k].iter().map(|&(_, v)| v));
        debug_assert_eq!(image.len(), full.len());
        let proto = extract_protocol(&full, &image).expect("re-fed tree stays absorbable");
        let fed: std::collections::HashSet<Vertex> =
            added.iter().map(|&id| image[id]).collect();
        let (a, b): (Vec<_>, Vec<_>) = proto.moves.into_iter().partition(|mv| fed.contains(&mv.from));
        front.extend(a);
        rest.extend(b);
    }
    front.extend(rest);
    Protocol::new(front)
}

/// Single-root pipeline on a given graph.
///
/// The root is vertex 0. Choosing a high-degree root would mean looking at
/// every degree first, which exposes the whole graph.
pub fn witness_pipeline_on(g: &Graph, p: f64, params: &ParamSet, seed: u64) -> PipelineReport {
    let n = g.n();
    let mut report = PipelineReport::new(n, p, seed, params.sigma);
    report.trees = 1;
    let Some((table, t)) = pipeline_tree(params) else {
        report.fail(EmbedFailure {
            stage: Stage::Size,
            depth: 0,
        });
        return report;
    };
    report.levels = table.m;
    if t.len() > n || n == 0 {
        report.fail(EmbedFailure {
            stage: Stage::Size,
            depth: 0,
        });
        return report;
    }
    let mut oracle = ExposureOracle::new(g);
    let mut pool = vec![true; n];
    pool[0] = false;
    let forest = embed_forest(&mut oracle, &t, &[0], pool);
    report.bad_histogram = forest.bad_histogram.clone();
    report.bad_max = forest.bad_max();
    if let Some(f) = forest.trees[0].failure {
        report.fail(f);
        return report;
    }
    report.trees_embedded = 1;
    let proto = finish(g, &oracle, &t, &forest, &mut report);
    let rep = verify_protocol(g, &proto).expect("assembled protocol replays");
    report.residual_size = Some(rep.residual_size);
    report.outcome = if report.matched == report.r_size {
        Outcome::Witness
    } else {
        Outcome::MatchIncomplete
    };
    report.protocol = Some(proto);
    report
}

/// Samples `G(n, p)` from `rng` and runs the single-root pipeline on it.
pub fn witness_pipeline_with_graph(
    n: usize,
    p: Probability,
    params: &ParamSet,
    rng: &mut RandomSource,
) -> (Graph, PipelineReport) {
    let g = sample_gnp(n, p, rng);
    let report = witness_pipeline_on(&g, p.get(), params, rng.seed());
    (g, report)
}

pub fn witness_pipeline(
    n: usize,
    p: Probability,
    params: &ParamSet,
    rng: &mut RandomSource,
) -> PipelineReport {
    witness_pipeline_with_graph(n, p, params, rng).1
}

/// Multi-root pipeline on a given graph; returns the certified upper bound
/// on `a_t` (the residual of the assembled protocol) and the report.
///
/// Builds the uncalibrated table for constant `c`, sets
/// `L = round(0.8 n / |T'|)`, screens vertices `0..2L` by pool degree and
/// roots the `L` strongest, embeds the copies level by level, and matches
/// `R` into the bereft images allowing a defect. Candidates that were not
/// chosen, copies that failed, and unmatched `R` vertices simply keep their
/// weight. `outcome` is `witness` whenever at least one copy embedded.
pub fn multi_root_pipeline_on(
    g: &Graph,
    p: f64,
    c: f64,
    params: &ParamSet,
    seed: u64,
) -> (usize, PipelineReport) {
    let n = g.n();
    let mut report = PipelineReport::new(n, p, seed, params.sigma);
    let built = multi_root_table(params, c)
        .ok()
        .and_then(|table| Some((table.m, prune_bereft(&build_tree(&table).ok()?))));
    let Some((levels, t)) = built else {
        report.fail(EmbedFailure {
            stage: Stage::Size,
            depth: 0,
        });
        return (n.max(1), report);
    };
    report.levels = levels;
    let copies = ((0.8 * n as f64 / t.len() as f64).round() as usize).max(1);
    if 2 * copies > n || t.len() > n {
        report.fail(EmbedFailure {
            stage: Stage::Size,
            depth: 0,
        });
        return (n.max(1), report);
    }
    report.trees = copies;

    let mut oracle = ExposureOracle::new(g);
    let mut pool = vec![true; n];
    pool[..2 * copies].fill(false);
    let mut screened: Vec<(usize, Vertex)> = (0..2 * copies)
        .map(|v| (oracle.peek_degree(v, &pool), v))
        .collect();
    screened.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut roots: Vec<Vertex> = screened[..copies].iter().map(|&(_, v)| v).collect();
    roots.sort_unstable();

    let forest = embed_forest(&mut oracle, &t, &roots, pool);
    report.bad_histogram = forest.bad_histogram.clone();
    report.bad_max = forest.bad_max();
    report.trees_embedded = forest.trees.iter().filter(|e| e.failure.is_none()).count();
    if report.trees_embedded == 0 {
        report.fail(forest.trees[0].failure.expect("no copy embedded"));
    } else {
        report.outcome = Outcome::Witness;
    }
    let proto = finish(g, &oracle, &t, &forest, &mut report);
    let rep = verify_protocol(g, &proto).expect("assembled protocol replays");
    report.residual_size = Some(rep.residual_size);
    report.protocol = Some(proto);
    (rep.residual_size, report)
}

pub fn multi_root_pipeline(
    n: usize,
    p: Probability,
    c: f64,
    params: &ParamSet,
    rng: &mut RandomSource,
) -> (usize, PipelineReport) {
    let g = sample_gnp(n, p, rng);
    multi_root_pipeline_on(&g, p.get(), c, params, rng.seed())
}
