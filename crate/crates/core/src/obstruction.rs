//! The elimination pipeline: tabulate the points of a reduced model, mark
//! j-values through their twists, compute Frobenius traces and involution
//! images, and colour the involution graph of the noncuspidal points.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{hasse_admits_order, CurveError, CurvePoint};
use crate::cusps::CuspError;
use crate::field::{EnumerationBudget, FieldElement};
use crate::models::{Involution, ModelError, ReducedModel};
use crate::trace::{classify_trace, trace_map, TraceClass, TraceError};
use crate::twists::{twist_pair, TwistError, TwistPair};

/// Every verdict is relative to this hypothesis.
pub const ASSUMPTION: &str =
    "conditional on the Atkin-Lehner involutions of X0(N) lifting to Q-rational maps on X1(N)";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("involution {involution} sends vertex {vertex} to {image}, which is not a candidate")]
    GraphClosure { involution: String, vertex: usize, image: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Cusp(#[from] CuspError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Black,
    White,
}

/// One point of the reduced model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRow {
    pub point: CurvePoint<FieldElement>,
    /// `None` where the point is a cusp or the j-formula degenerates.
    pub j: Option<FieldElement>,
    pub marked: Option<bool>,
    pub trace: CurvePoint<FieldElement>,
    /// 1-based vertex number for candidates.
    pub vertex: Option<usize>,
}

impl PointRow {
    pub fn is_candidate(&self) -> bool {
        self.vertex.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub involution: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchGraph {
    pub branch: String,
    pub involutions: Vec<String>,
    pub forbidden: Vec<CurvePoint<FieldElement>>,
    /// Indexed by vertex number minus one.
    pub trace_classes: Vec<TraceClass>,
    pub colors: Vec<Color>,
    pub edges: Vec<Edge>,
    pub components: Vec<Vec<usize>>,
    /// White vertices with no black neighbour.
    pub survivors: Vec<usize>,
}

impl BranchGraph {
    pub fn passes(&self) -> bool {
        self.survivors.is_empty()
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == v {
                    Some(e.b)
                } else if e.b == v {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v - 1]
    }

    pub fn vertices_with(&self, color: Color) -> Vec<usize> {
        (1..=self.colors.len()).filter(|&v| self.color(v) == color).collect()
    }

    pub fn component_is_complete(&self, component: &[usize]) -> bool {
        component.iter().all(|&a| {
            let n = self.neighbours(a);
            component.iter().all(|b| *b == a || n.contains(b))
        })
    }

    pub fn self_loops(&self) -> Vec<usize> {
        self.edges.iter().filter(|e| e.a == e.b).map(|e| e.a).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Analysis<'m> {
    pub reduced: ReducedModel<'m>,
    pub target: u64,
    /// Hasse rules out points of the target order over this field.
    pub hasse_excluded: bool,
    pub rows: Vec<PointRow>,
    /// Twist data per distinct candidate j, in enumeration order of j.
    pub twists: Vec<TwistPair>,
}

impl<'m> Analysis<'m> {
    /// Tabulates all points with their j, mark and trace, numbering the
    /// noncuspidal points as candidates unless Hasse excludes the target.
    pub fn build(reduced: ReducedModel<'m>, target: u64, budget: EnumerationBudget) -> Result<Self, ObstructionError> {
        let hasse_excluded = !hasse_admits_order(reduced.spec.order(), target);
        let points = reduced.curve.points(budget)?;
        let mut twists: BTreeMap<FieldElement, TwistPair> = BTreeMap::new();
        let mut rows = Vec::with_capacity(points.len());
        let mut next_vertex = 1;
        for point in points {
            let j = match reduced.j_of_point(&point) {
                Ok(j) => Some(j),
                Err(ModelError::CuspidalOrBadPoint(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let marked = match &j {
                Some(j) if !hasse_excluded => {
                    if !twists.contains_key(j) {
                        twists.insert(j.clone(), twist_pair(j, &reduced.alpha, budget)?);
                    }
                    Some(twists[j].admits_order(target))
                }
                _ => None,
            };
            let trace = trace_map(&reduced.curve, &point)?;
            let vertex = (j.is_some() && !hasse_excluded).then(|| {
                next_vertex += 1;
                next_vertex - 1
            });
            rows.push(PointRow { point, j, marked, trace, vertex });
        }
        Ok(Analysis { reduced, target, hasse_excluded, rows, twists: twists.into_values().collect() })
    }

    pub fn candidates(&self) -> Vec<&PointRow> {
        self.rows.iter().filter(|r| r.is_candidate()).collect()
    }

    pub fn candidate(&self, vertex: usize) -> &PointRow {
        self.candidates()[vertex - 1]
    }

    pub fn branches(&self) -> Vec<String> {
        self.reduced.model.branches()
    }

    /// Some candidate j is unmarked, so marks carry information.
    pub fn has_unmarked(&self) -> bool {
        self.rows.iter().any(|r| r.marked == Some(false))
    }

    fn vertex_index(&self) -> HashMap<&CurvePoint<FieldElement>, usize> {
        self.candidates().into_iter().map(|r| (&r.point, r.vertex.unwrap())).collect()
    }

    /// The image of each candidate under `inv`, as a vertex number.
    pub fn involution_images(&self, inv: &Involution) -> Result<Vec<usize>, ObstructionError> {
        let index = self.vertex_index();
        self.candidates()
            .into_iter()
            .map(|r| {
                let image = self.reduced.apply(inv, &r.point)?;
                index.get(&image).copied().ok_or_else(|| ObstructionError::GraphClosure {
                    involution: inv.name.clone(),
                    vertex: r.vertex.unwrap(),
                    image: image.to_string(),
                })
            })
            .collect()
    }

    /// Coloured involution graph under one branch hypothesis.
    pub fn graph(&self, branch: &str) -> Result<BranchGraph, ObstructionError> {
        self.reduced.model.check_branch(branch)?;
        let candidates = self.candidates();
        let involutions = self.reduced.model.involutions_for(branch);
        let mut trace_classes = Vec::with_capacity(candidates.len());
        let mut colors = Vec::with_capacity(candidates.len());
        for r in &candidates {
            let class = classify_trace(&self.reduced, branch, &r.trace)?;
            let black = r.marked == Some(false) || class == TraceClass::Forbidden;
            trace_classes.push(class);
            colors.push(if black { Color::Black } else { Color::White });
        }
        let mut edges = Vec::new();
        for inv in &involutions {
            for (i, image) in self.involution_images(inv)?.into_iter().enumerate() {
                let (a, b) = ((i + 1).min(image), (i + 1).max(image));
                if !edges.iter().any(|e: &Edge| e.a == a && e.b == b && e.involution == inv.name) {
                    edges.push(Edge { a, b, involution: inv.name.clone() });
                }
            }
        }
        edges.sort_by(|x, y| (x.a, x.b, &x.involution).cmp(&(y.a, y.b, &y.involution)));
        let mut graph = BranchGraph {
            branch: branch.to_string(),
            involutions: involutions.iter().map(|i| i.name.clone()).collect(),
            forbidden: self.reduced.forbidden_traces(branch),
            trace_classes,
            colors,
            edges,
            components: Vec::new(),
            survivors: Vec::new(),
        };
        graph.components = components(candidates.len(), &graph.edges);
        graph.survivors = (1..=candidates.len())
            .filter(|&v| {
                graph.color(v) == Color::White && graph.neighbours(v).iter().all(|&n| graph.color(n) == Color::White)
            })
            .collect();
        Ok(graph)
    }

    pub fn graphs(&self) -> Result<Vec<BranchGraph>, ObstructionError> {
        self.branches().iter().map(|b| self.graph(b)).collect()
    }
}

fn components(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], v: usize) -> usize {
        let mut root = v;
        while parent[root] != root {
            root = parent[root];
        }
        parent[v] = root;
        root
    }
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 1..=n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Verdict over all branch hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

pub fn verdict(graphs: &[BranchGraph]) -> Verdict {
    if graphs.iter().all(BranchGraph::passes) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
