//! Serializable report data and its Markdown, CSV and DOT renderings.
//!
//! Reports hold field elements in their textual `[m,n,l]` form so that a
//! JSON report renders identically after a round trip.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, GroupStructure};
use crate::cusps::{al_on_cusp, cusp_inventory, derived_quadratic_cusp_images, fibre_over, CuspError, Delta, LevelCount};
use crate::field::FieldElement;
use crate::models::{ModularCurveModel, RationalTorsionTable};
use crate::obstruction::{verdict, Analysis, BranchGraph, Color, ObstructionError, Verdict, ASSUMPTION};
use crate::trace::TraceClass;

const INFINITY: &str = "∞";
const NO_J: &str = "-";
const STAR: &str = "(*)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: String,
    pub y: String,
    pub j: Option<String>,
    pub marked: Option<bool>,
    pub trace: String,
    pub vertex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistRecord {
    pub j: String,
    pub marked: bool,
    pub e1: String,
    pub e2: String,
    pub structure1: GroupStructure,
    pub structure2: GroupStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub involution: String,
    pub vertex: usize,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionRow {
    pub vertex: usize,
    pub x: String,
    pub y: String,
    pub images: Vec<ImageRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub vertex: usize,
    pub color: Color,
    pub trace_class: TraceClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: usize,
    pub b: usize,
    pub involution: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub branch: String,
    pub involutions: Vec<String>,
    pub forbidden_traces: Vec<String>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub components: Vec<Vec<usize>>,
    pub all_components_complete: bool,
    pub survivors: Vec<usize>,
    pub verdict: Verdict,
}

impl BranchReport {
    pub fn with_color(&self, color: Color) -> Vec<usize> {
        self.vertices.iter().filter(|v| v.color == color).map(|v| v.vertex).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub model: String,
    pub level: u32,
    pub p: u32,
    pub degree: usize,
    pub modulus: Vec<u32>,
    pub target_order: u64,
    pub hasse_excluded: bool,
    pub points: Vec<PointRecord>,
    pub twists: Vec<TwistRecord>,
    pub involution_table: Vec<InvolutionRow>,
    pub branches: Vec<BranchReport>,
    pub verdict: Verdict,
    pub assumption: String,
}

fn coord(c: Option<&FieldElement>) -> String {
    c.map_or_else(|| INFINITY.to_string(), FieldElement::to_string)
}

fn point_coords(p: &CurvePoint<FieldElement>) -> (String, String) {
    (coord(p.x()), coord(p.y()))
}

fn branch_report(g: &BranchGraph) -> BranchReport {
    BranchReport {
        branch: g.branch.clone(),
        involutions: g.involutions.clone(),
        forbidden_traces: g.forbidden.iter().map(ToString::to_string).collect(),
        vertices: (1..=g.colors.len())
            .map(|v| VertexRecord { vertex: v, color: g.color(v), trace_class: g.trace_classes[v - 1] })
            .collect(),
        edges: g.edges.iter().map(|e| EdgeRecord { a: e.a, b: e.b, involution: e.involution.clone() }).collect(),
        components: g.components.clone(),
        all_components_complete: g.components.iter().all(|c| g.component_is_complete(c)),
        survivors: g.survivors.clone(),
        verdict: if g.passes() { Verdict::Pass } else { Verdict::Fail },
    }
}

impl ObstructionReport {
    /// Collects every table and the graphs of `branches`.
    pub fn from_analysis(a: &Analysis<'_>, branches: &[String]) -> Result<Self, ObstructionError> {
        let points = a
            .rows
            .iter()
            .map(|r| {
                let (x, y) = point_coords(&r.point);
                PointRecord {
                    x,
                    y,
                    j: r.j.as_ref().map(ToString::to_string),
                    marked: r.marked,
                    trace: r.trace.to_string(),
                    vertex: r.vertex,
                }
            })
            .collect();
        let twists = a
            .twists
            .iter()
            .map(|t| TwistRecord {
                j: t.j.to_string(),
                marked: t.admits_order(a.target),
                e1: t.e1.to_string(),
                e2: t.e2.to_string(),
                structure1: t.structures.0,
                structure2: t.structures.1,
            })
            .collect();
        let model = a.reduced.model;
        let involutions: Vec<_> = model
            .involutions
            .iter()
            .filter(|i| branches.iter().any(|b| i.applies_to(b)))
            .collect();
        let mut involution_table: Vec<InvolutionRow> = a
            .candidates()
            .iter()
            .map(|r| {
                let (x, y) = point_coords(&r.point);
                InvolutionRow { vertex: r.vertex.unwrap(), x, y, images: Vec::new() }
            })
            .collect();
        for inv in &involutions {
            let images = a.involution_images(inv)?;
            for (row, image) in involution_table.iter_mut().zip(images) {
                let (x, y) = point_coords(&a.candidate(image).point);
                row.images.push(ImageRecord { involution: inv.name.clone(), vertex: image, x, y });
            }
        }
        let graphs = branches.iter().map(|b| a.graph(b)).collect::<Result<Vec<_>, _>>()?;
        Ok(ObstructionReport {
            model: model.id.clone(),
            level: model.level,
            p: a.reduced.spec.characteristic(),
            degree: a.reduced.spec.degree(),
            modulus: a.reduced.spec.modulus().to_vec(),
            target_order: a.target,
            hasse_excluded: a.hasse_excluded,
            points,
            twists,
            involution_table,
            branches: graphs.iter().map(branch_report).collect(),
            verdict: verdict(&graphs),
            assumption: ASSUMPTION.to_string(),
        })
    }

    pub fn field_order(&self) -> u64 {
        (self.p as u64).pow(self.degree as u32)
    }

    fn has_unmarked(&self) -> bool {
        self.points.iter().any(|p| p.marked == Some(false))
    }

    fn j_cell(&self, j: &str, marked: bool) -> String {
        if marked && self.has_unmarked() {
            format!("{j}{STAR}")
        } else {
            j.to_string()
        }
    }

    fn title(&self, what: &str) -> String {
        format!("### {what} on {} over F_{}\n\n", self.model, self.field_order())
    }

    /// Points grouped by `X`, with `ϕ` columns left blank on cusp rows.
    pub fn points_markdown(&self) -> String {
        let mut out = self.title("Points");
        out.push_str("| X | Y1 | Y2 | j | ϕ(X,Y1) | ϕ(X,Y2) |\n|---|---|---|---|---|---|\n");
        let mut i = 0;
        while i < self.points.len() {
            let first = &self.points[i];
            let second = self.points.get(i + 1).filter(|p| p.x == first.x && first.x != INFINITY);
            let last = second.unwrap_or(first);
            let (j, t1, t2) = match &first.j {
                Some(j) => (self.j_cell(j, first.marked == Some(true)), first.trace.clone(), last.trace.clone()),
                None => (NO_J.to_string(), String::new(), String::new()),
            };
            let _ = writeln!(out, "| {} | {} | {} | {j} | {t1} | {t2} |", first.x, first.y, last.y);
            i += if second.is_some() { 2 } else { 1 };
        }
        out
    }

    pub fn twists_markdown(&self) -> String {
        let mut out = self.title("Twist group structures");
        out.push_str("| j | E1 | E2 |\n|---|---|---|\n");
        let starred = self.twists.iter().any(|t| !t.marked);
        for t in &self.twists {
            let j = if t.marked && starred { format!("{}{STAR}", t.j) } else { t.j.clone() };
            let _ = writeln!(out, "| {j} | {} | {} |", t.structure1, t.structure2);
        }
        out
    }

    pub fn involutions_markdown(&self) -> String {
        let mut out = self.title("Involution images");
        let names: Vec<&str> = self
            .involution_table
            .first()
            .map(|r| r.images.iter().map(|i| i.involution.as_str()).collect())
            .unwrap_or_default();
        out.push_str("| # | X | Y |");
        for n in &names {
            let _ = write!(out, " X ({n}) | Y ({n}) |");
        }
        out.push_str("\n|---|---|---|");
        out.push_str(&"---|---|".repeat(names.len()));
        out.push('\n');
        for r in &self.involution_table {
            let _ = write!(out, "| {} | {} | {} |", r.vertex, r.x, r.y);
            for i in &r.images {
                let _ = write!(out, " {} | {} |", i.x, i.y);
            }
            out.push('\n');
        }
        out
    }

    /// Edge list and black vertices per branch.
    pub fn figures_markdown(&self) -> String {
        let mut out = String::new();
        for b in &self.branches {
            let _ = writeln!(out, "### Graph on {} over F_{}, branch {}\n", self.model, self.field_order(), b.branch);
            out.push_str("edges:\n");
            for e in &b.edges {
                let _ = writeln!(out, "- {} -- {} [{}]", e.a, e.b, e.involution);
            }
            let _ = writeln!(out, "\nblack: {}\n", join(&b.with_color(Color::Black)));
        }
        out
    }

    pub fn graph_markdown(&self) -> String {
        format!("{}\n{}", self.involutions_markdown(), self.figures_markdown())
    }

    pub fn trace_markdown(&self) -> String {
        let mut out = self.title("Frobenius traces");
        out.push_str("| # | X | Y | ϕ(X,Y) |");
        for b in &self.branches {
            let _ = write!(out, " {} |", b.branch);
        }
        out.push_str("\n|---|---|---|---|");
        out.push_str(&"---|".repeat(self.branches.len()));
        out.push('\n');
        for p in self.points.iter().filter(|p| p.vertex.is_some()) {
            let v = p.vertex.unwrap();
            let _ = write!(out, "| {v} | {} | {} | {} |", p.x, p.y, p.trace);
            for b in &self.branches {
                let class = match b.vertices[v - 1].trace_class {
                    TraceClass::Allowed => "allowed",
                    TraceClass::Forbidden => "forbidden",
                };
                let _ = write!(out, " {class} |");
            }
            out.push('\n');
        }
        out
    }

    pub fn verify_markdown(&self) -> String {
        let mut out = format!(
            "### Verification of {} over F_{} for order {}\n\n",
            self.model,
            self.field_order(),
            self.target_order
        );
        let _ = writeln!(out, "assumption: {}", self.assumption);
        if self.hasse_excluded {
            let _ = writeln!(out, "hasse: order {} exceeds (1+√{})², no candidates", self.target_order, self.field_order());
        }
        let candidates = self.points.iter().filter(|p| p.vertex.is_some()).count();
        let _ = writeln!(out, "candidates: {candidates}");
        for b in &self.branches {
            let _ = writeln!(out, "\n#### Branch {}\n", b.branch);
            let _ = writeln!(out, "forbidden traces: {}", b.forbidden_traces.join(", "));
            let _ = writeln!(out, "white: {}", join(&b.with_color(Color::White)));
            let _ = writeln!(out, "black: {}", join(&b.with_color(Color::Black)));
            let sizes: Vec<usize> = b.components.iter().map(Vec::len).collect();
            let _ = writeln!(
                out,
                "components: {} of sizes {}, all complete: {}",
                b.components.len(),
                join(&sizes),
                if b.all_components_complete { "yes" } else { "no" }
            );
            let _ = writeln!(out, "surviving white vertices: {}", if b.survivors.is_empty() { "none".into() } else { join(&b.survivors) });
            let _ = writeln!(out, "verdict: {}", b.verdict);
        }
        let _ = writeln!(out, "\noverall: {}", self.verdict);
        out
    }

    pub fn points_csv(&self) -> String {
        let rows = self.points.iter().map(|p| {
            vec![
                p.x.clone(),
                p.y.clone(),
                p.j.clone().unwrap_or_else(|| NO_J.into()),
                p.marked.map(|m| m.to_string()).unwrap_or_default(),
                p.trace.clone(),
                p.vertex.map(|v| v.to_string()).unwrap_or_default(),
            ]
        });
        csv_string(&["x", "y", "j", "marked", "trace", "vertex"], rows)
    }

    pub fn twists_csv(&self) -> String {
        let rows = self.twists.iter().map(|t| {
            vec![t.j.clone(), t.marked.to_string(), t.structure1.to_string(), t.structure2.to_string(), t.e1.clone(), t.e2.clone()]
        });
        csv_string(&["j", "marked", "structure1", "structure2", "e1", "e2"], rows)
    }

    pub fn graph_csv(&self) -> String {
        let rows = self.branches.iter().flat_map(|b| {
            b.edges.iter().map(|e| vec![b.branch.clone(), e.a.to_string(), e.b.to_string(), e.involution.clone()])
        });
        csv_string(&["branch", "a", "b", "involution"], rows)
    }

    pub fn vertices_csv(&self) -> String {
        let rows = self.branches.iter().flat_map(|b| {
            b.vertices.iter().map(|v| {
                let p = self.points.iter().find(|p| p.vertex == Some(v.vertex)).expect("vertex has a row");
                vec![
                    b.branch.clone(),
                    v.vertex.to_string(),
                    p.x.clone(),
                    p.y.clone(),
                    p.trace.clone(),
                    format!("{:?}", v.trace_class).to_lowercase(),
                    format!("{:?}", v.color).to_lowercase(),
                ]
            })
        });
        csv_string(&["branch", "vertex", "x", "y", "trace", "trace_class", "color"], rows)
    }

    /// One undirected graph per branch, nodes filled black or white.
    pub fn graph_dot(&self) -> String {
        let mut out = String::new();
        for b in &self.branches {
            let _ = writeln!(out, "graph \"{}_{}\" {{", self.model, b.branch);
            out.push_str("  node [shape=circle, style=filled];\n");
            for v in &b.vertices {
                let (fill, font) = match v.color {
                    Color::Black => ("black", "white"),
                    Color::White => ("white", "black"),
                };
                let _ = writeln!(out, "  {} [fillcolor={fill}, fontcolor={font}];", v.vertex);
            }
            for e in &b.edges {
                let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", e.a, e.b, e.involution);
            }
            out.push_str("}\n");
        }
        out
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// CSV with every field quoted.
pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Always).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(&r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionPointRecord {
    pub point: String,
    pub order: u64,
    /// Reduction and its order, when a reduction prime is given.
    pub reduction: Option<String>,
    pub reduced_order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub model: String,
    pub structure: GroupStructure,
    pub prime: Option<u32>,
    pub points: Vec<TorsionPointRecord>,
    /// Reduction is injective and preserves orders.
    pub injective: Option<bool>,
}

impl TorsionReport {
    pub fn new(model: &str, table: &RationalTorsionTable) -> Self {
        TorsionReport {
            model: model.to_string(),
            structure: table.structure,
            prime: None,
            points: table
                .points
                .iter()
                .zip(&table.orders)
                .map(|(p, &order)| TorsionPointRecord { point: p.to_string(), order, reduction: None, reduced_order: None })
                .collect(),
            injective: None,
        }
    }

    pub fn markdown(&self) -> String {
        let mut out = format!("### Rational torsion of {}\n\n", self.model);
        let _ = writeln!(out, "structure: {}\n", self.structure);
        match self.prime {
            Some(p) => {
                let _ = writeln!(out, "| P | order | P mod {p} | order mod {p} |\n|---|---|---|---|");
                for r in &self.points {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} |",
                        r.point,
                        r.order,
                        r.reduction.as_deref().unwrap_or(""),
                        r.reduced_order.map(|o| o.to_string()).unwrap_or_default()
                    );
                }
                let _ = writeln!(out, "\ninjective and order preserving: {}", if self.injective == Some(true) { "yes" } else { "no" });
            }
            None => {
                out.push_str("| P | order |\n|---|---|\n");
                for r in &self.points {
                    let _ = writeln!(out, "| {} | {} |", r.point, r.order);
                }
            }
        }
        out
    }

    pub fn csv(&self) -> String {
        let rows = self.points.iter().map(|r| {
            vec![
                r.point.clone(),
                r.order.to_string(),
                r.reduction.clone().unwrap_or_default(),
                r.reduced_order.map(|o| o.to_string()).unwrap_or_default(),
            ]
        });
        csv_string(&["point", "order", "reduction", "reduced_order"], rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreRecord {
    /// Involutions whose image of `∞` is the base cusp.
    pub involutions: Vec<String>,
    pub base: String,
    pub level: u32,
    pub x1_cusps: Vec<String>,
    pub orbits: Vec<String>,
    /// Sizes of the conjugacy classes of the orbits.
    pub class_sizes: Vec<usize>,
    pub quadratic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticImageCheck {
    pub branch: String,
    pub derived: Vec<String>,
    pub curated: Vec<String>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspReport {
    pub model: String,
    pub level: u32,
    pub delta: Vec<u32>,
    pub inventory: Vec<LevelCount>,
    pub total: u32,
    pub fibres: Vec<FibreRecord>,
    pub quadratic_images: Vec<QuadraticImageCheck>,
}

impl CuspReport {
    pub fn new(model: &ModularCurveModel) -> Result<Self, CuspError> {
        let n = model.level;
        let delta = Delta::new(n, &model.delta)?;
        let inventory = cusp_inventory(n)?;
        let mut fibres: Vec<FibreRecord> = Vec::new();
        let bases = std::iter::once(("identity".to_string(), 1))
            .chain(model.involutions.iter().map(|i| (i.name.clone(), i.level)));
        for (name, level) in bases {
            let base = al_on_cusp(n, level)?;
            if let Some(f) = fibres.iter_mut().find(|f| f.base == base.to_string()) {
                f.involutions.push(name);
                continue;
            }
            let fibre = fibre_over(&delta, base)?;
            fibres.push(FibreRecord {
                involutions: vec![name],
                base: base.to_string(),
                level: base.divisor(),
                x1_cusps: fibre.x1_cusps.iter().map(ToString::to_string).collect(),
                orbits: fibre.orbits.iter().map(ToString::to_string).collect(),
                class_sizes: fibre.classes.iter().map(Vec::len).collect(),
                quadratic: fibre.is_quadratic(),
            });
        }
        let quadratic_images = model
            .branches()
            .into_iter()
            .map(|branch| {
                let derived: Vec<String> =
                    derived_quadratic_cusp_images(model, &branch)?.iter().map(ToString::to_string).collect();
                let curated: Vec<String> =
                    model.quadratic_cusp_images_for(&branch).iter().map(ToString::to_string).collect();
                let mut a = derived.clone();
                let mut b = curated.clone();
                a.sort();
                b.sort();
                Ok(QuadraticImageCheck { branch, agree: a == b, derived, curated })
            })
            .collect::<Result<_, CuspError>>()?;
        Ok(CuspReport {
            model: model.id.clone(),
            level: n,
            delta: delta.residues,
            total: inventory.iter().map(|l| l.count).sum(),
            inventory,
            fibres,
            quadratic_images,
        })
    }

    pub fn markdown(&self) -> String {
        let mut out = format!("### Cusps of X1({}) for {}\n\n", self.level, self.model);
        let _ = writeln!(out, "Δ = {{{}}}\n", join(&self.delta));
        out.push_str("| d | cusps |\n|---|---|\n");
        for l in &self.inventory {
            let _ = writeln!(out, "| {} | {} |", l.d, l.count);
        }
        let _ = writeln!(out, "| total | {} |", self.total);
        for f in &self.fibres {
            let _ = writeln!(out, "\n#### Over {} (d = {}, image of ∞ under {})\n", f.base, f.level, f.involutions.join(", "));
            let _ = writeln!(out, "cusps of X1: {}", f.x1_cusps.join(", "));
            let _ = writeln!(out, "Δ-orbits: {}", f.orbits.join(", "));
            let _ = writeln!(out, "conjugacy class sizes: {}", join(&f.class_sizes));
            let _ = writeln!(out, "quadratic: {}", if f.quadratic { "yes" } else { "no" });
        }
        out.push_str("\n#### Quadratic cusp images\n\n| branch | derived | curated | agree |\n|---|---|---|---|\n");
        for q in &self.quadratic_images {
            let _ = writeln!(out, "| {} | {} | {} | {} |", q.branch, q.derived.join(" "), q.curated.join(" "), if q.agree { "yes" } else { "no" });
        }
        out
    }

    pub fn csv(&self) -> String {
        let rows = self.inventory.iter().map(|l| vec![l.d.to_string(), l.count.to_string()]);
        csv_string(&["d", "count"], rows)
    }
}
