use serde::{Deserialize, Serialize};

use super::polygon::JordanPolygon;
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// One connected component: an outer curve and the holes cut out of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchComponent {
    outer: JordanPolygon,
    holes: Vec<JordanPolygon>,
}

impl PatchComponent {
    pub fn new(outer: JordanPolygon, holes: Vec<JordanPolygon>) -> Result<Self> {
        for (k, hole) in holes.iter().enumerate() {
            if hole.crosses(&outer) || !hole.vertices().iter().all(|&p| outer.contains(p)) {
                return Err(Error::Geometry(format!("hole {k} is not strictly inside the outer curve")));
            }
            for (l, other) in holes.iter().enumerate().skip(k + 1) {
                if hole.crosses(other) || other.contains(hole.vertices()[0]) || hole.contains(other.vertices()[0]) {
                    return Err(Error::Geometry(format!("holes {k} and {l} overlap")));
                }
            }
        }
        Ok(PatchComponent { outer, holes })
    }

    pub fn simple(outer: JordanPolygon) -> Self {
        PatchComponent { outer, holes: Vec::new() }
    }

    /// Polygonal disc `B_r(center)`.
    pub fn disc(center: Point2, r: f64, vertices: usize) -> Result<Self> {
        Ok(Self::simple(JordanPolygon::circle(center, r, vertices)?))
    }

    /// Polygonal annulus `r_in < |x - center| < r_out`.
    pub fn annulus(center: Point2, r_in: f64, r_out: f64, vertices: usize) -> Result<Self> {
        if !(0.0 < r_in && r_in < r_out) {
            return Err(Error::Domain(format!("annulus radii must satisfy 0 < {r_in} < {r_out}")));
        }
        Self::new(
            JordanPolygon::circle(center, r_out, vertices)?,
            vec![JordanPolygon::circle(center, r_in, vertices)?],
        )
    }

    pub fn outer(&self) -> &JordanPolygon {
        &self.outer
    }

    pub fn holes(&self) -> &[JordanPolygon] {
        &self.holes
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.winding_number(p) != 0 || h.boundary_distance(p) <= 1e-14)
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(|h| h.area()).sum::<f64>()
    }

    /// Boundary curves with the sign of their orientation as part of `∂D`
    /// (+1 for the outer curve, -1 for holes).
    pub fn signed_curves(&self) -> impl Iterator<Item = (&JordanPolygon, f64)> {
        std::iter::once((&self.outer, 1.0)).chain(self.holes.iter().map(|h| (h, -1.0)))
    }

    pub fn rotate(&self, angle: f64) -> Self {
        PatchComponent { outer: self.outer.rotate(angle), holes: self.holes.iter().map(|h| h.rotate(angle)).collect() }
    }

    pub fn refine(&self) -> Self {
        PatchComponent { outer: self.outer.refine(), holes: self.holes.iter().map(|h| h.refine()).collect() }
    }

    fn overlaps(&self, other: &PatchComponent) -> bool {
        let curves_a: Vec<_> = self.signed_curves().map(|(c, _)| c).collect();
        let curves_b: Vec<_> = other.signed_curves().map(|(c, _)| c).collect();
        if curves_a.iter().any(|a| curves_b.iter().any(|b| a.crosses(b))) {
            return true;
        }
        // Without crossings, overlap means one outer vertex lies in the other region.
        self.contains(other.outer.vertices()[0]) || other.contains(self.outer.vertices()[0])
    }
}

/// A patch `D`: a finite union of disjoint components strictly inside the disc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatchSpec {
    components: Vec<PatchComponent>,
}

impl PatchSpec {
    pub fn new(components: Vec<PatchComponent>) -> Result<Self> {
        for (k, c) in components.iter().enumerate() {
            if c.outer.max_radius() >= 1.0 {
                return Err(Error::Domain(format!("component {k} is not contained in the open unit disc")));
            }
            for (l, d) in components.iter().enumerate().skip(k + 1) {
                if c.overlaps(d) {
                    return Err(Error::Geometry(format!("components {k} and {l} overlap")));
                }
            }
        }
        Ok(PatchSpec { components })
    }

    pub fn empty() -> Self {
        PatchSpec::default()
    }

    pub fn single(component: PatchComponent) -> Result<Self> {
        Self::new(vec![component])
    }

    pub fn components(&self) -> &[PatchComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| c.area()).sum()
    }

    /// Every Jordan curve of `∂D`, in component order, with its orientation sign.
    pub fn boundary_curves(&self) -> impl Iterator<Item = (&JordanPolygon, f64)> {
        self.components.iter().flat_map(|c| c.signed_curves())
    }

    /// Strict membership in `D`; boundary points are outside.
    pub fn contains(&self, p: Point2) -> bool {
        self.components.iter().any(|c| c.contains(p))
    }

    pub fn rotate(&self, angle: f64) -> Self {
        PatchSpec { components: self.components.iter().map(|c| c.rotate(angle)).collect() }
    }

    pub fn refine(&self) -> Self {
        PatchSpec { components: self.components.iter().map(|c| c.refine()).collect() }
    }
}

/// `ω = Σ α_i 1_{D_i}` over disjoint components.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiScalePatch {
    terms: Vec<(f64, PatchComponent)>,
}

impl MultiScalePatch {
    pub fn new(terms: Vec<(f64, PatchComponent)>) -> Result<Self> {
        if let Some((a, _)) = terms.iter().find(|(a, _)| *a == 0.0 || !a.is_finite()) {
            return Err(Error::Domain(format!("weights must be finite and non-zero, got {a}")));
        }
        // Reuse the disjointness checks of a plain patch.
        PatchSpec::new(terms.iter().map(|(_, c)| c.clone()).collect())?;
        Ok(MultiScalePatch { terms })
    }

    /// Terms whose regions have disjoint interiors but may share boundary
    /// curves, as the bands of a step function do.
    pub(crate) fn from_bands(terms: Vec<(f64, PatchComponent)>) -> Self {
        MultiScalePatch { terms }
    }

    pub fn from_patch(patch: &PatchSpec) -> Self {
        MultiScalePatch { terms: patch.components.iter().map(|c| (1.0, c.clone())).collect() }
    }

    pub fn terms(&self) -> &[(f64, PatchComponent)] {
        &self.terms
    }

    /// `λ = min α_i`.
    pub fn lambda(&self) -> f64 {
        self.terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min)
    }

    /// `Λ = max α_i`.
    pub fn big_lambda(&self) -> f64 {
        self.terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support(&self) -> PatchSpec {
        PatchSpec { components: self.terms.iter().map(|t| t.1.clone()).collect() }
    }

    pub fn value_at(&self, p: Point2) -> f64 {
        self.terms.iter().find(|(_, c)| c.contains(p)).map_or(0.0, |(a, _)| *a)
    }

    pub fn rotate(&self, angle: f64) -> Self {
        MultiScalePatch { terms: self.terms.iter().map(|(a, c)| (*a, c.rotate(angle))).collect() }
    }
}

const FORMAT_NAME: &str = "vortex-patch";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct PatchFile {
    format: String,
    version: u32,
    components: Vec<ComponentFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComponentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    outer: Vec<[f64; 2]>,
    #[serde(default)]
    holes: Vec<Vec<[f64; 2]>>,
}

fn to_points(v: &[[f64; 2]]) -> Vec<Point2> {
    v.iter().map(|&[a, b]| Point2::new(a, b)).collect()
}

fn from_points(p: &JordanPolygon) -> Vec<[f64; 2]> {
    p.vertices().iter().map(|q| [q.x1, q.x2]).collect()
}

/// Parses the versioned patch document. Components may carry a `weight`
/// (default 1), which makes the result a multi-scale patch.
pub fn parse_patch(text: &str) -> Result<MultiScalePatch> {
    let file: PatchFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.format != FORMAT_NAME {
        return Err(Error::Parse(format!("unknown format {:?}", file.format)));
    }
    if file.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported patch format version {}", file.version)));
    }
    let mut terms = Vec::new();
    for c in &file.components {
        let outer = JordanPolygon::new(to_points(&c.outer)).map_err(|e| Error::Parse(e.to_string()))?;
        let holes = c
            .holes
            .iter()
            .map(|h| JordanPolygon::new(to_points(h)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let comp = PatchComponent::new(outer, holes).map_err(|e| Error::Parse(e.to_string()))?;
        terms.push((c.weight.unwrap_or(1.0), comp));
    }
    MultiScalePatch::new(terms).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_patch(patch: &MultiScalePatch) -> String {
    let file = PatchFile {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        components: patch
            .terms
            .iter()
            .map(|(a, c)| ComponentFile {
                weight: (*a != 1.0).then_some(*a),
                outer: from_points(c.outer()),
                holes: c.holes().iter().map(from_points).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("patch documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_examples() {
        let disc = PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, 0.5, 64).unwrap()).unwrap();
        assert!(disc.contains(Point2::ORIGIN));
        assert!(!disc.contains(Point2::new(0.9, 0.0)));
        let ann = PatchSpec::single(PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 64).unwrap()).unwrap();
        assert!(!ann.contains(Point2::new(0.1, 0.0)));
        assert!(ann.contains(Point2::new(0.45, 0.0)));
    }

    #[test]
    fn rejects_overlaps_and_escapes() {
        let a = PatchComponent::disc(Point2::new(-0.2, 0.0), 0.3, 32).unwrap();
        let b = PatchComponent::disc(Point2::new(0.2, 0.0), 0.3, 32).unwrap();
        assert!(PatchSpec::new(vec![a.clone(), b]).is_err());
        let c = PatchComponent::disc(Point2::new(0.5, 0.0), 0.5, 32).unwrap();
        assert!(matches!(PatchSpec::new(vec![c]), Err(Error::Domain(_))));
        let inner = PatchComponent::disc(Point2::new(-0.2, 0.0), 0.1, 32).unwrap();
        assert!(PatchSpec::new(vec![a, inner]).is_err());
    }

    #[test]
    fn nested_components_are_allowed() {
        let ring = PatchComponent::annulus(Point2::ORIGIN, 0.4, 0.6, 64).unwrap();
        let core = PatchComponent::disc(Point2::ORIGIN, 0.2, 64).unwrap();
        let p = PatchSpec::new(vec![ring, core]).unwrap();
        assert!(p.contains(Point2::new(0.1, 0.0)));
        assert!(!p.contains(Point2::new(0.3, 0.0)));
        assert!(p.contains(Point2::new(0.5, 0.0)));
    }

    #[test]
    fn file_round_trip() {
        let ring = PatchComponent::annulus(Point2::ORIGIN, 0.4, 0.6, 16).unwrap();
        let core = PatchComponent::disc(Point2::ORIGIN, 0.2, 16).unwrap();
        let m = MultiScalePatch::new(vec![(1.0, ring), (2.5, core)]).unwrap();
        let text = write_patch(&m);
        let back = parse_patch(&text).unwrap();
        assert_eq!(back.terms().len(), 2);
        assert_eq!(back.big_lambda(), 2.5);
        assert_eq!(back.lambda(), 1.0);
        assert!(parse_patch("{\"format\":\"vortex-patch\",\"version\":9,\"components\":[]}").is_err());
        assert!(parse_patch("not json").is_err());
    }
}
