//! Global solutions assembled from a covering: each placed square carries
//! the rescaled building block, so the map vanishes on square boundaries in
//! the limit and satisfies the gradient constraint almost everywhere. The
//! singular skeleton of such a solution is the domain boundary together with
//! the covering-square boundaries, which is what the selection functional
//! weighs.

use std::fmt;

use crate::cells::{ConvexCell, PiecewiseAffineMap};
use crate::covering::{Covering, CoveringError};
use crate::geom::{
    clip_polygon_halfplane, disk_polygon_area, point_segment_distance, ClipLine, Point, Polygon,
    Seg, SegmentSet,
};
use crate::pyramid::{pv_cells, pv_eval, PvOutcome};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum SolutionError {
    EmptyCovering,
    InsufficientDepth { radius: f64, uncovered: f64 },
}

impl fmt::Display for SolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionError::EmptyCovering => write!(f, "empty covering"),
            SolutionError::InsufficientDepth { radius, uncovered } => write!(
                f,
                "insufficient depth: ball of radius {radius} overlaps untiled area {uncovered:.3e}"
            ),
        }
    }
}

impl std::error::Error for SolutionError {}

#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub map: PiecewiseAffineMap<S>,
    pub covering: Covering<S>,
    /// Truncated singular skeleton: domain boundary plus covering-square
    /// boundaries, overlaps merged.
    pub sigma: SegmentSet,
    /// Per-cell index of the covering square the cell came from.
    pub square_of_cell: Vec<u32>,
    pub depth: u32,
}

/// Transplant the building block into every covering square: on the square
/// with side `l` and center `c` the map is `(l/4) p((4/l)(x - c))`.
pub fn build_solution<S: Scalar>(
    cov: &Covering<S>,
    depth: u32,
) -> Result<Solution<S>, CoveringError> {
    if cov.squares.is_empty() {
        return Err(CoveringError::EmptyCovering);
    }
    let block = pv_cells::<S>(depth);
    let mut cells = Vec::with_capacity(block.cells.len() * cov.squares.len());
    let mut square_of_cell = Vec::with_capacity(cells.capacity());
    let mut untiled = Vec::new();
    for (qi, sq) in cov.squares.iter().enumerate() {
        let c = sq.center();
        let scale = sq.side.mul_pow2(-2); // l/4
        let place = |v: &Point<S>| c.clone() + v.scale(&scale);
        for cell in &block.cells {
            let verts: Vec<Point<S>> = cell.poly.verts.iter().map(place).collect();
            // u(x) = (l/4) p((4/l)(x - c)) restricted to this cell is
            // M x + ((l/4) q - M c).
            let offset = cell.offset.scale(&scale) - cell.gradient * c.clone();
            cells.push(ConvexCell::new(Polygon::new(verts), cell.gradient, offset));
            square_of_cell.push(qi as u32);
        }
        for frame in &block.untiled {
            untiled.push(Polygon::new(frame.verts.iter().map(place).collect()));
        }
    }
    let mut segs: Vec<Seg> = Vec::new();
    {
        let dom = cov.domain.to_f64();
        let n = dom.verts.len();
        for i in 0..n {
            segs.push(Seg::new(dom.verts[i], dom.verts[(i + 1) % n]));
        }
    }
    for sq in &cov.squares {
        segs.extend(sq.boundary_segs());
    }
    let sigma = SegmentSet::new(segs);
    Ok(Solution {
        map: PiecewiseAffineMap {
            cells,
            domain: cov.domain.clone(),
            depth,
            untiled,
        },
        covering: cov.clone(),
        sigma,
        square_of_cell,
        depth,
    })
}

impl<S: Scalar> Solution<S> {
    pub fn domain_boundary_segs(&self) -> Vec<Seg> {
        let dom = self.map.domain.to_f64();
        let n = dom.verts.len();
        (0..n)
            .map(|i| Seg::new(dom.verts[i], dom.verts[(i + 1) % n]))
            .collect()
    }

    pub fn dist_boundary(&self, p: &Point<f64>) -> f64 {
        self.domain_boundary_segs()
            .iter()
            .map(|s| point_segment_distance(p, s))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_f64(&self) -> Solution<f64> {
        Solution {
            map: self.map.to_f64(),
            covering: self.covering.to_f64(),
            sigma: self.sigma.clone(),
            square_of_cell: self.square_of_cell.clone(),
            depth: self.depth,
        }
    }
}

/// Verification report for a constructed solution.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub samples: usize,
    /// Fraction of sampled cell-interior points whose independently derived
    /// gradient is admissible and equals the stored cell label.
    pub gradient_ok_fraction: f64,
    pub offending_cells: Vec<usize>,
    /// Max over shared cell edges of the evaluation mismatch at the
    /// endpoints and midpoint (0 exactly in exact arithmetic).
    pub max_edge_defect: f64,
    pub edge_defect_exact_zero: bool,
    /// Max over boundary-adjacent squares of sup |u|_inf / (side/2).
    pub boundary_sup_ratio: f64,
    /// Per requested delta: is (skeleton inter core) union core-ring connected?
    pub h1_connected: Vec<(f64, Option<bool>)>,
    /// Per requested delta: skeleton length inside the delta-core.
    pub h2_core_length: Vec<(f64, f64)>,
    pub passed: bool,
}

/// Sample-based verification of the solution axioms.
pub fn verify_solution<S: Scalar>(
    sol: &Solution<S>,
    samples: usize,
    seed: u64,
    deltas: &[f64],
) -> VerifyReport {
    let mut rng = Rng::new(seed);
    let mut ok = 0usize;
    let mut offending = std::collections::BTreeSet::new();
    let n_cells = sol.map.cells.len();
    for _ in 0..samples {
        let ci = rng.below(n_cells);
        let cell = &sol.map.cells[ci];
        let p = sample_in_polygon_f64(&cell.poly, &mut rng);
        let sq = &sol.covering.squares[sol.square_of_cell[ci] as usize];
        // Pull back to block coordinates and ask the evaluator.
        let c = sq.center().to_f64();
        let l = sq.side.to_f64();
        let local = Point {
            x: (p.x - c.x) * 4.0 / l,
            y: (p.y - c.y) * 4.0 / l,
        };
        match pv_eval(&local, sol.depth) {
            Ok(PvOutcome::Tiled(s)) => match s.gradient {
                Some(g) if g == cell.gradient => ok += 1,
                Some(_) => {
                    offending.insert(ci);
                }
                // Pullback landed on a singular line: inconclusive sample.
                None => ok += 1,
            },
            _ => {
                offending.insert(ci);
            }
        }
    }
    let gradient_ok_fraction = ok as f64 / samples.max(1) as f64;

    let (max_edge_defect, edge_exact) = edge_continuity_defect(&sol.map.cells);

    // Boundary decay on squares touching the domain boundary: the block sup
    // is side/8 at the level-1 centers, comfortably below side/2.
    let mut boundary_sup_ratio: f64 = 0.0;
    for (qi, sq) in sol.covering.squares.iter().enumerate() {
        let touches = sq
            .boundary_segs()
            .iter()
            .any(|s| sol.dist_boundary(&s.a).min(sol.dist_boundary(&s.b)) < 1e-12);
        if !touches {
            continue;
        }
        let side = sq.side.to_f64();
        let mut sup: f64 = 0.0;
        for (ci, cell) in sol.map.cells.iter().enumerate() {
            if sol.square_of_cell[ci] as usize != qi {
                continue;
            }
            for v in &cell.poly.verts {
                let u = cell.eval(v).to_f64();
                sup = sup.max(u.x.abs()).max(u.y.abs());
            }
        }
        boundary_sup_ratio = boundary_sup_ratio.max(sup / (side / 2.0));
    }

    let mut h1_connected = Vec::new();
    let mut h2_core_length = Vec::new();
    for &delta in deltas {
        h1_connected.push((delta, h1_check(&sol.sigma, &sol.map.domain.to_f64(), delta)));
        h2_core_length.push((
            delta,
            core_length(&sol.sigma, &sol.map.domain.to_f64(), delta),
        ));
    }
    let passed = gradient_ok_fraction == 1.0
        && (edge_exact || max_edge_defect <= 1e-10)
        && boundary_sup_ratio <= 1.0
        && h1_connected.iter().all(|(_, c)| *c != Some(false));
    VerifyReport {
        samples,
        gradient_ok_fraction,
        offending_cells: offending.into_iter().collect(),
        max_edge_defect,
        edge_defect_exact_zero: edge_exact,
        boundary_sup_ratio,
        h1_connected,
        h2_core_length,
        passed,
    }
}

/// Uniform sample strictly inside a convex polygon (triangle fan).
pub fn sample_in_polygon_f64<S: Scalar>(poly: &Polygon<S>, rng: &mut Rng) -> Point<f64> {
    let verts: Vec<Point<f64>> = poly.verts.iter().map(|v| v.to_f64()).collect();
    let mut areas = Vec::new();
    let mut total = 0.0;
    for i in 1..verts.len() - 1 {
        let a = (verts[i] - verts[0]).cross(&(verts[i + 1] - verts[0])) / 2.0;
        total += a;
        areas.push(a);
    }
    let mut pick = rng.next_f64() * total;
    let mut tri = 1;
    for (i, a) in areas.iter().enumerate() {
        if pick <= *a {
            tri = i + 1;
            break;
        }
        pick -= a;
    }
    let (mut r1, mut r2) = (rng.next_f64(), rng.next_f64());
    if r1 + r2 > 1.0 {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    // Shrink slightly toward the first vertex mix so samples stay interior.
    let eps = 1e-9;
    let scale = 1.0 - 3.0 * eps;
    let (b1, b2) = (r1 * scale + eps, r2 * scale + eps);
    let b0 = 1.0 - b1 - b2;
    Point {
        x: b0 * verts[0].x + b1 * verts[tri].x + b2 * verts[tri + 1].x,
        y: b0 * verts[0].y + b1 * verts[tri].y + b2 * verts[tri + 1].y,
    }
}

/// Max evaluation mismatch across all shared cell edges (endpoints and
/// midpoint of each interface). Exact zero is reported separately so dyadic
/// constructions can assert bitwise continuity.
pub fn edge_continuity_defect<S: Scalar>(cells: &[ConvexCell<S>]) -> (f64, bool) {
    let interfaces = match crate::energy::interfaces(cells) {
        Ok(v) => v,
        Err(_) => return (f64::INFINITY, false),
    };
    let mut max_defect: f64 = 0.0;
    let mut exact = true;
    for itf in &interfaces {
        let mid = itf.a.midpoint(&itf.b);
        for p in [itf.a.clone(), mid, itf.b.clone()] {
            let va = cells[itf.left].eval(&p);
            let vb = cells[itf.right].eval(&p);
            if va != vb {
                exact = false;
            }
            let d = (va.to_f64() - vb.to_f64()).norm();
            max_defect = max_defect.max(d);
        }
    }
    (max_defect, exact)
}

/// Connectivity of `(skeleton inter core) union ring(core)` where the core
/// is the inward offset of a convex domain by `delta`. `None` when the
/// domain is not convex (offset polygons are only built for convex shapes).
pub fn h1_check(sigma: &SegmentSet, domain: &Polygon<f64>, delta: f64) -> Option<bool> {
    if !domain.is_ccw_convex() {
        return None;
    }
    let core = inset_convex(domain, delta)?;
    if core.is_empty() {
        return Some(true);
    }
    let n = core.verts.len();
    let mut segs: Vec<Seg> = (0..n)
        .map(|i| Seg::new(core.verts[i], core.verts[(i + 1) % n]))
        .collect();
    for s in sigma.segments() {
        if let Some(clipped) = clip_seg_to_convex(s, &core) {
            segs.push(clipped);
        }
    }
    Some(arrangement_connected(&segs))
}

/// Length of the part of the skeleton lying in the closed delta-core.
pub fn core_length(sigma: &SegmentSet, domain: &Polygon<f64>, delta: f64) -> f64 {
    if !domain.is_ccw_convex() {
        // Conservative: whole length (finite anyway at truncation).
        return sigma.length();
    }
    match inset_convex(domain, delta) {
        Some(core) if !core.is_empty() => sigma
            .segments()
            .iter()
            .filter_map(|s| clip_seg_to_convex(s, &core))
            .map(|s| s.len())
            .sum(),
        _ => 0.0,
    }
}

/// Inward offset of a convex polygon by `delta` (half-plane intersection).
pub fn inset_convex(domain: &Polygon<f64>, delta: f64) -> Option<Polygon<f64>> {
    if !domain.is_ccw_convex() {
        return None;
    }
    let mut poly = domain.clone();
    let n = domain.verts.len();
    for i in 0..n {
        let a = domain.verts[i];
        let b = domain.verts[(i + 1) % n];
        let e = b - a;
        let len = e.norm();
        let inward = Point {
            x: -e.y / len,
            y: e.x / len,
        };
        let p = a + inward.scale(&delta);
        poly = clip_polygon_halfplane(&poly, &ClipLine::new(p, inward)).ok()?;
        if poly.is_empty() {
            return Some(poly);
        }
    }
    Some(poly)
}

fn clip_seg_to_convex(s: &Seg, core: &Polygon<f64>) -> Option<Seg> {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let n = core.verts.len();
    let d = s.b - s.a;
    for i in 0..n {
        let a = core.verts[i];
        let b = core.verts[(i + 1) % n];
        let e = b - a;
        let normal = Point { x: -e.y, y: e.x };
        let f0 = normal.dot(&(s.a - a));
        let fd = normal.dot(&d);
        // Keep normal.(p - a) >= 0.
        if fd.abs() < 1e-15 {
            if f0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -f0 / fd;
        if fd > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 >= t1 {
            return None;
        }
    }
    if t1 - t0 < 1e-12 {
        return None;
    }
    Some(Seg::new(s.eval(t0), s.eval(t1)))
}

/// Split segments at pairwise crossings and test graph connectivity of the
/// union through shared (quantized) endpoints.
pub fn arrangement_connected(segs: &[Seg]) -> bool {
    let mut cut_params: Vec<Vec<f64>> = segs.iter().map(|_| vec![0.0, 1.0]).collect();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if let Some((ti, tj)) = seg_intersection_params(&segs[i], &segs[j]) {
                cut_params[i].push(ti);
                cut_params[j].push(tj);
            }
        }
    }
    let key =
        |p: &Point<f64>| -> (i64, i64) { ((p.x * 1e9).round() as i64, (p.y * 1e9).round() as i64) };
    let mut idx: std::collections::HashMap<(i64, i64), usize> = std::collections::HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for (i, s) in segs.iter().enumerate() {
        let mut params = std::mem::take(&mut cut_params[i]);
        params.sort_by(f64::total_cmp);
        params.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in params.windows(2) {
            let mut ends = [0usize; 2];
            for (slot, t) in w.iter().enumerate() {
                let p = s.eval(*t);
                let k = key(&p);
                let v = match idx.get(&k) {
                    Some(&v) => v,
                    None => {
                        let v = parent.len();
                        idx.insert(k, v);
                        parent.push(v);
                        v
                    }
                };
                ends[slot] = v;
            }
            let (ra, rb) = (find(&mut parent, ends[0]), find(&mut parent, ends[1]));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    if parent.is_empty() {
        return true;
    }
    let root = find(&mut parent, 0);
    (0..parent.len()).all(|v| find(&mut parent, v) == root)
}

fn seg_intersection_params(a: &Seg, b: &Seg) -> Option<(f64, f64)> {
    let d1 = a.b - a.a;
    let d2 = b.b - b.a;
    let denom = d1.cross(&d2);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = b.a - a.a;
    let t = w.cross(&d2) / denom;
    let u = w.cross(&d1) / denom;
    let eps = 1e-12;
    if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u) {
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Per-label disk areas at one point for a list of radii.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub point: Point<f64>,
    pub rows: Vec<DensityRow>,
}

#[derive(Clone, Debug)]
pub struct DensityRow {
    pub radius: f64,
    /// Indexed by [`crate::matrix::SignedMatrix::index`].
    pub label_areas: [f64; 8],
    /// Labels clearing `radius^2 / 128`.
    pub cleared: usize,
}

/// Per-label areas of `B(x, r)` against the cell decomposition
/// (deterministic circular-segment evaluation per cell), plus the ball area
/// inside the domain that no cell accounts for (the untiled remainder).
/// Truncation only removes label mass, so the returned areas are rigorous
/// lower bounds for the untruncated ones.
pub fn label_disk_areas<S: Scalar>(sol: &Solution<S>, x: &Point<f64>, r: f64) -> ([f64; 8], f64) {
    let mut label_areas = [0.0f64; 8];
    for cell in &sol.map.cells {
        let (bx0, by0, bx1, by1) = cell.poly.bbox_f64();
        if bx1 < x.x - r || bx0 > x.x + r || by1 < x.y - r || by0 > x.y + r {
            continue;
        }
        let a = disk_polygon_area(&Point::<f64>::new(x.x, x.y), r, &cell.poly.to_f64());
        label_areas[cell.gradient.index()] += a;
    }
    let covered: f64 = label_areas.iter().sum();
    let full = disk_polygon_area(&Point::<f64>::new(x.x, x.y), r, &sol.map.domain.to_f64());
    (label_areas, (full - covered).max(0.0))
}

/// Per-label areas of `B(x, r)` for interior density queries. The ball must
/// be essentially resolved at the current depth; unresolved area beyond
/// `1e-6 r^2` is an error.
pub fn density_profile<S: Scalar>(
    sol: &Solution<S>,
    x: &Point<f64>,
    radii: &[f64],
) -> Result<DensityProfile, SolutionError> {
    let mut rows = Vec::new();
    for &r in radii {
        let (label_areas, uncovered) = label_disk_areas(sol, x, r);
        if uncovered > 1e-6 * r * r {
            return Err(SolutionError::InsufficientDepth {
                radius: r,
                uncovered,
            });
        }
        let threshold = r * r / 128.0;
        let cleared = label_areas.iter().filter(|a| **a >= threshold).count();
        rows.push(DensityRow {
            radius: r,
            label_areas,
            cleared,
        });
    }
    Ok(DensityProfile { point: *x, rows })
}

/// Exact per-label areas of the union of two stacked squares of the block
/// layout (rows `j`, `j+1` at level `k` in the fundamental triangle),
/// computed from the dyadic cell decomposition.
pub fn strip_label_areas(
    map: &PiecewiseAffineMap<crate::scalar::Dyadic>,
    k: u32,
    j: u64,
) -> [crate::scalar::Dyadic; 8] {
    use crate::scalar::Dyadic;
    assert!(j % 2 == 0 && j + 1 <= (1u64 << k) - 2, "valid row pair");
    assert!(map.depth >= k);
    let x0 = crate::pyramid::column_x::<Dyadic>(k - 1);
    let x1 = crate::pyramid::column_x::<Dyadic>(k);
    let s = crate::pyramid::side::<Dyadic>(k);
    let y0 = s * Dyadic::int(j as i64);
    let y1 = s * Dyadic::int(j as i64 + 2);
    let mut areas = [Dyadic::ZERO; 8];
    for cell in &map.cells {
        let p = cell.poly.interior_point();
        if p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1 {
            let idx = cell.gradient.index();
            areas[idx] = areas[idx] + cell.poly.area().unwrap();
        }
    }
    areas
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::rectangle_covering;
    use crate::matrix::SignedMatrix;
    use crate::scalar::Dyadic;

    fn unit_square_solution(depth: u32) -> Solution<Dyadic> {
        let cov = rectangle_covering(Dyadic::int(1), Dyadic::int(1), 4);
        build_solution(&cov, depth).unwrap()
    }

    #[test]
    fn empty_covering_is_an_error() {
        let cov: Covering<Dyadic> = Covering {
            squares: vec![],
            domain: Polygon::rectangle(Dyadic::ZERO, Dyadic::ZERO, Dyadic::ONE, Dyadic::ONE),
            residual_area: 1.0,
            complete: false,
            omitted_diameter: 2.0f64.sqrt(),
        };
        assert!(matches!(
            build_solution(&cov, 3),
            Err(CoveringError::EmptyCovering)
        ));
    }

    #[test]
    fn single_square_skeleton_is_the_boundary() {
        let sol = unit_square_solution(4);
        assert!((sol.sigma.length() - 4.0).abs() < 1e-12);
        for s in sol.sigma.segments() {
            for p in [s.a, s.b] {
                assert!(sol.dist_boundary(&p) < 1e-12, "skeleton on the boundary");
            }
        }
    }

    #[test]
    fn rectangle_skeleton_length_and_bound() {
        let cov = rectangle_covering(Dyadic::int(3), Dyadic::int(2), 8);
        let sol = build_solution(&cov, 3).unwrap();
        // Perimeter 10 plus interior edges x=2 (length 2) and y=1 on [2,3].
        assert!((sol.sigma.length() - 13.0).abs() < 1e-12);
        let bound = 4.0 * sol.covering.sum_sides().to_f64();
        assert!(sol.sigma.length() <= bound + 1e-12);
    }

    #[test]
    fn verify_passes_on_the_unit_square() {
        let sol = unit_square_solution(5);
        let report = verify_solution(&sol, 4000, 7, &[0.25, 0.125]);
        assert_eq!(report.gradient_ok_fraction, 1.0);
        assert!(report.edge_defect_exact_zero, "dyadic continuity is exact");
        assert_eq!(report.max_edge_defect, 0.0);
        assert!(report.boundary_sup_ratio <= 1.0);
        for (_, conn) in &report.h1_connected {
            assert_eq!(*conn, Some(true));
        }
        assert!(report.passed);
    }

    #[test]
    fn fault_injection_is_detected_and_localized() {
        let mut sol = unit_square_solution(4);
        let victim = 37 % sol.map.cells.len();
        sol.map.cells[victim].gradient = sol.map.cells[victim].gradient.negate();
        let report = verify_solution(&sol, 6000, 9, &[]);
        assert!(report.gradient_ok_fraction < 1.0);
        assert!(report.offending_cells.contains(&victim));
        assert!(!report.passed);
    }

    #[test]
    fn zero_boundary_trace_bound() {
        let cov = rectangle_covering(Dyadic::int(3), Dyadic::int(2), 8);
        let sol = build_solution(&cov, 7).unwrap();
        let mut rng = Rng::new(21);
        for _ in 0..4000 {
            let ci = rng.below(sol.map.cells.len());
            let p = sample_in_polygon_f64(&sol.map.cells[ci].poly, &mut rng);
            let u = sol.map.cells[ci]
                .eval(&Point::new(
                    Dyadic::from_f64_exact(p.x),
                    Dyadic::from_f64_exact(p.y),
                ))
                .to_f64();
            let d = sol.dist_boundary(&p);
            assert!(
                u.norm() <= 2.0 * d + 1e-12,
                "|u|={} at distance {d}",
                u.norm()
            );
        }
    }

    #[test]
    fn h1_connectivity_of_vitali_solution() {
        let domain = Polygon::rectangle(
            Dyadic::int(0),
            Dyadic::int(0),
            Dyadic::int(4),
            Dyadic::int(4),
        );
        let cov = crate::covering::vitali_dyadic_covering(&domain, 4);
        let sol = build_solution(&cov, 2).unwrap();
        for delta in [0.4, 0.2] {
            assert_eq!(
                h1_check(&sol.sigma, &sol.map.domain.to_f64(), delta),
                Some(true),
                "delta={delta}"
            );
        }
        // Finitely many squares meet each core, stably in the generation.
        let deeper = crate::covering::vitali_dyadic_covering(&domain, 7);
        for delta in [0.4, 0.2] {
            let count = |cov: &Covering<Dyadic>| {
                cov.squares
                    .iter()
                    .filter(|sq| {
                        let c = sq.center().to_f64();
                        let half = sq.side.to_f64() / 2.0;
                        let dist_wall = c.x.min(4.0 - c.x).min(c.y).min(4.0 - c.y) + half;
                        dist_wall > delta
                    })
                    .count()
            };
            assert_eq!(count(&cov), count(&deeper), "delta={delta}");
        }
    }

    #[test]
    fn strip_pair_areas_clear_the_level_bound() {
        let map = pv_cells::<Dyadic>(4);
        for k in 2..=4u32 {
            let s = crate::pyramid::side::<Dyadic>(k);
            let bound = (s * s).mul_pow2(-5); // (1/8)(side/2)^2 = side^2/32
            for j in (0..=(1u64 << k) - 4).step_by(2) {
                let areas = strip_label_areas(&map, k, j);
                for (idx, a) in areas.iter().enumerate() {
                    assert!(
                        *a >= bound,
                        "k={k} j={j} label {} area {a:?}",
                        SignedMatrix::ALL[idx]
                    );
                }
            }
        }
    }

    #[test]
    fn continuity_is_bitwise_exact_at_depth_8() {
        let map = pv_cells::<Dyadic>(8);
        let (defect, exact) = edge_continuity_defect(&map.cells);
        assert!(exact, "dyadic cell complex is exactly continuous");
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn vitali_solution_clears_the_density_bound_on_the_skeleton() {
        let domain = Polygon::rectangle(
            Dyadic::int(0),
            Dyadic::int(0),
            Dyadic::int(4),
            Dyadic::int(4),
        );
        let cov = crate::covering::vitali_dyadic_covering(&domain, 1);
        let sol = build_solution(&cov, 6).unwrap();
        let delta = 1.0;
        // Sample skeleton points well inside the core: shared-edge midpoints
        // and corners of covering squares.
        let mut tested = 0;
        for sq in &sol.covering.squares {
            let c = sq.center().to_f64();
            let half = sq.side.to_f64() / 2.0;
            let candidates = [
                Point {
                    x: c.x + half,
                    y: c.y,
                },
                Point {
                    x: c.x + half,
                    y: c.y + half,
                },
            ];
            for x in candidates {
                if sol.dist_boundary(&x) <= delta + 1e-9 || tested >= 16 {
                    continue;
                }
                // Radius below delta/4 and small against the local side, so
                // the level pair carrying every label is resolved at this
                // depth.
                let r = (delta / 4.0).min(sq.side.to_f64() / 16.0) / 2.0;
                let (areas, _) = label_disk_areas(&sol, &x, r);
                let cleared = areas.iter().filter(|a| **a >= r * r / 128.0).count();
                assert!(
                    cleared >= 3,
                    "point ({}, {}) r={r}: only {cleared} labels clear",
                    x.x,
                    x.y
                );
                assert_eq!(cleared, 8, "square-boundary points carry all labels");
                tested += 1;
            }
        }
        assert!(tested >= 10, "enough skeleton points sampled ({tested})");
    }

    #[test]
    fn density_profile_inside_a_cell_is_one_label() {
        let sol = unit_square_solution(6);
        let x = Point { x: 0.6, y: 0.55 };
        let r = 0.01;
        let prof = density_profile(&sol, &x, &[r]).unwrap();
        let row = &prof.rows[0];
        let total: f64 = row.label_areas.iter().sum();
        assert!((total - std::f64::consts::PI * r * r).abs() < 1e-9);
        let nonzero = row.label_areas.iter().filter(|a| **a > 1e-12).count();
        assert_eq!(nonzero, 1, "small ball inside one cell");
    }

    #[test]
    fn density_profile_reports_insufficient_depth() {
        let sol = unit_square_solution(2);
        // Ball hugging the boundary at shallow depth overlaps the untiled strip.
        let x = Point { x: 1.0, y: 0.5 };
        let err = density_profile(&sol, &x, &[0.2]).unwrap_err();
        assert!(matches!(err, SolutionError::InsufficientDepth { .. }));
    }
}
