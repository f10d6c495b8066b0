//! One randomized trial per function. A trial returns the number of
//! individual comparisons it made, or a description of the first failure.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::sample::{self, Fault};
use super::Trial;
use crate::building::{
    brute_force_assignment, change_of_basis, compare_markings, cone_c1, cone_c2,
    consecutive_cone, flag_apartment, full_cone, intersect_apartments, intersection_transport,
    ratio_valuations, NormSplitTest, reduced_cone, shearing_translation, snake_marking,
    tropical_assignment, check_monotonicity, Marking,
};
use crate::field::Field;
use crate::flags::{
    double_ratios, is_positive_tuple, triple_ratios, tuple_coordinates, FlagTuple, GenOptions,
    ScalarMatrix, TripleIndex, Triangulation,
};
use crate::linalg::Matrix;
use crate::rational::{ExtRational, Rational};
use crate::snakes::{
    basis_change, canonical_path, path_matrix, shearing_matrix, snake_basis, Snake,
};
use crate::valfield::ValuedScalar;

pub type TrialResult = std::result::Result<u64, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

impl Trial<'_> {
    fn d(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    fn tuple(&mut self, d: usize, t: usize) -> std::result::Result<FlagTuple, String> {
        sample::tuple(d, t, &mut self.rng, &self.opts.gen, self.opts.fault).map_err(err)
    }

    fn scalar(&mut self) -> ValuedScalar {
        sample::scalar(&mut self.rng, &self.opts.gen)
    }
}

// ---- field ----

pub fn valuation_axioms(tr: &mut Trial) -> TrialResult {
    let (x, y, z) = (tr.scalar(), tr.scalar(), tr.scalar());
    let (vx, vy) = (x.valuation(), y.valuation());
    ensure(x.times(&y).valuation() == vx.add(&vy), || format!("v(xy) for {x}, {y}"))?;
    let vs = x.plus(&y).valuation();
    let low = vx.clone().min(vy.clone());
    ensure(vs >= low, || format!("v(x+y) < min for {x}, {y}"))?;
    if vx != vy {
        ensure(vs == low, || format!("v(x+y) != min for {x}, {y}"))?;
    }
    let sign = |a: &ValuedScalar| a.sign() as i32;
    ensure(sign(&x.times(&y)) == sign(&x) * sign(&y), || format!("sign(xy) for {x}, {y}"))?;
    // Total order, compatible with addition and positive multiplication.
    let (xy, yz, xz) = (x.compare(&y), y.compare(&z), x.compare(&z));
    ensure(xy == y.compare(&x).reverse(), || format!("antisymmetry for {x}, {y}"))?;
    if xy != Ordering::Greater && yz != Ordering::Greater {
        ensure(xz != Ordering::Greater, || format!("transitivity for {x}, {y}, {z}"))?;
    }
    ensure(x.plus(&z).compare(&y.plus(&z)) == xy, || format!("translation for {x}, {y}, {z}"))?;
    if z.is_positive() {
        ensure(x.times(&z).compare(&y.times(&z)) == xy, || format!("scaling for {x}, {y}, {z}"))?;
    }
    // Canonical forms are stable and division undoes multiplication.
    let again = ValuedScalar::new(x.num().clone(), x.den().clone()).map_err(err)?;
    ensure(again == x, || format!("canonical form of {x}"))?;
    if !y.is_zero() {
        ensure(x.times(&y).divide(&y) == Some(x.clone()), || format!("(xy)/y for {x}, {y}"))?;
    }
    Ok(1)
}

pub fn positive_valuation(tr: &mut Trial) -> TrialResult {
    let x = sample::nonnegative(&mut tr.rng, &tr.opts.gen);
    let y = sample::nonnegative(&mut tr.rng, &tr.opts.gen);
    let expect = x.valuation().min(y.valuation());
    ensure(x.plus(&y).valuation() == expect, || format!("v(x+y) for {x}, {y}"))?;
    Ok(1)
}

pub fn well_behaved(tr: &mut Trial) -> TrialResult {
    let y = crate::flags::sample_positive(&mut tr.rng, &tr.opts.gen);
    let gap = sample::nonnegative(&mut tr.rng, &tr.opts.gen);
    let x = y.plus(&gap);
    let v = x.divide(&y).expect("y > 0").valuation();
    ensure(v <= ExtRational::Finite(Rational::zero()), || format!("v(x/y) > 0 for {x}, {y}"))?;
    Ok(1)
}

// ---- symmetry ----

pub fn triple_symmetry(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 6);
    let tuple = tr.tuple(d, 3)?;
    let f = tuple.flags();
    let (e, ff, g) = (&f[0], &f[1], &f[2]);
    let x = triple_ratios(e, ff, g).map_err(err)?;
    let rotated = triple_ratios(ff, g, e).map_err(err)?;
    let swapped = triple_ratios(ff, e, g).map_err(err)?;
    for (idx, v) in &x {
        let TripleIndex { a, b, c } = *idx;
        ensure(rotated[&TripleIndex::new(b, c, a)] == *v, || format!("rotation at ({idx}), d = {d}"))?;
        let inv = swapped[&TripleIndex::new(b, a, c)].inverse().ok_or("zero ratio")?;
        ensure(inv == *v, || format!("transposition at ({idx}), d = {d}"))?;
    }
    Ok(2 * x.len() as u64)
}

pub fn double_symmetry(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 6);
    let tuple = tr.tuple(d, 4)?;
    let f = tuple.flags();
    let (e, ff, g, h) = (&f[0], &f[1], &f[2], &f[3]);
    let z = double_ratios(e, ff, g, h).map_err(err)?;
    let opposite = double_ratios(g, h, e, ff).map_err(err)?;
    let reflected = double_ratios(e, h, g, ff).map_err(err)?;
    for i in 1..d {
        ensure(opposite[d - i - 1] == z[i - 1], || format!("Z_{i} vs Z_{} of (G,H,E,F), d = {d}", d - i))?;
        let inv = reflected[i - 1].inverse().ok_or("zero ratio")?;
        ensure(inv == z[i - 1], || format!("Z_{i} vs (E,H,G,F), d = {d}"))?;
    }
    Ok(2 * (d as u64 - 1))
}

pub fn projective_invariance(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let tuple = tr.tuple(d, 4)?;
    // Signed monomial entries keep the transformed flags small.
    let monomials = GenOptions { extra_terms: 0, ..tr.opts.gen };
    let m = loop {
        let m = Matrix::from_fn(d, d, |_, _| {
            let x = crate::flags::sample_positive(&mut tr.rng, &monomials);
            if tr.rng.gen_bool(0.5) {
                x
            } else {
                x.negate()
            }
        });
        if !m.determinant().map_err(err)?.is_zero() {
            break m;
        }
    };
    let moved = tuple.transform(&m).map_err(err)?;
    let before = tuple_coordinates(&tuple, &Triangulation::Fan).map_err(err)?;
    let after = tuple_coordinates(&moved, &Triangulation::Fan).map_err(err)?;
    ensure(before == after, || format!("coordinates changed under a change of basis, d = {d}"))?;
    Ok(before.count() as u64)
}

// ---- snakes ----

pub fn snake_frames(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 5);
    let tuple = tr.tuple(d, 3)?;
    let f = tuple.flags();
    let (e, ff, g) = (&f[0], &f[1], &f[2]);
    let one = ValuedScalar::one();
    let bottom = snake_basis(e, ff, g, &Snake::bottom(d), &one).map_err(err)?;
    let signed = Matrix::from_fn(d, d, |i, j| {
        if i + j == d - 1 {
            ValuedScalar::from_int(if i % 2 == 0 { 1 } else { -1 })
        } else {
            ValuedScalar::zero()
        }
    });
    ensure(bottom.vectors == signed, || format!("bottom basis of the normalized triple, d = {d}"))?;
    let top = snake_basis(e, ff, g, &Snake::top(d), &one).map_err(err)?;
    let path = canonical_path(&Snake::bottom(d), &Snake::top(d)).map_err(err)?;
    let m = path_matrix(e, ff, g, &path).map_err(err)?;
    let direct = basis_change(&bottom.vectors, &top.vectors).map_err(err)?;
    ensure(m == direct, || format!("path matrix differs from the basis change, d = {d}"))?;
    ensure(m.is_upper_triangular(), || format!("path matrix not upper triangular, d = {d}"))?;
    ensure(m.is_totally_nonnegative().map_err(err)?, || format!("path matrix not TNN, d = {d}"))?;
    Ok(4)
}

pub fn snake_lines(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let tuple = tr.tuple(d, 3)?;
    let f = tuple.flags();
    let mut count = 0;
    for snake in Snake::all(d) {
        let basis = snake_basis(&f[0], &f[1], &f[2], &snake, &ValuedScalar::one()).map_err(err)?;
        for k in 1..=d {
            let (a, b, c) = snake.point(k);
            let u = basis.vector(k);
            ensure(u.iter().any(|x| !x.is_zero()), || format!("u_{k} = 0 on {snake}"))?;
            let span = Matrix::hstack(&[&f[0].subspace(a), &f[1].subspace(b), &f[2].subspace(c)]);
            let row = Matrix::from_rows(vec![u]).map_err(err)?;
            ensure(row.mul(&span).entries().iter().all(|x| x.is_zero()), || {
                format!("u_{k} misses its line on {snake}")
            })?;
            count += 1;
        }
    }
    Ok(count)
}

pub fn round_trip(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let t = tr.d(3, 5);
    let mut coords = crate::flags::sample_coordinates(d, t, &mut tr.rng, &tr.opts.gen);
    if tr.opts.fault == Some(Fault::NegateDoubleRatio) {
        if let Some(z) = coords.edges.get_mut(&(1, 3)) {
            z[0] = z[0].negate();
        }
    }
    let tuple = crate::flags::reconstruct_tuple(&coords).map_err(err)?;
    let back = tuple_coordinates(&tuple, &Triangulation::Fan).map_err(err)?;
    ensure(back == coords, || format!("round trip differs, d = {d}, t = {t}"))?;
    ensure(is_positive_tuple(&tuple), || format!("tuple is not positive, d = {d}, t = {t}"))?;
    Ok(coords.count() as u64 + 1)
}

pub fn flip_positivity(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let tuple = tr.tuple(d, 4)?;
    let mut count = 0;
    for tri in [Triangulation::Fan, Triangulation::Edges(vec![(2, 4)])] {
        let c = tuple_coordinates(&tuple, &tri).map_err(err)?;
        ensure(c.all_positive(), || format!("{tri:?} coordinates not positive, d = {d}"))?;
        count += c.count() as u64;
    }
    Ok(count)
}

pub fn shearing_tnn(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 5);
    let tuple = tr.tuple(d, 4)?;
    let f = tuple.flags();
    let s = shearing_matrix(&f[0], &f[1], &f[2], &f[3]).map_err(err)?;
    ensure(s.is_diagonal(), || "shearing matrix not diagonal".into())?;
    ensure(s.is_totally_nonnegative().map_err(err)?, || format!("shearing matrix not TNN, d = {d}"))?;
    Ok(1)
}

// ---- tnn ----

pub fn tnn_shortcut(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 6);
    let m = sample::tnn_matrix(d, &mut tr.rng, &tr.opts.gen);
    let reduced = reduced_cone(&m, "m").map_err(err)?;
    let full = full_cone(&m, "m").map_err(err)?;
    ensure(reduced == full, || format!("reduced {reduced} vs full {full}"))?;
    Ok(1)
}

/// The example `[[1, 1, t], [0, 1, 1], [0, 0, 1]]`: not TNN, and its full
/// cone is strictly smaller than the consecutive one.
pub fn non_tnn_example(_: &mut Trial) -> TrialResult {
    let one = ValuedScalar::one;
    let zero = ValuedScalar::zero;
    ensure(ValuedScalar::t().val() == Some(Rational::from_int(-1)), || "v(t) != -1".into())?;
    let m = Matrix::from_rows(vec![
        vec![one(), one(), ValuedScalar::t()],
        vec![zero(), one(), one()],
        vec![zero(), zero(), one()],
    ])
    .map_err(err)?;
    let id = Marking::new(Matrix::identity(3)).map_err(err)?;
    let cone = intersect_apartments(&id, &Marking::new(m.clone()).map_err(err)?).map_err(err)?;
    let zero_r = || ExtRational::Finite(Rational::zero());
    let expect = crate::building::DifferenceCone::from_constraints(
        3,
        "m",
        [(1, 0, zero_r()), (2, 1, zero_r()), (2, 0, ExtRational::Finite(Rational::from_int(-1)))],
    );
    ensure(cone == expect, || format!("intersection {cone}"))?;
    ensure(full_cone(&m, "m").map_err(err)? == cone, || "full cone differs".into())?;
    let plus = consecutive_cone(&m, "m").map_err(err)?;
    ensure(cone.is_subset(&plus) && cone != plus, || format!("consecutive cone {plus}"))?;
    ensure(!m.is_totally_nonnegative().map_err(err)?, || "matrix reported TNN".into())?;
    ensure(reduced_cone(&m, "m").is_err(), || "reduced cone accepted a non-TNN matrix".into())?;
    Ok(6)
}

// ---- intersection ----

pub fn assignment(tr: &mut Trial) -> TrialResult {
    let d = tr.d(1, 6);
    let v = sample::valuation_matrix(d, &mut tr.rng);
    let fast = tropical_assignment(&v);
    let slow = brute_force_assignment(&v);
    ensure(fast == slow, || format!("hungarian {fast:?} vs enumeration {slow:?}"))?;
    Ok(1)
}

/// Two markings whose apartments usually meet: snake markings of a
/// positive triple, flag-pair apartments of a positive tuple, or a TNN
/// change of basis.
fn marking_pair(tr: &mut Trial) -> std::result::Result<(Marking, Marking), String> {
    let d = tr.d(2, 4);
    match tr.rng.gen_range(0..3) {
        0 => {
            let tuple = tr.tuple(d, 3)?;
            let f = tuple.flags();
            let snakes = Snake::all(d);
            let s1 = snakes.choose(&mut tr.rng).expect("snakes exist");
            let s2 = snakes.choose(&mut tr.rng).expect("snakes exist");
            let one = ValuedScalar::one();
            let b1 = snake_basis(&f[0], &f[1], &f[2], s1, &one).map_err(err)?;
            let b2 = snake_basis(&f[0], &f[1], &f[2], s2, &one).map_err(err)?;
            Ok((
                Marking::from_snake_basis(&b1).map_err(err)?.named(format!("{s1}")),
                Marking::from_snake_basis(&b2).map_err(err)?.named(format!("{s2}")),
            ))
        }
        1 => {
            let t = tr.d(4, 5);
            let tuple = tr.tuple(d, t)?;
            let mut idx: Vec<usize> = (1..=t).collect();
            idx.shuffle(&mut tr.rng);
            let a = flag_apartment(tuple.flag(idx[0]), tuple.flag(idx[1])).map_err(err)?;
            let b = flag_apartment(tuple.flag(idx[2]), tuple.flag(idx[3])).map_err(err)?;
            Ok((a.named("A1"), b.named("A2")))
        }
        _ => {
            let m1: ScalarMatrix = Matrix::from_fn(d, d, |i, j| {
                if i == j {
                    ValuedScalar::one()
                } else {
                    ValuedScalar::zero()
                }
            });
            let g = sample::tnn_matrix(d, &mut tr.rng, &tr.opts.gen);
            Ok((
                Marking::new(m1).map_err(err)?.named("id"),
                Marking::new(g).map_err(err)?.named("g"),
            ))
        }
    }
}

/// Cone membership against the norm-splitting criterion on sampled points.
pub fn pointwise_oracle(tr: &mut Trial) -> TrialResult {
    const POINTS: usize = 50;
    let (m1, m2) = marking_pair(tr)?;
    let cone = intersect_apartments(&m1, &m2).map_err(err)?;
    let d = m1.d();
    let center = cone
        .interior_point()
        .unwrap_or_else(|| vec![Rational::new(1, d as i64); d]);
    let oracle = NormSplitTest::new(&m1, &m2).map_err(err)?;
    for x in sample::points_near(&center, POINTS, &mut tr.rng) {
        let direct = oracle.contains(&x).map_err(err)?;
        ensure(direct == cone.contains(&x), || {
            format!("point {x:?}: oracle {direct}, cone {cone} ({} vs {})", m1.name, m2.name)
        })?;
    }
    if let Some(p) = cone.interior_point() {
        ensure(oracle.contains(&p).map_err(err)?, || {
            format!("cone point {p:?} rejected by the oracle")
        })?;
    }
    Ok(POINTS as u64)
}

pub fn intersection_symmetry(tr: &mut Trial) -> TrialResult {
    let (m1, m2) = marking_pair(tr)?;
    let forward = intersect_apartments(&m1, &m2).map_err(err)?;
    let backward = intersect_apartments(&m2, &m1).map_err(err)?;
    match intersection_transport(&m1, &m2).map_err(err)? {
        Some(w) => {
            let moved = forward.transport(&w, m2.name.clone());
            ensure(moved == backward, || format!("transported {moved} vs {backward}"))?;
        }
        None => ensure(forward.is_empty() && backward.is_empty(), || "one-sided emptiness".into())?,
    }
    Ok(1)
}

pub fn snake_apartments_meet(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let tuple = tr.tuple(d, 3)?;
    let f = tuple.flags();
    let snakes = Snake::all(d);
    let one = ValuedScalar::one();
    let s1 = snakes.choose(&mut tr.rng).expect("snakes exist");
    let s2 = snakes.choose(&mut tr.rng).expect("snakes exist");
    let m1 = Marking::from_snake_basis(&snake_basis(&f[0], &f[1], &f[2], s1, &one).map_err(err)?).map_err(err)?;
    let m2 = Marking::from_snake_basis(&snake_basis(&f[0], &f[1], &f[2], s2, &one).map_err(err)?).map_err(err)?;
    let g = change_of_basis(&m1, &m2).map_err(err)?;
    let cone = intersect_apartments(&m1, &m2).map_err(err)?;
    ensure(!cone.is_empty(), || format!("{s1} and {s2} do not meet, d = {d}"))?;
    let _ = g;
    Ok(1)
}

// ---- main ----

fn bottom_marking(
    e: &crate::flags::Flag,
    f: &crate::flags::Flag,
    g: &crate::flags::Flag,
    name: &str,
) -> std::result::Result<Marking, String> {
    Ok(snake_marking(e, f, g).map_err(err)?.named(name))
}

pub fn main_cones(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 5);
    let tuple = tr.tuple(d, 3)?;
    let f = tuple.flags();
    let (e, ff, g) = (&f[0], &f[1], &f[2]);
    let m_eg = bottom_marking(e, ff, g, "f_EG")?;
    let vals = ratio_valuations(&triple_ratios(e, ff, g).map_err(err)?).map_err(err)?;
    let c1 = cone_c1(d, &vals, "f_EG").map_err(err)?;
    let c2 = cone_c2(d, &vals, "f_EG").map_err(err)?;
    let p1 = intersect_apartments(&m_eg, &flag_apartment(e, ff).map_err(err)?).map_err(err)?;
    let p2 = intersect_apartments(&m_eg, &flag_apartment(ff, g).map_err(err)?).map_err(err)?;
    ensure(c1 == p1, || format!("first cone {c1} vs intersection {p1}, d = {d}"))?;
    ensure(c2 == p2, || format!("second cone {c2} vs intersection {p2}, d = {d}"))?;
    Ok(2)
}

pub fn triple_point(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 5);
    let tuple = sample::tuple(d, 3, &mut tr.rng, &GenOptions::constants(), None).map_err(err)?;
    let f = tuple.flags();
    let (e, ff, g) = (&f[0], &f[1], &f[2]);
    let vals = ratio_valuations(&triple_ratios(e, ff, g).map_err(err)?).map_err(err)?;
    ensure(vals.values().all(Rational::is_zero), || "nonzero valuation".into())?;
    let both = cone_c1(d, &vals, "f_EG").map_err(err)?.intersect(&cone_c2(d, &vals, "f_EG").map_err(err)?);
    ensure(both.is_single_point(), || format!("cones meet in {both}"))?;
    let m_eg = bottom_marking(e, ff, g, "f_EG")?;
    let p1 = intersect_apartments(&m_eg, &flag_apartment(e, ff).map_err(err)?).map_err(err)?;
    let p2 = intersect_apartments(&m_eg, &flag_apartment(ff, g).map_err(err)?).map_err(err)?;
    ensure(p1.intersect(&p2) == both, || "pipeline point differs".into())?;
    Ok(2)
}

// ---- shearing ----

pub fn shearing(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 5);
    let tuple = tr.tuple(d, 4)?;
    let f = tuple.flags();
    let (e, ff, g, h) = (&f[0], &f[1], &f[2], &f[3]);
    let formula = shearing_translation(e, ff, g, h).map_err(err)?;
    let from_f = bottom_marking(e, ff, g, "f_EG")?;
    let from_h = bottom_marking(e, h, g, "f'_EG")?;
    let direct = compare_markings(&from_h, &from_f).map_err(err)?;
    ensure(formula == direct, || format!("formula {formula:?} vs markings {direct:?}, d = {d}"))?;
    Ok(1)
}

// ---- monotonicity ----

pub fn monotonicity(tr: &mut Trial) -> TrialResult {
    let d = tr.d(2, 4);
    let t = tr.d(4, 6);
    let tuple = tr.tuple(d, t)?;
    ensure(is_positive_tuple(&tuple), || format!("tuple is not positive, d = {d}, t = {t}"))?;
    let [p1, p2, p3] = sample::separating_pairs(t, &mut tr.rng);
    let report = check_monotonicity(&tuple, p1, p2, p3).map_err(err)?;
    ensure(report.holds, || {
        format!(
            "{p1:?} {p2:?} {p3:?}: A1∩A3 = {} but A1∩A2∩A3 = {}",
            report.cone13, report.triple
        )
    })?;
    Ok(1)
}
