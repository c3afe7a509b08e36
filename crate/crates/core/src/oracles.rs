//! Brute-force verifiers that share no code path with the formulas they check:
//! Hilbert functions by evaluation-matrix rank over a prime field, Chow
//! coefficients by explicit Möbius transport, and fibre descriptions by
//! exact point sampling.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::chow::orbit_class_of_type;
use crate::configurations::{
    in_delta_bullet, in_orbit_closure, orbit_ideal_forms, set_partitions, type_of, SetPartition,
};
use crate::error::{Error, Result};
use crate::exact_geometry::{
    inv_mod, mobius_from_triples, mul_mod, pow_mod, Configuration, FpPoint, ProjPoint,
};
use crate::hilbert::generic_orbit_hilbert;
use crate::label::{range_labels, subsets_of_size, Label, LabelSet};
use crate::polynomials::MultilinearPoly;
use crate::sampling::{random_distinct_points, random_fp_mobius, random_mobius, random_point, rng};

/// Extra evaluation rows beyond the expected rank.
pub const SAMPLE_MARGIN: usize = 10;

/// Second prime used by the gating rank checks.
pub const SECOND_PRIME: u64 = 65537;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

fn evaluate_at(p: &MultilinearPoly, t: &[usize]) -> Result<BigInt> {
    let assignment: BTreeMap<Label, BigInt> = (1..=t.len() as u32)
        .map(Label)
        .zip(t.iter().map(|&v| v.into()))
        .collect();
    p.evaluate(&assignment)
}

/// Minimum number of orbit samples accepted for multidegree `t` on `n` points.
pub fn required_samples(n: usize, t: &[usize]) -> Result<usize> {
    let cols: usize = t.iter().map(|k| k + 1).product();
    let value: usize = evaluate_at(&generic_orbit_hilbert(n)?, t)?
        .try_into()
        .expect("small value");
    Ok(cols.min(value + SAMPLE_MARGIN))
}

fn reduce_configuration(x: &Configuration, p: u64) -> Result<Vec<FpPoint>> {
    let reduced: Vec<FpPoint> = x
        .points()
        .iter()
        .map(|q| q.reduce(p).ok_or(Error::BadReduction(p)))
        .collect::<Result<_>>()?;
    // coincidences must be preserved exactly
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if (x.get(i) == x.get(j)) != (reduced[i] == reduced[j]) {
                return Err(Error::BadReduction(p));
            }
        }
    }
    Ok(reduced)
}

/// Rank of an `F_p` matrix, by row reduction in place.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][c], p);
        for e in rows[rank].iter_mut() {
            *e = mul_mod(*e, inv, p);
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (e, q) in row.iter_mut().zip(&pivot) {
                *e = (*e + p - mul_mod(f, *q, p)) % p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Dimension of the degree-`t` part of the coordinate ring of the orbit
/// closure of `x`, as the rank over `F_prime` of the matrix evaluating all
/// monomials of multidegree `t` at `samples` random translates of `x`.
pub fn hilbert_function_rank(
    x: &Configuration,
    t: &[usize],
    prime: u64,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    if t.len() != x.len() {
        return Err(Error::OutOfRange(format!(
            "multidegree has {} entries for {} points",
            t.len(),
            x.len()
        )));
    }
    let needed = required_samples(x.len(), t)?;
    if samples < needed {
        return Err(Error::InsufficientSamples {
            got: samples,
            needed,
        });
    }
    let xbar = reduce_configuration(x, prime)?;
    let mut r = rng(seed);
    // exponent of a_i in each column; b_i gets the rest
    let mut columns: Vec<Vec<usize>> = vec![vec![]];
    for &ti in t {
        columns = columns
            .into_iter()
            .flat_map(|c| {
                (0..=ti).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    let rows: Vec<Vec<u64>> = (0..samples)
        .map(|_| {
            let g = random_fp_mobius(&mut r, prime);
            let pts: Vec<FpPoint> = xbar.iter().map(|q| g.apply(q)).collect();
            // powers[i][k] = a_i^k b_i^(t_i - k)
            let powers: Vec<Vec<u64>> = pts
                .iter()
                .zip(t)
                .map(|(q, &ti)| {
                    (0..=ti)
                        .map(|k| {
                            mul_mod(
                                pow_mod(q.a, k as u64, prime),
                                pow_mod(q.b, (ti - k) as u64, prime),
                                prime,
                            )
                        })
                        .collect()
                })
                .collect();
            columns
                .iter()
                .map(|c| {
                    c.iter()
                        .enumerate()
                        .fold(1u64, |acc, (i, &k)| mul_mod(acc, powers[i][k], prime))
                })
                .collect()
        })
        .collect();
    Ok(rank_mod_p(rows, prime))
}

/// Convenience wrapper using the default sample count for `t`.
pub fn hilbert_function_rank_default(
    x: &Configuration,
    t: &[usize],
    prime: u64,
    seed: u64,
) -> Result<usize> {
    hilbert_function_rank(x, t, prime, required_samples(x.len(), t)?, seed)
}

/// 1 if `x` restricted to the 3-subset `i` is pairwise distinct, so that a
/// unique Möbius map carries it onto `y` restricted to `i`; 0 otherwise.
pub fn unique_transport_count(x: &Configuration, y: &Configuration, i: &LabelSet) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::OutOfRange("configurations differ in length".into()));
    }
    if !y.is_generic() {
        return Err(Error::CoincidentPoints);
    }
    if type_of(x).num_parts() < 3 {
        return Err(Error::TooDegenerateType);
    }
    if i.len() != 3 {
        return Err(Error::OutOfRange(format!("{} labels (need 3)", i.len())));
    }
    let idx: Vec<usize> = i.iter().map(|l| l.0 as usize - 1).collect();
    if let Some(&bad) = idx.iter().find(|&&k| k >= x.len()) {
        return Err(Error::MissingLabel(Label(bad as u32 + 1)));
    }
    let src: [ProjPoint; 3] = std::array::from_fn(|k| x.get(idx[k]).clone());
    let dst: [ProjPoint; 3] = std::array::from_fn(|k| y.get(idx[k]).clone());
    match mobius_from_triples(&src, &dst) {
        Ok(g) => {
            debug_assert!((0..3).all(|k| g.apply(&src[k]) == dst[k]));
            Ok(1)
        }
        Err(Error::CoincidentPoints) => Ok(0),
        Err(e) => Err(e),
    }
}

/// Whether `z` lies in the orbit of the generic configuration `x`, decided by
/// transporting the first three points.
fn in_orbit(x: &Configuration, z: &Configuration) -> bool {
    if !z.is_generic() {
        return false;
    }
    let src: [ProjPoint; 3] = std::array::from_fn(|k| x.get(k).clone());
    let dst: [ProjPoint; 3] = std::array::from_fn(|k| z.get(k).clone());
    let g = mobius_from_triples(&src, &dst).expect("distinct triples");
    g.apply_all(x) == *z
}

fn all_equal<'a>(mut it: impl Iterator<Item = &'a ProjPoint>) -> bool {
    match it.next() {
        Some(first) => it.all(|p| p == first),
        None => true,
    }
}

/// A random point different from every point in `avoid`.
fn random_point_avoiding<R: Rng>(rng: &mut R, avoid: &[&ProjPoint]) -> ProjPoint {
    loop {
        let p = random_point(rng);
        if !avoid.contains(&&p) {
            return p;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DegenerationReport {
    pub n: usize,
    pub i: usize,
    /// Points of `Z_i'`: every form must vanish.
    pub z_prime: Tally,
    /// Points of `Z_i''`: every form must vanish.
    pub z_double_prime: Tally,
    /// Points of the intersection diagonal: every form must vanish.
    pub intersection: Tally,
    /// Points off `Z_i' ∪ Z_i''`: some form must not vanish.
    pub off_union: Tally,
    pub false_negatives: usize,
    pub false_positives: usize,
}

impl DegenerationReport {
    pub fn passed(&self) -> bool {
        self.false_negatives == 0 && self.false_positives == 0
    }
}

/// Samples the special fibre at `t = x_i` of the family of orbit closures of
/// `(x', t)`, where `x'` drops the last point of `x`. Membership in the fibre
/// is tested with the 4-subset forms of `(x', x_i)`; membership in
/// `Z_i' ∪ Z_i''` is decided independently by transport and coordinate equalities.
pub fn degeneration_fiber_check(
    n: usize,
    x: &Configuration,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<DegenerationReport> {
    if n < 4 || i == 0 || i >= n || x.len() != n {
        return Err(Error::IndexOutOfRange(format!(
            "n = {n}, i = {i}, {} points",
            x.len()
        )));
    }
    if !x.is_generic() {
        return Err(Error::CoincidentPoints);
    }
    let (ci, cn) = (i - 1, n - 1);
    let xp = x.project(&(0..n - 1).collect::<Vec<_>>());
    let mut special: Vec<ProjPoint> = xp.points().to_vec();
    special.push(x.get(ci).clone());
    let forms = orbit_ideal_forms(&Configuration::new(special))?;
    let on_fibre = |z: &Configuration| {
        forms.iter().all(|(subset, f)| {
            let idx: Vec<usize> = subset.iter().map(|l| l.0 as usize - 1).collect();
            f.vanishes_at(&z.project(&idx))
        })
    };
    let others: Vec<usize> = (0..n - 1).filter(|&j| j != ci).collect();
    let in_z_double_prime = |z: &Configuration| all_equal(others.iter().map(|&j| z.get(j)));
    let in_z_prime = |z: &Configuration| {
        if z.get(ci) != z.get(cn) {
            return false;
        }
        let zp = z.project(&(0..n - 1).collect::<Vec<_>>());
        in_delta_bullet(&zp) || in_orbit(&xp, &zp)
    };
    let in_union = |z: &Configuration| in_z_prime(z) || in_z_double_prime(z);

    let mut r = rng(seed);
    let mut report = DegenerationReport {
        n,
        i,
        ..Default::default()
    };
    let tally_on = |report: &mut DegenerationReport,
                    which: fn(&mut DegenerationReport) -> &mut Tally,
                    z: &Configuration| {
        let ok = on_fibre(z);
        which(report).record(ok);
        if !ok {
            report.false_negatives += 1;
        }
    };

    let z_prime_point = |r: &mut crate::sampling::SeededRng| {
        let mut pts: Vec<ProjPoint> = if r.gen_ratio(1, 4) {
            // a point of Delta_bullet inside X^{n-1}
            let common = random_point(r);
            let mut v = vec![common; n - 1];
            v[r.gen_range(0..n - 1)] = random_point(r);
            v
        } else {
            random_mobius(r).apply_all(&xp).points().to_vec()
        };
        pts.push(pts[ci].clone());
        Configuration::new(pts)
    };
    let z_double_prime_point = |r: &mut crate::sampling::SeededRng| {
        let common = random_point(r);
        let mut pts = vec![common; n];
        pts[ci] = random_point(r);
        pts[cn] = random_point(r);
        Configuration::new(pts)
    };

    for _ in 0..samples {
        let z = z_prime_point(&mut r);
        debug_assert!(in_z_prime(&z));
        tally_on(&mut report, |rep| &mut rep.z_prime, &z);
    }
    for _ in 0..samples {
        let z = z_double_prime_point(&mut r);
        tally_on(&mut report, |rep| &mut rep.z_double_prime, &z);
    }
    for _ in 0..samples {
        let common = random_point(&mut r);
        let mut pts = vec![common; n];
        let v = random_point(&mut r);
        pts[ci] = v.clone();
        pts[cn] = v;
        tally_on(
            &mut report,
            |rep| &mut rep.intersection,
            &Configuration::new(pts),
        );
    }

    let mut off = 0;
    while off < samples {
        let z = match off % 3 {
            0 => Configuration::new((0..n).map(|_| random_point(&mut r)).collect()),
            // near misses: move one coordinate of a point on the union
            1 => {
                let base = z_prime_point(&mut r);
                let k = r.gen_range(0..n);
                let mut pts = base.points().to_vec();
                pts[k] = random_point_avoiding(&mut r, &[base.get(k)]);
                Configuration::new(pts)
            }
            _ => {
                let base = z_double_prime_point(&mut r);
                let k = others[r.gen_range(0..others.len())];
                let mut pts = base.points().to_vec();
                pts[k] = random_point_avoiding(&mut r, &[base.get(k)]);
                Configuration::new(pts)
            }
        };
        if in_union(&z) {
            // landed on the union after all; count it as an on-fibre sample
            let ok = on_fibre(&z);
            if !ok {
                report.false_negatives += 1;
            }
            continue;
        }
        let violated = !on_fibre(&z);
        report.off_union.record(violated);
        if !violated {
            report.false_positives += 1;
        }
        off += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub n: usize,
    /// Samples of `Delta_i` per free coordinate `i`; each must be in the closure.
    pub delta: BTreeMap<usize, Tally>,
    /// Generic points outside the orbit; each must be rejected.
    pub off_orbit: Tally,
    pub false_negatives: usize,
    pub false_positives: usize,
}

impl BoundaryReport {
    pub fn passed(&self) -> bool {
        self.false_negatives == 0 && self.false_positives == 0
    }
}

/// Checks that the orbit closure of the generic `x` contains every `Delta_i`
/// and excludes generic configurations outside the orbit.
pub fn boundary_membership_check(
    x: &Configuration,
    samples: usize,
    seed: u64,
) -> Result<BoundaryReport> {
    let n = x.len();
    if n < 4 {
        return Err(Error::TooFewMarkings(n));
    }
    if !x.is_generic() {
        return Err(Error::CoincidentPoints);
    }
    let mut r = rng(seed);
    let mut report = BoundaryReport {
        n,
        ..Default::default()
    };
    for i in 0..n {
        let tally = report.delta.entry(i + 1).or_default();
        for _ in 0..samples {
            let common = random_point(&mut r);
            let mut pts = vec![common; n];
            pts[i] = random_point(&mut r);
            let ok = in_orbit_closure(x, &Configuration::new(pts))?;
            tally.record(ok);
            if !ok {
                report.false_negatives += 1;
            }
        }
    }
    let mut done = 0;
    while done < samples {
        let z = if done % 2 == 0 {
            Configuration::new(random_distinct_points(&mut r, n))
        } else {
            // a translate of x with one point moved
            let mut pts = random_mobius(&mut r).apply_all(x).points().to_vec();
            let k = r.gen_range(0..n);
            let avoid: Vec<ProjPoint> = pts.clone();
            pts[k] = random_point_avoiding(&mut r, &avoid.iter().collect::<Vec<_>>());
            Configuration::new(pts)
        };
        if in_orbit(x, &z) {
            continue;
        }
        let rejected = !in_orbit_closure(x, &z)?;
        report.off_orbit.record(rejected);
        if !rejected {
            report.false_positives += 1;
        }
        done += 1;
    }
    Ok(report)
}

/// A configuration of type `p` with random distinct values on the parts.
pub fn random_configuration_of_type<R: Rng>(p: &SetPartition, rng: &mut R) -> Configuration {
    let n = p.ground_set().len();
    let values = random_distinct_points(rng, p.num_parts());
    let pts = (1..=n as u32)
        .map(|l| values[p.part_of(Label(l)).expect("partition of 1..=n")].clone())
        .collect();
    Configuration::new(pts)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HilbertAgreement {
    pub n: usize,
    pub prime: u64,
    pub seed: u64,
    /// Each entry: multidegree, oracle rank, polynomial value.
    pub comparisons: Vec<(Vec<usize>, usize, u64)>,
    pub matched: usize,
    pub mismatched: usize,
}

/// Rank oracle against the generic polynomial on every multidegree with
/// entries in `{1, 2}`, for a random generic configuration.
pub fn hilbert_agreement_check(n: usize, prime: u64, seed: u64) -> Result<HilbertAgreement> {
    if n < 3 {
        return Err(Error::TooFewMarkings(n));
    }
    let poly = generic_orbit_hilbert(n)?;
    let mut r = rng(seed);
    let x = loop {
        let x = Configuration::new(random_distinct_points(&mut r, n));
        if reduce_configuration(&x, prime).is_ok() {
            break x;
        }
    };
    let mut out = HilbertAgreement {
        n,
        prime,
        seed,
        ..Default::default()
    };
    for code in 0..1usize << n {
        let t: Vec<usize> = (0..n).map(|k| 1 + (code >> k & 1)).collect();
        let rank = hilbert_function_rank_default(&x, &t, prime, seed.wrapping_add(code as u64))?;
        let value: u64 = evaluate_at(&poly, &t)?.try_into().expect("small value");
        if rank as u64 == value {
            out.matched += 1;
        } else {
            out.mismatched += 1;
        }
        out.comparisons.push((t, rank, value));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChowAgreement {
    pub n: usize,
    pub partitions: usize,
    pub coefficients: usize,
    pub mismatched: usize,
}

/// Transport counts against the coefficients of `orbit_class_of_type`, for
/// every set partition of `1..=n` with at least three parts.
pub fn chow_agreement_check(n: usize, seed: u64) -> Result<ChowAgreement> {
    let labels = range_labels(n);
    let mut r = rng(seed);
    let mut out = ChowAgreement {
        n,
        ..Default::default()
    };
    for p in set_partitions(&labels) {
        if p.num_parts() < 3 {
            continue;
        }
        out.partitions += 1;
        let class = orbit_class_of_type(&p)?;
        let x = random_configuration_of_type(&p, &mut r);
        let y = Configuration::new(random_distinct_points(&mut r, n));
        for i in subsets_of_size(&labels, 3) {
            out.coefficients += 1;
            if unique_transport_count(&x, &y, &i)? as i64 != class.coefficient(&i) {
                out.mismatched += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::DEFAULT_PRIME;

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    #[test]
    fn rank_examples() {
        let x = cfg("0,1,inf,2");
        assert_eq!(
            hilbert_function_rank_default(&x, &[1, 1, 1, 1], DEFAULT_PRIME, 1).unwrap(),
            15
        );
        let x = cfg("0,1,inf,2,3");
        assert_eq!(
            hilbert_function_rank_default(&x, &[1; 5], DEFAULT_PRIME, 2).unwrap(),
            26
        );
        let x = cfg("0,1,inf");
        assert_eq!(
            hilbert_function_rank_default(&x, &[2, 2, 2], DEFAULT_PRIME, 3).unwrap(),
            27
        );
    }

    #[test]
    fn rank_errors() {
        let x = cfg("0,1,inf,2");
        assert_eq!(
            hilbert_function_rank(&x, &[1, 1, 1, 1], DEFAULT_PRIME, 5, 0),
            Err(Error::InsufficientSamples { got: 5, needed: 16 })
        );
        // 3 and 3 + 7 collide mod 7
        let x = cfg("0,1,3,10");
        assert_eq!(
            hilbert_function_rank(&x, &[1, 1, 1, 1], 7, 30, 0),
            Err(Error::BadReduction(7))
        );
    }

    #[test]
    fn rank_of_degenerate_type_matches_pushed_polynomial() {
        use crate::hilbert::push_hilbert_along_partition;
        let p: SetPartition = "1,2|3|4|5".parse().unwrap();
        let x = random_configuration_of_type(&p, &mut rng(4));
        let q = push_hilbert_along_partition(&generic_orbit_hilbert(4).unwrap(), &p).unwrap();
        for t in [[1, 1, 1, 1, 1], [2, 1, 1, 2, 1], [1, 2, 2, 1, 1]] {
            let value: usize = evaluate_at(&q, &t).unwrap().try_into().unwrap();
            assert_eq!(
                hilbert_function_rank_default(&x, &t, DEFAULT_PRIME, 9).unwrap(),
                value,
                "{t:?}"
            );
        }
    }

    #[test]
    fn transport_examples() {
        let y = cfg("0,1,inf,2,5");
        let x = cfg("3,4,7,1/2,9");
        let i: LabelSet = [1, 2, 3].map(Label).into();
        assert_eq!(unique_transport_count(&x, &y, &i).unwrap(), 1);
        let x = cfg("3,3,7,1/2,9");
        assert_eq!(unique_transport_count(&x, &y, &i).unwrap(), 0);
        let x = cfg("3,3,3,3,9");
        assert_eq!(
            unique_transport_count(&x, &y, &i),
            Err(Error::TooDegenerateType)
        );
    }

    #[test]
    fn chow_agreement_small() {
        for n in 3..=5 {
            assert_eq!(chow_agreement_check(n, 1).unwrap().mismatched, 0);
        }
    }

    #[test]
    fn degeneration_examples() {
        let rep = degeneration_fiber_check(5, &cfg("0,1,inf,2,3"), 2, 50, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.off_union.passed, 50);
        let rep = degeneration_fiber_check(4, &cfg("0,1,inf,2"), 1, 50, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(degeneration_fiber_check(4, &cfg("0,1,inf,2"), 4, 10, 0).is_err());
    }

    #[test]
    fn boundary_examples() {
        let rep = boundary_membership_check(&cfg("0,1,inf,2"), 30, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.delta[&3].passed, 30);
        let rep = boundary_membership_check(&cfg("0,1,inf,2,3"), 30, 2).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
