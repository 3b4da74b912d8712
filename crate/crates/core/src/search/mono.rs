use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::engine::{compile, Outcome, Problem};
use super::{SearchConfig, SearchResult, SearchWitness};
use crate::colourings::{Colour, Colouring};
use crate::error::{Error, Result};
use crate::matgen::{f_truncation, mt_rows, shift_columns, stack, translate_system};
use crate::ratcore::{image, rat_vec, FiniteMatrix, ImageSet, Rat};
use crate::seqs::{fs_image, mt_image, rationally_proportional, translated_mt_image, CompressedSeq};

fn colour_label(col: &Colouring) -> impl Fn(i128) -> Option<Colour> + Sync + '_ {
    move |v| col.colour(&BigInt::from(v)).ok()
}

fn run_colour_search(
    a: &FiniteMatrix,
    col: &Colouring,
    bounds: Vec<(u64, u64)>,
    groups: Vec<Option<usize>>,
    cfg: &SearchConfig,
) -> Result<SearchResult<(Vec<u64>, Colour)>> {
    if a.row_count() == 0 {
        return Err(Error::InvalidParameter("matrix has no rows".into()));
    }
    let compiled = compile(a)?;
    let label = colour_label(col);
    let problem = Problem { compiled: &compiled, bounds, groups, distinct_image: cfg.distinct_image, label: &label };
    let (outcome, nodes) = problem.solve(cfg.threads, cfg.node_budget)?;
    Ok(SearchResult {
        outcome: outcome.map(|(x, c)| (x, c.expect("rows exist, so a colour was recorded"))),
        nodes_explored: nodes,
    })
}

fn uniform(cfg: &SearchConfig, n: usize, group: usize) -> (Vec<(u64, u64)>, Vec<Option<usize>>) {
    (
        vec![(cfg.min_entry, cfg.variable_bound); n],
        vec![cfg.distinct_entries.then_some(group); n],
    )
}

/// The lexicographically least `x` with entries in `[minEntry, variableBound]`
/// making every entry of `A·x` a positive integer of one colour.
pub fn find_monochromatic(a: &FiniteMatrix, col: &Colouring, cfg: &SearchConfig) -> Result<SearchResult<SearchWitness>> {
    cfg.validate()?;
    let (bounds, groups) = uniform(cfg, a.width(), 0);
    let res = run_colour_search(a, col, bounds, groups, cfg)?;
    let outcome = match res.outcome {
        Outcome::Found((x, colour)) => {
            let image = image(a, &rat_vec(&x))?;
            Outcome::Found(SearchWitness { assignment: x, image, colour })
        }
        Outcome::Exhausted => Outcome::Exhausted,
        Outcome::BudgetHit => Outcome::BudgetHit,
    };
    Ok(SearchResult { outcome, nodes_explored: res.nodes_explored })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeparationWitness {
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub image_a: ImageSet,
    pub image_b: ImageSet,
    pub colour: Colour,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationOutcome {
    /// `a = ratio·b`, so the sequences cannot be separated at all.
    Proportional(Rat),
    Found(SeparationWitness),
    NoneWithinBounds,
    BudgetHit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationResult {
    pub outcome: SeparationOutcome,
    pub nodes_explored: u64,
}

/// Looks for `x, y` of length `prefix_len` with entries in the configured range
/// such that `MT(a, x) ∪ MT(b, y)` is monochromatic. `x` and `y` are each kept
/// free of repeated entries when `distinct_entries` is set.
pub fn check_separation(
    col: &Colouring,
    a: &CompressedSeq,
    b: &CompressedSeq,
    prefix_len: usize,
    cfg: &SearchConfig,
) -> Result<SeparationResult> {
    cfg.validate()?;
    if let Some(r) = rationally_proportional(a, b) {
        return Ok(SeparationResult { outcome: SeparationOutcome::Proportional(r), nodes_explored: 0 });
    }
    let needed = a.len().max(b.len());
    if prefix_len < needed {
        return Err(Error::WidthTooSmall { needed, width: prefix_len });
    }
    let m = stack(
        &mt_rows(a, prefix_len, usize::MAX),
        &shift_columns(&mt_rows(b, prefix_len, usize::MAX), prefix_len),
    );
    let (mut bounds, mut groups) = uniform(cfg, prefix_len, 0);
    let (b2, g2) = uniform(cfg, prefix_len, 1);
    bounds.extend(b2);
    groups.extend(g2);
    let res = run_colour_search(&m, col, bounds, groups, cfg)?;
    let outcome = match res.outcome {
        Outcome::Found((v, colour)) => {
            let (x, y) = v.split_at(prefix_len);
            SeparationOutcome::Found(SeparationWitness {
                image_a: mt_image(a, x),
                image_b: mt_image(b, y),
                x: x.to_vec(),
                y: y.to_vec(),
                colour,
            })
        }
        Outcome::Exhausted => SeparationOutcome::NoneWithinBounds,
        Outcome::BudgetHit => SeparationOutcome::BudgetHit,
    };
    Ok(SeparationResult { outcome, nodes_explored: res.nodes_explored })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TranslateWitness {
    pub b: u64,
    pub x: Vec<u64>,
    pub fs_image: ImageSet,
    pub translated_image: ImageSet,
    pub colour: Colour,
}

/// The least `(b, x)` with `b ≤ b_bound`, `x` of length `prefix_len` in the
/// configured range, and `FS(x) ∪ (b + MT(a, x))` monochromatic.
/// Distinctness, when configured, applies to the entries of `x` only.
pub fn translate_witness(
    col: &Colouring,
    a: &CompressedSeq,
    prefix_len: usize,
    b_bound: u64,
    cfg: &SearchConfig,
) -> Result<SearchResult<TranslateWitness>> {
    cfg.validate()?;
    if b_bound == 0 {
        return Err(Error::InvalidParameter("b bound must be positive".into()));
    }
    if prefix_len < a.len() {
        return Err(Error::WidthTooSmall { needed: a.len(), width: prefix_len });
    }
    let m = translate_system(&[mt_rows(a, prefix_len, usize::MAX)], &f_truncation(prefix_len)?);
    let (mut bounds, mut groups) = (vec![(1, b_bound)], vec![None]);
    let (bx, gx) = uniform(cfg, prefix_len, 0);
    bounds.extend(bx);
    groups.extend(gx);
    let res = run_colour_search(&m, col, bounds, groups, cfg)?;
    let outcome = match res.outcome {
        Outcome::Found((v, colour)) => {
            let (b, x) = (v[0], v[1..].to_vec());
            Outcome::Found(TranslateWitness {
                fs_image: fs_image(&x),
                translated_image: translated_mt_image(b, a, &x)?,
                b,
                x,
                colour,
            })
        }
        Outcome::Exhausted => Outcome::Exhausted,
        Outcome::BudgetHit => Outcome::BudgetHit,
    };
    Ok(SearchResult { outcome, nodes_explored: res.nodes_explored })
}

/// The least `y` in the configured range with `Im(B·y) ⊆ Im(A·x)`.
pub fn dominates_on(a: &FiniteMatrix, b: &FiniteMatrix, x: &[Rat], cfg: &SearchConfig) -> Result<SearchResult<Vec<u64>>> {
    cfg.validate()?;
    let target = image(a, x)?;
    if !target.all_positive_integers() {
        return Err(Error::NotPositiveInteger("image of A at x".into()));
    }
    if b.row_count() == 0 {
        return Err(Error::InvalidParameter("matrix has no rows".into()));
    }
    let compiled = compile(b)?;
    let label = |v: i128| target.contains(&Rat::from(v)).then_some(());
    let (bounds, groups) = uniform(cfg, b.width(), 0);
    let problem = Problem { compiled: &compiled, bounds, groups, distinct_image: cfg.distinct_image, label: &label };
    let (outcome, nodes) = problem.solve(cfg.threads, cfg.node_budget)?;
    Ok(SearchResult { outcome: outcome.map(|(y, _)| y), nodes_explored: nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgen::{band_matrix, f_prime_rows};
    use crate::ratcore::{apply, FiniteMatrix};
    use proptest::prelude::*;

    fn seq(t: &[i64]) -> CompressedSeq {
        CompressedSeq::new(t.to_vec()).unwrap()
    }

    fn schur() -> FiniteMatrix {
        f_truncation(2).unwrap()
    }

    fn ints(im: &ImageSet) -> Vec<i64> {
        im.iter().map(|v| v.to_i64().unwrap()).collect()
    }

    /// Independent check: evaluate naively and compare colours.
    fn verify(a: &FiniteMatrix, col: &Colouring, w: &SearchWitness) {
        let vals = apply(a, &rat_vec(&w.assignment)).unwrap();
        for v in vals {
            assert!(v.is_positive_integer());
            assert_eq!(col.colour(&v.to_integer().unwrap()).unwrap(), w.colour);
        }
    }

    /// Every assignment in lexicographic order; the first monochromatic one.
    fn brute(a: &FiniteMatrix, col: &Colouring, lo: u64, hi: u64, distinct: bool) -> Option<Vec<u64>> {
        let w = a.width();
        let mut x = vec![lo; w];
        loop {
            let ok_distinct = !distinct || (0..w).all(|i| (0..i).all(|j| x[i] != x[j]));
            if ok_distinct {
                let vals = apply(a, &rat_vec(&x)).unwrap();
                if vals.iter().all(Rat::is_positive_integer) {
                    let cs: Vec<Colour> = vals.iter().map(|v| col.colour(&v.to_integer().unwrap()).unwrap()).collect();
                    if cs.windows(2).all(|p| p[0] == p[1]) {
                        return Some(x);
                    }
                }
            }
            let mut i = w;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if x[i] < hi {
                    x[i] += 1;
                    for j in i + 1..w {
                        x[j] = lo;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn schur_mod_two() {
        let col = Colouring::modulus(2).unwrap();
        let r = find_monochromatic(&schur(), &col, &SearchConfig::new(10).distinct(true)).unwrap();
        let w = r.witness().unwrap();
        assert_eq!(w.assignment, vec![2, 4]);
        assert_eq!(ints(&w.image), vec![2, 4, 6]);
        assert_eq!(w.colour, Colour::Residue(0));
        verify(&schur(), &col, w);
        let r = find_monochromatic(&schur(), &col, &SearchConfig::new(10)).unwrap();
        assert_eq!(r.witness().unwrap().assignment, vec![2, 2]);
    }

    #[test]
    fn one_colour_palette_takes_least_assignment() {
        let col: Colouring = "table:0".parse().unwrap();
        let a = FiniteMatrix::from_dense(&[&[1i64, 1, 0][..], &[0, 2, 1]]).unwrap();
        let r = find_monochromatic(&a, &col, &SearchConfig::new(5)).unwrap();
        assert_eq!(r.witness().unwrap().assignment, vec![1, 1, 1]);
        assert_eq!(r.nodes_explored, 3);
    }

    #[test]
    fn impossible_rows_exhaust() {
        let col = Colouring::modulus(2).unwrap();
        let a = FiniteMatrix::from_dense(&[&[1i64, -1][..]]).unwrap();
        let r = find_monochromatic(&a, &col, &SearchConfig::new(4).distinct(false)).unwrap();
        // x0 - x1 > 0 first at (2,1)
        assert_eq!(r.witness().unwrap().assignment, vec![2, 1]);
        let a = FiniteMatrix::from_dense(&[&[1i64, 0][..], &[0, 0]]).unwrap();
        let r = find_monochromatic(&a, &col, &SearchConfig::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::Exhausted);
        let a = FiniteMatrix::from_dense(&[&[-1i64][..]]).unwrap();
        let r = find_monochromatic(&a, &col, &SearchConfig::new(4)).unwrap();
        assert_eq!((r.outcome, r.nodes_explored), (Outcome::Exhausted, 4));
    }

    #[test]
    fn budget_is_reported() {
        let col = Colouring::modulus(2).unwrap();
        let a = FiniteMatrix::from_dense(&[&[1i64, -1][..]]).unwrap();
        let a = stack(&a, &FiniteMatrix::from_dense(&[&[-1i64, 1][..]]).unwrap());
        for threads in [1, 4] {
            let r = find_monochromatic(&a, &col, &SearchConfig::new(50).budget(100).threads(threads)).unwrap();
            assert_eq!((r.outcome, r.nodes_explored), (Outcome::BudgetHit, 100));
            let r = find_monochromatic(&a, &col, &SearchConfig::new(10).threads(threads)).unwrap();
            assert_eq!((r.outcome, r.nodes_explored), (Outcome::Exhausted, 110));
        }
    }

    #[test]
    fn rational_rows() {
        let col = Colouring::modulus(3).unwrap();
        let half = Rat::new(1, 2).unwrap();
        let a = FiniteMatrix::new(
            2,
            vec![
                crate::ratcore::SparseRow::from_entries([(0, half.clone())]),
                crate::ratcore::SparseRow::from_entries([(0, half), (1, Rat::one())]),
            ],
        )
        .unwrap();
        let r = find_monochromatic(&a, &col, &SearchConfig::new(12)).unwrap();
        let w = r.witness().unwrap();
        verify(&a, &col, w);
        assert_eq!(Some(w.assignment.clone()), brute(&a, &col, 1, 12, false));
    }

    #[test]
    fn band_over_f_prime_is_recorded() {
        let m = stack(&band_matrix(&[1, 2, 1], 2, 4).unwrap(), &f_prime_rows(4, usize::MAX));
        let col = Colouring::extending_f(5).unwrap();
        let r = find_monochromatic(&m, &col, &SearchConfig::new(30).budget(200_000)).unwrap();
        if let Some(w) = r.witness() {
            verify(&m, &col, w);
        }
    }

    #[test]
    fn separation_examples() {
        let cfg = SearchConfig::new(20).distinct(true);
        let r = check_separation(&Colouring::modulus(2).unwrap(), &seq(&[1, 2]), &seq(&[2, 4]), 2, &cfg).unwrap();
        assert_eq!(r.outcome, SeparationOutcome::Proportional(Rat::new(1, 2).unwrap()));
        let one: Colouring = "table:0".parse().unwrap();
        let r = check_separation(&one, &seq(&[1]), &seq(&[2, 1]), 2, &cfg).unwrap();
        let SeparationOutcome::Found(w) = r.outcome else { panic!("expected witness") };
        assert_eq!((w.x, w.y), (vec![1, 2], vec![1, 2]));
        // small values all share the reserved colour
        let nr = Colouring::notrapid(7, &[1, 2]).unwrap();
        let r = check_separation(&nr, &seq(&[1]), &seq(&[2, 1]), 3, &cfg).unwrap();
        let SeparationOutcome::Found(w) = r.outcome else { panic!("expected witness") };
        assert_eq!(w.colour, Colour::Reserved);
        assert!(check_separation(&one, &seq(&[1]), &seq(&[2, 1]), 1, &cfg).is_err());
    }

    #[test]
    fn separation_above_reserved_class() {
        // entries beyond p^4 with a tiny range: nothing monochromatic
        let nr = Colouring::notrapid(7, &[1, 2]).unwrap();
        let cfg = SearchConfig::new(2460).min_entry(2402).distinct(true);
        let r = check_separation(&nr, &seq(&[1]), &seq(&[2, 1]), 2, &cfg).unwrap();
        assert_eq!(r.outcome, SeparationOutcome::NoneWithinBounds);
    }

    #[test]
    fn translate_examples() {
        let cfg = SearchConfig::new(10).distinct(true);
        for threads in [1, 2, 8] {
            let r = translate_witness(&Colouring::modulus(2).unwrap(), &seq(&[2, 1]), 2, 10, &cfg.clone().threads(threads)).unwrap();
            let w = r.witness().unwrap();
            assert_eq!((w.b, w.x.clone()), (2, vec![2, 4]));
            assert_eq!(ints(&w.fs_image), vec![2, 4, 6]);
            assert_eq!(ints(&w.translated_image), vec![10]);
        }
        let one: Colouring = "table:0".parse().unwrap();
        let r = translate_witness(&one, &seq(&[2, 1]), 3, 5, &cfg).unwrap();
        let w = r.witness().unwrap();
        assert_eq!((w.b, w.x.clone()), (1, vec![1, 2, 3]));
        let r = translate_witness(&Colouring::alpha(&Rat::from(2)).unwrap(), &seq(&[2, 1]), 2, 8, &cfg).unwrap();
        if let Some(w) = r.witness() {
            let col = Colouring::alpha(&Rat::from(2)).unwrap();
            for v in w.fs_image.iter().chain(w.translated_image.iter()) {
                assert_eq!(col.colour(&v.to_integer().unwrap()).unwrap(), w.colour);
            }
        }
    }

    #[test]
    fn domination_examples() {
        let f5 = f_truncation(5).unwrap();
        let x = rat_vec(&[1i64, 4, 16, 64, 256]);
        let b = stack(&schur(), &FiniteMatrix::from_dense(&[&[1i64, 2][..]]).unwrap());
        let r = dominates_on(&f5, &b, &x, &SearchConfig::new(341)).unwrap();
        assert_eq!(r.outcome, Outcome::Exhausted);
        // identity domination
        let x = rat_vec(&[3i64, 5]);
        let r = dominates_on(&schur(), &schur(), &x, &SearchConfig::new(10)).unwrap();
        let y = r.witness().unwrap();
        let target = image(&schur(), &x).unwrap();
        assert!(image(&schur(), &rat_vec(y)).unwrap().is_subset(&target));
        assert!(y <= &vec![3, 5]);
        // single-value image: y = (a, 2a)
        let single = FiniteMatrix::from_dense(&[&[1i64, 0][..], &[3, -1], &[5, -2]]).unwrap();
        let a1 = FiniteMatrix::from_dense(&[&[1i64][..]]).unwrap();
        for a in [1i64, 4, 9] {
            let r = dominates_on(&a1, &single, &rat_vec(&[a]), &SearchConfig::new(30)).unwrap();
            assert_eq!(r.witness(), Some(&vec![a as u64, 2 * a as u64]));
        }
        assert!(dominates_on(&FiniteMatrix::from_dense(&[&[-1i64][..]]).unwrap(), &a1, &rat_vec(&[1i64]), &SearchConfig::new(3)).is_err());
    }

    fn small_matrix() -> impl Strategy<Value = FiniteMatrix> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(w, h)| {
            proptest::collection::vec(proptest::collection::vec(-2i64..=2, w), h).prop_map(move |rows| {
                let mut rows: Vec<Vec<i64>> = rows;
                rows.sort();
                rows.dedup();
                let refs: Vec<&[i64]> = rows.iter().map(|r| &r[..]).collect();
                FiniteMatrix::from_dense(&refs).unwrap().widened(w)
            })
        })
    }

    fn small_colouring() -> impl Strategy<Value = Colouring> {
        prop_oneof![
            (2u64..=3).prop_map(|m| Colouring::modulus(m).unwrap()),
            proptest::collection::vec(0u64..=1, 1..=4).prop_map(|t| Colouring::table(t).unwrap()),
            Just(Colouring::alpha(&Rat::from(2)).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_full_enumeration(a in small_matrix(), col in small_colouring(), bound in 1u64..=6, distinct: bool, threads in 1usize..=3) {
            let cfg = SearchConfig::new(bound).distinct(distinct).threads(threads);
            let r = find_monochromatic(&a, &col, &cfg).unwrap();
            let expected = brute(&a, &col, 1, bound, distinct);
            prop_assert_eq!(r.witness().map(|w| w.assignment.clone()), expected);
            if let Some(w) = r.witness() {
                verify(&a, &col, w);
                prop_assert_eq!(&w.image, &image(&a, &rat_vec(&w.assignment)).unwrap());
            }
        }

        #[test]
        fn domination_is_transitive(
            x in proptest::collection::vec(1u64..=6, 2),
            ba in 0usize..3, bb in 0usize..3,
        ) {
            let mats = [
                schur(),
                FiniteMatrix::from_dense(&[&[1i64, 0][..], &[1, 1]]).unwrap(),
                FiniteMatrix::from_dense(&[&[2i64, 0][..], &[0, 1]]).unwrap(),
            ];
            let a = &mats[0];
            let (b, c) = (&mats[ba], &mats[bb]);
            let cfg = SearchConfig::new(12);
            if let Some(y) = dominates_on(a, b, &rat_vec(&x), &cfg).unwrap().witness() {
                if let Some(z) = dominates_on(b, c, &rat_vec(y), &cfg).unwrap().witness() {
                    let ia = image(a, &rat_vec(&x)).unwrap();
                    prop_assert!(image(c, &rat_vec(z)).unwrap().is_subset(&ia));
                }
            }
        }
    }
}
