use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::engine::compile;
use crate::error::{Error, Result};
use crate::ratcore::FiniteMatrix;

/// Least `N` forcing a monochromatic image, or why none was established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ForcingResult {
    pub bound: Option<u64>,
    /// A colouring of `[1, bound−1]` (as colours of `1, 2, …`) with no
    /// monochromatic image; when no bound was found, one for `[1, nMax]`.
    pub certificate: Option<Vec<u32>>,
    pub nodes_explored: u64,
    pub exhausted: bool,
}

struct ImageSets {
    /// Image value sets grouped by their largest value; each entry also
    /// records the least `N` at which some `x` producing it fits in `[1, N]`.
    by_max: BTreeMap<u64, Vec<(Vec<u64>, u64)>>,
}

/// Image sets of `A·x` for `x ∈ [1, n_max]^v` that lie inside `[1, n_max]`.
fn collect_images(a: &FiniteMatrix, n_max: u64, nodes: &mut u64, budget: u64) -> Result<Option<ImageSets>> {
    let compiled = compile(a)?;
    let v = a.width();
    let mut best: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    if compiled.has_zero_row || a.row_count() == 0 {
        return Ok(Some(ImageSets { by_max: BTreeMap::new() }));
    }
    let mut x = vec![1u64; v];
    'outer: loop {
        *nodes += 1;
        if *nodes > budget {
            return Ok(None);
        }
        let mut vals = Vec::with_capacity(compiled.rows.len());
        let mut ok = true;
        for r in &compiled.rows {
            match r.eval(&x)? {
                Some(val) if val as u64 <= n_max => vals.push(val as u64),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            vals.sort_unstable();
            vals.dedup();
            let avail = (*vals.last().unwrap()).max(*x.iter().max().unwrap());
            let e = best.entry(vals).or_insert(avail);
            *e = (*e).min(avail);
        }
        let mut i = v;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if x[i] < n_max {
                x[i] += 1;
                x[i + 1..].iter_mut().for_each(|t| *t = 1);
                break;
            }
        }
    }
    let mut by_max: BTreeMap<u64, Vec<(Vec<u64>, u64)>> = BTreeMap::new();
    for (set, avail) in best {
        by_max.entry(*set.last().unwrap()).or_default().push((set, avail));
    }
    Ok(Some(ImageSets { by_max }))
}

enum Found {
    Avoiding(Vec<u32>),
    None,
    Budget,
}

/// Colours `1..=n` in order with colour(1) = 0, rejecting any colouring that
/// makes an available image set monochromatic.
fn avoiding_colouring(sets: &ImageSets, n: u64, colours: u32, nodes: &mut u64, budget: u64) -> Found {
    let mut col: Vec<u32> = Vec::with_capacity(n as usize);
    fn ok(sets: &ImageSets, n: u64, col: &[u32]) -> bool {
        let k = col.len() as u64;
        let Some(list) = sets.by_max.get(&k) else { return true };
        list.iter().filter(|(_, avail)| *avail <= n).all(|(set, _)| {
            let c = col[set[0] as usize - 1];
            set.iter().any(|&v| col[v as usize - 1] != c)
        })
    }
    fn go(sets: &ImageSets, n: u64, colours: u32, col: &mut Vec<u32>, nodes: &mut u64, budget: u64) -> Option<bool> {
        if col.len() as u64 == n {
            return Some(true);
        }
        let range = if col.is_empty() { 0..1 } else { 0..colours };
        for c in range {
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            col.push(c);
            if ok(sets, n, col) && go(sets, n, colours, col, nodes, budget)? {
                return Some(true);
            }
            col.pop();
        }
        Some(false)
    }
    match go(sets, n, colours, &mut col, nodes, budget) {
        Some(true) => Found::Avoiding(col),
        Some(false) => Found::None,
        None => Found::Budget,
    }
}

/// Least `N ≤ n_max` such that every `colours`-colouring of `[1, N]` has a
/// monochromatic image `A·x` with `x` and the image inside `[1, N]`.
pub fn forcing_bound(a: &FiniteMatrix, colours: u32, n_max: u64, budget: u64) -> Result<ForcingResult> {
    if colours < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 colours, got {colours}")));
    }
    if a.width() == 0 {
        return Err(Error::InvalidParameter("matrix has no columns".into()));
    }
    let mut nodes = 0u64;
    let budget_hit = |nodes: u64, cert: Option<Vec<u32>>| ForcingResult {
        bound: None,
        certificate: cert,
        nodes_explored: nodes.min(budget),
        exhausted: false,
    };
    let Some(sets) = collect_images(a, n_max, &mut nodes, budget)? else {
        return Ok(budget_hit(budget, None));
    };
    let mut cert: Vec<u32> = Vec::new();
    for n in 1..=n_max {
        match avoiding_colouring(&sets, n, colours, &mut nodes, budget) {
            Found::Avoiding(c) => cert = c,
            Found::None => {
                return Ok(ForcingResult { bound: Some(n), certificate: Some(cert), nodes_explored: nodes, exhausted: true })
            }
            Found::Budget => return Ok(budget_hit(budget, Some(cert))),
        }
    }
    Ok(ForcingResult { bound: None, certificate: Some(cert), nodes_explored: nodes, exhausted: true })
}
