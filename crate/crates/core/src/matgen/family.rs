use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::*;

/// A named matrix family together with its parameters.
///
/// Textual form, as accepted on the command line:
/// `f`, `f-prime`, `schur`, `ap:3`, `mt:2,1`, `translated-mt:2,1`,
/// `band:1,2,1`, `band-over-f-prime:1,2,1`, `mpc:2,2,1`, `deuber:2,2,1`,
/// `anodom`, `script-i:1,1,1`, `rowsum:1:3` (row sum, entry bound).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum RowFamily {
    F,
    FPrime,
    Schur,
    Ap { length: usize },
    Mt { a: CompressedSeq },
    /// Rows `(1, r)` for `r` an MT row, over `(0, f)` for `f` an F row.
    TranslatedMt { a: CompressedSeq },
    Band { coeffs: Vec<i64> },
    /// A band matrix stacked over `F'`.
    BandOverFPrime { coeffs: Vec<i64> },
    Mpc { m: usize, p: i64, c: i64 },
    Deuber { m: usize, p: i64, c: i64 },
    Anodom,
    ScriptI { c: Vec<u64> },
    Rowsum { c: Rat, entry_bound: u32 },
}

const DEFAULT_WIDTH: usize = 4;

impl RowFamily {
    /// Finite truncation with at most `width` columns and `rows` rows.
    /// Families of fixed size ignore `width`; infinite ones default to four columns.
    pub fn generate(&self, width: Option<usize>, rows: Option<usize>) -> Result<FiniteMatrix> {
        let budget = rows.unwrap_or(usize::MAX);
        let w = width.unwrap_or(DEFAULT_WIDTH);
        let m = match self {
            RowFamily::F => {
                if w >= 40 && rows.is_none() {
                    return Err(Error::InvalidParameter("F with this many columns needs a row budget".into()));
                }
                let n = if w >= 63 { u64::MAX } else { (1u64 << w) - 1 };
                let count = n.min(budget as u64);
                FiniteMatrix::new(w, (0..count).map(f_row).collect())?
            }
            RowFamily::FPrime => f_prime_rows(w, budget),
            RowFamily::Schur => f_truncation(2)?,
            RowFamily::Ap { length } => {
                if *length == 0 {
                    return Err(Error::InvalidParameter("progression length must be positive".into()));
                }
                let rows = (0..*length)
                    .map(|j| SparseRow::from_entries([(0, Rat::one()), (1, Rat::from(j as i64))]))
                    .collect();
                FiniteMatrix::new(2, rows)?
            }
            RowFamily::Mt { a } => mt_rows(a, w, budget),
            RowFamily::TranslatedMt { a } => {
                if w < 2 {
                    return Err(Error::WidthTooSmall { needed: 2, width: w });
                }
                let mt = mt_rows(a, w - 1, budget);
                let f = FiniteMatrix::new(w - 1, (0..((1u64 << (w - 1).min(62)) - 1)).map(f_row).collect())?;
                translate_system(&[mt], &f)
            }
            RowFamily::Band { coeffs } => {
                let count = (w + 1).saturating_sub(coeffs.len()).min(budget);
                band_matrix(coeffs, count, w)?
            }
            RowFamily::BandOverFPrime { coeffs } => {
                let count = (w + 1).saturating_sub(coeffs.len());
                stack(&band_matrix(coeffs, count, w)?, &f_prime_rows(w, usize::MAX))
            }
            RowFamily::Mpc { m, p, c } => mpc_matrix(*m, *p, *c)?,
            RowFamily::Deuber { m, p, c } => deuber_matrix(*m, *p, *c)?,
            RowFamily::Anodom => anodom_matrix(w, budget),
            RowFamily::ScriptI { c } => script_i_matrix(c, w)?,
            RowFamily::Rowsum { c, entry_bound } => constant_rowsum_rows(c, w, budget, *entry_bound),
        };
        Ok(truncate_rows(m, budget))
    }
}

fn truncate_rows(m: FiniteMatrix, budget: usize) -> FiniteMatrix {
    if m.row_count() <= budget {
        return m;
    }
    let width = m.width();
    let dup = m.duplicates_allowed();
    let mut rows = m.into_rows();
    rows.truncate(budget);
    if dup {
        FiniteMatrix::new_with_duplicates(width, rows).expect("prefix")
    } else {
        FiniteMatrix::new(width, rows).expect("prefix")
    }
}

fn parse_ints<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad integer list: {s}"))))
        .collect()
}

fn parse_one<T: FromStr>(s: &str) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad number: {s}")))
}

fn triple(s: &str) -> Result<(usize, i64, i64)> {
    let v: Vec<i64> = parse_ints(s)?;
    match v[..] {
        [m, p, c] if m > 0 => Ok((m as usize, p, c)),
        _ => Err(Error::Parse(format!("expected m,p,c: {s}"))),
    }
}

impl FromStr for RowFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::Parse(format!("family {name} needs parameters")));
        Ok(match name {
            "f" => RowFamily::F,
            "f-prime" => RowFamily::FPrime,
            "schur" => RowFamily::Schur,
            "anodom" => RowFamily::Anodom,
            "ap" => RowFamily::Ap { length: parse_one(need()?)? },
            "mt" => RowFamily::Mt { a: CompressedSeq::new(parse_ints(need()?)?)? },
            "translated-mt" => RowFamily::TranslatedMt { a: CompressedSeq::new(parse_ints(need()?)?)? },
            "band" => RowFamily::Band { coeffs: parse_ints(need()?)? },
            "band-over-f-prime" => RowFamily::BandOverFPrime { coeffs: parse_ints(need()?)? },
            "mpc" => {
                let (m, p, c) = triple(need()?)?;
                RowFamily::Mpc { m, p, c }
            }
            "deuber" => {
                let (m, p, c) = triple(need()?)?;
                RowFamily::Deuber { m, p, c }
            }
            "script-i" => RowFamily::ScriptI { c: parse_ints(need()?)? },
            "rowsum" => {
                let (c, b) = need()?
                    .split_once(':')
                    .ok_or_else(|| Error::Parse("rowsum needs c:entryBound".into()))?;
                RowFamily::Rowsum { c: c.parse()?, entry_bound: parse_one(b)? }
            }
            _ => return Err(Error::Parse(format!("unknown family: {s}"))),
        })
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowFamily::F => write!(f, "f"),
            RowFamily::FPrime => write!(f, "f-prime"),
            RowFamily::Schur => write!(f, "schur"),
            RowFamily::Anodom => write!(f, "anodom"),
            RowFamily::Ap { length } => write!(f, "ap:{length}"),
            RowFamily::Mt { a } => write!(f, "mt:{}", join(a.terms())),
            RowFamily::TranslatedMt { a } => write!(f, "translated-mt:{}", join(a.terms())),
            RowFamily::Band { coeffs } => write!(f, "band:{}", join(coeffs)),
            RowFamily::BandOverFPrime { coeffs } => write!(f, "band-over-f-prime:{}", join(coeffs)),
            RowFamily::Mpc { m, p, c } => write!(f, "mpc:{m},{p},{c}"),
            RowFamily::Deuber { m, p, c } => write!(f, "deuber:{m},{p},{c}"),
            RowFamily::ScriptI { c } => write!(f, "script-i:{}", join(c)),
            RowFamily::Rowsum { c, entry_bound } => write!(f, "rowsum:{c}:{entry_bound}"),
        }
    }
}
