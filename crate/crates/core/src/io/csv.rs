//! CSV and plot-data emission. Output is byte-deterministic.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::correlation::{self, ConventionResolution, CorrelationSeries, PairTableRow};
use crate::search::SearchCandidate;

pub const CORRELATION_HEADER: &str = "lag,raw_sum,residue,normalized";
pub const PAIR_TABLE_HEADER: &str = "i,j,modulus,expectation";
pub const SEARCH_HEADER: &str =
    "seed,n,gcd,gcd_factors,modulus,modulus_is_prime,diagonal_residue,normalizer,valid,reduced";
pub const DEVIATION_HEADER: &str = "convention,i,j,expected,computed,computed_exact,deviation";

/// Two-decimal, half-up rendering of an expectation.
pub fn format_expectation(e: &correlation::Expectation) -> String {
    let h = correlation::hundredths(e);
    format!("{}.{:02}", h / 100, h % 100)
}

pub fn correlation_csv(series: &CorrelationSeries) -> String {
    let mut out = String::from(CORRELATION_HEADER);
    out.push('\n');
    for (k, (raw, residue)) in series.raw_sums.iter().zip(&series.residues).enumerate() {
        writeln!(out, "{k},{raw},{residue},{:.6}", series.normalized(k)).unwrap();
    }
    out
}

pub fn pair_table_csv(rows: &[PairTableRow]) -> String {
    let mut out = String::from(PAIR_TABLE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.source,
            r.target,
            r.modulus,
            format_expectation(&r.expectation)
        )
        .unwrap();
    }
    out
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn search_csv(candidates: &[SearchCandidate]) -> String {
    let mut out = String::from(SEARCH_HEADER);
    out.push('\n');
    for c in candidates {
        let factors = c
            .gcd_factors
            .as_ref()
            .map(|f| {
                f.iter()
                    .map(|&(p, e)| {
                        if e == 1 {
                            p.to_string()
                        } else {
                            format!("{p}^{e}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .unwrap_or_default();
        let reduced = c
            .reduced
            .as_ref()
            .map(|s| {
                s.values()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.seed,
            c.n,
            c.gcd,
            factors,
            opt(c.modulus),
            c.modulus_is_prime,
            opt(c.diagonal_residue),
            opt(c.normalizer),
            c.valid,
            reduced
        )
        .unwrap();
    }
    out
}

/// Per-pair deviations of every evaluated convention.
pub fn deviation_csv(resolution: &ConventionResolution) -> String {
    let mut out = String::from(DEVIATION_HEADER);
    out.push('\n');
    for profile in &resolution.profiles {
        let Ok(rows) = &profile.outcome else {
            continue;
        };
        for d in rows {
            writeln!(
                out,
                "{},{},{},{},{:.4},{}/{},{:.4}",
                profile.convention,
                d.source,
                d.target,
                format_expectation(&d.expected),
                correlation::to_f64(&d.computed),
                d.computed.numer(),
                d.computed.denom(),
                correlation::to_f64(&d.deviation),
            )
            .unwrap();
        }
    }
    out
}

/// A bare stem plot of the normalized series.
pub fn stem_plot_svg(series: &CorrelationSeries, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let n = series.len().max(1) as f64;
    let dx = (W - 2.0 * PAD) / n;
    let base = H - PAD;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    let escaped = title
        .replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;");
    writeln!(
        out,
        r#"<text x="{PAD}" y="20" font-size="14">{escaped}</text>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{PAD}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        W - PAD
    )
    .unwrap();
    for k in 0..series.len() {
        let x = PAD + dx * (k as f64 + 0.5);
        let y = base - series.normalized(k) * (H - 2.0 * PAD);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{base}" x2="{x:.2}" y2="{y:.2}" stroke="steelblue"/><circle cx="{x:.2}" cy="{y:.2}" r="3" fill="steelblue"/>"#
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `contents` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Modulus;
    use crate::correlation::{circular_autocorr, Convention};
    use crate::nht::ResidueSequence;
    use num_rational::Ratio;

    #[test]
    fn delta_autocorr_rows() {
        let s = ResidueSequence::new(vec![1, 0, 0, 0], Modulus::new(5).unwrap()).unwrap();
        let csv = correlation_csv(&circular_autocorr(&s, Convention::Raw).unwrap());
        assert_eq!(
            csv,
            "lag,raw_sum,residue,normalized\n0,1,1,0.200000\n1,0,0,0.000000\n2,0,0,0.000000\n3,0,0,0.000000\n"
        );
    }

    #[test]
    fn expectation_formatting() {
        assert_eq!(format_expectation(&Ratio::new(8749, 10000)), "0.87");
        assert_eq!(format_expectation(&Ratio::new(1, 20)), "0.05");
        assert_eq!(format_expectation(&Ratio::new(9999, 10000)), "1.00");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.csv"), "x").is_err());
    }

    #[test]
    fn svg_has_one_stem_per_lag() {
        let s = ResidueSequence::new(vec![1, 2, 3], Modulus::new(7).unwrap()).unwrap();
        let svg = stem_plot_svg(&circular_autocorr(&s, Convention::Raw).unwrap(), "a<b");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("a&lt;b"));
    }
}
