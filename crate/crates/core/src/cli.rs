//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Parser;
use log::info;
use thiserror::Error;

use crate::geometry::ConvexRegion;
use crate::oracle::roots_reference;
use crate::poly::{Complex, PolyError, Polynomial};
use crate::rdp::{choose_q, rdp_with, RdpError, RdpOptions, RdpRun};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_SUBDIVISION: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Find all roots of a complex polynomial inside a convex region.
#[derive(Debug, Parser)]
#[command(name = "windroot", version)]
pub struct Args {
    /// Polynomial as JSON ({"coeffs": [[re, im], ...]}, constant term first)
    /// or shorthand such as "z^3 - 2.5z + 1".
    #[arg(
        long,
        conflicts_with = "poly_file",
        required_unless_present = "poly_file"
    )]
    pub poly: Option<String>,
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Rectangle corners.
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true,
          conflicts_with = "region_file", required_unless_present = "region_file")]
    pub rect: Option<Vec<f64>>,
    /// JSON file with {"vertices": [[x, y], ...]} (counterclockwise) or {"rect": [x0, y0, x1, y1]}.
    #[arg(long)]
    pub region_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    pub accuracy: f64,
    /// Gap limit override; must not exceed the default for n0 = n.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Cross-check box counts against an independent root finder.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub stats: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("polynomial: {0}")]
    Poly(#[from] PolyError),
    #[error("polynomial shorthand: {0}")]
    Shorthand(String),
    #[error("region: {0}")]
    Region(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Parses `--poly`: JSON when it starts with `{`, shorthand otherwise.
pub fn parse_poly(text: &str) -> Result<Polynomial, CliError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        Ok(Polynomial::from_json(trimmed)?)
    } else {
        parse_shorthand(trimmed)
    }
}

/// Sum of real terms `c`, `c*z`, `cz^k`, `z^k`; `-` may be U+2212.
pub fn parse_shorthand(text: &str) -> Result<Polynomial, CliError> {
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    if cleaned.is_empty() {
        return Err(CliError::Shorthand("empty expression".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = cleaned.as_bytes();
    for i in 1..bytes.len() {
        let prev = bytes[i - 1].to_ascii_lowercase();
        if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'e' && prev != b'^' {
            terms.push(&cleaned[start..i]);
            start = i;
        }
    }
    terms.push(&cleaned[start..]);

    let mut coeffs: Vec<f64> = Vec::new();
    for term in terms {
        let (power, coef) = parse_term(term)?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0.0);
        }
        coeffs[power] += coef;
    }
    Ok(Polynomial::from_real(&coeffs)?)
}

fn parse_term(term: &str) -> Result<(usize, f64), CliError> {
    let bad = || CliError::Shorthand(format!("cannot parse term {term:?}"));
    let (sign, body) = match term.as_bytes().first() {
        Some(b'-') => (-1.0, &term[1..]),
        Some(b'+') => (1.0, &term[1..]),
        _ => (1.0, term),
    };
    let Some(zpos) = body.find('z') else {
        return body
            .parse::<f64>()
            .map(|c| (0, sign * c))
            .map_err(|_| bad());
    };
    let coef_text = body[..zpos].strip_suffix('*').unwrap_or(&body[..zpos]);
    let coef = if coef_text.is_empty() {
        1.0
    } else {
        coef_text.parse::<f64>().map_err(|_| bad())?
    };
    let rest = &body[zpos + 1..];
    let power = if rest.is_empty() {
        1
    } else {
        rest.strip_prefix('^')
            .and_then(|p| p.parse::<usize>().ok())
            .ok_or_else(bad)?
    };
    Ok((power, sign * coef))
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn num(out: &mut String, x: f64) {
    // 17 significant digits
    let _ = write!(out, "{x:.16e}");
}

fn point(out: &mut String, z: Complex) {
    out.push('[');
    num(out, z.re);
    out.push_str(", ");
    num(out, z.im);
    out.push(']');
}

/// Result document, one line.
pub fn render_json(run: &RdpRun, with_stats: bool) -> String {
    let mut out = String::from("{\"boxes\": [");
    for (i, b) in run.boxes.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str("{\"vertices\": [");
        for (j, &v) in b.region.vertices().iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            point(&mut out, v);
        }
        out.push_str("], \"envelope\": [");
        for (j, &e) in b.region.envelope().iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            num(&mut out, e);
        }
        let _ = write!(out, "], \"count\": {}}}", b.count);
    }
    out.push(']');
    if with_stats {
        let s = &run.stats;
        let _ = write!(
            out,
            ", \"stats\": {{\"pe\": {}, \"max_level\": {}, \"boxes\": {}, \"budget\": ",
            s.pe, s.max_level, s.boxes
        );
        num(&mut out, s.budget);
        out.push('}');
    }
    out.push('}');
    out
}

fn svg_path(region: &ConvexRegion) -> String {
    let mut d = String::new();
    for (i, v) in region.vertices().iter().enumerate() {
        let _ = write!(d, "{}{} {} ", if i == 0 { 'M' } else { 'L' }, v.re, -v.im);
    }
    d.push('Z');
    d
}

/// SVG drawing of the initial region, every visited subregion (thinner
/// strokes at deeper levels) and the filled root boxes. The y axis points up.
pub fn render_svg(region: &ConvexRegion, run: &RdpRun) -> String {
    let [x0, y0, x1, y1] = region.envelope();
    let size = (x1 - x0).max(y1 - y0);
    let margin = 0.05 * size;
    let stroke = size / 250.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"800\">",
        x0 - margin,
        -y1 - margin,
        x1 - x0 + 2.0 * margin,
        y1 - y0 + 2.0 * margin
    );
    let _ = writeln!(
        out,
        "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>",
        svg_path(region),
        2.0 * stroke
    );
    out.push_str("<g fill=\"none\" stroke=\"steelblue\">\n");
    for v in run.visited.iter().filter(|v| v.level > 0) {
        let _ = writeln!(
            out,
            "<path d=\"{}\" stroke-width=\"{}\"/>",
            svg_path(&v.region),
            stroke / (1.0 + v.level as f64)
        );
    }
    out.push_str("</g>\n<g fill=\"crimson\" stroke=\"crimson\">\n");
    for b in &run.boxes {
        let pts: Vec<String> = b
            .region
            .vertices()
            .iter()
            .map(|v| format!("{},{}", v.re, -v.im))
            .collect();
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" stroke-width=\"{}\"><title>count {}</title></polygon>",
            pts.join(" "),
            stroke / 2.0,
            b.count
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Checks every box count, and the total, against the reference roots.
pub fn verify(f: &Polynomial, region: &ConvexRegion, run: &RdpRun) -> Result<(), String> {
    let roots = roots_reference(f).map_err(|e| format!("reference root finder: {e}"))?;
    for b in &run.boxes {
        let expected = roots.count_inside(&b.region);
        if expected != b.count {
            return Err(format!(
                "box with envelope {:?} has count {} but holds {} reference roots",
                b.region.envelope(),
                b.count,
                expected
            ));
        }
    }
    let total: usize = run.boxes.iter().map(|b| b.count).sum();
    let expected = roots.count_inside(region);
    if total != expected {
        return Err(format!(
            "boxes hold {total} roots, region holds {expected} reference roots"
        ));
    }
    Ok(())
}

/// Runs the command and returns the process exit code. Output goes to
/// stdout, diagnostics to stderr.
pub fn run(args: &Args) -> i32 {
    match execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PARSE
        }
    }
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let f = match (&args.poly, &args.poly_file) {
        (Some(text), _) => parse_poly(text)?,
        (None, Some(path)) => parse_poly(&read(path)?)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --poly, --poly-file is required".into(),
            ))
        }
    };
    let region = match (&args.rect, &args.region_file) {
        (Some(r), _) => ConvexRegion::rect(r[0], r[1], r[2], r[3])
            .map_err(|e| CliError::Region(e.to_string()))?,
        (None, Some(path)) => {
            ConvexRegion::from_json(&read(path)?).map_err(|e| CliError::Region(e.to_string()))?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --rect, --region-file is required".into(),
            ))
        }
    };
    if !(args.accuracy > 0.0 && args.accuracy.is_finite()) {
        return Err(CliError::Usage(format!(
            "--accuracy must be positive, got {}",
            args.accuracy
        )));
    }
    if let Some(q) = args.q {
        let limit = choose_q(args.accuracy, f.degree(), f.degree());
        if !(q > 0.0 && q <= limit) {
            return Err(CliError::Usage(format!(
                "--q must lie in (0, {limit:e}], got {q}"
            )));
        }
    }
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }

    let options = RdpOptions {
        q_override: args.q,
        threads: args.threads,
        memoize: true,
    };
    info!(
        "degree {}, envelope {:?}, accuracy {}",
        f.degree(),
        region.envelope(),
        args.accuracy
    );
    let run = match rdp_with(&region, &f, args.accuracy, &options) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(match e {
                RdpError::InitialRegionSingular { .. } => EXIT_SINGULAR,
                RdpError::SubdivisionFailed { .. } => EXIT_SUBDIVISION,
                RdpError::InvalidAccuracy(_) | RdpError::EmptyRegion => EXIT_PARSE,
                RdpError::CountMismatch { .. } | RdpError::DepthExceeded(_) => EXIT_SUBDIVISION,
            });
        }
    };
    info!(
        "{} boxes, {} evaluations, max level {}",
        run.boxes.len(),
        run.stats.pe,
        run.stats.max_level
    );
    println!("{}", render_json(&run, args.stats));

    if let Some(path) = &args.svg {
        if let Err(source) = std::fs::write(path, render_svg(&region, &run)) {
            eprintln!(
                "error: {}",
                CliError::Io {
                    path: path.clone(),
                    source
                }
            );
            return Ok(EXIT_PARSE);
        }
    }
    if args.verify {
        if let Err(msg) = verify(&f, &region, &run) {
            eprintln!("verify: {msg}");
            return Ok(EXIT_VERIFY);
        }
        eprintln!("verify: ok");
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(p: &Polynomial) -> Vec<f64> {
        p.coeffs().iter().map(|c| c.re).collect()
    }

    #[test]
    fn shorthand_forms() {
        assert_eq!(
            coeffs(&parse_poly("z^3+1").unwrap()),
            vec![1.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(coeffs(&parse_poly("z\u{2212}1").unwrap()), vec![-1.0, 1.0]);
        assert_eq!(
            coeffs(&parse_poly(" 2z^2 + 3*z + 4 ").unwrap()),
            vec![4.0, 3.0, 2.0]
        );
        assert_eq!(
            coeffs(&parse_poly("-z^2 + 1.5e-1z - 2").unwrap()),
            vec![-2.0, 0.15, -1.0]
        );
        assert_eq!(
            coeffs(&parse_poly("z^2 - z + z").unwrap()),
            vec![0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn shorthand_errors() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("z^x").is_err());
        assert!(parse_poly("3").is_err());
        assert!(parse_poly("w+1").is_err());
    }

    #[test]
    fn json_poly() {
        let p = parse_poly(r#"{"coeffs":[[1,0],[0,0],[0,0],[1,0]]}"#).unwrap();
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn args_parse_negative_rect() {
        let a = Args::try_parse_from(["windroot", "--poly", "z-1", "--rect", "-2", "-2", "2", "2"])
            .unwrap();
        assert_eq!(a.rect, Some(vec![-2.0, -2.0, 2.0, 2.0]));
        assert_eq!(a.accuracy, 1e-3);
        assert!(Args::try_parse_from(["windroot", "--poly", "z-1"]).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        let mut s = String::new();
        for x in [0.1, -1.0 / 3.0, 1e-300, 2.0_f64.sqrt()] {
            s.clear();
            num(&mut s, x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
