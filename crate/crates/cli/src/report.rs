//! Report serialization: JSON documents with complex numbers as
//! `[re, im]` pairs, atomic file writes, and the CSV texture format.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::io::Write as _;
use std::path::Path;

/// Serialize `payload` under a stable envelope. Everything that varies
/// between identical runs (timestamps, wall times) lives in `metadata`.
pub fn envelope<T: Serialize>(kind: &str, config_echo: &Value, payload: &T) -> Result<Value> {
    Ok(serde_json::json!({
        "kind": kind,
        "config": config_echo,
        "result": serde_json::to_value(payload)?,
        "metadata": {
            "generated_at": chrono_free_timestamp(),
        },
    }))
}

/// RFC 3339 UTC timestamp from the system clock, without a date crate.
fn chrono_free_timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = secs / 86_400;
    let tod = secs % 86_400;
    // civil-from-days (Howard Hinnant's algorithm)
    let z = days as i64 + 719_468;
    let era = z / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z",
        y,
        m,
        d,
        tod / 3600,
        tod % 3600 / 60,
        tod % 60
    )
}

/// Write bytes atomically: temp file in the destination directory, then
/// rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Pretty-printed JSON document with a trailing newline.
pub fn write_json(path: &Path, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Format a float with 12 significant digits, trimming the exponent form
/// only when `{:e}` would be needed anyway.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if (1e-4..1e12).contains(&mag) {
        let digits = 11usize.saturating_sub(mag.log10().floor() as usize);
        let s = format!("{:.*}", digits.min(17), x);
        trim_zeros(&s)
    } else {
        format!("{:.11e}", x)
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.into();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// Spin-texture CSV: one row per site, `site,c0..c{d-1},sx,sy,sz`,
/// LF line endings, 12 significant digits.
pub fn texture_csv(dims: &[usize], coords: &[Vec<usize>], triples: &[[f64; 3]]) -> String {
    let mut out = String::from("site");
    for axis in 0..dims.len() {
        out.push_str(&format!(",c{axis}"));
    }
    out.push_str(",sx,sy,sz\n");
    for (site, (c, t)) in coords.iter().zip(triples).enumerate() {
        out.push_str(&site.to_string());
        for x in c {
            out.push_str(&format!(",{x}"));
        }
        for v in t {
            out.push(',');
            out.push_str(&sig12(*v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_round_trip() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.5), "1.5");
        assert_eq!(sig12(-0.25), "-0.25");
        let s = sig12(std::f64::consts::PI);
        assert_eq!(s, "3.14159265359");
        assert!(sig12(1.23e-7).contains('e'));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
    }

    #[test]
    fn texture_csv_layout() {
        let csv = texture_csv(
            &[2],
            &[vec![0], vec![1]],
            &[[0.5, 0.0, 0.0], [-0.5, 0.0, 0.0]],
        );
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "site,c0,sx,sy,sz");
        assert_eq!(lines.next().unwrap(), "0,0,0.5,0,0");
        assert_eq!(lines.next().unwrap(), "1,1,-0.5,0,0");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn timestamp_shape() {
        let t = chrono_free_timestamp();
        assert_eq!(t.len(), 20);
        assert!(t.ends_with('Z'));
        assert_eq!(&t[4..5], "-");
    }
}
