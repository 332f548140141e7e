//! CSV readers/writers. Numbers are written with 17 significant digits so
//! every round trip is exact in double precision.

use std::io::Write;
use std::path::Path;

use hida_matern::linalg::CMatrix;

use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads a `t,y` CSV (header line tolerated), sorted or not.
pub fn read_data_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read data {}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (a, b) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(t), Ok(y)) => {
                times.push(t);
                values.push(y);
            }
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(CliError::Runtime(format!(
                    "{}: line {} is not numeric: {line:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if times.is_empty() {
        return Err(CliError::Runtime(format!(
            "{}: no data rows found",
            path.display()
        )));
    }
    Ok((times, values))
}

/// Writes rows of floats under a header line.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_f64(v));
            first = false;
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Row-major matrix dump, one matrix per file, with the comment header
/// `# name, dim, tau`. Real-valued matrices write plain numbers; complex
/// entries append the imaginary part as `re+imi`.
pub fn write_matrix_csv(path: &Path, name: &str, tau: f64, m: &CMatrix) -> Result<(), CliError> {
    let complex = m.iter().any(|z| z.im != 0.0);
    let mut out = format!("# {name}, {}, {}\n", m.nrows(), fmt_f64(tau));
    for i in 0..m.nrows() {
        let mut fields = Vec::with_capacity(m.ncols());
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if complex {
                let sign = if z.im.is_sign_negative() { "-" } else { "+" };
                fields.push(format!("{}{}{}i", fmt_f64(z.re), sign, fmt_f64(z.im.abs())));
            } else {
                fields.push(fmt_f64(z.re));
            }
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Reads back a matrix dump written by [`write_matrix_csv`]. Kept as the
/// counterpart that pins the dump format; exercised by the round-trip tests.
#[allow(dead_code)]
pub fn read_matrix_csv(path: &Path) -> Result<(String, f64, CMatrix), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| CliError::Runtime("matrix dump missing header".into()))?;
    let parts: Vec<&str> = header.split(", ").collect();
    if parts.len() != 3 {
        return Err(CliError::Runtime("malformed matrix header".into()));
    }
    let name = parts[0].to_string();
    let dim: usize = parts[1]
        .parse()
        .map_err(|_| CliError::Runtime("bad dim in matrix header".into()))?;
    let tau: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::Runtime("bad tau in matrix header".into()))?;
    let mut entries = Vec::with_capacity(dim * dim);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            entries.push(parse_complex(field.trim())?);
        }
    }
    if entries.len() != dim * dim {
        return Err(CliError::Runtime(format!(
            "matrix dump has {} entries, expected {}",
            entries.len(),
            dim * dim
        )));
    }
    Ok((name, tau, CMatrix::from_row_slice(dim, dim, &entries)))
}

#[allow(dead_code)]
fn parse_complex(field: &str) -> Result<num_complex::Complex<f64>, CliError> {
    if let Some(body) = field.strip_suffix('i') {
        // split at the sign separating the exponent-bearing real part from
        // the imaginary part: re<sign>im, both in scientific notation
        for (pos, ch) in body.char_indices().skip(1) {
            if (ch == '+' || ch == '-') && !matches!(&body[pos - 1..pos], "e" | "E") {
                let re: f64 = body[..pos]
                    .parse()
                    .map_err(|_| CliError::Runtime(format!("bad complex field {field:?}")))?;
                let im: f64 = body[pos..]
                    .parse()
                    .map_err(|_| CliError::Runtime(format!("bad complex field {field:?}")))?;
                return Ok(num_complex::Complex::new(re, im));
            }
        }
        return Err(CliError::Runtime(format!("bad complex field {field:?}")));
    }
    field
        .parse::<f64>()
        .map(|re| num_complex::Complex::new(re, 0.0))
        .map_err(|_| CliError::Runtime(format!("bad numeric field {field:?}")))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let mut f = std::fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn float_format_round_trips_exactly() {
        for &x in &[0.1, -3.0e-17, 755.0, std::f64::consts::PI, 1.0 / 3.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn matrix_dump_round_trips() {
        let dir = std::env::temp_dir().join(format!("hm-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        let real = CMatrix::from_fn(3, 3, |i, j| Complex::new(0.1 * (i * 3 + j) as f64 - 0.3, 0.0));
        let path = dir.join("real.csv");
        write_matrix_csv(&path, "K_raw", 0.5, &real).unwrap();
        let (name, tau, back) = read_matrix_csv(&path).unwrap();
        assert_eq!(name, "K_raw");
        assert_eq!(tau, 0.5);
        assert_eq!(back, real);

        let complex = CMatrix::from_fn(2, 2, |i, j| {
            Complex::new(1.0 / (1 + i + j) as f64, -0.25 * (i as f64 - j as f64))
        });
        let path = dir.join("complex.csv");
        write_matrix_csv(&path, "A_raw", 0.001, &complex).unwrap();
        let (_, _, back) = read_matrix_csv(&path).unwrap();
        assert_eq!(back, complex);

        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn data_csv_rejects_empty_and_reads_values() {
        let dir = std::env::temp_dir().join(format!("hm-io-data-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        let empty = dir.join("empty.csv");
        std::fs::write(&empty, "t,y\n").unwrap();
        assert!(read_data_csv(&empty).is_err());

        let good = dir.join("good.csv");
        std::fs::write(&good, "t,y\n0.0,1.5\n2.0,-0.25\n").unwrap();
        let (t, y) = read_data_csv(&good).unwrap();
        assert_eq!(t, vec![0.0, 2.0]);
        assert_eq!(y, vec![1.5, -0.25]);

        std::fs::remove_dir_all(&dir).unwrap();
    }
}
