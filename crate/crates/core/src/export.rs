//! Plain-text table output shared by the CSV writers.

use std::io::Write;

use crate::error::Result;

/// Shortest round-trippable form is not fixed-width, so every float is
/// written with 17 significant digits instead.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one comma-separated row of floats.
pub fn write_row<W: Write>(out: &mut W, values: &[f64]) -> Result<()> {
    let mut line = String::with_capacity(values.len() * 24);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format_float(*v));
    }
    line.push('\n');
    out.write_all(line.as_bytes())?;
    Ok(())
}

pub fn write_header<W: Write>(out: &mut W, columns: &[&str]) -> Result<()> {
    writeln!(out, "{}", columns.join(","))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for &x in &[0.1, -2.0 / 3.0, 1e-300, 5.123456789012345, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        let mut buf = Vec::new();
        write_row(&mut buf, &[1.0, -0.5]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "1.0000000000000000e0,-5.0000000000000000e-1\n"
        );
    }
}
