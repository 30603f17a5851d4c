//! CSV emission: fixed-precision decimal numbers and a commented header
//! carrying the resolved run configuration.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Decimal representation rounded to 12 significant digits, independent of
/// locale. Non-finite values are written as `nan`, `inf` or `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

pub fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// CSV document built in memory and written in one go.
#[derive(Debug, Clone, Default)]
pub struct CsvDocument {
    text: String,
}

impl CsvDocument {
    /// Starts a document whose first lines are `header` prefixed by `# `.
    pub fn with_comment(header: &str) -> Self {
        let mut doc = CsvDocument::default();
        doc.comment(header);
        doc
    }

    pub fn comment(&mut self, text: &str) {
        for line in text.lines() {
            if line.is_empty() {
                self.text.push_str("#\n");
            } else {
                let _ = writeln!(self.text, "# {line}");
            }
        }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(f.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, &self.text)
    }
}
