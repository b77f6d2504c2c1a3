use std::fmt::Write;

/// Shortest decimal that parses back to the same double; exponent form
/// outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV text with the canonical command line as its first line.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(command: &[String]) -> Self {
        Table {
            text: format!("# qmc {}\n", command.join(" ")),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn pair(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key},{value}");
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn join_nums(xs: &[f64], sep: &str) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(sep)
}

pub fn join_ints<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}
