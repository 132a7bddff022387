//! gnuplot script generation for sweep CSVs.

use super::table::Table;

/// A gnuplot script that plots every outage, efficiency and power column of
/// `csv_path` against the swept variable, one curve per scheme.
pub fn gnuplot_script(table: &Table, csv_path: &str) -> String {
    let x = table.swept_column().unwrap_or("alpha");
    let schemes: Vec<&str> = match table.column_index("scheme") {
        Ok(idx) => {
            let mut seen: Vec<&str> = Vec::new();
            for row in &table.rows {
                if let Some(s) = row.get(idx) {
                    if !seen.contains(&s.as_str()) {
                        seen.push(s);
                    }
                }
            }
            seen
        }
        Err(_) => Vec::new(),
    };
    let ys: Vec<&str> = table
        .headers
        .iter()
        .map(String::as_str)
        .filter(|h| *h != "scheme" && *h != x && *h != "mc_stderr")
        .collect();

    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\nset grid\n");
    s.push_str(&format!("set xlabel '{x}'\n"));
    for y in &ys {
        s.push_str(&format!("\nset ylabel '{y}'\n"));
        if y.starts_with("out_") || *y == "mc_mean" {
            s.push_str("set logscale y\n");
        } else {
            s.push_str("unset logscale y\n");
        }
        let curves: Vec<String> = schemes
            .iter()
            .map(|sch| {
                format!(
                    "'{csv_path}' using (column('{x}')):(strcol('scheme') eq '{sch}' ? column('{y}') : 1/0) with linespoints title '{sch}'"
                )
            })
            .collect();
        s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
        s.push_str("pause -1\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_references_csv_and_schemes() {
        let t = Table::parse("scheme,rho,out_system,ee\npsr,0.1,0.5,1\ntsr,0.1,0.6,2\n").unwrap();
        let s = gnuplot_script(&t, "out.csv");
        assert!(s.contains("'out.csv'"));
        assert!(s.contains("eq 'psr'") && s.contains("eq 'tsr'"));
        assert!(s.contains("column('out_system')"));
        assert!(s.contains("column('ee')"));
    }
}
