//! Tables and plots for single spectra.

use xxz_pin::solver::SpectrumResult;
use xxz_pin::ModelSpec;

use crate::svg::Plot;
use crate::table::{Cell, Table};

/// `index, eigenvalue` plus `sector_m, sector_n` when the spectrum is
/// sector-labeled. `sector_n` counts lowerings, `sector_m = jb - n`.
pub fn spectrum_table(spec: &ModelSpec, s: &SpectrumResult) -> Table {
    let labels = s.sector_labels.as_ref();
    let mut header = vec!["index", "eigenvalue"];
    if labels.is_some() {
        header.extend(["sector_m", "sector_n"]);
    }
    let mut t = Table::new(header);
    let jb = spec.j() * spec.sites as f64;
    for (i, &e) in s.eigenvalues.iter().enumerate() {
        let mut row: Vec<Cell> = vec![i.into(), e.into()];
        if let Some(l) = labels {
            row.push((jb - l[i] as f64).into());
            row.push(l[i].into());
        }
        t.push(row);
    }
    t
}

/// Levels against sector `n`: branch `i` joins the `i`-th lowest value of
/// every sector that has one.
pub fn sector_plot(s: &SpectrumResult, title: &str, y_range: Option<(f64, f64)>) -> Plot {
    let labels = s.sector_labels.clone().unwrap_or_default();
    let max_n = labels.iter().copied().max().unwrap_or(0);
    let mut per: Vec<Vec<f64>> = vec![Vec::new(); max_n + 1];
    for (&e, &n) in s.eigenvalues.iter().zip(&labels) {
        per[n].push(e);
    }
    for v in &mut per {
        v.sort_by(f64::total_cmp);
    }
    let depth = per.iter().map(Vec::len).max().unwrap_or(0);
    let branches = (0..depth)
        .map(|i| {
            per.iter()
                .enumerate()
                .filter_map(|(n, v)| v.get(i).map(|&e| (n as f64, e)))
                .collect()
        })
        .collect();
    Plot {
        title: title.to_string(),
        x_label: "n (overturned spins)".into(),
        y_label: "energy".into(),
        branches,
        y_range,
    }
}

/// Eigenvalue against its index, as one polyline.
pub fn index_plot(s: &SpectrumResult, title: &str) -> Plot {
    Plot {
        title: title.to_string(),
        x_label: "index".into(),
        y_label: "energy".into(),
        branches: vec![s.eigenvalues.iter().enumerate().map(|(i, &e)| (i as f64, e)).collect()],
        y_range: None,
    }
}
