//! Small statistics helpers for comparing empirical samples against model
//! distributions: Kolmogorov-Smirnov distance for mixed (density + atom)
//! laws and total-variation distance between pmfs.

/// KS distance between an empirical sample (continuous part sorted
/// ascending, plus an optional atom) and a model CDF.
///
/// `cdf_right` must be the right-continuous model CDF including any model
/// atom; `model_atom` supplies (location, mass) so the left limit can be
/// recovered at the atom.
pub fn ks_mixed(
    continuous_sorted: &[f64],
    sample_atom: Option<(f64, usize)>,
    cdf_right: impl Fn(f64) -> f64,
    model_atom: Option<(f64, f64)>,
) -> f64 {
    let atom_count = sample_atom.map_or(0, |(_, c)| c);
    let total = continuous_sorted.len() + atom_count;
    if total == 0 {
        return 1.0;
    }

    // merge events: (value, sample weight at value)
    let mut events: Vec<(f64, usize)> = Vec::with_capacity(continuous_sorted.len() + 2);
    let mut i = 0;
    let mut pushed_atom = false;
    let atom_loc = sample_atom.map(|(l, _)| l);
    while i < continuous_sorted.len() {
        let v = continuous_sorted[i];
        if let Some(loc) = atom_loc {
            if !pushed_atom && loc <= v {
                events.push((loc, atom_count));
                pushed_atom = true;
                if loc == v {
                    // merge coincident continuous samples below
                }
            }
        }
        let mut j = i;
        while j < continuous_sorted.len() && continuous_sorted[j] == v {
            j += 1;
        }
        if events.last().map(|e| e.0) == Some(v) {
            events.last_mut().unwrap().1 += j - i;
        } else {
            events.push((v, j - i));
        }
        i = j;
    }
    if let Some(loc) = atom_loc {
        if !pushed_atom {
            events.push((loc, atom_count));
        }
    }
    // make sure the model atom location is probed even without samples there
    if let Some((loc, _)) = model_atom {
        let pos = events.partition_point(|e| e.0 < loc);
        if events.get(pos).map(|e| e.0) != Some(loc) {
            events.insert(pos, (loc, 0));
        }
    }

    let mut cum = 0usize;
    let mut d = 0.0f64;
    for (v, c) in events {
        let f_left = cum as f64 / total as f64;
        cum += c;
        let f_right = cum as f64 / total as f64;
        let m_right = cdf_right(v);
        let m_left = match model_atom {
            Some((loc, mass)) if loc == v => m_right - mass,
            _ => m_right,
        };
        d = d.max((f_left - m_left).abs()).max((f_right - m_right).abs());
    }
    d
}

/// Total-variation distance between two pmfs (padded with zeros).
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let mut tv = 0.0;
    for i in 0..n {
        let a = p.get(i).copied().unwrap_or(0.0);
        let b = q.get(i).copied().unwrap_or(0.0);
        tv += (a - b).abs();
    }
    // unaccounted tail mass on either side
    let pa: f64 = 1.0 - p.iter().sum::<f64>();
    let qa: f64 = 1.0 - q.iter().sum::<f64>();
    tv += (pa.max(0.0) - qa.max(0.0)).abs();
    0.5 * tv
}
