//! One-dimensional global maximization: dense grid scan followed by
//! golden-section refinement of the best local maxima.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64, usize) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while (hi - lo).abs() > xtol && evals < 200 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        evals += 1;
    }
    if fc >= fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// Best value seen on the coarse grid alone.
    pub grid_value: f64,
    pub step: f64,
    pub evaluations: usize,
    pub refined: bool,
}

/// Maximizes `f` over `[lo, hi]` (or the circle `[lo, hi)` when `periodic`)
/// with `n` grid cells, then refines the `top_k` best local grid maxima.
pub fn scan_and_refine<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    periodic: bool,
    top_k: usize,
    xtol: f64,
) -> Maximum {
    let n = n.max(2);
    let step = (hi - lo) / n as f64;
    let count = if periodic { n } else { n + 1 };
    let args: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
    let values: Vec<f64> = args.iter().map(|&t| f(t)).collect();
    let mut evaluations = count;

    let at = |i: isize| -> f64 {
        if periodic {
            values[i.rem_euclid(count as isize) as usize]
        } else if i < 0 || i >= count as isize {
            f64::NEG_INFINITY
        } else {
            values[i as usize]
        }
    };
    let mut peaks: Vec<usize> = (0..count)
        .filter(|&i| {
            let v = values[i];
            v >= at(i as isize - 1) && v >= at(i as isize + 1)
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(top_k.max(1));

    let (grid_idx, grid_value) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut best = (args[grid_idx], grid_value);
    let mut refined = false;
    for &i in &peaks {
        let mut a = args[i] - step;
        let mut b = args[i] + step;
        if !periodic {
            a = a.max(lo);
            b = b.min(hi);
        }
        let (x, v, e) = golden_max(f, a, b, xtol);
        evaluations += e;
        if v > best.1 {
            best = (x, v);
            refined = true;
        }
    }
    let mut arg = best.0;
    if periodic {
        arg = lo + (arg - lo).rem_euclid(hi - lo);
    }
    Maximum {
        arg,
        value: best.1,
        grid_value,
        step,
        evaluations,
        refined,
    }
}
