//! Two-dimensional Nelder-Mead used to refine breakpoint estimates.
//!
//! Coefficients are the classic 1, 2, 1/2, 1/2 set. All simplex
//! arithmetic therefore stays on dyadic rationals, which keeps the search
//! exactly shift-equivariant for integer-shifted objectives.

pub(crate) fn minimize<F>(mut f: F, x0: [f64; 2], step: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut simplex = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut fv = simplex.map(&mut f);

    for _ in 0..max_iter {
        // Order best..worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap());
        let (b, m, w) = (order[0], order[1], order[2]);

        // Stop at a simplex size where coordinates are still exact dyadic
        // rationals; contracting further buys nothing below one millionth
        // of a cycle and would start accumulating rounding noise.
        let size = (simplex[w][0] - simplex[b][0]).abs() + (simplex[w][1] - simplex[b][1]).abs();
        if size < 1e-6 {
            break;
        }

        let centroid = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[w][0]),
            centroid[1] + (centroid[1] - simplex[w][1]),
        ];
        let fr = f(reflect);

        if fr < fv[b] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[w][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[w][1]),
            ];
            let fe = f(expand);
            if fe < fr {
                simplex[w] = expand;
                fv[w] = fe;
            } else {
                simplex[w] = reflect;
                fv[w] = fr;
            }
        } else if fr < fv[m] {
            simplex[w] = reflect;
            fv[w] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[w][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[w][1] - centroid[1]),
            ];
            let fc = f(contract);
            if fc < fv[w] {
                simplex[w] = contract;
                fv[w] = fc;
            } else {
                // Shrink toward the best vertex.
                for i in 0..3 {
                    if i == b {
                        continue;
                    }
                    simplex[i] = [
                        simplex[b][0] + 0.5 * (simplex[i][0] - simplex[b][0]),
                        simplex[b][1] + 0.5 * (simplex[i][1] - simplex[b][1]),
                    ];
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    (simplex[best], fv[best])
}
