//! Exact Euclidean distance transform (Felzenszwalb-Huttenlocher lower envelope).

const INF: f64 = 1e300;

/// Squared distance transform of a 1D sampled function, in place.
fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        if f[q] >= INF {
            continue;
        }
        if f[v[0]] >= INF {
            v[0] = q;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if f[v[0]] >= INF {
        out.iter_mut().for_each(|o| *o = INF);
        return;
    }
    let mut k = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Squared distances, in node units, from every node of an `nx` by `ny`
/// grid to the nearest `true` entry of `mask` (row-major, `j * nx + i`).
pub fn squared_distance_transform(mask: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    let mut g = vec![INF; nx * ny];
    let n = nx.max(ny);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for i in 0..nx {
        for j in 0..ny {
            f[j] = if mask[j * nx + i] { 0.0 } else { INF };
        }
        transform_1d(&f[..ny], &mut out[..ny], &mut v, &mut z);
        for j in 0..ny {
            g[j * nx + i] = out[j];
        }
    }
    for j in 0..ny {
        f[..nx].copy_from_slice(&g[j * nx..(j + 1) * nx]);
        transform_1d(&f[..nx], &mut out[..nx], &mut v, &mut z);
        g[j * nx..(j + 1) * nx].copy_from_slice(&out[..nx]);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(mask: &[bool], nx: usize, ny: usize) -> Vec<f64> {
        let sites: Vec<(usize, usize)> =
            (0..nx * ny).filter(|&k| mask[k]).map(|k| (k % nx, k / nx)).collect();
        (0..nx * ny)
            .map(|k| {
                let (i, j) = (k % nx, k / nx);
                sites
                    .iter()
                    .map(|&(a, b)| {
                        let dx = a as f64 - i as f64;
                        let dy = b as f64 - j as f64;
                        dx * dx + dy * dy
                    })
                    .fold(INF, f64::min)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let nx = 5 + trial % 7;
            let ny = 4 + trial % 5;
            let density = rng.random_range(0.01..0.3);
            let mask: Vec<bool> = (0..nx * ny).map(|_| rng.random::<f64>() < density).collect();
            if !mask.iter().any(|&m| m) {
                continue;
            }
            assert_eq!(squared_distance_transform(&mask, nx, ny), brute(&mask, nx, ny));
        }
    }
}
