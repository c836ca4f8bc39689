//! Shared fixtures and brute-force oracles for the integration suites.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use abstractmeta::abstractnet::{smooth_l1, smooth_l1_grad, Activation, DropoutSpec, Mlp};
use abstractmeta::metadb::{target_names, MetaDatabase};
use abstractmeta::rng::rng_from_seed;
use abstractmeta::{is_missing, MISSING};
use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Multiclass AUC by exhaustive pair counting: for each ordered class pair,
/// every (positive, negative) pair scores 2 for a win and 1 for a tie.
pub fn auc_oracle(scores: ArrayView2<f64>, labels: &[usize]) -> Option<f64> {
    let c = scores.ncols();
    let pair_auc = |pos_class: usize, neg_class: usize, col: usize| -> Option<f64> {
        let pos: Vec<usize> = (0..labels.len()).filter(|&r| labels[r] == pos_class).collect();
        let neg: Vec<usize> = (0..labels.len()).filter(|&r| labels[r] == neg_class).collect();
        if pos.is_empty() || neg.is_empty() {
            return None;
        }
        let mut twice_wins = 0u64;
        for &p in &pos {
            for &q in &neg {
                let (a, b) = (scores[(p, col)], scores[(q, col)]);
                twice_wins += if a > b {
                    2
                } else if a == b {
                    1
                } else {
                    0
                };
            }
        }
        Some(twice_wins as f64 / (2 * pos.len() * neg.len()) as f64)
    };
    if c == 2 {
        return pair_auc(1, 0, 1);
    }
    let mut total = 0.0;
    let mut pairs = 0;
    for i in 0..c {
        for j in (i + 1)..c {
            if let (Some(a), Some(b)) = (pair_auc(i, j, i), pair_auc(j, i, j)) {
                total += (a + b) / 2.0;
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| total / pairs as f64)
}

/// Brute-force k-NN imputation: per-column min-max scaling over observed
/// cells; distance over co-observed columns scaled by `sqrt(d / shared)`;
/// neighbors picked by repeated arg-min with lowest-index ties; each missing
/// cell averages the neighbors observing it, else the column mean.
pub fn knn_impute_oracle(x: &Array2<f64>, k: usize) -> Array2<f64> {
    let (n, d) = x.dim();
    let mut scaled = x.clone();
    let mut means = vec![0.0; d];
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for i in 0..n {
            let v = x[(i, j)];
            if !is_missing(v) {
                lo = lo.min(v);
                hi = hi.max(v);
                sum += v;
                cnt += 1;
            }
        }
        means[j] = sum / cnt as f64;
        for i in 0..n {
            let v = x[(i, j)];
            if !is_missing(v) {
                scaled[(i, j)] = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
            }
        }
    }
    let dist = |a: usize, b: usize| -> Option<f64> {
        let mut s = 0.0;
        let mut shared = 0usize;
        for j in 0..d {
            let (u, v) = (scaled[(a, j)], scaled[(b, j)]);
            if !is_missing(u) && !is_missing(v) {
                s += (u - v) * (u - v);
                shared += 1;
            }
        }
        (shared > 0).then(|| (s * d as f64 / shared as f64).sqrt())
    };
    let mut out = x.clone();
    for i in 0..n {
        if (0..d).all(|j| !is_missing(x[(i, j)])) {
            continue;
        }
        let mut taken = vec![false; n];
        taken[i] = true;
        let mut neighbors = Vec::new();
        while neighbors.len() < k {
            let mut best: Option<(f64, usize)> = None;
            for r in 0..n {
                if taken[r] {
                    continue;
                }
                if let Some(dr) = dist(i, r) {
                    if best.is_none_or(|(bd, _)| dr < bd) {
                        best = Some((dr, r));
                    }
                }
            }
            let Some((_, r)) = best else { break };
            taken[r] = true;
            neighbors.push(r);
        }
        for j in 0..d {
            if !is_missing(x[(i, j)]) {
                continue;
            }
            let mut sum = 0.0;
            let mut cnt = 0usize;
            for &r in &neighbors {
                if !is_missing(x[(r, j)]) {
                    sum += x[(r, j)];
                    cnt += 1;
                }
            }
            out[(i, j)] = if cnt > 0 { sum / cnt as f64 } else { means[j] };
        }
    }
    out
}

/// Leave-one-out 1-NN error rate on min-max scaled features, Euclidean
/// distance, lowest-index ties.
pub fn n3_oracle(x: &Array2<f64>, labels: &[usize]) -> f64 {
    let (n, d) = x.dim();
    let mut scaled = x.clone();
    for j in 0..d {
        let lo = x.column(j).iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.column(j).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for i in 0..n {
            scaled[(i, j)] = if hi > lo { (x[(i, j)] - lo) / (hi - lo) } else { 0.0 };
        }
    }
    let mut errors = 0usize;
    for i in 0..n {
        let mut best = (f64::INFINITY, usize::MAX);
        for r in 0..n {
            if r == i {
                continue;
            }
            let s: f64 = (0..d).map(|j| (scaled[(i, j)] - scaled[(r, j)]).powi(2)).sum();
            if s < best.0 {
                best = (s, r);
            }
        }
        if labels[best.1] != labels[i] {
            errors += 1;
        }
    }
    errors as f64 / n as f64
}

/// Integer-valued matrix with roughly `frac` of cells missing, every row and
/// column keeping at least one observed cell.
pub fn sparse_matrix(n: usize, d: usize, frac: f64, seed: u64) -> Array2<f64> {
    let mut rng = rng_from_seed(seed);
    let mut x = Array2::from_shape_fn((n, d), |_| rng.random_range(0..6) as f64);
    for i in 0..n {
        for j in 0..d {
            if rng.random::<f64>() < frac {
                x[(i, j)] = MISSING;
            }
        }
    }
    for i in 0..n {
        if x.row(i).iter().all(|v| is_missing(*v)) {
            x[(i, 0)] = 1.0;
        }
    }
    for j in 0..d {
        if x.column(j).iter().all(|v| is_missing(*v)) {
            x[(0, j)] = 2.0;
        }
    }
    x
}

pub fn meta_database(x: Array2<f64>, y: Array2<f64>) -> MetaDatabase {
    let n = x.nrows();
    MetaDatabase {
        instance_names: (0..n).map(|i| format!("d{i}")).collect(),
        feature_names: (0..x.ncols()).map(|j| format!("f{j}")).collect(),
        x,
        y,
        target_names: target_names(),
        provenance: vec![],
    }
}

/// 200 meta-instances, 60 standard-normal columns; each AUC target is a
/// smooth nonlinear function of columns 0..5 plus N(0, 0.01²) noise.
pub fn trend_database(seed: u64) -> MetaDatabase {
    let mut rng = rng_from_seed(seed);
    let n = 200;
    let x: Array2<f64> = Array2::from_shape_simple_fn((n, 60), || StandardNormal.sample(&mut rng));
    let sigmoid = |v: f64| 1.0 / (1.0 + (-v).exp());
    let mut y = Array2::zeros((n, 3));
    for i in 0..n {
        let r = x.row(i);
        let raw = [
            (r[0] + 0.5 * r[1]).tanh() + 0.4 * r[2],
            (0.8 * r[1]).sin() + 0.3 * r[3] * r[0],
            sigmoid(r[2] - r[4]) * 2.0 + 0.25 * (r[3] + r[4]),
        ];
        for t in 0..3 {
            let noise: f64 = StandardNormal.sample(&mut rng);
            y[(i, t)] = 0.5 + 0.45 * sigmoid(raw[t]) + 0.01 * noise;
        }
    }
    meta_database(x, y)
}

/// Central-difference check of `Mlp::backward` under the smooth L1 loss.
/// Returns `‖g_analytic − g_numeric‖ / (‖g_analytic‖ + ‖g_numeric‖)`.
pub fn gradient_relative_error(dims: &[usize], batch: usize, lambda: f64, seed: u64) -> f64 {
    let mut net = Mlp::from_dims(
        dims,
        Activation::Relu,
        vec![DropoutSpec { layer: 1, p: 0.5 }],
        seed,
    )
    .unwrap();
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    // Zero initial biases put every unit behind a dead layer exactly on the
    // ReLU kink, where central differences see half the one-sided slope.
    for layer in &mut net.layers {
        layer.bias.mapv_inplace(|_| 0.5 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng));
    }
    let x = Array2::from_shape_simple_fn((batch, dims[0]), || StandardNormal.sample(&mut rng));
    let y = Array2::from_shape_simple_fn((batch, *dims.last().unwrap()), || {
        2.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    });
    // forward_eval ignores dropout
    let pass = net.forward_eval(x.view()).unwrap();
    let g = net.backward(&pass, smooth_l1_grad(pass.output.view(), y.view(), lambda).view());
    let analytic = g.flat();
    let params = net.flat_params();
    let h = 1e-5;
    let mut probe = net.clone();
    let loss = |m: &Mlp| smooth_l1(m.predict(x.view()).unwrap().view(), y.view(), lambda);
    let mut num = vec![0.0; params.len()];
    let mut p = params.clone();
    for k in 0..params.len() {
        p[k] = params[k] + h;
        probe.set_flat_params(&p);
        let up = loss(&probe);
        p[k] = params[k] - h;
        probe.set_flat_params(&p);
        let down = loss(&probe);
        p[k] = params[k];
        num[k] = (up - down) / (2.0 * h);
    }
    let diff: f64 = analytic.iter().zip(&num).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let na: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nn: f64 = num.iter().map(|a| a * a).sum::<f64>().sqrt();
    if na + nn == 0.0 {
        0.0
    } else {
        diff / (na + nn)
    }
}

/// Random small architecture: 1-3 hidden layers of width 2-8.
pub fn random_dims(seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let mut dims = vec![rng.random_range(2..7)];
    for _ in 0..rng.random_range(1..4) {
        dims.push(rng.random_range(2..9));
    }
    dims.push(rng.random_range(1..4));
    dims
}

/// One-thread HTTP stub answering `GET` requests from `route(path)`; counts hits.
pub struct MockServer {
    pub endpoint: String,
    pub hits: Arc<AtomicUsize>,
}

impl MockServer {
    pub fn start(route: impl Fn(&str, &str) -> (u16, Vec<u8>) + Send + 'static) -> MockServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let endpoint = format!("http://{addr}");
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        let base = endpoint.clone();
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut request_line = String::new();
                if reader.read_line(&mut request_line).is_err() {
                    continue;
                }
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).map_or(true, |n| n == 0) || line == "\r\n" {
                        break;
                    }
                }
                counter.fetch_add(1, Ordering::SeqCst);
                let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
                let (status, body) = route(&base, &path);
                let head = format!(
                    "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                    body.len()
                );
                let _ = stream.write_all(head.as_bytes());
                let _ = stream.write_all(&body);
            }
        });
        MockServer { endpoint, hits }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

/// 150 rows, 4 numeric attributes, 3 nominal classes.
pub fn iris_like_arff() -> String {
    let mut s = String::from(
        "@relation iris\n@attribute sepallength numeric\n@attribute sepalwidth numeric\n\
         @attribute petallength numeric\n@attribute petalwidth numeric\n\
         @attribute class {Iris-setosa,Iris-versicolor,Iris-virginica}\n@data\n",
    );
    let names = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"];
    for i in 0..150 {
        let c = i / 50;
        let t = i as f64 * 0.1;
        s.push_str(&format!(
            "{:.1},{:.1},{:.1},{:.1},{}\n",
            5.0 + c as f64 + t.sin(),
            3.0 + t.cos() * 0.5,
            1.5 + 2.0 * c as f64 + (t * 0.7).sin() * 0.3,
            0.2 + 0.8 * c as f64,
            names[c]
        ));
    }
    s
}

/// Writes `count` small classification CSVs with varied shape and class balance.
pub fn write_corpus(dir: &std::path::Path, count: usize, seed: u64) -> Vec<std::path::PathBuf> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(40..90);
            let d = rng.random_range(2..6);
            let classes = rng.random_range(2..4);
            let sep: f64 = rng.random_range(0.0..3.0);
            let mut text = (0..d).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",");
            text.push_str(",class\n");
            for i in 0..n {
                let c = i % classes;
                let row: Vec<String> = (0..d)
                    .map(|j| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        let shift = if j % 2 == 0 { sep * c as f64 } else { 0.0 };
                        format!("{:.4}", z * (1.0 + j as f64 * 0.5) + shift)
                    })
                    .collect();
                text.push_str(&row.join(","));
                text.push_str(&format!(",k{c}\n"));
            }
            let path = dir.join(format!("ds{k:02}.csv"));
            std::fs::write(&path, text).unwrap();
            path
        })
        .collect()
}
