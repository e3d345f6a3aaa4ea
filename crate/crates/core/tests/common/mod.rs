#![allow(dead_code)]

use ortholoc::gridmap::OrthoMap;
use ortholoc::matching::Method;
use ortholoc::rng::Rng;

pub fn random_map(w: usize, h: usize, rng: &mut Rng) -> OrthoMap {
    let pixels = (0..w * h).map(|_| rng.below(256) as u8).collect();
    OrthoMap::gray(w, h, pixels).unwrap()
}

/// Per-placement score by direct summation over the printed formulas.
/// `None` marks a zero-variance window; `Err` a zero-variance template.
pub fn naive_score(
    map: &OrthoMap,
    template: &OrthoMap,
    u: usize,
    v: usize,
    method: Method,
    weight: &dyn Fn(usize, usize) -> f64,
) -> Result<Option<f64>, ()> {
    let (m, n) = (template.width(), template.height());
    let count = (m * n) as f64;
    let r = |s: usize, t: usize| map.get(u + s, v + t) as f64;
    let p = |s: usize, t: usize| template.get(s, t) as f64;
    let mut r_mean = 0.0;
    let mut p_mean = 0.0;
    for t in 0..n {
        for s in 0..m {
            r_mean += r(s, t);
            p_mean += p(s, t);
        }
    }
    r_mean /= count;
    p_mean /= count;
    let (mut num, mut rr, mut pp, mut ssd, mut sad) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for t in 0..n {
        for s in 0..m {
            let (a, b) = (r(s, t), p(s, t));
            ssd += (a - b) * (a - b);
            sad += (a - b).abs();
            let (da, db) = (a - r_mean, b - p_mean);
            num += match method {
                Method::Wncc => weight(s, t) * da.abs() * db.abs(),
                _ => da * db,
            };
            rr += da * da;
            pp += db * db;
        }
    }
    match method {
        Method::Ssd => Ok(Some(ssd)),
        Method::Sad => Ok(Some(sad)),
        Method::Ncc | Method::Wncc => {
            if pp == 0.0 {
                Err(())
            } else if rr == 0.0 {
                Ok(None)
            } else {
                Ok(Some(num / (rr * pp).sqrt()))
            }
        }
    }
}

pub type NaiveField = (Vec<Option<f64>>, Option<(usize, usize)>);

/// Full field plus the tie-broken optimum (smallest v, then smallest u).
pub fn naive_field(
    map: &OrthoMap,
    template: &OrthoMap,
    method: Method,
    weight: &dyn Fn(usize, usize) -> f64,
) -> Result<NaiveField, ()> {
    let pw = map.width() - template.width() + 1;
    let ph = map.height() - template.height() + 1;
    let mut field = Vec::with_capacity(pw * ph);
    let mut best: Option<(usize, usize, f64)> = None;
    for v in 0..ph {
        for u in 0..pw {
            let s = naive_score(map, template, u, v, method, weight)?;
            if let Some(s) = s {
                let better = match best {
                    None => true,
                    Some((_, _, b)) if method.higher_is_better() => s > b,
                    Some((_, _, b)) => s < b,
                };
                if better {
                    best = Some((u, v, s));
                }
            }
            field.push(s);
        }
    }
    Ok((field, best.map(|(u, v, _)| (u, v))))
}

pub fn pass_line(id: &str, ok: bool, detail: &str) {
    println!("criterion {id}: {} - {detail}", if ok { "PASS" } else { "FAIL" });
}
