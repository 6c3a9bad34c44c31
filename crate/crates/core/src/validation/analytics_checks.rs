use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nalgebra::{DMatrix, DVector};

use super::{timed, CheckOutcome, Profile, OLS_RELATIVE_TOLERANCE, SALIENCE_SUM_TOLERANCE};
use crate::analytics::{
    build_regression_frame, cosine, cosine_dense, cosine_similarity_grid, ols, ols_hc_robust, prune_topics,
    rank_correlation_matrix, resolve_topic_meta, seed_topic_meta, spearman_rho, topic_salience, HcFlavor, ModelSpec,
    PruneReport, TopicMeta, TopicOrigin,
};
use crate::model::run_inference;
use crate::oracle::{generate_synthetic, naive_ols, SyntheticCorpusSpec, SyntheticSpec};
use crate::text::{SeedScheme, TopicKind};
use crate::{CorpusSet, ModelParams, ModelState};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= 1e-300
}

/// A fitted five-corpus state shaped like the production analysis.
pub struct ReportShapeFixture {
    pub state: ModelState,
    pub corpora: CorpusSet,
    pub prune: PruneReport,
    pub meta: Vec<TopicMeta>,
}

/// 18 seed topics and 4 extra topics over the five standard corpora, with
/// sharply peaked topic-word distributions; labeled documents follow θ.
pub fn report_shape_fixture(profile: Profile) -> ReportShapeFixture {
    let corpora = CorpusSet::five_corpora();
    let spec = SyntheticSpec {
        seed_topics: 18,
        extra_topics: 4,
        vocab_size: 600,
        corpora: corpora
            .specs()
            .iter()
            .map(|c| SyntheticCorpusSpec {
                tag: c.tag.clone(),
                docs: if c.labeled { 360 } else { 600 },
                labeled: c.labeled,
            })
            .collect(),
        mean_length: 12.0,
        min_length: 3,
        alpha: 5.0,
        beta: 0.1,
        disjoint_topics: false,
        labeled_from_theta: true,
        rng_seed: 2013,
    };
    let corpus = generate_synthetic(&spec).expect("valid spec");
    let params = ModelParams {
        sweeps: profile.pick(40, 15),
        beta: spec.beta,
        rng_seed: 2013,
        ..ModelParams::default()
    };
    let run = run_inference(corpus.docs, params, spec.vocab_size, 18, false).expect("valid corpus");
    let prune = prune_topics(&run.state, &corpora).expect("corpora match");
    let scheme = SeedScheme::gles_2013();
    let user: Vec<TopicMeta> = prune
        .retained
        .iter()
        .filter(|t| t.0 > 18)
        .enumerate()
        .map(|(i, &t)| TopicMeta {
            topic: t,
            label: format!("New topic {}", i + 1),
            origin: TopicOrigin::New,
            kind: if i % 2 == 0 { TopicKind::Politics } else { TopicKind::Policy },
        })
        .collect();
    let meta = resolve_topic_meta(&prune.retained, 18, &seed_topic_meta(&scheme), &user).expect("all topics labeled");
    ReportShapeFixture {
        state: run.state,
        corpora,
        prune,
        meta,
    }
}

fn check_salience(fx: &ReportShapeFixture, failures: &mut Vec<String>) -> usize {
    let table = topic_salience(&fx.state, &fx.corpora, &fx.prune.retained).expect("retained topics exist");
    let mut checked = 0;
    for (j, tag) in table.corpora.iter().enumerate() {
        let Some(sum) = table.column_sum(j) else { continue };
        checked += 1;
        if (sum - 100.0).abs() > SALIENCE_SUM_TOLERANCE {
            failures.push(format!("salience column {tag} sums to {sum}"));
        }
    }
    checked
}

fn check_spearman(failures: &mut Vec<String>) -> usize {
    // (x, y, rho, two-sided p) from an independent statistics package
    let fixtures: [(&[f64], &[f64], f64, f64); 3] = [
        (&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 5.0, 4.0], 0.8, 0.104_088_039_795_723_6),
        (&[1.0, 2.0, 2.0, 3.0, 5.0, 4.0], &[2.0, 1.0, 4.0, 3.0, 6.0, 6.0], 0.794_117_647_058_823_6, 0.059_217_891_308_772_586),
        (
            &[3.1, 0.5, 2.2, 7.0, 1.1, 4.4, 6.0, 5.5, 0.2, 9.9, 8.8, 3.3],
            &[2.0, 1.0, 3.5, 6.0, 0.3, 3.0, 7.5, 4.0, 0.9, 8.0, 9.5, 2.5],
            0.923_076_923_076_923_1,
            1.862_195_109_868_098_7e-5,
        ),
    ];
    for (i, (x, y, rho, p)) in fixtures.iter().enumerate() {
        match spearman_rho(x, y) {
            Ok(s) if (s.rho - rho).abs() < 1e-12 && rel_close(s.p_value, *p, 1e-6) => {}
            Ok(s) => failures.push(format!("spearman fixture {i}: rho {} p {}", s.rho, s.p_value)),
            Err(e) => failures.push(format!("spearman fixture {i}: {e}")),
        }
    }
    fixtures.len()
}

fn check_cosines(pairs: usize, failures: &mut Vec<String>) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let dim = 40u32;
    for i in 0..pairs {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<(u32, u64)> {
            let mut v = Vec::new();
            for t in 0..dim {
                if rng.random_bool(0.3) {
                    v.push((t, rng.random_range(1..50u64)));
                }
            }
            v
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let dense = |v: &[(u32, u64)]| {
            let mut d = vec![0.0; dim as usize];
            for &(t, c) in v {
                d[t as usize] = c as f64;
            }
            d
        };
        let (da, db) = (dense(&a), dense(&b));
        let naive = {
            let dot: f64 = da.iter().zip(&db).map(|(x, y)| x * y).sum();
            let na: f64 = da.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = db.iter().map(|x| x * x).sum::<f64>().sqrt();
            (na > 0.0 && nb > 0.0).then(|| dot / (na * nb))
        };
        let sparse = cosine(&a, &b);
        let ok = match (sparse, cosine_dense(&da, &db), naive) {
            (Some(s), Some(d), Some(n)) => {
                (0.0..=1.0).contains(&s) && (s - d).abs() <= 1e-12 && (s - n).abs() <= 1e-12
            }
            (None, None, None) => true,
            _ => false,
        };
        let self_ok = a.is_empty() || cosine(&a, &a) == Some(1.0);
        if !ok || !self_ok {
            failures.push(format!("cosine pair {i}: sparse {sparse:?} naive {naive:?}"));
        }
    }
    pairs
}

fn check_ols(fixtures: usize, failures: &mut Vec<String>) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let (n, p) = (50, 5);
    let names: Vec<String> = (0..p).map(|j| format!("x{j}")).collect();
    let mut compared = 0;
    for f in 0..fixtures {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut r = vec![1.0];
                r.push(rng.random_range(-2.0..2.0));
                r.push(rng.random_range(0.0..10.0));
                r.push(if rng.random_bool(0.4) { 1.0 } else { 0.0 });
                r.push(rng.random_range(-1.0..1.0f64).powi(3));
                r
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 0.5 + 1.5 * r[1] - 0.2 * r[2] + r[3] + 3.0 * r[4] + rng.random_range(-1.0..1.0) * (1.0 + r[2] / 5.0))
            .collect();
        let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        let yv = DVector::from_column_slice(&y);
        for hc in [HcFlavor::Hc0, HcFlavor::Hc1, HcFlavor::Hc2, HcFlavor::Hc3] {
            let fit = match ols(&x, &yv, &names, hc, "fixture") {
                Ok(fit) => fit,
                Err(e) => {
                    failures.push(format!("ols fixture {f} {hc}: {e}"));
                    continue;
                }
            };
            let Some(naive) = naive_ols(&rows, &y, hc) else {
                failures.push(format!("ols fixture {f}: naive inverse failed"));
                continue;
            };
            compared += 1;
            for (j, c) in fit.coefficients.iter().enumerate() {
                if !rel_close(c.estimate, naive.coefficients[j], OLS_RELATIVE_TOLERANCE)
                    || !rel_close(c.std_error, naive.std_errors[j], OLS_RELATIVE_TOLERANCE)
                {
                    failures.push(format!(
                        "ols fixture {f} {hc} {}: {} ± {} vs {} ± {}",
                        c.name, c.estimate, c.std_error, naive.coefficients[j], naive.std_errors[j]
                    ));
                }
            }
            if !rel_close(fit.r_squared, naive.r_squared, OLS_RELATIVE_TOLERANCE) {
                failures.push(format!("ols fixture {f} {hc}: R² {} vs {}", fit.r_squared, naive.r_squared));
            }
            let e = DVector::from_vec(fit.residuals.clone());
            let xte = x.transpose() * &e;
            let scale = x.norm() * e.norm();
            if xte.amax() > 1e-10 * scale {
                failures.push(format!("ols fixture {f} {hc}: residuals not orthogonal ({})", xte.amax()));
            }
        }
    }
    compared
}

/// Criterion 6: salience sums, Spearman and cosine fixtures, and OLS with
/// sandwich errors against the naive oracle.
pub fn check_analytics_oracles(profile: Profile) -> CheckOutcome {
    timed(6, "analytics oracles", || {
        let mut failures = Vec::new();
        let fx = report_shape_fixture(profile);
        let columns = check_salience(&fx, &mut failures);
        let spearman = check_spearman(&mut failures);
        let cosines = check_cosines(1000, &mut failures);
        let fits = check_ols(20, &mut failures);
        let summary = format!(
            "{columns} salience columns, {spearman} rank fixtures, {cosines} cosine pairs, {fits} OLS fits (N = 50, 4 predictors, HC0-HC3, rel. tol {OLS_RELATIVE_TOLERANCE:e})"
        );
        if failures.is_empty() {
            (true, summary)
        } else {
            (false, format!("{summary}; {} failures, first: {}", failures.len(), failures[0]))
        }
    })
}

/// Criterion 7: shapes of the report tables on a five-corpus fit.
pub fn check_report_shapes(profile: Profile) -> CheckOutcome {
    timed(7, "report shapes", || {
        let fx = report_shape_fixture(profile);
        let mut failures = Vec::new();
        let seeds = fx.meta.iter().filter(|m| !m.is_new()).count();
        let new = fx.meta.iter().filter(|m| m.is_new()).count();
        if seeds != 18 {
            failures.push(format!("{seeds} seed topics retained"));
        }
        if new == 0 {
            failures.push("no new topic survived pruning".into());
        }
        let table = topic_salience(&fx.state, &fx.corpora, &fx.prune.retained).expect("retained topics exist");
        let survey = table.corpus_labeled.iter().position(|&l| l).expect("labeled corpus");
        for (k, row) in table.percent.iter().enumerate() {
            if !table.topic_is_seed[k] && row[survey].is_some() {
                failures.push(format!("survey salience present for new topic {}", table.topics[k]));
            }
        }
        let matrix = rank_correlation_matrix(&table);
        let c = matrix.corpora.len();
        for a in 0..c {
            for b in 0..c {
                let cell = matrix.get(a, b);
                let want = if a == survey || b == survey { 18 } else { 18 + new };
                if cell.n != want || cell.rho.is_none() {
                    failures.push(format!("correlation {}-{}: n = {} rho {:?}", cell.a, cell.b, cell.n, cell.rho));
                }
            }
        }
        let grid = cosine_similarity_grid(&fx.state, &fx.corpora, &fx.meta).expect("retained topics exist");
        let expected_cells = 18 * 10 + new * 6;
        if grid.cells.len() != expected_cells {
            failures.push(format!("{} similarity cells, expected {expected_cells}", grid.cells.len()));
        }
        let frame = build_regression_frame(&grid.cells);
        let mut fitted = 0;
        for spec in ModelSpec::standard() {
            match ols_hc_robust(&frame, &spec, HcFlavor::Hc1) {
                Ok(r) if r.n == grid.cells.len() => fitted += 1,
                Ok(r) => failures.push(format!("{} used {} of {} cells", spec.name, r.n, grid.cells.len())),
                Err(e) => failures.push(format!("{}: {e}", spec.name)),
            }
        }
        let summary = format!(
            "18 seed + {new} new topics retained ({} dropped); correlation N = 18 / {}; {} cells = 18·10 + {new}·6; {fitted} models fitted",
            fx.prune.dropped.len(),
            18 + new,
            grid.cells.len()
        );
        if failures.is_empty() {
            (true, summary)
        } else {
            (false, format!("{summary}; first failure: {}", failures[0]))
        }
    })
}
