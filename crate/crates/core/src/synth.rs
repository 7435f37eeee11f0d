//! Deterministic synthetic crawl generator.
//!
//! Produces `users.jsonl` / `edges.tsv` byte-for-byte reproducibly from a
//! config and seed, with the qualitative structure the pipeline expects:
//!
//! - power-law in/out degree targets realized by a configuration-model
//!   stub pairing;
//! - pairing is backward in time (new users follow already-registered
//!   ones where possible), so snapshot reconstruction sees realistic
//!   degree growth and a registration surge of low-degree users produces
//!   a visible average-degree drop;
//! - registrations spread uniformly per month, plus a `surge_multiplier`
//!   influx of `fb_only` users from the launch month onward whose degree
//!   targets are scaled by `surge_degree_scale`;
//! - linking options drawn from `option_mix`, conditioned so `fb_only`
//!   users register only after the launch month while monthly totals and
//!   the overall mix stay on target;
//! - log-normal Twitter features with a per-feature multiplicative lift
//!   for users planted in the top PageRank decile of the generated graph
//!   — edges exist before features are drawn, so the plant can use the
//!   same influence measure the analysis pipeline does.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LinkingOption;
use crate::ml::FeatureVector;
use crate::month::Month;
use crate::seeding::{
    rng_for, DOMAIN_SYNTH_DEGREES, DOMAIN_SYNTH_FEATURES, DOMAIN_SYNTH_OPTIONS,
    DOMAIN_SYNTH_PAIRING,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionMix {
    pub neither: f64,
    pub tw_only: f64,
    pub fb_only: f64,
    pub both: f64,
}

impl OptionMix {
    pub fn get(&self, option: LinkingOption) -> f64 {
        match option {
            LinkingOption::Neither => self.neither,
            LinkingOption::TwOnly => self.tw_only,
            LinkingOption::FbOnly => self.fb_only,
            LinkingOption::Both => self.both,
        }
    }
}

/// Per-feature multiplicative lift applied to planted users. For `bio`
/// the lift multiplies the Bernoulli probability (capped at 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureShift {
    pub followings: f64,
    pub followers: f64,
    pub tweets: f64,
    pub likes: f64,
    pub lists: f64,
    pub bio: f64,
}

impl Default for FeatureShift {
    fn default() -> Self {
        FeatureShift { followings: 1.5, followers: 3.8, tweets: 2.2, likes: 1.8, lists: 4.0, bio: 1.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthRange {
    pub from: Month,
    pub to: Month,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    pub target_avg_degree: f64,
    /// Power-law tail exponent of the degree targets (> 1).
    pub degree_exponent: f64,
    pub month_range: MonthRange,
    pub fb_launch_month: Month,
    /// Post-launch monthly registrations as a multiple of the baseline
    /// rate; the excess is all `fb_only`.
    pub surge_multiplier: f64,
    /// Degree-target scale for surge users, in (0, 1].
    pub surge_degree_scale: f64,
    /// Share of users (by PageRank rank, from the top) whose features get
    /// the lift. The default is the top decile.
    pub plant_fraction: f64,
    pub option_mix: OptionMix,
    pub influence_feature_shift: FeatureShift,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 10_000,
            target_avg_degree: 12.0,
            degree_exponent: 2.3,
            month_range: MonthRange {
                from: "2012-09".parse().unwrap(),
                to: "2016-08".parse().unwrap(),
            },
            fb_launch_month: "2014-06".parse().unwrap(),
            surge_multiplier: 1.0,
            surge_degree_scale: 0.5,
            plant_fraction: 0.1,
            option_mix: OptionMix { neither: 0.1106, tw_only: 0.4552, fb_only: 0.3435, both: 0.0907 },
            influence_feature_shift: FeatureShift::default(),
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Error::InvalidConfig(msg);
        if self.n_users == 0 {
            return Err(invalid("n_users must be positive".into()));
        }
        if self.degree_exponent <= 1.0 || self.degree_exponent.is_nan() {
            return Err(invalid(format!(
                "degree_exponent must be > 1, got {}",
                self.degree_exponent
            )));
        }
        if self.target_avg_degree < 1.0 || self.target_avg_degree.is_nan() {
            return Err(invalid(format!(
                "target_avg_degree must be at least 1, got {}",
                self.target_avg_degree
            )));
        }
        if self.month_range.from > self.month_range.to {
            return Err(invalid(format!(
                "month_range: {} > {}",
                self.month_range.from, self.month_range.to
            )));
        }
        if self.surge_multiplier < 1.0 || self.surge_multiplier.is_nan() {
            return Err(invalid(format!(
                "surge_multiplier must be at least 1, got {}",
                self.surge_multiplier
            )));
        }
        if !(self.surge_degree_scale > 0.0 && self.surge_degree_scale <= 1.0) {
            return Err(invalid(format!(
                "surge_degree_scale must be in (0,1], got {}",
                self.surge_degree_scale
            )));
        }
        if !(self.plant_fraction > 0.0 && self.plant_fraction <= 0.5) {
            return Err(invalid(format!(
                "plant_fraction must be in (0,0.5], got {}",
                self.plant_fraction
            )));
        }
        let mix = &self.option_mix;
        let parts = [mix.neither, mix.tw_only, mix.fb_only, mix.both];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("option_mix fractions must be in [0,1]".into()));
        }
        let total: f64 = parts.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("option_mix must sum to 1, got {total}")));
        }
        let shift = &self.influence_feature_shift;
        for (name, v) in [
            ("followings", shift.followings),
            ("followers", shift.followers),
            ("tweets", shift.tweets),
            ("likes", shift.likes),
            ("lists", shift.lists),
            ("bio", shift.bio),
        ] {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(invalid(format!(
                    "influence_feature_shift.{name} must be at least 1, got {v}"
                )));
            }
        }
        // fb_only users can only register from the launch month on; the
        // post-launch window must be able to absorb their share.
        let layout = MonthLayout::of(self)?;
        let _ = layout;
        Ok(())
    }
}

struct MonthLayout {
    months: Vec<Month>,
    /// Index of the first month with the fb option (= months.len() when
    /// the launch is after the range).
    launch_index: usize,
    /// P(fb_only | post-launch month) for baseline users.
    fb_post_probability: f64,
}

impl MonthLayout {
    fn of(cfg: &SynthConfig) -> Result<MonthLayout> {
        let months: Vec<Month> =
            cfg.month_range.from.range_inclusive(cfg.month_range.to).collect();
        let m = months.len();
        let launch_index = if cfg.fb_launch_month <= cfg.month_range.from {
            0
        } else {
            months
                .iter()
                .position(|&mo| mo >= cfg.fb_launch_month)
                .unwrap_or(m)
        };
        let post = m - launch_index;
        let fb_share = cfg.option_mix.fb_only;
        if post == 0 && fb_share > 0.0 {
            return Err(Error::InvalidConfig(format!(
                "fb_launch_month {} is after the month range but option_mix.fb_only is {fb_share}",
                cfg.fb_launch_month
            )));
        }
        let fb_post_probability =
            if post == 0 { 0.0 } else { fb_share * m as f64 / post as f64 };
        if fb_post_probability > 1.0 + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "option_mix.fb_only = {fb_share} cannot be concentrated into {post} post-launch months"
            )));
        }
        Ok(MonthLayout { months, launch_index, fb_post_probability: fb_post_probability.min(1.0) })
    }
}

/// Counters reported alongside the generated bytes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GenReport {
    pub users_written: u64,
    pub edges_written: u64,
    pub self_loops_dropped: u64,
    pub duplicate_edges_collapsed: u64,
    /// Users in the top PageRank decile, eligible for the feature lift.
    pub planted_users: u64,
    pub surge_users: u64,
    /// Twitter-linked users (the ML-eligible population).
    pub eligible_users: u64,
    /// Out-stubs abandoned because no valid simple-graph target remained.
    pub unrealized_stubs: u64,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub users_jsonl: Vec<u8>,
    pub edges_tsv: Vec<u8>,
    pub report: GenReport,
}

// Log-normal bases for the five count features; one sigma for all so the
// configured lifts alone decide the chi-square ordering. The spread is
// chosen so the default lifts leave only a few percent Bayes error
// between planted and baseline profiles.
const FEATURE_MU: [f64; 5] = [4.2, 4.0, 5.5, 5.0, 1.2];
const FEATURE_SIGMA: f64 = 0.6;
const BIO_BASE_P: f64 = 0.5;

/// Draws one feature vector from the synthetic profile model. Public so
/// tests can fabricate friend lists from the same distribution.
pub fn sample_features(rng: &mut ChaCha12Rng, shift: &FeatureShift, planted: bool) -> FeatureVector {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let lifts = [shift.followings, shift.followers, shift.tweets, shift.likes, shift.lists];
    let mut counts = [0u64; 5];
    for f in 0..5 {
        let z: f64 = normal.sample(rng);
        let mut value = (FEATURE_MU[f] + FEATURE_SIGMA * z).exp();
        if planted {
            value *= lifts[f];
        }
        counts[f] = value.floor() as u64;
    }
    let bio_p = if planted { (BIO_BASE_P * shift.bio).min(1.0) } else { BIO_BASE_P };
    let bio = u8::from(rng.random::<f64>() < bio_p);
    FeatureVector {
        followings: counts[0],
        followers: counts[1],
        tweets: counts[2],
        likes: counts[3],
        lists: counts[4],
        bio,
    }
}

/// Generates the crawl files. Byte-identical for identical config.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let layout = MonthLayout::of(cfg)?;
    let m = layout.months.len();
    let n = cfg.n_users;

    // Monthly counts: baseline rate in every month, surge extra after the
    // launch. Cumulative rounding keeps each series smooth and summable.
    let post = m - layout.launch_index;
    let total_weight = m as f64 + post as f64 * (cfg.surge_multiplier - 1.0);
    let base_rate = n as f64 / total_weight;
    let surge_rate = base_rate * (cfg.surge_multiplier - 1.0);
    let mut base_counts = cumulative_rounded(base_rate, m);
    let mut surge_counts = vec![0usize; m];
    let post_series = cumulative_rounded(surge_rate, post);
    surge_counts[layout.launch_index..].copy_from_slice(&post_series);

    // rounding residue lands in the final months
    let mut diff = n as i64
        - (base_counts.iter().sum::<usize>() + surge_counts.iter().sum::<usize>()) as i64;
    let mut at = m;
    while diff != 0 && at > 0 {
        at -= 1;
        if diff > 0 {
            base_counts[at] += 1;
            diff -= 1;
        } else if base_counts[at] > 0 {
            base_counts[at] -= 1;
            diff += 1;
        }
    }
    if diff != 0 {
        return Err(Error::InvalidConfig(format!(
            "cannot place {n} users into {m} months with surge_multiplier {}",
            cfg.surge_multiplier
        )));
    }

    // conditional option mix: fb_only only after launch, everything else
    // rescaled so the overall mix matches option_mix
    let mix = &cfg.option_mix;
    let non_fb = 1.0 - mix.fb_only;
    let pre_cdf = option_cdf(&[
        (LinkingOption::Neither, if non_fb > 0.0 { mix.neither / non_fb } else { 0.0 }),
        (LinkingOption::TwOnly, if non_fb > 0.0 { mix.tw_only / non_fb } else { 0.0 }),
        (LinkingOption::FbOnly, 0.0),
        (LinkingOption::Both, if non_fb > 0.0 { mix.both / non_fb } else { 0.0 }),
    ]);
    let post_rest = 1.0 - layout.fb_post_probability;
    let post_cdf = option_cdf(&[
        (
            LinkingOption::Neither,
            if non_fb > 0.0 { mix.neither / non_fb * post_rest } else { 0.0 },
        ),
        (LinkingOption::TwOnly, if non_fb > 0.0 { mix.tw_only / non_fb * post_rest } else { 0.0 }),
        (LinkingOption::FbOnly, layout.fb_post_probability),
        (LinkingOption::Both, if non_fb > 0.0 { mix.both / non_fb * post_rest } else { 0.0 }),
    ]);

    let mut registered: Vec<Month> = Vec::with_capacity(n);
    let mut options: Vec<LinkingOption> = Vec::with_capacity(n);
    let mut is_surge: Vec<bool> = Vec::with_capacity(n);
    let mut options_rng = rng_for(cfg.seed, DOMAIN_SYNTH_OPTIONS, 0);
    for (mi, &month) in layout.months.iter().enumerate() {
        let cdf = if mi < layout.launch_index { &pre_cdf } else { &post_cdf };
        for _ in 0..base_counts[mi] {
            registered.push(month);
            options.push(draw_option(&mut options_rng, cdf));
            is_surge.push(false);
        }
        for _ in 0..surge_counts[mi] {
            registered.push(month);
            options.push(LinkingOption::FbOnly);
            is_surge.push(true);
        }
    }
    debug_assert_eq!(registered.len(), n);

    // Degree targets: Pareto draws calibrated to the average, capped at
    // n-1, surge users scaled down. In-degrees are a permutation of the
    // out-degrees within each group, which keeps the totals equal by
    // construction (no parity repair needed) while decoupling a user's
    // in- and out-degree.
    let cap = (n - 1).max(1) as f64;
    let x_min = calibrate_x_min(cfg.target_avg_degree, cfg.degree_exponent, cap)?;
    let beta = 1.0 / (cfg.degree_exponent - 1.0);
    let mut degree_rng = rng_for(cfg.seed, DOMAIN_SYNTH_DEGREES, 0);
    let mut draw_degree = |scale: f64| -> u32 {
        let u: f64 = degree_rng.random();
        let value = (x_min * (1.0 - u).powf(-beta)).min(cap) * scale;
        value.floor() as u32
    };
    let out_deg: Vec<u32> = is_surge
        .iter()
        .map(|&surge| draw_degree(if surge { cfg.surge_degree_scale } else { 1.0 }))
        .collect();
    let mut in_deg = vec![0u32; n];
    for (surge_group, domain_index) in [(false, 1u64), (true, 2u64)] {
        let members: Vec<usize> =
            (0..n).filter(|&i| is_surge[i] == surge_group).collect();
        let mut degrees: Vec<u32> = members.iter().map(|&i| out_deg[i]).collect();
        let mut perm_rng = rng_for(cfg.seed, DOMAIN_SYNTH_DEGREES, domain_index);
        rand::seq::SliceRandom::shuffle(degrees.as_mut_slice(), &mut perm_rng);
        for (&i, &d) in members.iter().zip(&degrees) {
            in_deg[i] = d;
        }
    }

    // Backward-in-time stub pairing: each month adds its users' in-stubs
    // to the pool, then the month's out-stubs draw targets from it.
    // Self-loops and repeat targets are re-drawn a bounded number of
    // times (stub-weighted sampling without replacement per source), so
    // degree targets realize as simple-graph edges. Out-stubs that cannot
    // be placed wait for the leftover phase against the full later pool.
    let mut pairing_rng = rng_for(cfg.seed, DOMAIN_SYNTH_PAIRING, 0);
    let mut pool: Vec<u32> = Vec::new();
    let mut leftover_out: Vec<u32> = Vec::new();
    let mut raw_pairs: Vec<(u32, u32)> =
        Vec::with_capacity(out_deg.iter().map(|&d| d as usize).sum());
    let mut seen: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    const PROBES: usize = 16;
    let mut draw_target =
        |source: u32, pool: &mut Vec<u32>, rng: &mut ChaCha12Rng| -> Option<u32> {
            for _ in 0..PROBES {
                if pool.is_empty() {
                    return None;
                }
                let j = rng.random_range(0..pool.len());
                let candidate = pool[j];
                if candidate != source && !seen.contains(&(source, candidate)) {
                    pool.swap_remove(j);
                    seen.insert((source, candidate));
                    return Some(candidate);
                }
            }
            None
        };

    let mut month_starts = vec![0usize; m + 1];
    {
        let mut i = 0usize;
        for mi in 0..m {
            month_starts[mi] = i;
            i += base_counts[mi] + surge_counts[mi];
        }
        month_starts[m] = i;
    }
    for mi in 0..m {
        let month_users = month_starts[mi]..month_starts[mi + 1];
        for u in month_users.clone() {
            pool.extend(std::iter::repeat_n(u as u32, in_deg[u] as usize));
        }
        for u in month_users {
            for _ in 0..out_deg[u] {
                match draw_target(u as u32, &mut pool, &mut pairing_rng) {
                    Some(v) => raw_pairs.push((u as u32, v)),
                    None => leftover_out.push(u as u32),
                }
            }
        }
    }
    // whatever could not pair backward tries once more against the whole
    // remaining pool; stubs that still collide are abandoned
    for u in leftover_out {
        if let Some(v) = draw_target(u, &mut pool, &mut pairing_rng) {
            raw_pairs.push((u, v));
        }
    }

    let total_out: u64 = out_deg.iter().map(|&d| u64::from(d)).sum();
    let mut report = GenReport {
        users_written: n as u64,
        surge_users: is_surge.iter().filter(|&&s| s).count() as u64,
        eligible_users: options.iter().filter(|o| o.twitter_linked()).count() as u64,
        unrealized_stubs: total_out - raw_pairs.len() as u64,
        ..Default::default()
    };
    // the pairing rejects loops and repeats already; this is a backstop
    let before = raw_pairs.len();
    raw_pairs.retain(|&(u, v)| u != v);
    report.self_loops_dropped = (before - raw_pairs.len()) as u64;
    raw_pairs.sort_unstable();
    let before = raw_pairs.len();
    raw_pairs.dedup();
    report.duplicate_edges_collapsed = (before - raw_pairs.len()) as u64;
    report.edges_written = raw_pairs.len() as u64;

    // planted influence: top PageRank slice of the finished topology
    let planted =
        pagerank_top_fraction(n, &registered, &options, &raw_pairs, cfg.plant_fraction);
    report.planted_users = planted.iter().filter(|&&p| p).count() as u64;

    // features for twitter-linked users
    let mut features: Vec<Option<FeatureVector>> = Vec::with_capacity(n);
    let mut feature_rng = rng_for(cfg.seed, DOMAIN_SYNTH_FEATURES, 0);
    for i in 0..n {
        if options[i].twitter_linked() {
            features.push(Some(sample_features(
                &mut feature_rng,
                &cfg.influence_feature_shift,
                planted[i],
            )));
        } else {
            features.push(None);
        }
    }

    // serialize
    let user_id = |i: u32| format!("u{i:06}");
    let mut users_jsonl = String::new();
    for i in 0..n {
        let record = crate::graph::UserRecord {
            user_id: user_id(i as u32),
            registered_at: registered[i],
            linking_option: options[i],
            twitter: features[i],
        };
        let line = serde_json::to_string(&record).expect("user record serialize");
        users_jsonl.push_str(&line);
        users_jsonl.push('\n');
    }
    let mut edges_tsv = String::new();
    for &(u, v) in &raw_pairs {
        let _ = writeln!(edges_tsv, "u{u:06}\tu{v:06}");
    }

    Ok(SynthOutput {
        users_jsonl: users_jsonl.into_bytes(),
        edges_tsv: edges_tsv.into_bytes(),
        report,
    })
}

/// counts[i] = round(rate*(i+1)) - round(rate*i); sums to round(rate*len).
fn cumulative_rounded(rate: f64, len: usize) -> Vec<usize> {
    let mut counts = Vec::with_capacity(len);
    let mut prev = 0i64;
    for i in 1..=len {
        let here = (rate * i as f64).round() as i64;
        counts.push((here - prev).max(0) as usize);
        prev = here;
    }
    counts
}

fn option_cdf(probs: &[(LinkingOption, f64)]) -> Vec<(LinkingOption, f64)> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|&(o, p)| {
            acc += p;
            (o, acc)
        })
        .collect()
}

fn draw_option(rng: &mut ChaCha12Rng, cdf: &[(LinkingOption, f64)]) -> LinkingOption {
    let u: f64 = rng.random();
    for &(option, cum) in cdf {
        if u < cum {
            return option;
        }
    }
    cdf.last().expect("non-empty cdf").0
}

/// PageRank over the generated topology (attributes are placeholders),
/// flagging the top `fraction` of scores.
fn pagerank_top_fraction(
    n: usize,
    registered: &[Month],
    options: &[LinkingOption],
    pairs: &[(u32, u32)],
    fraction: f64,
) -> Vec<bool> {
    let users: Vec<crate::graph::UserRecord> = (0..n)
        .map(|i| crate::graph::UserRecord {
            user_id: format!("u{i:06}"),
            registered_at: registered[i],
            linking_option: if options[i].twitter_linked() {
                // features are not drawn yet; topology is all that matters
                LinkingOption::Neither
            } else {
                options[i]
            },
            twitter: None,
        })
        .collect();
    let index = users.iter().enumerate().map(|(i, u)| (u.user_id.clone(), i as u32)).collect();
    let graph = crate::graph::SocialGraph::from_clean_parts(
        users,
        index,
        pairs,
        crate::graph::BuildStats::default(),
    );
    let opts = crate::pagerank::PageRankOptions { tol: 1e-9, ..Default::default() };
    let scores = crate::pagerank::pagerank(&graph, &opts)
        .expect("generated graph is non-empty")
        .values;
    let k = ((n as f64 * fraction).round() as usize).clamp(1, n);
    let mut sorted = scores.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k - 1];
    scores.iter().map(|&s| s >= threshold).collect()
}

/// Solves E[min(floor(x_min * U^(-beta)), cap)] ~= target by bisection on
/// the closed-form expectation of the capped continuous Pareto (the floor
/// costs about half a unit, folded into the target).
fn calibrate_x_min(target: f64, exponent: f64, cap: f64) -> Result<f64> {
    let beta = 1.0 / (exponent - 1.0);
    let wanted = target + 0.5;
    if wanted >= cap {
        return Err(Error::InvalidConfig(format!(
            "target_avg_degree {target} is not reachable with {cap} possible neighbors"
        )));
    }
    let expectation = |x_min: f64| -> f64 {
        let u0 = (x_min / cap).powf(1.0 / beta).min(1.0);
        let tail = if (beta - 1.0).abs() < 1e-12 {
            x_min * (1.0 / u0).ln()
        } else {
            x_min * (1.0 - u0.powf(1.0 - beta)) / (1.0 - beta)
        };
        cap * u0 + tail
    };
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, cap);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if expectation(mid) < wanted {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / 2.0)
}
