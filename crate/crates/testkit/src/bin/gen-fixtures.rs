//! Regenerates the committed CLI test fixtures deterministically.
//!
//! Usage: `cargo run -p trendlens-testkit --bin gen-fixtures`
//! Writes into crates/cli/tests/fixtures/.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use trendlens_testkit::rng::TestRng;

struct TweetOut {
    id: String,
    day: i64, // days since 2022-02-20
    second: u32,
    text: String,
    author: String,
    retweeters: Vec<String>,
    hashtags: Vec<String>,
    retweet_count: u64,
    label: Option<String>,
}

const EPOCH_DAY: i64 = 19_043; // 2022-02-20 in days since 1970-01-01

fn date_string(days_since_start: i64) -> String {
    // civil date from day number (proleptic Gregorian)
    let z = EPOCH_DAY + days_since_start + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = y + i64::from(m <= 2);
    format!("{y:04}-{m:02}-{d:02}")
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(tweets: &[TweetOut]) -> String {
    let mut out = String::new();
    for t in tweets {
        let retweeters: Vec<String> = t
            .retweeters
            .iter()
            .map(|r| format!("\"{}\"", json_escape(r)))
            .collect();
        let hashtags: Vec<String> = t
            .hashtags
            .iter()
            .map(|h| format!("\"{}\"", json_escape(h)))
            .collect();
        let hour = 8 + (t.second / 3600) % 12;
        let minute = (t.second / 60) % 60;
        let sec = t.second % 60;
        write!(
            out,
            "{{\"id\":\"{}\",\"created_at\":\"{}T{:02}:{:02}:{:02}Z\",\"text\":\"{}\",\"author\":\"{}\",\"retweeters\":[{}],\"hashtags\":[{}],\"retweet_count\":{}",
            json_escape(&t.id),
            date_string(t.day),
            hour,
            minute,
            sec,
            json_escape(&t.text),
            json_escape(&t.author),
            retweeters.join(","),
            hashtags.join(","),
            t.retweet_count
        )
        .unwrap();
        if let Some(label) = &t.label {
            write!(out, ",\"label\":\"{}\"", json_escape(label)).unwrap();
        }
        out.push_str("}\n");
    }
    out
}

fn pick<'a>(rng: &mut TestRng, pool: &[&'a str]) -> &'a str {
    pool[rng.below(pool.len())]
}

/// Mixed-topic corpus for trends, mining, and impact.
fn corpus_small() -> Vec<TweetOut> {
    let mut rng = TestRng::new(11);
    let mut tweets = Vec::new();
    let mut id = 0usize;

    let nazi_first = ["ukraine", "ukrainian", "ukraine's"];
    let nazi_second = ["nazi", "nazism", "neonazi"];
    let bio_third = ["weapon", "weapons", "warfare"];
    let filler = [
        "claims",
        "spread",
        "narrative",
        "propaganda",
        "report",
        "coverage",
        "allegations",
        "posts",
        "trend",
        "sources",
        "fake",
        "debunked",
        "story",
        "media",
    ];
    let bio_extra = [
        "bird",
        "bats",
        "virus",
        "labs",
        "fake",
        "migratory",
        "research",
    ];
    let authors = [
        "newsbot",
        "observer",
        "analyst",
        "daily_wrap",
        "correspondent",
    ];

    for day in 0..30i64 {
        // 'ukraine nazi' volume jumps after day 4 (the invasion date inside
        // the window), mirroring a step-shaped trend
        let nazi_count = if day == 0 || day == 29 {
            1
        } else if day < 4 {
            rng.below(2)
        } else {
            2 + rng.below(4)
        };
        for _ in 0..nazi_count {
            let text = format!(
                "{} {} {} {}",
                pick(&mut rng, &nazi_first),
                pick(&mut rng, &nazi_second),
                pick(&mut rng, &filler),
                pick(&mut rng, &filler)
            );
            tweets.push(TweetOut {
                id: format!("s{id:04}"),
                day,
                second: rng.below(40_000) as u32,
                text,
                author: pick(&mut rng, &authors).to_string(),
                retweeters: vec![],
                hashtags: vec!["ukraine".into()],
                retweet_count: rng.below(9) as u64,
                label: None,
            });
            id += 1;
        }

        let bio_count = if day == 0 || day == 29 {
            1
        } else {
            rng.below(3)
        };
        for _ in 0..bio_count {
            let text = format!(
                "ukraine biological {} {} {}",
                pick(&mut rng, &bio_third),
                pick(&mut rng, &bio_extra),
                pick(&mut rng, &bio_extra)
            );
            tweets.push(TweetOut {
                id: format!("s{id:04}"),
                day,
                second: rng.below(40_000) as u32,
                text,
                author: pick(&mut rng, &authors).to_string(),
                retweeters: vec![],
                hashtags: vec![],
                retweet_count: rng.below(9) as u64,
                label: None,
            });
            id += 1;
        }
    }
    tweets
}

/// Two 5-cliques and one bridge, one retweet per unordered pair.
fn corpus_cliques() -> Vec<TweetOut> {
    let group_a = ["alpha_1", "alpha_2", "alpha_3", "alpha_4", "alpha_5"];
    let group_b = ["beta_1", "beta_2", "beta_3", "beta_4", "beta_5"];
    let mut tweets = Vec::new();
    let mut id = 0usize;
    for group in [&group_a, &group_b] {
        for i in 0..5 {
            for j in (i + 1)..5 {
                tweets.push(TweetOut {
                    id: format!("c{id:03}"),
                    day: (id % 7) as i64,
                    second: (id * 977 % 40_000) as u32,
                    text: format!("routine chatter {id} between friends"),
                    author: group[j].to_string(),
                    retweeters: vec![group[i].to_string()],
                    hashtags: vec![],
                    retweet_count: 1,
                    label: None,
                });
                id += 1;
            }
        }
    }
    // the single bridge: alpha_1 retweets beta_1
    tweets.push(TweetOut {
        id: format!("c{id:03}"),
        day: 3,
        second: 1234,
        text: "crossover post shared once".to_string(),
        author: "beta_1".to_string(),
        retweeters: vec!["alpha_1".to_string()],
        hashtags: vec![],
        retweet_count: 1,
        label: None,
    });
    tweets
}

/// 32 labeled tweets with class-pure token pools, for the overfit check.
fn labeled_32() -> Vec<TweetOut> {
    let mut rng = TestRng::new(22);
    let fake_pool = [
        "hoax",
        "fabricated",
        "staged",
        "shocking",
        "exposed",
        "coverup",
    ];
    let genuine_pool = [
        "official",
        "confirmed",
        "briefing",
        "statement",
        "update",
        "verified",
    ];
    let users = [
        "u_echo", "u_delta", "u_omega", "u_sigma", "u_kappa", "u_theta",
    ];
    let mut tweets = Vec::new();
    for i in 0..32usize {
        let fake = i % 2 == 0;
        let pool = if fake { &fake_pool } else { &genuine_pool };
        let text = format!(
            "{} {} {} about the situation",
            pick(&mut rng, pool),
            pick(&mut rng, pool),
            pick(&mut rng, pool)
        );
        let retweeters: Vec<String> = (0..1 + rng.below(3))
            .map(|_| pick(&mut rng, &users).to_string())
            .collect();
        let mut retweeters = retweeters;
        retweeters.dedup();
        tweets.push(TweetOut {
            id: format!("l{i:03}"),
            day: (i % 10) as i64,
            second: rng.below(40_000) as u32,
            text,
            author: format!("poster_{}", i % 5),
            retweeters,
            hashtags: vec![],
            retweet_count: 5 + rng.below(20) as u64,
            label: Some(if fake { "fake" } else { "genuine" }.to_string()),
        });
    }
    tweets
}

/// Paired fixture for the username-branch ablation: both tweets of a pair
/// share the same text, only the fake one is retweeted by the amplifier
/// account, so text alone can never separate the classes.
fn planted_username() -> Vec<TweetOut> {
    let mut rng = TestRng::new(33);
    let words = [
        "grain",
        "convoy",
        "border",
        "markets",
        "strike",
        "talks",
        "summit",
        "footage",
        "frontline",
        "village",
        "supply",
        "column",
        "statement",
        "response",
        "outage",
        "corridor",
        "harbor",
        "night",
        "morning",
        "report",
    ];
    let users = [
        "v_one", "v_two", "v_three", "v_four", "v_five", "v_six", "v_seven",
    ];
    let mut tweets = Vec::new();
    for pair in 0..60usize {
        let len = 4 + rng.below(4);
        let text: Vec<&str> = (0..len).map(|_| pick(&mut rng, &words)).collect();
        let text = text.join(" ");
        let shared: Vec<String> = (0..1 + rng.below(2))
            .map(|_| pick(&mut rng, &users).to_string())
            .collect();

        let mut fake_retweeters = shared.clone();
        fake_retweeters.push("amplifier_bot".to_string());
        tweets.push(TweetOut {
            id: format!("p{pair:03}f"),
            day: (pair % 14) as i64,
            second: rng.below(40_000) as u32,
            text: text.clone(),
            author: format!("author_{}", pair % 9),
            retweeters: fake_retweeters,
            hashtags: vec![],
            retweet_count: 6,
            label: Some("fake".to_string()),
        });
        tweets.push(TweetOut {
            id: format!("p{pair:03}g"),
            day: (pair % 14) as i64,
            second: rng.below(40_000) as u32,
            text,
            author: format!("author_{}", (pair + 4) % 9),
            retweeters: shared,
            hashtags: vec![],
            retweet_count: 6,
            label: Some("genuine".to_string()),
        });
    }
    tweets
}

/// Four-class corpus for the generated-text share report.
fn generated_labels() -> Vec<TweetOut> {
    let mut rng = TestRng::new(44);
    let pools: [(&str, &[&str], usize); 4] = [
        (
            "human",
            &["weather", "coffee", "family", "travel", "concert", "garden"],
            36,
        ),
        (
            "gpt2",
            &[
                "paraphrase",
                "seamless",
                "synthesis",
                "entailment",
                "decoder",
                "tokens",
            ],
            12,
        ),
        (
            "rnn",
            &["recurrent", "sequence", "hidden", "state", "loop", "cells"],
            6,
        ),
        (
            "other",
            &[
                "forwarded",
                "chain",
                "copypasta",
                "viral",
                "template",
                "blast",
            ],
            6,
        ),
    ];
    let users = ["w_ant", "w_bee", "w_cat", "w_dog", "w_elk"];
    let mut tweets = Vec::new();
    let mut id = 0usize;
    for (label, pool, count) in pools {
        for _ in 0..count {
            let text = format!(
                "{} {} {} {}",
                pick(&mut rng, pool),
                pick(&mut rng, pool),
                pick(&mut rng, pool),
                pick(&mut rng, pool)
            );
            let retweeters: Vec<String> = (0..1 + rng.below(2))
                .map(|_| pick(&mut rng, &users).to_string())
                .collect();
            tweets.push(TweetOut {
                id: format!("g{id:03}"),
                day: (id % 12) as i64,
                second: rng.below(40_000) as u32,
                text,
                author: format!("writer_{}", id % 7),
                retweeters,
                hashtags: vec![],
                retweet_count: 5 + rng.below(10) as u64,
                label: Some(label.to_string()),
            });
            id += 1;
        }
    }
    tweets
}

fn prices_csv() -> String {
    let mut rng = TestRng::new(55);
    let mut out = String::from("date,close\n");
    let mut price = 245.0;
    for day in 0..30i64 {
        // weekends out: day 0 of the window (2022-02-20) is a Sunday
        let weekday = (EPOCH_DAY + day).rem_euclid(7); // 2 = Sat, 3 = Sun
        if weekday == 2 || weekday == 3 {
            continue;
        }
        price += rng.range_f64(-4.0, 3.0);
        if price < 200.0 {
            price = 201.5;
        }
        out.push_str(&format!("{},{:.2}\n", date_string(day), price));
    }
    out
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/fixtures");
    fs::create_dir_all(&dir).expect("fixture dir");

    fs::write(dir.join("corpus_small.jsonl"), render(&corpus_small())).unwrap();
    fs::write(dir.join("corpus_cliques.jsonl"), render(&corpus_cliques())).unwrap();
    fs::write(dir.join("labeled_32.jsonl"), render(&labeled_32())).unwrap();
    fs::write(
        dir.join("planted_username.jsonl"),
        render(&planted_username()),
    )
    .unwrap();
    fs::write(
        dir.join("generated_labels.jsonl"),
        render(&generated_labels()),
    )
    .unwrap();
    fs::write(dir.join("prices.csv"), prices_csv()).unwrap();
    fs::write(
        dir.join("fields.txt"),
        "# thematic fields under study\n\
         ukraine nazi: (ukraine OR ukrainian OR ukraine's) (nazi OR nazism OR nazists OR neonazi OR neo-nazi)\n\
         ukraine biological weapon: ukraine biological (weapon OR weapons OR warfare)\n",
    )
    .unwrap();
    println!("fixtures written to {}", dir.display());
}
