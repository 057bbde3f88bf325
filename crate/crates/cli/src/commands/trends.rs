//! `trends`: per-field daily counts, rolling means, and z-scores.

use std::path::PathBuf;

use trendlens_core::corpus::{count_time_series, rolling_mean, zscore};

use super::{ensure_out_dir, out_path, sanitize, write_text};
use crate::error::Error;
use crate::io::{corpus_file, fields};

pub struct TrendsOpts {
    pub corpus: PathBuf,
    pub fields: PathBuf,
    pub window: usize,
    pub out: PathBuf,
}

pub fn run(opts: &TrendsOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let field_list = fields::load_fields(&opts.fields)?;
    ensure_out_dir(&opts.out)?;

    for field in &field_list {
        let counts = count_time_series(&corpus, field)?;
        let smoothed = rolling_mean(&counts, opts.window)?;
        let scores = zscore(&smoothed)?;

        let mut csv = String::from("date,count,rolling_mean,zscore\n");
        for (i, &count) in counts.values.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                counts.start_day.add_days(i as i64),
                count,
                smoothed.values[i],
                scores.values[i]
            ));
        }
        write_text(
            &out_path(&opts.out, &format!("trend_{}.csv", sanitize(&field.name))),
            &csv,
        )?;
    }
    Ok(())
}
