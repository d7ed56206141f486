use std::path::PathBuf;

use clap::{Args, ValueEnum};

use macc_core::converse::{
    avg_vs_comb_gap, comb_optimal_curve, full_avg_curve, level_avg_curve, BoundCurve,
};

use crate::common::{parse_profile, write_text, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Exact optimal tradeoff of the combinatorial topology.
    Comb,
    /// Average-load lower bound over the fixed-level ensemble.
    LevelAvg,
    /// Average-load lower bound over the full connectivity ensemble.
    FullAvg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Which bound family to emit.
    #[arg(long, value_enum)]
    family: Family,

    /// Number of caches.
    #[arg(long)]
    lambda_caches: u32,

    /// Per-level user counts (comb family), e.g. 0,0,1,0,0.
    #[arg(long)]
    profile: Option<String>,

    /// Caches per user (level-avg family).
    #[arg(long)]
    level: Option<u32>,

    /// Total users (level-avg and full-avg families).
    #[arg(long)]
    users: Option<u64>,

    /// Library size N for the memory axis; defaults to the user count.
    #[arg(long)]
    files: Option<u64>,

    /// Append the gap against the combinatorial optimum (level-avg family;
    /// needs the users to spread evenly over the level's cache groups).
    #[arg(long)]
    gap: bool,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output path; `.csv`/`.json` suffixes are appended for --format both.
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn build_curve(args: &BoundsArgs) -> Result<BoundCurve, Failure> {
    match args.family {
        Family::Comb => {
            let spec = args
                .profile
                .as_ref()
                .ok_or_else(|| Failure::validation("--family comb needs --profile"))?;
            let profile = parse_profile(spec, args.lambda_caches)?;
            let files = args.files.unwrap_or_else(|| profile.total_users().max(1));
            Ok(comb_optimal_curve(&profile, files))
        }
        Family::LevelAvg => {
            let level = args
                .level
                .ok_or_else(|| Failure::validation("--family level-avg needs --level"))?;
            let users = args
                .users
                .ok_or_else(|| Failure::validation("--family level-avg needs --users"))?;
            if level == 0 || level > args.lambda_caches {
                return Err(Failure::validation(format!(
                    "--level must lie in [1, {}]",
                    args.lambda_caches
                )));
            }
            let files = args.files.unwrap_or(users.max(1));
            Ok(level_avg_curve(args.lambda_caches, level, users, files))
        }
        Family::FullAvg => {
            let users = args
                .users
                .ok_or_else(|| Failure::validation("--family full-avg needs --users"))?;
            let files = args.files.unwrap_or(users.max(1));
            Ok(full_avg_curve(args.lambda_caches, users, files))
        }
    }
}

fn gap_column(args: &BoundsArgs, curve: &BoundCurve) -> Result<Option<Vec<macc_core::combinatorics::Rational>>, Failure> {
    if !args.gap {
        return Ok(None);
    }
    if args.family != Family::LevelAvg {
        return Err(Failure::validation("--gap applies to --family level-avg"));
    }
    let level = args.level.expect("validated with the family");
    let users = args.users.expect("validated with the family");
    let gaps = curve
        .corners()
        .iter()
        .map(|c| avg_vs_comb_gap(args.lambda_caches, level, users, c.t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(gaps))
}

fn csv_with_gap(curve: &BoundCurve, gaps: &Option<Vec<macc_core::combinatorics::Rational>>) -> String {
    let base = curve.to_csv();
    let Some(gaps) = gaps else {
        return base;
    };
    let mut lines = base.lines();
    let mut out = format!("{},gap_num,gap_den\n", lines.next().expect("header"));
    for (line, gap) in lines.zip(gaps) {
        out.push_str(&format!("{line},{},{}\n", gap.numer(), gap.denom()));
    }
    out
}

fn json_with_gap(
    curve: &BoundCurve,
    gaps: &Option<Vec<macc_core::combinatorics::Rational>>,
) -> serde_json::Value {
    let mut value = curve.to_json_value();
    if let Some(gaps) = gaps {
        let corners = value["corners"].as_array_mut().expect("corner array");
        for (corner, gap) in corners.iter_mut().zip(gaps) {
            corner["gap_vs_comb"] = serde_json::json!({
                "num": gap.numer().to_string(),
                "den": gap.denom().to_string(),
            });
        }
    }
    value
}

pub fn run(args: BoundsArgs) -> Result<(), Failure> {
    let curve = build_curve(&args)?;
    let gaps = gap_column(&args, &curve)?;
    match args.format {
        Format::Csv => write_text(args.output.as_deref(), &csv_with_gap(&curve, &gaps)),
        Format::Json => {
            let text = serde_json::to_string_pretty(&json_with_gap(&curve, &gaps))
                .expect("curve serializes");
            write_text(args.output.as_deref(), &text)
        }
        Format::Both => {
            let base = args
                .output
                .clone()
                .ok_or_else(|| Failure::validation("--format both needs --output"))?;
            let csv_path = base.with_extension("csv");
            let json_path = base.with_extension("json");
            write_text(Some(&csv_path), &csv_with_gap(&curve, &gaps))?;
            let text = serde_json::to_string_pretty(&json_with_gap(&curve, &gaps))
                .expect("curve serializes");
            write_text(Some(&json_path), &text)
        }
    }
}
