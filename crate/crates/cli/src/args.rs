use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Elliptic Selberg integrals: theta kernels, closed forms and identity checks.
#[derive(Debug, Parser)]
#[command(name = "eselberg", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Modular parameter as re,im.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,1")]
    pub tau: Complex64,

    /// Target relative truncation error of the theta series.
    #[arg(long, global = true, default_value_t = selberg_core::theta::DEFAULT_EPS_SERIES)]
    pub eps_series: f64,

    /// Tanh-sinh level per cube axis (default depends on p).
    #[arg(long, global = true)]
    pub quad_level: Option<u32>,

    /// First exponent shift of the ε-ladder.
    #[arg(long, global = true, default_value_t = 0.04)]
    pub eps0: f64,

    /// Number of ε-ladder rungs.
    #[arg(long, global = true, default_value_t = 5)]
    pub eps_rungs: usize,

    /// Relative tolerance of the command's checks (default depends on the command).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate θ₁ or one of its t-derivatives.
    Theta {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: Complex64,
        #[arg(long, default_value_t = 0)]
        order: u32,
    },
    /// Evaluate the level-κ theta function θ_{κ,m}.
    ThetaLevel {
        #[arg(long)]
        kappa: u32,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
    },
    /// Closed-form Selberg value B_p(α, β, γ), cross-checked by cubature when possible.
    Selberg {
        #[arg(long)]
        p: u32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        beta: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        gamma: Complex64,
    },
    /// Check I_p(λ, τ) = K_p θ₁(λ, τ)^{p+1} for one job.
    Verify {
        #[arg(long)]
        p: u32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        /// Continuation exponent (default −p/(p+1)).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Option<Complex64>,
        /// Taylor terms subtracted beyond the minimum.
        #[arg(long, default_value_t = 0)]
        extra_subtraction: u32,
    },
    /// I_p/θ₁^{p+1} over an evenly spaced λ-grid.
    Sweep {
        #[arg(long)]
        p: u32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda_start: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda_end: Complex64,
        #[arg(long)]
        steps: usize,
    },
    /// Heat-equation and transformation-law checks for θ₁^{p+1}.
    HeatCheck {
        /// Single p; default runs p = 1..=4.
        #[arg(long)]
        p: Option<u32>,
        /// Single λ (with --tau); default samples the validated domain.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<Complex64>,
        /// Random (λ, τ) samples per p.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the property suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also run the slow suites (λ-scans and the p = 2 identity).
        #[arg(long)]
        full: bool,
    },
}

/// "re,im" or a bare real.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a complex number re,im"))
    };
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(s)?, 0.0),
    };
    if !z.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.3,-1").unwrap(), Complex64::new(0.3, -1.0));
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert!(parse_complex("1,x").is_err());
        assert!(parse_complex("inf,0").is_err());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
