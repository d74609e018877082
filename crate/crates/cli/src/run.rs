//! Reads the run directory, optimizes, and writes the results.

use std::error::Error as StdError;
use std::path::{Path, PathBuf};

use glidepath::horizon::load_lifetable;
use glidepath::io::{render_glidepath, write_output, ControlFile, EstimatorSpec};
use glidepath::optimizer::{IterationRecord, Optimum};
use glidepath::{scenarios, DpGrid, Estimator, FixedHorizon, Objective, Optimizer, OptimizerConfig, RandomHorizon};

use crate::Args;

type AnyResult<T> = Result<T, Box<dyn StdError + Send + Sync>>;

const CONTROL: &str = "control.txt";
const GLIDEPATH: &str = "gp.txt";
const OUTPUT: &str = "output.txt";

pub fn run(args: &Args) -> AnyResult<()> {
    if let Some(n) = args.scenario {
        return write_scenario(&args.directory, n, &args.start);
    }
    let control = ControlFile::read(&args.directory.join(CONTROL))?;
    let initial = glidepath::io::read_glidepath(&args.directory.join(GLIDEPATH), control.horizon)?;
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);

    let (estimator, threads) = match control.estimator {
        EstimatorSpec::Dp { precision, rf_max } => (Estimator::Dp(DpGrid::new(precision, rf_max)?), 4 * workers),
        EstimatorSpec::Simulation { .. } => (Estimator::Simulation { seed: args.seed, workers }, workers),
    };
    let mut config = OptimizerConfig::new(control.method, estimator, control.epsilon);
    if let EstimatorSpec::Simulation { base_n, alpha_noninferiority, alpha_zero } = control.estimator {
        config.base_sample_n = base_n;
        config.alpha_noninferiority = alpha_noninferiority;
        config.alpha_zero = alpha_zero;
        eprintln!("simulation seed={} workers={}", args.seed, workers);
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let optimum = pool.install(|| -> AnyResult<Optimum> {
        match &args.random_horizon {
            Some(path) => {
                let mortality = load_lifetable(path, args.renormalize)?;
                if mortality.s_max() != control.horizon {
                    return Err(format!(
                        "lifetable allows {} withdrawals but the control file has T_D={}",
                        mortality.s_max(),
                        control.horizon
                    )
                    .into());
                }
                let obj = RandomHorizon::new(control.params, control.withdrawal_rate, mortality)?;
                optimize(&obj, config, &initial)
            }
            None => {
                let obj = FixedHorizon::new(control.params, control.withdrawal_rate, control.horizon)?;
                optimize(&obj, config, &initial)
            }
        }
    })?;

    let (lo, hi) = optimum.eigen_extremes;
    eprintln!("min Hessian eigenvalue at solution: {lo:e}");
    eprintln!("max Hessian eigenvalue at solution: {hi:e}");
    if optimum.is_local_max() {
        eprintln!("solution is a local maximum");
    }
    write_output(&args.directory.join(OUTPUT), optimum.probability, &optimum.glidepath)?;
    if let Some(path) = &args.export_csv {
        export_csv(path, &optimum, &config)?;
    }
    Ok(())
}

fn optimize<O: Objective>(obj: &O, config: OptimizerConfig, initial: &[f64]) -> AnyResult<Optimum> {
    let mut opt = Optimizer::new(obj, config)?.with_observer(report);
    Ok(opt.optimize(initial)?)
}

fn report(r: &IterationRecord) {
    let mut line = format!("[{:?} {}] probability={:.12}", r.phase, r.iteration, r.probability);
    if let Some(m) = r.max_effective {
        line += &format!(" max_effective={m:.3e}");
    }
    if let Some((lo, hi)) = r.eigen_extremes {
        line += &format!(" eigenvalues=[{lo:.6e}, {hi:.6e}]");
    }
    if let Some(s) = r.climb_steps {
        line += &format!(" climb_steps={s}");
    }
    if r.worsened {
        line += " (probability decreased; see estimation precision or boundary)";
    }
    eprintln!("{line}");
}

fn diagnostics_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_diagnostics.csv"))
}

fn export_csv(path: &Path, optimum: &Optimum, config: &OptimizerConfig) -> AnyResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "alpha"])?;
    for (t, a) in optimum.glidepath.iter().enumerate() {
        w.write_record([(t + 1).to_string(), format!("{a:.10}")])?;
    }
    w.flush()?;

    let (seed, workers) = match config.estimator {
        Estimator::Simulation { seed, workers } => (seed.to_string(), workers.to_string()),
        Estimator::Dp(_) => (String::new(), String::new()),
    };
    let mut d = csv::Writer::from_path(diagnostics_path(path))?;
    d.write_record([
        "iteration",
        "phase",
        "probability",
        "max_effective",
        "min_eigenvalue",
        "max_eigenvalue",
        "climb_steps",
        "worsened",
        "seed",
        "workers",
    ])?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for r in &optimum.diagnostics {
        d.write_record([
            r.iteration.to_string(),
            format!("{:?}", r.phase),
            format!("{:.12}", r.probability),
            opt(r.max_effective.map(|m| format!("{m:e}"))),
            opt(r.eigen_extremes.map(|e| format!("{:e}", e.0))),
            opt(r.eigen_extremes.map(|e| format!("{:e}", e.1))),
            opt(r.climb_steps.map(|s| s.to_string())),
            r.worsened.to_string(),
            seed.clone(),
            workers.clone(),
        ])?;
    }
    d.flush()?;
    Ok(())
}

fn write_scenario(dir: &Path, number: u8, start: &str) -> AnyResult<()> {
    let sc = scenarios::scenario(number)?;
    let gp = scenarios::starting_glidepaths()
        .into_iter()
        .find(|(name, _)| *name == start)
        .map(|(_, gp)| gp)
        .ok_or_else(|| format!("unknown starting glidepath '{start}'"))?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(CONTROL), sc.control().render())?;
    std::fs::write(dir.join(GLIDEPATH), render_glidepath(&gp))?;
    eprintln!("wrote scenario {number} ({start} start) to {}", dir.display());
    Ok(())
}
