use std::collections::HashMap;
use std::time::Instant;

use graphlet::em::{Observations, Pruned};
use graphlet::eval::EvalReport;
use graphlet::synth::{sample_model, sample_network_with, Link, SynthConfig};
use graphlet::theory::{accuracy_curve as curve, candidate_count_bound, redundancy_bound, CurveMethod};
use graphlet::{
    candidate_basis, candidate_basis_rates, exact_decompose, fit, prune, truncate_to_accuracy, CliqueBasis, Config,
    Model, WeightedNetwork,
};
use log::info;
use serde_json::json;

use crate::formats::{self, ModelFile};
use crate::{BoundsArgs, CliError, CurveArgs, DecomposeArgs, EvalArgs, Method, SynthArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cliques in lexicographic order, coefficients moved with them.
fn canonical(model: &Model) -> Result<Model, CliError> {
    let mut pairs: Vec<(Vec<usize>, f64)> =
        model.basis().cliques().iter().cloned().zip(model.mu().iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (cliques, mu): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(Model::new(model.node_count(), CliqueBasis::new(cliques)?, mu)?)
}

struct Fitted {
    model: Model,
    candidates: usize,
    iterations: usize,
    converged: bool,
    candidate_seconds: f64,
    em_seconds: f64,
}

fn two_stage<Y: Observations<f64>>(
    y: &Y,
    candidates: CliqueBasis,
    candidate_seconds: f64,
    config: &Config,
) -> Result<Fitted, CliError> {
    let start = Instant::now();
    info!("fitting {} candidate cliques", candidates.len());
    let result = fit(y, &candidates, config)?;
    let pruned: Pruned<f64> = prune(y, &result, config)?;
    let (iterations, converged) = match &pruned.refit {
        Some(refit) => (result.iterations + refit.iterations, result.converged && refit.converged),
        None => (result.iterations, result.converged),
    };
    Ok(Fitted {
        model: pruned.model,
        candidates: candidates.len(),
        iterations,
        converged,
        candidate_seconds,
        em_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let config = Config {
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        prune_fraction: args.prune,
        ..Default::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(t) = args.target_accuracy {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!("--target-accuracy must lie in [0, 1], got {t}")));
        }
    }
    if args.exact && args.power.is_some() {
        return Err(CliError::Usage("--power applies to integer edge lists, not --exact rates".into()));
    }

    let (labels, edge_count, fitted) = if args.exact {
        let (labels, rates) = formats::read_rates(&args.input)?;
        let edge_count = rates.positive_entries().count();
        let start = Instant::now();
        let fitted = if args.peel {
            let model = exact_decompose(&rates)?;
            let seconds = start.elapsed().as_secs_f64();
            Fitted { candidates: model.len(), model, iterations: 0, converged: true, candidate_seconds: seconds, em_seconds: 0.0 }
        } else {
            let (candidates, _) = candidate_basis_rates(&rates)?;
            two_stage(&rates, candidates, start.elapsed().as_secs_f64(), &config)?
        };
        (labels, edge_count, fitted)
    } else {
        let mut y = formats::read_network(&args.input)?;
        if let Some(k) = args.power {
            info!("raising network to power {k}");
            y = y.power(k)?;
        }
        let start = Instant::now();
        let (candidates, report) = candidate_basis(&y)?;
        info!("{} thresholds visited", report.thresholds.len());
        let fitted = two_stage(&y, candidates, start.elapsed().as_secs_f64(), &config)?;
        (y.labels().to_vec(), y.edge_count(), fitted)
    };

    let k_hat = fitted.model.len();
    let mut summary = format!(
        "nodes={}\tedges={}\tcandidates={}\tk_hat={}\titerations={}\tcandidate_seconds={:.3}\tem_seconds={:.3}",
        labels.len(),
        edge_count,
        fitted.candidates,
        k_hat,
        fitted.iterations,
        fitted.candidate_seconds,
        fitted.em_seconds
    );
    let mut meta = json!({
        "tool": "graphlet",
        "version": VERSION,
        "command": "decompose",
        "config": {
            "epsilon": args.epsilon,
            "max_iters": args.max_iters,
            "prune": args.prune,
            "target_accuracy": args.target_accuracy,
            "power": args.power,
            "exact": args.exact,
            "peel": args.peel,
        },
        "converged": fitted.converged,
        "iterations": fitted.iterations,
        "candidates": fitted.candidates,
        "k_hat": k_hat,
    });
    let model = match args.target_accuracy {
        Some(target) => {
            let approx = truncate_to_accuracy(&fitted.model, target)?;
            let ratio = approx.k_tilde as f64 / k_hat as f64;
            summary.push_str(&format!(
                "\tk_tilde={}\tachieved_accuracy={:.6}\tk_tilde_over_k_hat={:.6}",
                approx.k_tilde, approx.achieved_accuracy, ratio
            ));
            meta["k_tilde"] = json!(approx.k_tilde);
            meta["achieved_accuracy"] = json!(approx.achieved_accuracy);
            approx.model
        }
        None => fitted.model,
    };
    ModelFile::new(labels, &canonical(&model)?, meta).write(&args.output)?;
    println!("{summary}");
    if !fitted.converged {
        return Err(CliError::Convergence(format!(
            "EM did not converge within {} iterations; result written to {} and flagged in meta",
            args.max_iters,
            args.output.display()
        )));
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let config = SynthConfig {
        n: args.nodes,
        lambda_k: args.lambda_k,
        gamma_shape: args.alpha,
        gamma_scale: args.beta,
        bernoulli_p: args.p,
        seed: args.seed,
        require_nonexpandable: args.nonexpandable,
        max_rejects: args.max_rejects,
    };
    let mut model: Model = sample_model(&config)?;
    if args.round_mu {
        let mu = model.mu().iter().map(|m| m.round().max(1.0)).collect();
        model = Model::new(model.node_count(), model.basis().clone(), mu)?;
    }
    info!("sampled {} cliques on {} nodes", model.len(), model.node_count());
    let labels: Vec<String> = (0..args.nodes).map(|i| i.to_string()).collect();
    let meta = json!({
        "tool": "graphlet",
        "version": VERSION,
        "command": "synth",
        "seed": args.seed,
        "config": {
            "nodes": args.nodes,
            "lambda_k": args.lambda_k,
            "alpha": args.alpha,
            "beta": args.beta,
            "p": args.p,
            "nonexpandable": args.nonexpandable,
            "max_rejects": args.max_rejects,
            "round_mu": args.round_mu,
            "zero_truncated": args.zero_truncated,
            "exact": args.exact,
        },
    });
    ModelFile::new(labels.clone(), &model, meta).write(&args.out_model)?;
    if let Some(path) = &args.out_network {
        let header = format!("graphlet synth seed={} nodes={}", args.seed, args.nodes);
        let text = if args.exact {
            formats::format_rates(&labels, &model.rate_matrix(), &header)
        } else {
            let link = if args.zero_truncated { Link::ZeroTruncated } else { Link::Poisson };
            // A separate stream from the one that drew the model.
            let y = sample_network_with(&model, args.seed ^ 0x9e37_79b9_7f4a_7c15, link);
            formats::format_network(&y, &header)
        };
        formats::write(path, &text)?;
    }
    Ok(())
}

/// Re-expresses `y` over `universe`; every label of `y` must be in it.
fn onto_universe(y: &WeightedNetwork, universe: &[String]) -> Result<WeightedNetwork, CliError> {
    let position: HashMap<&str, usize> = universe.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let map = y
        .labels()
        .iter()
        .map(|l| {
            position
                .get(l.as_str())
                .copied()
                .ok_or_else(|| CliError::Data(format!("network node '{l}' is not in the truth model")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightedNetwork::with_labels(universe.to_vec(), y.edges().iter().map(|&(u, v, w)| (map[u], map[v], w)))?)
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let truth_file = ModelFile::read(&args.truth)?;
    let truth = truth_file.to_model()?;
    let estimate = ModelFile::read(&args.estimate)?.reindexed(&truth_file.nodes)?;
    let y = if args.exact {
        let (labels, rates) = formats::read_rates(&args.network)?;
        let y = rates
            .to_network()
            .ok_or_else(|| CliError::Data("rate file is not integer-valued".into()))?;
        WeightedNetwork::with_labels(labels, y.edges().iter().copied())?
    } else {
        formats::read_network(&args.network)?
    };
    let y = onto_universe(&y, &truth_file.nodes)?;
    let report = EvalReport::compare(&y, &truth, &estimate)?;
    if args.header {
        println!("{}", EvalReport::tsv_header());
    }
    println!("{}", report.to_tsv_row());
    Ok(())
}

pub fn accuracy_curve(args: &CurveArgs) -> Result<(), CliError> {
    let method = match args.method {
        Method::ClosedForm => {
            if !(args.alpha >= 1.0 && args.alpha.fract() == 0.0) {
                return Err(CliError::Data(format!(
                    "closed_form needs a positive integer --alpha, got {}; use --method monte_carlo",
                    args.alpha
                )));
            }
            CurveMethod::ClosedForm
        }
        Method::MonteCarlo => {
            if args.samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            CurveMethod::MonteCarlo { samples: args.samples, seed: args.seed }
        }
    };
    print!("{}", curve(args.k, args.alpha, method)?.to_tsv());
    Ok(())
}

pub fn bounds(args: &BoundsArgs) -> Result<(), CliError> {
    println!("candidate_count_bound\t{}", candidate_count_bound(args.k, args.p, args.q)?);
    match (args.n, args.c) {
        (Some(n), Some(c)) => println!("redundancy_bound\t{}", redundancy_bound(n, args.p, c, args.q)?),
        (None, None) => {}
        _ => return Err(CliError::Usage("--n and --c must be given together".into())),
    }
    Ok(())
}
