//! Meta-learning mechanics on real model parameters.

mod common;

use shs_core::gnn::{init_params, loss_and_grad, ModelParams, Supervision, TrainConfig};
use shs_core::graph::{generate_er, generate_grp, generate_sf, GrpParams, SfParams};
use shs_core::meta::{
    fine_tune, inner_adapt, meta_evaluate, meta_step, meta_train, MetaConfig, MetaTask, PredictMode, Split, TaskBundle,
};

fn model() -> TrainConfig {
    TrainConfig {
        layers: 2,
        hidden: 16,
        ..TrainConfig::default()
    }
}

fn corpus() -> Vec<TaskBundle> {
    let grp = GrpParams {
        mean_size: 40.0,
        ..GrpParams::default()
    };
    vec![
        common::bc_task("er-0", generate_er(150, 0.03, 1).unwrap(), 10.0, 1),
        common::bc_task("er-1", generate_er(180, 0.025, 2).unwrap(), 10.0, 2),
        common::bc_task("sf-0", generate_sf(150, SfParams::default(), 3).unwrap(), 10.0, 3),
        common::bc_task("sf-1", generate_sf(200, SfParams::default(), 4).unwrap(), 10.0, 4),
        common::bc_task("grp-0", generate_grp(160, grp, 5).unwrap(), 10.0, 5),
        common::bc_task("grp-1", generate_grp(200, grp, 6).unwrap(), 10.0, 6),
    ]
}

fn bits(p: &ModelParams) -> Vec<u64> {
    p.tensors().concat().iter().map(|x| x.to_bits()).collect()
}

#[test]
fn zero_inner_rate_is_pooled_gradient_descent() {
    let tasks = corpus();
    let theta = init_params(&model(), 7).unwrap();
    let config = MetaConfig {
        inner_lr: 0.0,
        ..MetaConfig::default()
    };
    for task in &tasks {
        assert_eq!(bits(&inner_adapt(&theta, task, 0.0, 3).unwrap()), bits(&theta));
    }
    let (_, updated) = meta_step(&theta, &tasks, &config).unwrap();

    // Reference path: gradient of each task's query loss at theta, summed in
    // task order, one plain step.
    let mut pooled = theta.zeros_like();
    for task in &tasks {
        let sup = Supervision {
            nodes: &task.query,
            labels: &task.labels.labels,
        };
        let (_, g) = loss_and_grad(&theta, &task.graph, task.features.normalized().view(), sup, 0.0).unwrap();
        pooled.axpy(1.0, &g);
    }
    let mut reference = theta.clone();
    reference.axpy(-config.meta_lr, &pooled);
    assert_eq!(bits(&updated), bits(&reference));
}

#[test]
fn query_labels_never_reach_the_inner_step() {
    let task = corpus().swap_remove(2);
    let theta = init_params(&model(), 3).unwrap();
    let before = inner_adapt(&theta, &task, 0.1, 2).unwrap();

    let mut flipped = task.clone();
    for &q in &task.query {
        flipped.labels.labels[q] = !flipped.labels.labels[q];
    }
    let after = inner_adapt(&theta, &flipped, 0.1, 2).unwrap();
    assert_eq!(bits(&before), bits(&after));
    // The query loss does see them.
    let (a, _) = task.loss_grad(&before, Split::Query).unwrap();
    let (b, _) = flipped.loss_grad(&after, Split::Query).unwrap();
    assert_ne!(a, b);
}

#[test]
fn support_labels_do_not_change_query_metrics() {
    let task = corpus().swap_remove(3);
    let theta = init_params(&model(), 4).unwrap();
    let mut flipped = task.clone();
    for &s in &task.support {
        flipped.labels.labels[s] = !flipped.labels.labels[s];
    }
    let mode = PredictMode::Ranked { k_percent: 10.0 };
    assert_eq!(
        meta_evaluate(&theta, &task, mode).unwrap(),
        meta_evaluate(&theta, &flipped, mode).unwrap()
    );
}

#[test]
fn fine_tune_does_not_increase_support_loss() {
    let task = common::bc_task("sf-500", generate_sf(500, SfParams::default(), 50).unwrap(), 5.0, 9);
    let theta = init_params(&model(), 12).unwrap();
    let (tuned, losses) = fine_tune(&theta, &task, 0.01, 10).unwrap();
    assert_eq!(losses.len(), 11);
    assert!(losses.last().unwrap() <= losses.first().unwrap(), "{losses:?}");
    let (again, _) = fine_tune(&theta, &task, 0.01, 10).unwrap();
    assert_eq!(bits(&tuned), bits(&again));
}

#[test]
fn meta_training_descends_and_is_deterministic() {
    let tasks = corpus();
    let config = MetaConfig {
        meta_epochs: 25,
        meta_lr: 0.01,
        seed: 5,
        ..MetaConfig::default()
    };
    let a = meta_train(&tasks, &config, &model()).unwrap();
    let b = meta_train(&tasks, &config, &model()).unwrap();
    assert_eq!(bits(&a.params), bits(&b.params));
    assert_eq!(a.query_losses, b.query_losses);

    let mean_query = |p: &ModelParams| {
        tasks
            .iter()
            .map(|t| {
                let adapted = inner_adapt(p, t, config.inner_lr, config.inner_steps).unwrap();
                t.loss_grad(&adapted, Split::Query).unwrap().0
            })
            .sum::<f64>()
            / tasks.len() as f64
    };
    let init = init_params(&model(), config.seed).unwrap();
    let start = mean_query(&init);
    let end = mean_query(&a.params);
    assert!(end < start, "mean query loss {start} -> {end}");
}

#[test]
fn meta_training_needs_two_tasks() {
    let mut tasks = corpus();
    tasks.truncate(1);
    assert!(meta_train(&tasks, &MetaConfig::default(), &model()).is_err());
}
