use super::{ModelParams, TrainConfig};

/// First and second moment estimates plus the step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: ModelParams,
    pub v: ModelParams,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update. Weight decay is expected to be in `grads` already.
pub fn adam_step(params: &mut ModelParams, grads: &ModelParams, state: &mut AdamState, config: &TrainConfig) {
    state.step += 1;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    let c1 = 1.0 - b1.powi(state.step as i32);
    let c2 = 1.0 - b2.powi(state.step as i32);
    let lr = config.learning_rate;
    let eps = config.adam_eps;
    let tensors = params
        .tensors_mut()
        .into_iter()
        .zip(grads.tensors())
        .zip(state.m.tensors_mut())
        .zip(state.v.tensors_mut());
    for (((p, g), m), v) in tensors {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::init_params;

    fn tiny() -> (ModelParams, TrainConfig) {
        let cfg = TrainConfig {
            layers: 1,
            hidden: 2,
            ..TrainConfig::default()
        };
        (init_params(&cfg, 1).unwrap(), cfg)
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let (mut p, cfg) = tiny();
        let before = p.clone();
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &before.zeros_like(), &mut state, &cfg);
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let (mut p, cfg) = tiny();
        let before = p.clone();
        let mut grads = p.zeros_like();
        for (k, t) in grads.tensors_mut().into_iter().enumerate() {
            t.iter_mut().for_each(|g| *g = 0.3 - 0.2 * k as f64);
        }
        let mut state = AdamState::new(&p);
        adam_step(&mut p, &grads, &mut state, &cfg);
        for ((after, orig), g) in p.tensors().iter().zip(before.tensors()).zip(grads.tensors()) {
            for i in 0..after.len() {
                let moved = orig[i] - after[i];
                let expected = cfg.learning_rate * g[i].signum();
                assert!(((moved - expected) / expected).abs() < 1e-6, "{moved} vs {expected}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let (p0, cfg) = tiny();
        let mut grads = p0.zeros_like();
        grads.axpy(0.7, &p0);
        let run = || {
            let mut p = p0.clone();
            let mut state = AdamState::new(&p);
            for _ in 0..3 {
                adam_step(&mut p, &grads, &mut state, &cfg);
            }
            p
        };
        let (a, b) = (run(), run());
        assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
