use crate::error::{RdhError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f32,
    pub beta1: f32,
    pub beta2: f32,
    pub eps: f32,
    /// L2 coefficient; contributes `2 * weight_decay * w` to decayed gradients.
    pub weight_decay: f32,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 1e-3,
        }
    }
}

/// Adam with the L2 penalty folded into the gradient (not decoupled).
///
/// Parameter groups are identified by position: every call to [`Adam::step`]
/// must pass the same groups in the same order.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    step: u64,
    first: Vec<Vec<f32>>,
    second: Vec<Vec<f32>>,
}

/// One parameter group for an optimizer step.
pub struct ParamGroup<'a> {
    pub values: &'a mut [f32],
    pub grads: &'a [f32],
    pub decay: bool,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, groups: &mut [ParamGroup<'_>]) -> Result<()> {
        if self.first.is_empty() {
            self.first = groups.iter().map(|g| vec![0.0; g.values.len()]).collect();
            self.second = self.first.clone();
        }
        if groups.len() != self.first.len() {
            return Err(RdhError::ShapeMismatch(format!(
                "optimizer tracks {} groups, got {}",
                self.first.len(),
                groups.len()
            )));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.values.len() != g.grads.len() || g.values.len() != self.first[i].len() {
                return Err(RdhError::ShapeMismatch(format!("parameter group {i}")));
            }
            if g.grads.iter().any(|v| !v.is_finite()) {
                return Err(RdhError::NonFinite("optimizer gradient"));
            }
        }

        self.step += 1;
        let c = self.config;
        let t = self.step as i32;
        let correct1 = (1.0 - (c.beta1 as f64).powi(t)) as f32;
        let correct2 = (1.0 - (c.beta2 as f64).powi(t)) as f32;
        for (i, g) in groups.iter_mut().enumerate() {
            let decay = if g.decay { 2.0 * c.weight_decay } else { 0.0 };
            let (m, v) = (&mut self.first[i], &mut self.second[i]);
            for j in 0..g.values.len() {
                let grad = g.grads[j] + decay * g.values[j];
                m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * grad;
                v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * grad * grad;
                let m_hat = m[j] / correct1;
                let v_hat = v[j] / correct2;
                g.values[j] -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_decay() -> AdamConfig {
        AdamConfig {
            weight_decay: 0.0,
            ..AdamConfig::default()
        }
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut adam = Adam::new(AdamConfig::default());
        let mut w = vec![0.0f32; 4];
        let g = vec![0.0f32; 4];
        for _ in 0..3 {
            adam.step(&mut [ParamGroup {
                values: &mut w,
                grads: &g,
                decay: true,
            }])
            .unwrap();
        }
        assert_eq!(w, vec![0.0; 4]);
        assert_eq!(adam.steps_taken(), 3);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // t = 1: m = 0.1, v = 0.001, m_hat = 1, v_hat = 1 -> w = -lr / (1 + eps).
        let mut adam = Adam::new(no_decay());
        let mut w = vec![0.0f32];
        adam.step(&mut [ParamGroup {
            values: &mut w,
            grads: &[1.0],
            decay: true,
        }])
        .unwrap();
        let expected = -1e-3f64 / (1.0 + 1e-8);
        assert!((w[0] as f64 - expected).abs() < 1e-9, "{}", w[0]);
    }

    #[test]
    fn weight_decay_pulls_towards_zero() {
        let mut adam = Adam::new(AdamConfig::default());
        let mut w = vec![1.0f32];
        adam.step(&mut [ParamGroup {
            values: &mut w,
            grads: &[0.0],
            decay: true,
        }])
        .unwrap();
        assert!(w[0] < 1.0);
        let mut b = vec![1.0f32];
        let mut adam = Adam::new(AdamConfig::default());
        adam.step(&mut [ParamGroup {
            values: &mut b,
            grads: &[0.0],
            decay: false,
        }])
        .unwrap();
        assert_eq!(b[0], 1.0);
    }

    #[test]
    fn rejects_non_finite_gradients() {
        let mut adam = Adam::new(no_decay());
        let mut w = vec![0.0f32];
        let err = adam.step(&mut [ParamGroup {
            values: &mut w,
            grads: &[f32::NAN],
            decay: false,
        }]);
        assert!(matches!(err, Err(RdhError::NonFinite(_))));
    }
}
