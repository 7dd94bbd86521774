use crate::error::{Error, Result};

/// Architecture and training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LstmConfig {
    /// Channels per time step (1 for a single trace).
    pub input_dim: usize,
    pub hidden_size: usize,
    pub num_layers: usize,
    /// Inter-layer dropout probability, training only.
    pub dropout: f64,
    /// Points predicted per window.
    pub horizon: usize,
    /// Points per input window.
    pub window: usize,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            input_dim: 1,
            hidden_size: 20,
            num_layers: 2,
            dropout: 0.0,
            horizon: 3,
            window: 6,
            batch_size: 100,
            max_epochs: 30,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("input_dim", self.input_dim),
            ("hidden_size", self.hidden_size),
            ("num_layers", self.num_layers),
            ("horizon", self.horizon),
            ("window", self.window),
            ("batch_size", self.batch_size),
            ("max_epochs", self.max_epochs),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("lstm {name} must be positive")));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidConfig(format!(
                "dropout {} not in [0, 1)",
                self.dropout
            )));
        }
        if self.num_layers == 1 && self.dropout != 0.0 {
            return Err(Error::InvalidConfig(
                "dropout only applies between stacked layers; use 0 with one layer".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        Ok(())
    }
}
