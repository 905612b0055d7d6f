use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::image::{discretize, similarity, GrayImage, ImageError};
use crate::devo::{grow, DevoError, GrowthConfig, Organism};
use crate::neat::{Genome, IoShape};
use crate::neuro::{NetworkError, Topology};

/// One of the five controller families compared on the flag benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// A developmental organism whose cells exchange `chemicals` values.
    Developmental { chemicals: usize, topology: Topology },
    /// Each cell maps its own normalized `(x, y)` to a gray level; no
    /// communication and no growth loop.
    Regression,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 5] = [
        ModelVariant::Developmental { chemicals: 1, topology: Topology::Feedforward },
        ModelVariant::Developmental { chemicals: 1, topology: Topology::Recurrent },
        ModelVariant::Developmental { chemicals: 2, topology: Topology::Feedforward },
        ModelVariant::Developmental { chemicals: 2, topology: Topology::Recurrent },
        ModelVariant::Regression,
    ];

    pub fn chemicals(self) -> usize {
        match self {
            ModelVariant::Developmental { chemicals, .. } => chemicals,
            ModelVariant::Regression => 0,
        }
    }

    pub fn topology(self) -> Topology {
        match self {
            ModelVariant::Developmental { topology, .. } => topology,
            ModelVariant::Regression => Topology::Feedforward,
        }
    }

    /// Controller arity, not counting the bias slot.
    pub fn io_shape(self) -> IoShape {
        match self {
            ModelVariant::Developmental { chemicals, .. } => IoShape::new(4 * chemicals, chemicals + 1),
            ModelVariant::Regression => IoShape::new(2, 1),
        }
    }

    pub fn is_regression(self) -> bool {
        self == ModelVariant::Regression
    }

    /// The variant a genome of this arity and topology belongs to, if any.
    pub fn of_genome(genome: &Genome) -> Option<ModelVariant> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.io_shape() == genome.io() && v.topology() == genome.kind())
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelVariant::Developmental { chemicals, topology } => {
                let t = match topology {
                    Topology::Feedforward => "ffwd",
                    Topology::Recurrent => "recurr",
                };
                write!(f, "{chemicals}-{t}")
            }
            ModelVariant::Regression => f.write_str("regression"),
        }
    }
}

impl FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.to_string() == s)
            .ok_or_else(|| format!("unknown variant `{s}` (expected 1-ffwd, 1-recurr, 2-ffwd, 2-recurr or regression)"))
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("genome arity {got_in}->{got_out} does not match variant {variant} ({want_in}->{want_out})")]
    Arity {
        variant: ModelVariant,
        got_in: usize,
        got_out: usize,
        want_in: usize,
        want_out: usize,
    },
    #[error("genome topology {got} does not match variant {variant}")]
    Topology { variant: ModelVariant, got: Topology },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Devo(#[from] DevoError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

fn check_arity(genome: &Genome, variant: ModelVariant) -> Result<(), EvalError> {
    let (got, want) = (genome.io(), variant.io_shape());
    if got != want {
        return Err(EvalError::Arity {
            variant,
            got_in: got.n_inputs,
            got_out: got.n_outputs,
            want_in: want.n_inputs,
            want_out: want.n_outputs,
        });
    }
    if genome.kind() != variant.topology() {
        return Err(EvalError::Topology { variant, got: genome.kind() });
    }
    Ok(())
}

/// Image a regression controller paints on a `width x height` grid.
pub fn regression_image(genome: &Genome, width: usize, height: usize) -> Result<GrayImage, EvalError> {
    check_arity(genome, ModelVariant::Regression)?;
    let wiring = genome.compile()?;
    let mut state = vec![0.0; wiring.num_neurons()];
    let out = wiring.output_ids()[0];
    let norm = |i: usize, n: usize| if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
    Ok(GrayImage::from_fn(width, height, |row, col| {
        wiring.forward_in_place(&mut state, &[norm(col, width), norm(row, height), 1.0]);
        discretize(state[out])
    })?)
}

/// Fitness of `genome` on `target`: similarity of the converged phenotype,
/// or 0 when growth does not stabilize within the iteration cap.
pub fn evaluate(
    genome: &Genome,
    variant: ModelVariant,
    target: &GrayImage,
    gcfg: &GrowthConfig,
) -> Result<f64, EvalError> {
    check_arity(genome, variant)?;
    let (w, h) = (target.width(), target.height());
    let phenotype = match variant {
        ModelVariant::Regression => regression_image(genome, w, h)?,
        ModelVariant::Developmental { chemicals, .. } => {
            let organism = Organism::new(genome, w, h, chemicals)?;
            match grow(organism, gcfg).phenotype {
                Some(p) => p,
                None => return Ok(0.0),
            }
        }
    };
    Ok(similarity(&phenotype, target)?)
}
