//! Weighted minwise hashing over bags with real-valued weights.
//!
//! Weights are discretized onto a grid, and the signature component `j` of a
//! bag is the smallest point assigned to `j` among Poisson processes attached
//! to every element and grid level below its weight. Two signatures agree in
//! a component with probability equal to the weighted Jaccard similarity of
//! the discretized bags. The BagMinHash variants generate those points
//! lazily and stop as soon as no further point can lower the signature.
//!
//! ```
//! use bagminhash::{bagminhash2, estimate_jaccard, RngConfig, WeightDiscretization, WeightedBag};
//!
//! let grid = WeightDiscretization::single_precision();
//! let a = WeightedBag::new(vec![(1, 2.0), (2, 1.0)]).unwrap();
//! let b = WeightedBag::new(vec![(1, 1.0), (2, 3.0)]).unwrap();
//! let config = RngConfig::default();
//! let sa = bagminhash2(&a, &grid, 1024, config).unwrap();
//! let sb = bagminhash2(&b, &grid, 1024, config).unwrap();
//! let j = estimate_jaccard(&sa, &sb).unwrap().value;
//! assert!((j - 0.4).abs() < 0.1);
//! ```

pub mod bag;
pub mod discretization;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod maxtracker;
pub mod poisson;
pub mod rng;
pub mod signatures;

pub use bag::WeightedBag;
pub use discretization::{GridDescriptor, WeightDiscretization};
pub use error::{Error, Result};
pub use estimation::{
    bbit_estimate, bbit_variance, estimate, estimate_icws, estimate_jaccard, estimator_variance,
    exact_discretized_jaccard, exact_weighted_jaccard, JaccardEstimate,
};
pub use maxtracker::MaxTracker;
pub use poisson::PoissonProcess;
pub use rng::{ExpSampler, RngConfig, SeedBuilder, SeededGenerator};
pub use signatures::{
    bagminhash1, bagminhash2, bbit_transform, bbit_transform_icws, enhanced_signature, icws_signature,
    naive_signature, sign, Algorithm, BbitSignature, IcwsSample, IcwsSignature, RealSignature, Signature,
    SignatureHeader,
};
