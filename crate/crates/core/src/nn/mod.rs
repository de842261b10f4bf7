//! Hand-differentiated layers. Every forward function is a pure value
//! transformation; each backward function returns exact gradients of the
//! matching forward definition.

mod activation;
mod adam;
mod conv3d;
mod dense;
pub mod gradcheck;
mod pool;

pub use activation::{relu, relu_backward, sigmoid, sigmoid_bce};
pub use adam::{adam_step, AdamHyper, AdamState};
pub use conv3d::{conv3d_backward, conv3d_forward, conv3d_param_grads, Conv3dLayer, FILTERS, KERNEL_HW};
pub use dense::{dense_backward, dense_forward, DenseGrads, DenseLayer};
pub use gradcheck::{finite_diff_gradient, relative_error};
pub use pool::{maxpool3d, maxpool3d_backward, Pool3d, PoolArgmax};
