//! The quantum disc algebra and its distributions, realized through the
//! faithful representation on the basis `{z^m}`: truncated operator
//! matrices, ordered and finite elements, integrals, q-derivatives, and the
//! Laplace-Beltrami machinery.

mod element;
mod integral;
mod matrix;
mod ordering;
mod qderiv;

pub use element::{
    normal_product, reorder, FiniteElement, OrderTag, OrderedElement, RadialElement, Reorderer,
};
pub use integral::{
    inner_product, inner_product_poly, integrate_finite, integrate_matrix, series_order, Measure,
};
pub use matrix::OpMatrix;
pub use ordering::{
    anti_normal_order, finite_to_matrix, finite_to_matrix_window, normal_order, radial_to_matrix, rep_generator, to_matrix,
    z_pow_matrix, zstar_pow_matrix, Generator,
};
pub use qderiv::{
    base_coeff, box_antinormal, box_tilde, dilate_z, qderiv, ComplementDilation, Convention,
    DerivScale, Placement, Side, TensorElement, Var,
};
