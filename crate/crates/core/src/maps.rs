//! Bridges between the exterior algebra and exact linear algebra: matrices
//! of linear operators against the deterministic monomial bases, and the
//! standard subspaces (kernels, images, preimages) they generate.

use std::sync::Arc;

use crate::algebra::AlgebraSpec;
use crate::exterior::{basis_monos, vector_basis, Form, Mono, VectorForm};
use crate::linalg::{image, kernel, Matrix, Subspace};

/// Matrix of a form-to-form operator, columns indexed by `dom`, rows by `cod`.
pub fn form_op_matrix(
    a: &Arc<AlgebraSpec>,
    dom: &[Mono],
    cod: &[Mono],
    op: impl Fn(&Form) -> Form,
) -> Matrix {
    let cols: Vec<Vec<crate::scalar::GaussRat>> = dom
        .iter()
        .map(|m| op(&Form::monomial(a, *m, crate::scalar::GaussRat::one())).coeffs_on(cod))
        .collect();
    Matrix::from_cols(&cols, cod.len())
}

/// Matrix of an operator from vector (0,q)-forms to scalar forms.
pub fn vec_to_form_matrix(
    a: &Arc<AlgebraSpec>,
    dom: &[(usize, Mono)],
    cod: &[Mono],
    op: impl Fn(&VectorForm) -> Form,
) -> Matrix {
    let cols: Vec<Vec<crate::scalar::GaussRat>> = dom
        .iter()
        .map(|&(lambda, m)| {
            let comp = Form::monomial(a, m, crate::scalar::GaussRat::one());
            op(&VectorForm::simple(&comp, lambda)).coeffs_on(cod)
        })
        .collect();
    Matrix::from_cols(&cols, cod.len())
}

/// Matrix of an operator between vector-form spaces.
pub fn vec_to_vec_matrix(
    a: &Arc<AlgebraSpec>,
    dom: &[(usize, Mono)],
    cod: &[(usize, Mono)],
    op: impl Fn(&VectorForm) -> VectorForm,
) -> Matrix {
    let cols: Vec<Vec<crate::scalar::GaussRat>> = dom
        .iter()
        .map(|&(lambda, m)| {
            let comp = Form::monomial(a, m, crate::scalar::GaussRat::one());
            op(&VectorForm::simple(&comp, lambda)).coeffs_on(cod)
        })
        .collect();
    Matrix::from_cols(&cols, cod.len())
}

/// Matrix of ∂̄ from `Λ^{p,q}` to `Λ^{p,q+1}`.
pub fn delbar_matrix(a: &Arc<AlgebraSpec>, p: usize, q: usize) -> Matrix {
    let dom = basis_monos(a.n, p, q);
    let cod = basis_monos(a.n, p, q + 1);
    form_op_matrix(a, &dom, &cod, |u| u.delbar())
}

/// Matrix of ∂ from `Λ^{p,q}` to `Λ^{p+1,q}`.
pub fn del_matrix(a: &Arc<AlgebraSpec>, p: usize, q: usize) -> Matrix {
    let dom = basis_monos(a.n, p, q);
    let cod = basis_monos(a.n, p + 1, q);
    form_op_matrix(a, &dom, &cod, |u| u.del())
}

/// `ker ∂̄ ⊆ Λ^{p,q}` as coordinates against `basis_monos(n, p, q)`.
pub fn ker_delbar(a: &Arc<AlgebraSpec>, p: usize, q: usize) -> Subspace {
    kernel(&delbar_matrix(a, p, q))
}

/// `Im ∂̄ ⊆ Λ^{p,q}` (from `Λ^{p,q−1}`); the zero subspace when q = 0.
pub fn im_delbar(a: &Arc<AlgebraSpec>, p: usize, q: usize) -> Subspace {
    let dim = basis_monos(a.n, p, q).len();
    if q == 0 {
        return Subspace::zero(dim);
    }
    image(&delbar_matrix(a, p, q - 1))
}

/// `Im ∂ ⊆ Λ^{p,q}` (from `Λ^{p−1,q}`); the zero subspace when p = 0.
pub fn im_del(a: &Arc<AlgebraSpec>, p: usize, q: usize) -> Subspace {
    let dim = basis_monos(a.n, p, q).len();
    if p == 0 {
        return Subspace::zero(dim);
    }
    image(&del_matrix(a, p - 1, q))
}

/// Matrix of ∂̄ on vector (0,q)-forms (componentwise on a parallelisable
/// algebra); callers guarantee parallelisability.
pub fn vec_delbar_matrix(a: &Arc<AlgebraSpec>, q: usize) -> Matrix {
    let dom = vector_basis(a.n, q);
    let cod = vector_basis(a.n, q + 1);
    vec_to_vec_matrix(a, &dom, &cod, |t| t.delbar().expect("parallelisable"))
}
