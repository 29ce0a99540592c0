"""Sobolev orthogonal polynomial bases on the unit ball.

Modules
-------
jacobi         Jacobi polynomials and univariate polynomial arithmetic
multipoly      sparse polynomials in d variables, exact ball and sphere moments
harmonics      spherical harmonics in any dimension
ball_classical classical orthogonal bases for (1-|x|^2)^mu and Gram reports
sobolev1d      one-variable Sobolev orthogonal family q_j
sobolev_ball   Sobolev orthogonal bases U, Q and R on the ball
certify        numerical certification of the identities above
cli            command-line front end
"""
from .ball_classical import GramReport, classical_basis, classical_norm_H, weighted_form
from .harmonics import harmonic_basis, harmonic_dim
from .jacobi import JacobiParams, Poly1D, jacobi_coeffs, jacobi_eval, jacobi_norm_h
from .multipoly import BallForm, MultiPoly
from .sobolev1d import SobolevFamily1D, q_norm, q_poly, sobolev_family
from .sobolev_ball import (SobolevBallBasis, basis_Q, basis_R, basis_U, gram_for, main_form,
                           nabla_form, nabla_weighted_form)

__version__ = "0.1.0"

__all__ = [
    "GramReport", "classical_basis", "classical_norm_H", "weighted_form",
    "harmonic_basis", "harmonic_dim",
    "JacobiParams", "Poly1D", "jacobi_coeffs", "jacobi_eval", "jacobi_norm_h",
    "BallForm", "MultiPoly",
    "SobolevFamily1D", "q_norm", "q_poly", "sobolev_family",
    "SobolevBallBasis", "basis_Q", "basis_R", "basis_U", "gram_for", "main_form",
    "nabla_form", "nabla_weighted_form",
]
