"""Normalized Hecke eigenvalues on newspaces with nebentypus and their mu_p limit."""
from ._backend import BACKEND
from .characters import DirichletCharacter, RootOfUnity, conductor, evaluate, parity, principal_inv_sqrt, unit_group_structure
from .chebyshev import MU_INF, MeasureP, cdf, cheb_coeffs, cheb_eval, density, even_part_identity_check, integrate, moment_closed_form, sample
from .equidist import build_report, ks_statistic, moment_test, trace_ratio_prediction
from .errors import DataIntegrityError, DomainError, NumericError, TransportError
from .numtheory import Factorization, beta_psi_f, factorize, is_exceptional, main_term_trace, omega, predicted_moment, psi, psi_new
from .spectra import EigenMultiset, EigenRecord, degree_histogram, empirical_moment, normalize, sum_Xn

__version__ = "0.1.0"
