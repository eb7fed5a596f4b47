"""Exact fermionic one- and two-point functions of KP and BKP tau-functions.

The two-point function is obtained order by order from a lifting operator and
the one-point data, with every over-determined equation re-checked.
"""

from .errors import TauliftError
from .scalar import HScalar, hs_arith, hs_exp, hs_inv
from .series import BiSeries, ZSeries, bs_separable_product, kernel_expand, zs_arith
from .weylop import (OpSymbol, lifting_operator, op_add, op_adjoint, op_antisym, op_apply,
                     op_compose, op_from_generator, op_half_conjugate, op_iota)
from .fock import (BogoliubovBKP, BogoliubovKP, affine_extract, affine_extract_b,
                   canonical_from_admissible, fock_oracle_vev, two_point_assemble,
                   two_point_disassemble, wick_vev)
from .solver import (SolveReport, bgw_closed_two_point, gkm_closed_two_point, residual_bkp,
                     residual_kp, rspin_closed_two_point, solve_one_point_qc, solve_two_point_bkp,
                     solve_two_point_kp)
from .models import ModelSpec, model_instantiate, model_known_affine, model_one_points

__version__ = "0.1.0"
