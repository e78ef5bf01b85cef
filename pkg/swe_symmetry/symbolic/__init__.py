from .symbols import (t, x, y, w, h, u, v, H, U, V, Omega, Omega_y, Omega_z, g,
                      phi0, epsilon, c, H0, U0, V0, jet, coord, param, constant, info)
from .expr import (as_expr, normalize, is_zero, equals, numerator, diff, total_derivative,
                   substitute, eval_numeric, compile_numeric, check_form)
from .text import to_text, from_text, try_from_text
