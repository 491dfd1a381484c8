"""CSE-compressed sparse constant matrices.

Generate sparse integer matrices, extract two-term common subexpressions,
pack the result into the six-array container and run exact-count
matrix-vector kernels straight off the compressed form.
"""

from ._csem import *  # noqa: F401,F403
from ._csem import __doc__  # noqa: F401
