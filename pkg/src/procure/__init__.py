"""Budget-constrained medical-supplies procurement planning toolkit.

Evaluates procurement plans by simulating case arrivals over one decision
cycle, and approximates the Pareto front of (epidemic control effect,
disease treatment effect) either directly on purchase quantities or on a
transformed budget-allocation space whose evaluation decomposes into
per-profile subproblems solved by tabu search.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
