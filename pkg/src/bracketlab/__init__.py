"""bracketlab: Poisson-bracket functional calculus.

Exact Lie-series expansions of composed Hamiltonian flows, numerical
evaluation of double-bracket functionals and their rigidity inequalities,
an explicit construction witnessing failure of lower semicontinuity, and
empirical perturbation-rate profiling.
"""

__version__ = "0.1.0"
