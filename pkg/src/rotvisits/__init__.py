"""Visit counts of multi-parameter rotations in shrinking intervals.

Finite-N lattice counting, Monte Carlo estimation of the joint visit-count
laws, exact large-d limiting moments, and the arithmetic helpers behind the
moment formula.
"""

__version__ = "0.1.0"
