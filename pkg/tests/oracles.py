"""Independent reference computations shared by the unit and acceptance tests."""

import itertools
import math

import numpy as np

PERMS5 = np.array(list(itertools.permutations(range(5))))


def brute_extremes(p, e):
    """Min and max of sum_i p[perm[i]] * e[i] over all 120 relabelings.

    Candidates are ranked with a vectorized pass, then every pairing within
    rounding distance of the extreme is re-summed with ``math.fsum`` so that
    the result is the correctly rounded sum of the same products the library
    forms.
    """
    p = np.asarray(p, dtype=float)
    e = np.asarray(e, dtype=float)
    prods = p[PERMS5] * e
    totals = prods.sum(axis=1)
    slack = 1e-12 * max(1.0, float(np.abs(totals).max()))
    lo = [math.fsum(r) for r in prods[totals <= totals.min() + slack]]
    hi = [math.fsum(r) for r in prods[totals >= totals.max() - slack]]
    return min(lo), max(hi)


def two_state_generator(k_out=1.0):
    """State 0 decays irreversibly into state 1."""
    return np.array([[-k_out, 0.0], [k_out, 0.0]])
