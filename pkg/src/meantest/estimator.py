"""Scikit-learn style front end for the split-sample mean tester."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .core import Decision, Verdict, run_tester
from .validation import check_positive, check_positive_int

__all__ = ["GaussianMeanTester"]


class GaussianMeanTester(BaseEstimator):
    """Tests whether a sample batch is consistent with the standard normal
    law against alternatives whose mean norm is at least ``epsilon``.

    The batch passed to :meth:`fit` is split into two halves of n rows
    each; the test accepts iff the inner product of the half means stays
    within sqrt(3 d)/n in absolute value. With the rule-derived n, both
    the false-reject and false-accept probabilities are at most 1/3.

    The decision is a property of the whole batch, so there is no
    per-sample ``predict``; read the fitted attributes instead. Being a
    ``BaseEstimator``, the tester composes with ``clone``, ``get_params``,
    and parameter search tooling.

    Parameters
    ----------
    epsilon : float, default=1.0
        Mean-norm separation the test must detect, in sample units.
    c_star : float, default=1.0
        Anti-concentration constant in the sample-size rule
        n = max(1, ceil(25 * c_star^2 * sqrt(d) / epsilon^2)).
    n : int or None, default=None
        Explicit per-half sample size, overriding the rule.

    Attributes
    ----------
    decision_ : Decision
        Full decision record for the fitted batch.
    verdict_ : Verdict
        ACCEPT or REJECT.
    accept_ : bool
        True iff the verdict is ACCEPT.
    statistic_ : float
        The computed split statistic z.
    threshold_ : float
        The cutoff sqrt(3 d)/n actually used.
    n_ : int
        Rows used per half.
    under_sampled_ : bool
        True when the batch had fewer than 2n rows and the test ran on
        floor(count/2) rows per half; the 2/3-2/3 guarantee is then void.
    n_features_in_ : int
        Dimension d of the fitted batch.
    """

    def __init__(self, epsilon: float = 1.0, c_star: float = 1.0, n: int | None = None):
        self.epsilon = epsilon
        self.c_star = c_star
        self.n = n

    def fit(self, X, y=None) -> "GaussianMeanTester":
        """Run the test on the batch ``X`` of shape (count, dim)."""
        check_positive(self.epsilon, "epsilon")
        check_positive(self.c_star, "c_star")
        if self.n is not None:
            check_positive_int(self.n, "n")
        decision = run_tester(X, self.epsilon, self.c_star, n=self.n)
        self.decision_ = decision
        self.verdict_ = decision.verdict
        self.accept_ = decision.verdict is Verdict.ACCEPT
        self.statistic_ = decision.z
        self.threshold_ = decision.threshold
        self.n_ = decision.n
        self.under_sampled_ = decision.under_sampled
        self.n_features_in_ = int(np.asarray(X).shape[1])
        return self

    def fit_decision(self, X) -> Decision:
        """Fit and return the full decision record in one call."""
        return self.fit(X).decision_
