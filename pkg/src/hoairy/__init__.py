"""Higher-order Airy kernels, finite-temperature Fredholm determinants and the
integro-differential Painleve-II / mKdV hierarchies."""

from .specfun import HigherAiryEvaluator, ai, ai_asymptotic, ai_deriv

__all__ = ["HigherAiryEvaluator", "ai", "ai_asymptotic", "ai_deriv"]
