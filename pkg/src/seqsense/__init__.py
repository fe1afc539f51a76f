"""Multi-parameter quantum sensing with sequential local measurements."""

__version__ = "0.1.0"

from . import bayes, fisher, models, optimize, protocol, qcore  # noqa: E402

__all__ = ["bayes", "fisher", "models", "optimize", "protocol", "qcore", "__version__"]
