"""Quantum-counting estimators for two-party distributed statistics.

Modules: :mod:`qsim` (state-vector kernels), :mod:`counting` (quantum
counting), :mod:`twoparty` (protocol and communication ledger),
:mod:`binexp` (digit planes), :mod:`lsf` (least squares), :mod:`softmax`,
:mod:`baselines` (cost formulas and phase diagram) and :mod:`cli`.
"""

from .counting import CountingConfig, Engine, OracleKind
from .errors import QcdistError
from .lsf import FitConfig

__all__ = ["CountingConfig", "Engine", "FitConfig", "OracleKind", "QcdistError"]
__version__ = "0.1.0"
