"""Polynomial power-amplifier model, design matrices and the Rapp reference nonlinearity.

The PA transfer function is modelled as a complex polynomial without intercept,

    f(s) = sum_{l=1..L} beta_l * s * |s|^(l-1),

which is linear in the coefficients once the pilot symbols are expanded into a
design matrix with entries s_n * |s_n|^(l-1).
"""

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedBasisError

# Condition number above which a matrix is treated as numerically singular.
CONDITION_LIMIT = 1e12

# Slack allowed when checking pilot amplitudes against the power cap.
AMPLITUDE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PaPolynomial:
    """Complex polynomial PA model of order ``L = len(coefficients)``.

    ``coefficients[l-1]`` multiplies the basis function ``s * |s|^(l-1)``, so the
    response at ``s = 0`` is always zero (there is no intercept term).
    """

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coef = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if coef.ndim != 1 or coef.size < 1:
            raise ValueError("coefficients must be a nonempty vector")
        object.__setattr__(self, "coefficients", coef)

    @property
    def order(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class PilotSequence:
    """Training symbols with a per-symbol amplitude cap ``max_amplitude``."""

    symbols: np.ndarray
    max_amplitude: float = 1.0

    def __post_init__(self) -> None:
        symbols = np.atleast_1d(np.asarray(self.symbols, dtype=complex))
        if symbols.ndim != 1:
            raise ValueError("symbols must be a vector")
        if not self.max_amplitude > 0:
            raise ValueError("max_amplitude must be positive")
        if symbols.size and np.abs(symbols).max() > self.max_amplitude + AMPLITUDE_TOLERANCE:
            raise ValueError("pilot amplitude exceeds max_amplitude")
        object.__setattr__(self, "symbols", symbols)

    def amplitudes(self) -> np.ndarray:
        return np.abs(self.symbols)

    def __len__(self) -> int:
        return self.symbols.size


@dataclass(frozen=True)
class RappParameters:
    """Rapp amplifier parameters: linear gain, saturation voltage, smoothness."""

    gain: float = 1.0
    v_sat: float = 1.0
    smoothness: float = 2.0

    def __post_init__(self) -> None:
        if not (self.gain > 0 and self.v_sat > 0 and self.smoothness > 0):
            raise ValueError("all Rapp parameters must be strictly positive")


def eval_polynomial(model: PaPolynomial, s):
    """Evaluate ``f(s) = sum_l beta_l s |s|^(l-1)`` at scalar or array input."""
    s_arr = np.asarray(s, dtype=complex)
    amp = np.abs(s_arr)
    acc = np.full_like(s_arr, model.coefficients[-1])
    for coef in model.coefficients[-2::-1]:
        acc = acc * amp + coef
    out = s_arr * acc
    return complex(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def build_design_matrix(pilots: PilotSequence, order: int) -> np.ndarray:
    """N x L complex matrix with entry (n, l) = s_n |s_n|^(l-1)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    s = pilots.symbols
    return s[:, None] * np.abs(s)[:, None] ** np.arange(order)


def build_prediction_vector(s_tilde: complex, order: int) -> np.ndarray:
    """Basis vector (s, s|s|, ..., s|s|^(L-1)) at a single input value."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return np.asarray(s_tilde * abs(s_tilde) ** np.arange(order), dtype=complex)


def _check_basis(transform: np.ndarray, order: int) -> np.ndarray:
    transform = np.asarray(transform, dtype=complex)
    if transform.shape != (order, order):
        raise IllConditionedBasisError("basis transform must be square and match the model order")
    cond = np.linalg.cond(transform)
    if not np.isfinite(cond) or cond >= CONDITION_LIMIT:
        raise IllConditionedBasisError(f"basis transform condition number {cond:.3e} too large")
    return transform


def change_basis(design: np.ndarray, transform: np.ndarray) -> np.ndarray:
    """Re-express a design matrix in another polynomial basis via ``design @ transform``."""
    design = np.asarray(design, dtype=complex)
    transform = _check_basis(transform, design.shape[1])
    return design @ transform


def map_coefficients(transform: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    """Coefficient vector in the transformed basis, ``transform @ coefficients``."""
    coefficients = np.asarray(coefficients, dtype=complex)
    transform = _check_basis(transform, coefficients.size)
    return transform @ coefficients


def rapp_response(params: RappParameters, amplitude):
    """Rapp AM/AM response ``G a / (1 + (G a / V_sat)^(2 S))^(1 / (2 S))``.

    ``amplitude`` is a nonnegative input amplitude (scalar or array).  The model
    has no AM/PM distortion, so the response to a complex input is this amplitude
    response times the input phase factor.
    """
    a = np.asarray(amplitude, dtype=float)
    if np.any(a < 0):
        raise ValueError("amplitude must be nonnegative")
    driven = params.gain * a
    out = driven / (1.0 + (driven / params.v_sat) ** (2.0 * params.smoothness)) ** (
        1.0 / (2.0 * params.smoothness)
    )
    return float(out) if np.isscalar(amplitude) or a.ndim == 0 else out
