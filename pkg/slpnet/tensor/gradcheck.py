"""Finite-difference gradient checking.

Only meaningful in float64: at float32 the central-difference step is lost in
rounding.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from slpnet.schemas.analysis import GradCheckReport
from slpnet.tensor.tensor import Tape, Tensor

logger = logging.getLogger(__name__)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """|a - n| / max(|a|, |n|, 1e-8), elementwise."""
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return np.abs(analytic - numeric) / denom


def grad_check(
    fn: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    tolerance: float = 1e-4,
    step: float = 1e-5,
    samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GradCheckReport:
    """Compare reverse-mode gradients of ``sum(fn(*inputs))`` with central differences.

    ``inputs`` are the tensors to check; ``fn`` may close over further tensors
    (for example module parameters) that are listed in ``inputs`` as well.
    ``samples`` bounds how many elements per input are perturbed, chosen with
    ``rng``; by default every element is checked.
    """
    for t in inputs:
        t.data = np.ascontiguousarray(t.data)
        if t.dtype != np.float64:
            logger.warning("grad_check on %s tensor; use float64 for meaningful results", t.dtype)
        t.requires_grad = True
        t.zero_grad()

    with Tape() as tape:
        out = fn(*inputs)
        tape.backward(out)
    analytic = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in inputs]

    def scalar() -> float:
        return float(fn(*inputs).data.sum())

    rng = rng if rng is not None else np.random.default_rng(0)
    per_input = []
    worst, worst_index, checked = 0.0, None, 0
    for k, t in enumerate(inputs):
        flat = t.data.reshape(-1)
        indices = np.arange(flat.size)
        if samples is not None and samples < flat.size:
            indices = rng.choice(flat.size, size=samples, replace=False)
        numeric = np.empty(len(indices))
        for m, idx in enumerate(indices):
            orig = flat[idx]
            flat[idx] = orig + step
            f_plus = scalar()
            flat[idx] = orig - step
            f_minus = scalar()
            flat[idx] = orig
            numeric[m] = (f_plus - f_minus) / (2.0 * step)
        errors = relative_error(analytic[k].reshape(-1)[indices], numeric)
        checked += len(indices)
        input_worst = float(errors.max()) if errors.size else 0.0
        per_input.append(input_worst)
        if input_worst > worst:
            worst = input_worst
            worst_index = (k, *np.unravel_index(int(indices[int(errors.argmax())]), t.shape))

    for t in inputs:
        t.zero_grad()
    return GradCheckReport(
        max_rel_error=worst,
        per_input=per_input,
        tolerance=tolerance,
        step=step,
        checked=checked,
        worst_index=worst_index,
    )
