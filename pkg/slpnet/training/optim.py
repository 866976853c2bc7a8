"""Adam with L2 weight decay."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from slpnet.core.errors import MissingGradientError
from slpnet.nn.module import ParamStore


@dataclass
class OptimState:
    """Per-parameter moments and the shared step counter."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-4
    decoupled: bool = False
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: ParamStore, state: OptimState) -> None:
    """One bias-corrected Adam update over every parameter in ``params``.

    Coupled mode adds ``weight_decay * theta`` to the gradient before the
    moment update; decoupled mode shrinks theta by ``lr * weight_decay``
    after it. Parameters registered with ``decay=False`` are never decayed.
    """
    missing = [entry.name for entry in params if entry.tensor.grad is None]
    if missing:
        raise MissingGradientError(f"no gradient for {len(missing)} parameter(s), e.g. {missing[:3]}")

    state.step += 1
    t = state.step
    correction1 = 1.0 - state.beta1**t
    correction2 = 1.0 - state.beta2**t

    for entry in params:
        theta = entry.tensor.data
        grad = entry.tensor.grad.astype(theta.dtype, copy=True)
        decay = state.weight_decay if entry.decay else 0.0
        if decay and not state.decoupled:
            grad += decay * theta

        m = state.m.get(entry.name)
        if m is None or m.shape != theta.shape:
            m = state.m[entry.name] = np.zeros_like(theta)
            state.v[entry.name] = np.zeros_like(theta)
        v = state.v[entry.name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad

        m_hat = m / correction1
        v_hat = v / correction2
        if decay and state.decoupled:
            theta -= state.lr * decay * theta
        theta -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(theta.dtype, copy=False)


class Adam:
    """Stateful wrapper binding a :class:`ParamStore` to its :class:`OptimState`."""

    def __init__(
        self,
        params: ParamStore,
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 1e-4,
        decoupled: bool = False,
    ):
        self.params = params
        self.state = OptimState(lr=lr, beta1=beta1, beta2=beta2, eps=eps, weight_decay=weight_decay, decoupled=decoupled)

    @property
    def steps(self) -> int:
        return self.state.step

    def zero_grad(self) -> None:
        self.params.zero_grad()

    def step(self) -> None:
        adam_step(self.params, self.state)
