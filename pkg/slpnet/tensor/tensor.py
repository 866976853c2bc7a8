"""Tensor values and the reverse-mode tape.

A :class:`Tape` records every differentiable operation executed while it is
active (``with Tape() as tape:``) and replays them in exact reverse order on
:meth:`Tape.backward`. Tapes are thread-local: one tape belongs to one thread,
independent tapes may run concurrently.
"""

import threading
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_local = threading.local()


class Tensor:
    """An n-d array with an optional gradient slot.

    Activations, kernels and gradients are rank-4 NCHW arrays; scalars
    (losses) and vectors (biases, slopes) use the same class.
    """

    __slots__ = ("data", "grad", "requires_grad", "is_leaf", "name")

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.asarray(data)
        if self.data.dtype.kind != "f":
            self.data = self.data.astype(np.float32)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.is_leaf = True
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            raise ValueError(f"gradient shape {grad.shape} does not match value {self.data.shape}")
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True)
        else:
            self.grad += grad

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label})"


@dataclass
class Node:
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn


class Tape:
    """Ordered record of executed operations."""

    def __init__(self):
        self.nodes: List[Node] = []
        # op names in the order backward visited them
        self.visited: List[str] = []

    def __enter__(self) -> "Tape":
        _stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()

    def record(self, op: str, inputs: Sequence[Tensor], output: Tensor, backward: BackwardFn) -> None:
        output.is_leaf = False
        output.requires_grad = True
        self.nodes.append(Node(op, tuple(inputs), output, backward))

    def backward(self, output: Tensor, grad: Optional[np.ndarray] = None) -> None:
        """Propagate gradients from ``output`` to every leaf that requires them.

        Without ``grad`` the seed is all ones, i.e. the gradient of
        ``output.sum()``. The tape is emptied afterwards.
        """
        seed = np.ones_like(output.data) if grad is None else np.asarray(grad, dtype=output.dtype)
        if seed.shape != output.shape:
            raise ValueError(f"seed gradient shape {seed.shape} does not match output {output.shape}")

        if output.is_leaf:
            if output.requires_grad:
                output.accumulate(seed)
            self.nodes.clear()
            return

        pending = {id(output): seed}
        self.visited = []
        for node in reversed(self.nodes):
            self.visited.append(node.op)
            g = pending.pop(id(node.output), None)
            if g is None:
                continue
            for tensor, tensor_grad in zip(node.inputs, node.backward(g)):
                if tensor_grad is None or not tensor.requires_grad:
                    continue
                if tensor.is_leaf:
                    tensor.accumulate(tensor_grad)
                elif id(tensor) in pending:
                    pending[id(tensor)] = pending[id(tensor)] + tensor_grad
                else:
                    pending[id(tensor)] = tensor_grad
        self.nodes.clear()


def _stack() -> List[Tape]:
    if not hasattr(_local, "tapes"):
        _local.tapes = []
    return _local.tapes


def active_tape() -> Optional[Tape]:
    """The innermost tape of the calling thread, if any."""
    stack = _stack()
    return stack[-1] if stack else None
