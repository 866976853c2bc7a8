"""Module tree and the ordered parameter store."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from slpnet.core.errors import CheckpointError
from slpnet.tensor.shapes import Shape4
from slpnet.tensor.tensor import Tensor


def kaiming_normal(
    rng: np.random.Generator, shape: Sequence[int], dtype=np.float32, gain: float = 1.0
) -> np.ndarray:
    """Fan-in scaled normal for a (out, in_per_group, kh, kw) kernel."""
    fan_in = int(np.prod(shape[1:]))
    std = gain * np.sqrt(2.0 / fan_in)
    return (rng.standard_normal(shape) * std).astype(dtype)


class Module:
    """A named node of the network with parameters and child modules.

    Parameters and children are registered explicitly; iteration order is
    registration order, so parameter names and order are a pure function of
    the construction code.
    """

    def __init__(self):
        self._params: Dict[str, Tensor] = {}
        self._no_decay: set = set()
        self._children: Dict[str, "Module"] = {}

    def add_param(self, name: str, data: np.ndarray, decay: bool = True) -> Tensor:
        if name in self._params or name in self._children:
            raise ValueError(f"duplicate member name {name!r}")
        tensor = Tensor(data, requires_grad=True, name=name)
        self._params[name] = tensor
        if not decay:
            self._no_decay.add(name)
        return tensor

    def add_module(self, name: str, module: "Module") -> "Module":
        if name in self._params or name in self._children:
            raise ValueError(f"duplicate member name {name!r}")
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor, bool]]:
        """Yield (path, tensor, decay) depth-first in registration order."""
        for name, tensor in self._params.items():
            yield prefix + name, tensor, name not in self._no_decay
        for name, child in self._children.items():
            yield from child.named_parameters(prefix + name + ".")

    def children(self) -> Iterator[Tuple[str, "Module"]]:
        yield from self._children.items()

    def param_count(self) -> int:
        return sum(t.data.size for _, t, _ in self.named_parameters())

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        """Output shape and FLOP count for an input of ``shape``."""
        raise NotImplementedError

    def forward(self, *args):
        raise NotImplementedError

    def __call__(self, *args):
        return self.forward(*args)


@dataclass
class ParamEntry:
    name: str
    tensor: Tensor
    decay: bool = True


class ParamStore:
    """Named, ordered collection of trainable tensors with gradient slots."""

    def __init__(self, entries: Sequence[ParamEntry]):
        self._entries: List[ParamEntry] = list(entries)
        self._index: Dict[str, ParamEntry] = {}
        for entry in self._entries:
            if entry.name in self._index:
                raise ValueError(f"duplicate parameter name {entry.name!r}")
            self._index[entry.name] = entry

    @classmethod
    def from_module(cls, module: Module) -> "ParamStore":
        return cls([ParamEntry(name, tensor, decay) for name, tensor, decay in module.named_parameters()])

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ParamEntry]:
        return iter(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Tensor:
        return self._index[name].tensor

    def names(self) -> List[str]:
        return [e.name for e in self._entries]

    def total(self) -> int:
        return sum(e.tensor.data.size for e in self._entries)

    def zero_grad(self) -> None:
        for entry in self._entries:
            entry.tensor.zero_grad()

    def state(self) -> Dict[str, np.ndarray]:
        return {e.name: e.tensor.data for e in self._entries}

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        missing = [n for n in self._index if n not in state]
        unexpected = [n for n in state if n not in self._index]
        if missing or unexpected:
            raise CheckpointError(f"parameter names differ; missing={missing[:3]} unexpected={unexpected[:3]}")
        for entry in self._entries:
            value = state[entry.name]
            if value.shape != entry.tensor.shape:
                raise CheckpointError(
                    f"shape mismatch for {entry.name}: checkpoint {value.shape}, model {entry.tensor.shape}"
                )
            entry.tensor.data = np.array(value, dtype=entry.tensor.dtype, copy=True)
            entry.tensor.grad = None
