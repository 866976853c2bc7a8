"""``key=value`` rendering of report models."""

from pathlib import Path
from typing import Any, Dict, Iterator, Tuple, Union

from pydantic import BaseModel


def _flatten(prefix: str, value: Any) -> Iterator[Tuple[str, Any]]:
    if isinstance(value, BaseModel):
        value = value.model_dump()
    if isinstance(value, dict):
        for key, item in value.items():
            yield from _flatten(f"{prefix}.{key}" if prefix else str(key), item)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, BaseModel)):
        for i, item in enumerate(value):
            yield from _flatten(f"{prefix}.{i}", item)
    elif isinstance(value, (list, tuple)):
        yield prefix, ",".join(str(v) for v in value)
    elif value is None:
        yield prefix, ""
    else:
        yield prefix, value


def key_values(model: BaseModel) -> Dict[str, Any]:
    """Flatten a model into dotted keys, in field declaration order."""
    return dict(_flatten("", model))


def write_key_values(path: Union[str, Path], model: BaseModel, header: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {line}" for line in header.splitlines()]
    lines.extend(f"{key}={value}" for key, value in key_values(model).items())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
