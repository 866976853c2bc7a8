"""Dataset split schema."""

from typing import List

from pydantic import BaseModel, model_validator


class SplitSpec(BaseModel):
    """Train/test partition of a corpus by sample id."""

    train: List[str]
    test: List[str]

    @model_validator(mode="after")
    def check_disjoint(self) -> "SplitSpec":
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise ValueError(f"train and test overlap on {sorted(overlap)[:5]}")
        return self

    @property
    def all(self) -> List[str]:
        return self.train + self.test
