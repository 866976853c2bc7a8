"""Architecture configuration schema."""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelConfig(BaseModel):
    """All architecture hyperparameters of SLP-Net.

    Defaults reproduce the canonical wiring: widths 16/32/64/128, dilation
    zeros 0/4/8/16 (dilation factors 1/5/9/17), 224x224 input and a 1x1
    fused head followed by a sigmoid.
    """

    model_config = ConfigDict(frozen=True)

    stage_widths: Tuple[int, int, int, int] = (16, 32, 64, 128)
    dilations: Tuple[int, int, int, int] = (0, 4, 8, 16)
    input_size: Tuple[int, int] = (224, 224)
    image_channels: int = Field(default=3, ge=1)
    prelu_init: float = 0.25
    seed: int = 0

    @field_validator("stage_widths")
    @classmethod
    def check_widths(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"stage widths must be strictly increasing, got {v}")
        if any(w % 2 for w in v[1:]):
            raise ValueError(f"stage widths after the first must be even, got {v}")
        if v[0] < 1:
            raise ValueError("stage widths must be positive")
        return v

    @field_validator("dilations")
    @classmethod
    def check_dilations(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(d < 0 for d in v):
            raise ValueError(f"dilation zero counts must be >= 0, got {v}")
        if len(set(v)) != len(v):
            raise ValueError(f"dilations must be distinct, got {v}")
        return v

    @field_validator("input_size")
    @classmethod
    def check_input_size(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        if any(s <= 0 or s % 8 for s in v):
            raise ValueError(f"input size must be positive multiples of 8, got {v}")
        return v

    @model_validator(mode="after")
    def check_sds_ledger(self) -> "ModelConfig":
        # every SDS conv branch needs at least one output channel
        widths = self.stage_widths
        for c_in, c_out in zip(widths, widths[1:]):
            if c_out - c_in - self.image_channels < 1:
                raise ValueError(
                    f"stage {c_in}->{c_out} leaves no channels for the SDS conv branch"
                )
        return self

    @property
    def dilation_factors(self) -> Tuple[int, ...]:
        """Zeros-between-taps counts converted to dilation factors."""
        return tuple(d + 1 for d in self.dilations)

    @property
    def fused_channels(self) -> int:
        return self.stage_widths[3] + self.stage_widths[1] + self.stage_widths[2]

    def architecture(self) -> dict:
        """Fields that determine parameter names and shapes."""
        return self.model_dump(exclude={"seed", "input_size", "prelu_init"})
