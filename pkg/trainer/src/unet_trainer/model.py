"""U-Net style encoder-decoder for single-band segmentation.

Five encoder stages of two same-padded 3x3 convolutions (ReLU after each)
with 2x2 max-pooling between stages, four mirrored decoder stages that
upsample 2x, concatenate the matching encoder feature, and convolve again,
and a 1x1 head projecting to class logits. Same-padding keeps every stage
at exactly half/double the spatial dims of its neighbor, so an H x W input
(H, W divisible by 16) flows 1 -> 64 x H x W down to 512 x H/16 x W/16 and
back up to num_classes x H x W.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn

from .errors import InvalidParameterError

POOL_STAGES = 4  # spatial dims shrink by 2**POOL_STAGES at the bottleneck


@dataclass(frozen=True)
class NetworkSpec:
    """Channel schedule and input geometry of the network."""

    in_channels: int = 1
    encoder_channels: tuple[int, ...] = (64, 128, 256, 512, 512)
    decoder_channels: tuple[int, ...] = (512, 256, 128, 64)
    num_classes: int = 5
    input_height: int = 480
    input_width: int = 640
    transposed_upsampling: bool = False

    def __post_init__(self) -> None:
        if len(self.encoder_channels) != 5 or len(self.decoder_channels) != 4:
            raise InvalidParameterError(
                "expected 5 encoder and 4 decoder stages, got "
                f"{len(self.encoder_channels)} and {len(self.decoder_channels)}"
            )
        divisor = 2 ** POOL_STAGES
        if self.input_height % divisor or self.input_width % divisor:
            raise InvalidParameterError(
                f"input dims must be divisible by {divisor}, "
                f"got {self.input_height}x{self.input_width}"
            )
        if self.in_channels < 1 or self.num_classes < 2:
            raise InvalidParameterError("need >= 1 input channel and >= 2 classes")
        if min(self.encoder_channels) < 1 or min(self.decoder_channels) < 1:
            raise InvalidParameterError("channel counts must be >= 1")

    def to_dict(self) -> dict:
        return {
            "in_channels": self.in_channels,
            "encoder_channels": list(self.encoder_channels),
            "decoder_channels": list(self.decoder_channels),
            "num_classes": self.num_classes,
            "input_height": self.input_height,
            "input_width": self.input_width,
            "transposed_upsampling": self.transposed_upsampling,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        return cls(
            in_channels=int(d["in_channels"]),
            encoder_channels=tuple(d["encoder_channels"]),
            decoder_channels=tuple(d["decoder_channels"]),
            num_classes=int(d["num_classes"]),
            input_height=int(d["input_height"]),
            input_width=int(d["input_width"]),
            transposed_upsampling=bool(d["transposed_upsampling"]),
        )


class ConvBlock(nn.Module):
    """Two same-padded 3x3 convolutions, each followed by ReLU."""

    def __init__(self, in_ch: int, out_ch: int) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = torch.relu(self.conv1(x))
        return torch.relu(self.conv2(x))


class Upsampler(nn.Module):
    """2x spatial upsampling that also moves to the decoder channel count:
    nearest-neighbor + 3x3 convolution by default, or a 2x2 transposed
    convolution under the transposed_upsampling flag."""

    def __init__(self, in_ch: int, out_ch: int, transposed: bool) -> None:
        super().__init__()
        if transposed:
            self.up = nn.ConvTranspose2d(in_ch, out_ch, 2, stride=2)
        else:
            self.up = nn.Sequential(
                nn.Upsample(scale_factor=2, mode="nearest"),
                nn.Conv2d(in_ch, out_ch, 3, padding=1),
            )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.up(x)


class UNet(nn.Module):
    """The full network; `spec` rides along for checkpointing and audits."""

    def __init__(self, spec: NetworkSpec) -> None:
        super().__init__()
        self.spec = spec
        self.pool = nn.MaxPool2d(2)

        encoders = []
        prev = spec.in_channels
        for ch in spec.encoder_channels:
            encoders.append(ConvBlock(prev, ch))
            prev = ch
        self.encoders = nn.ModuleList(encoders)

        # decoder stage i consumes the previous decoder output (or the
        # bottleneck) and the encoder feature with matching spatial dims
        skips = list(spec.encoder_channels[-2::-1])  # e4, e3, e2, e1 channels
        upsamplers, decoders = [], []
        for ch, skip_ch in zip(spec.decoder_channels, skips):
            upsamplers.append(Upsampler(prev, ch, spec.transposed_upsampling))
            decoders.append(ConvBlock(ch + skip_ch, ch))
            prev = ch
        self.upsamplers = nn.ModuleList(upsamplers)
        self.decoders = nn.ModuleList(decoders)
        self.head = nn.Conv2d(prev, spec.num_classes, 1)

    def _stages(self, x: torch.Tensor) -> list[tuple[str, torch.Tensor]]:
        stages: list[tuple[str, torch.Tensor]] = []
        skips: list[torch.Tensor] = []
        for i, block in enumerate(self.encoders):
            if i:
                x = self.pool(x)
            x = block(x)
            skips.append(x)
            stages.append((f"e{i + 1}", x))
        skips.pop()  # the bottleneck is not a skip
        for i, (up, block) in enumerate(zip(self.upsamplers, self.decoders)):
            x = block(torch.cat([up(x), skips.pop()], dim=1))
            stages.append((f"d{len(self.decoders) - i}", x))
        stages.append(("out", self.head(x)))
        return stages

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-2] % 2 ** POOL_STAGES or x.shape[-1] % 2 ** POOL_STAGES:
            raise InvalidParameterError(
                f"input dims must be divisible by {2 ** POOL_STAGES}, got {tuple(x.shape)}"
            )
        return self._stages(x)[-1][1]


def build_network(spec: NetworkSpec) -> UNet:
    """Construct the network for a spec; weights use default torch init."""
    return UNet(spec)


def shape_audit(model: UNet) -> list[tuple[str, tuple[int, int, int]]]:
    """Feature size (channels, height, width) of all ten stages.

    Runs one throwaway forward pass at the spec's input dims; the model is
    returned to its previous train/eval mode and its weights are untouched.
    """
    spec = model.spec
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            probe = torch.zeros(1, spec.in_channels, spec.input_height, spec.input_width)
            stages = model._stages(probe)
    finally:
        model.train(was_training)
    return [(name, (t.shape[1], t.shape[2], t.shape[3])) for name, t in stages]
