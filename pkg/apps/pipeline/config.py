"""Runtime configuration shared by the encoder, decoder and commands."""

import os
from dataclasses import dataclass, field

from apps.keyframe.keyframe import BUILTIN_DCT, MAX_QP
from apps.noise_model.noise_model import COEFF, GRANULARITIES
from apps.quantizer.quantizer import QUANT_MATRICES
from apps.sideinfo.motion import SearchConfig
from apps.splitter.splitter import ActivityConfig

ADAPTIVE = "adaptive"

# key-frame qp matched to each quantization matrix
DEFAULT_KEY_QP = {1: 40, 2: 38, 3: 36, 4: 34, 5: 31, 6: 28, 7: 25, 8: 22}


def parse_gop(value):
    """"adaptive" -> None, otherwise a fixed GOP length."""
    if value is None or str(value).strip().lower() == ADAPTIVE:
        return None
    try:
        size = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"GOP must be {ADAPTIVE!r} or an integer, got {value!r}") from None
    if not 1 <= size <= 0xFF:
        raise ValueError(f"GOP length must be in [1, 255], got {size}")
    return size


@dataclass(frozen=True)
class CodecConfig:
    quant_matrix: int = 8
    # None means adaptive splitting
    gop: int | None = 2
    activity: ActivityConfig = field(default_factory=ActivityConfig)
    ldpca_seed: int = 0
    ldpca_degree: int = 3
    key_codec: int = BUILTIN_DCT
    key_qp: int | None = None
    max_iterations: int = 100
    initial_chunks: int = 1
    # skip decode attempts below the soft input's conditional entropy
    entropy_floor: bool = True
    soft_input: str = COEFF
    search: SearchConfig = field(default_factory=SearchConfig)
    threads: int = 0

    def __post_init__(self):
        if self.quant_matrix not in QUANT_MATRICES:
            raise ValueError(f"quantization matrix must be 1..8, got {self.quant_matrix}")
        if self.gop is not None:
            object.__setattr__(self, "gop", parse_gop(self.gop))
        if self.key_qp is None:
            object.__setattr__(self, "key_qp", DEFAULT_KEY_QP[self.quant_matrix])
        if not 0 <= self.key_qp <= MAX_QP:
            raise ValueError(f"key qp must be in [0, {MAX_QP}], got {self.key_qp}")
        if not 0 <= self.ldpca_seed <= 0xFFFFFFFFFFFFFFFF:
            raise ValueError(f"LDPCA seed must fit in 64 bits, got {self.ldpca_seed}")
        if not 1 <= self.ldpca_degree <= 0xFF:
            raise ValueError(f"LDPCA degree must be in [1, 255], got {self.ldpca_degree}")
        if self.max_iterations < 1:
            raise ValueError(f"max iterations must be >= 1, got {self.max_iterations}")
        if self.initial_chunks < 1:
            raise ValueError(f"initial chunks must be >= 1, got {self.initial_chunks}")
        if self.soft_input not in GRANULARITIES:
            raise ValueError(f"soft input must be one of {GRANULARITIES}, got {self.soft_input!r}")
        if self.threads < 0:
            raise ValueError(f"threads must be >= 0, got {self.threads}")

    @property
    def workers(self):
        return self.threads or os.cpu_count() or 1

    @classmethod
    def from_settings(cls, **overrides):
        """Build from the WZ_* settings; overrides that are None are ignored."""
        from django.conf import settings

        overrides = {k: v for k, v in overrides.items() if v is not None}
        quant_matrix = overrides.get("quant_matrix", settings.WZ_QUANT_MATRIX)
        values = {
            "quant_matrix": quant_matrix,
            "gop": parse_gop(settings.WZ_GOP),
            "activity": ActivityConfig.from_settings(),
            "ldpca_seed": settings.WZ_LDPCA_SEED,
            "ldpca_degree": settings.WZ_LDPCA_DEGREE,
            "key_codec": settings.WZ_KEY_CODEC,
            "key_qp": settings.WZ_KEY_QP.get(quant_matrix, DEFAULT_KEY_QP.get(quant_matrix)),
            "max_iterations": settings.WZ_MAX_ITERATIONS,
            "initial_chunks": settings.WZ_INITIAL_CHUNKS,
            "entropy_floor": settings.WZ_ENTROPY_FLOOR,
            "soft_input": settings.WZ_SOFT_INPUT,
            "search": SearchConfig.from_settings(),
            "threads": settings.WZ_THREADS,
        }
        if "gop" in overrides:
            overrides["gop"] = parse_gop(overrides["gop"])
        values.update(overrides)
        return cls(**values)
