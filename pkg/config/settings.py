"""
Django settings for the WZCodec project.

The codec itself is a plain numeric library; Django supplies configuration,
logging and the management-command driver. Every WZ_* value below can be
overridden from the environment or a .env file at the project root.
"""

import os
from pathlib import Path

import environ

# Initialize environ
env = environ.Env(
    # Set casting and default values
    DEBUG=(bool, False),
    LOG_LEVEL=(str, "WARNING"),
    WZ_QUANT_MATRIX=(int, 8),
    WZ_GOP=(str, "2"),
    WZ_GOP_THRESHOLD=(float, 0.35),
    WZ_MAX_GOP=(int, 8),
    WZ_ACTIVITY_BLOCK=(int, 8),
    WZ_DEVIATION_THRESHOLD=(int, 2),
    WZ_LDPCA_SEED=(int, 0),
    WZ_LDPCA_DEGREE=(int, 3),
    WZ_MAX_ITERATIONS=(int, 100),
    WZ_INITIAL_CHUNKS=(int, 1),
    WZ_ENTROPY_FLOOR=(bool, True),
    WZ_SOFT_INPUT=(str, "coeff"),
    WZ_KEY_CODEC=(int, 0),
    WZ_THREADS=(int, 0),
    WZ_SEARCH_RANGE=(int, 32),
    WZ_REFINE_RANGE=(int, 2),
    WZ_WIDE_REFINE_RANGE=(int, 4),
    WZ_NEIGHBOR_DISAGREEMENT=(int, 4),
)

# Read .env file
BASE_DIR = Path(__file__).resolve().parent.parent
environ.Env.read_env(os.path.join(BASE_DIR, ".env"))

SITE_NAME = env("SITE_NAME", default="WZCodec")

# The codec never serves requests; the key only satisfies Django's startup checks.
SECRET_KEY = env("SECRET_KEY", default="wzcodec-offline-key")

DEBUG = env("DEBUG")

ENV = env("ENV", default="dev")

ALLOWED_HOSTS = env.list("ALLOWED_HOSTS", default=[])


# Application definition

INSTALLED_APPS = [
    "apps.common",
    "apps.frames",
    "apps.splitter",
    "apps.transform",
    "apps.quantizer",
    "apps.ldpca",
    "apps.sideinfo",
    "apps.noise_model",
    "apps.softinput",
    "apps.reconstruction",
    "apps.keyframe",
    "apps.pipeline",
]

# No models anywhere; the dummy backend keeps Django from wanting a server.
DATABASES = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True


# Codec defaults

WZ_QUANT_MATRIX = env("WZ_QUANT_MATRIX")

# "adaptive" or a fixed GOP length
WZ_GOP = env("WZ_GOP")

WZ_GOP_THRESHOLD = env("WZ_GOP_THRESHOLD")
WZ_MAX_GOP = env("WZ_MAX_GOP")
WZ_ACTIVITY_WEIGHTS = [
    float(weight)
    for weight in env.list("WZ_ACTIVITY_WEIGHTS", default=[0.25, 0.25, 0.25, 0.25])
]
WZ_ACTIVITY_BLOCK = env("WZ_ACTIVITY_BLOCK")
WZ_DEVIATION_THRESHOLD = env("WZ_DEVIATION_THRESHOLD")

WZ_LDPCA_SEED = env("WZ_LDPCA_SEED")
WZ_LDPCA_DEGREE = env("WZ_LDPCA_DEGREE")
WZ_MAX_ITERATIONS = env("WZ_MAX_ITERATIONS")
WZ_INITIAL_CHUNKS = env("WZ_INITIAL_CHUNKS")
WZ_ENTROPY_FLOOR = env("WZ_ENTROPY_FLOOR")

# "coeff" or "band" Laplacian granularity for soft inputs
WZ_SOFT_INPUT = env("WZ_SOFT_INPUT")

# Key-frame codec id (0 = builtin-dct) and qp per quantization matrix
WZ_KEY_CODEC = env("WZ_KEY_CODEC")
WZ_KEY_QP = {
    int(key): int(value)
    for key, value in env.dict(
        "WZ_KEY_QP",
        default={1: 40, 2: 38, 3: 36, 4: 34, 5: 31, 6: 28, 7: 25, 8: 22},
    ).items()
}

# 0 = one worker per CPU
WZ_THREADS = env("WZ_THREADS")

# Side-information motion search, in integer pixels then half-pel steps
WZ_SEARCH_RANGE = env("WZ_SEARCH_RANGE")
WZ_REFINE_RANGE = env("WZ_REFINE_RANGE")
WZ_WIDE_REFINE_RANGE = env("WZ_WIDE_REFINE_RANGE")
WZ_NEIGHBOR_DISAGREEMENT = env("WZ_NEIGHBOR_DISAGREEMENT")


# Logging: shared by all apps, files under <project>/logs/
(BASE_DIR / "logs").mkdir(exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} [{levelname}] {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "verbose"},
        "file": {
            "class": "logging.FileHandler",
            "filename": BASE_DIR / "logs" / "wzcodec.log",
            "formatter": "verbose",
        },
    },
    "root": {"handlers": ["console", "file"], "level": env("LOG_LEVEL")},
}
