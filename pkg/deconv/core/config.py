import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    # Parallelism
    THREADS: int = int(os.getenv("DECONV_THREADS", os.cpu_count() or 1))

    # Logging
    LOG_LEVEL: str = os.getenv("DECONV_LOG_LEVEL", "INFO")

    # Numerical tolerances
    TAIL_TOL: float = float(os.getenv("DECONV_TAIL_TOL", 1e-12))
    TRIM_TOL: float = float(os.getenv("DECONV_TRIM_TOL", 1e-15))
    ATOM_TOL: float = float(os.getenv("DECONV_ATOM_TOL", 1e-12))
    REL_TOL: float = float(os.getenv("DECONV_REL_TOL", 1e-10))
    CF_ZERO_TOL: float = float(os.getenv("DECONV_CF_ZERO_TOL", 1e-12))

    # Enumeration and truncation caps
    COMPOSITION_CAP: int = int(os.getenv("DECONV_COMPOSITION_CAP", 20))
    MAX_M: int = int(os.getenv("DECONV_MAX_M", 45))

    # Monotone-mode stopping rule
    MONOTONE_TOL: float = float(os.getenv("DECONV_MONOTONE_TOL", 1e-10))
    MONOTONE_MAX_TERMS: int = int(os.getenv("DECONV_MONOTONE_MAX_TERMS", 10_000))

    # Quadrature and high-precision evaluation
    GH_NODES: int = int(os.getenv("DECONV_GH_NODES", 64))
    MP_DPS: int = int(os.getenv("DECONV_MP_DPS", 40))
    HP_WEIGHT: float = float(os.getenv("DECONV_HP_WEIGHT", 1e6))

    # App settings
    APP_NAME: str = "deconv"
    VERSION: str = "1.0.0"


settings = Settings()
