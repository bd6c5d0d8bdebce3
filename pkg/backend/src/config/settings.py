"""Application-wide configuration loaded from environment variables."""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Data directory holding the bundled fixtures
DATA_DIR: Path = Path(
    os.getenv("GPAR_DATA_DIR", str(Path(__file__).resolve().parent.parent.parent / "data"))
)
FIXTURES_DIR: Path = DATA_DIR / "fixtures"

# ── Reframing Oracle ─────────────────────────────────────────────────────

# Hard cap on generated transactions; |T| grows factorially with the term count.
ORACLE_CAP: int = int(os.getenv("GPAR_ORACLE_CAP", "1000000"))

# ── Generative Application ───────────────────────────────────────────────

MAX_CLOSURE_STEPS: int = int(os.getenv("GPAR_MAX_CLOSURE_STEPS", "1000"))

# ── Export ───────────────────────────────────────────────────────────────

DEFAULT_NAMESPACE: str = os.getenv("GPAR_NAMESPACE", "http://example.org#")
SWRL_PREFIX: str = os.getenv("GPAR_SWRL_PREFIX", "ex")

# ── Execution ────────────────────────────────────────────────────────────

DEFAULT_JOBS: int = int(os.getenv("GPAR_JOBS", "1"))

# ── Logging ──────────────────────────────────────────────────────────────

LOG_LEVEL: str = os.getenv("GPAR_LOG_LEVEL", "WARNING")
LOG_FORMAT: str = "%(asctime)s  %(levelname)-8s  %(name)s  %(message)s"
