"""
⚙️ Configuration Management
"""

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


class SolverConfig(BaseModel):
    """Fixed-point solver stopping rule"""
    tolerance: float = Field(
        default_factory=lambda: float(os.getenv("IRS_SOLVER_TOLERANCE", "1e-9")))
    max_iterations: int = Field(default_factory=lambda: int(
        os.getenv("IRS_SOLVER_MAX_ITERATIONS", "500")))
    # 기본은 균등 초기화 (P/K), 강건성 테스트용으로만 랜덤
    random_init: bool = Field(
        default_factory=lambda: _env_bool("IRS_SOLVER_RANDOM_INIT"))


class SearchConfig(BaseModel):
    """IRS-user association search limits"""
    exhaustive_limit: int = Field(default_factory=lambda: int(
        os.getenv("IRS_EXHAUSTIVE_LIMIT", "10000000")))


class ExperimentConfig(BaseModel):
    """Monte-Carlo defaults"""
    trials: int = Field(
        default_factory=lambda: int(os.getenv("IRS_TRIALS", "200")))
    master_seed: int = Field(
        default_factory=lambda: int(os.getenv("IRS_MASTER_SEED", "2020")))
    workers: int = Field(default_factory=lambda: int(
        os.getenv("IRS_WORKERS", str(os.cpu_count() or 1))))


class Settings(BaseModel):
    """Main Settings"""
    # Sub-configs
    solver: SolverConfig = Field(default_factory=SolverConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)

    # General settings
    output_dir: Path = Field(default_factory=lambda: Path(
        os.getenv("IRS_OUTPUT_DIR",
                  Path(__file__).parent.parent / "output")))
    verbose: bool = Field(default_factory=lambda: _env_bool("IRS_VERBOSE"))

    def ensure_output_dir(self) -> Path:
        """Ensure output directory exists"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir


# Global settings instance
settings = Settings()
