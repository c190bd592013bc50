from pydantic_settings import BaseSettings
from functools import lru_cache


class Settings(BaseSettings):
    # Budgets - KP_BUDGET overrides
    budget: int = 20_000_000  # quotient elements / row states / norm-ball elements
    dense_solver_limit: int = 20_000
    word_cap: int = 128
    max_translates: int = 4096

    # Spectral
    gap_floor: float = 0.01
    cheeger_exact_limit: int = 20

    # Packing
    sample_size: int = 500  # circles used for auto scale detection
    norm_ball_radius: int = 6

    # Audits
    eps_audit: float = 0.01

    # App
    log_level: str = "INFO"
    log_json: bool = False  # False = JSON only when stderr is not a TTY

    class Config:
        env_prefix = "KP_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


@lru_cache
def get_settings() -> Settings:
    return Settings()
