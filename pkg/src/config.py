from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Tolerances (absolute, on unit-normalized operators)
    tau_herm: float = 1e-9
    tau_proj: float = 1e-9
    tau_orth: float = 1e-9
    tau_recon: float = 1e-8
    tau_norm: float = 1e-8

    # Singular values below zero_cutoff * largest are exact zeros
    zero_cutoff: float = 1e-14

    # Campaign tolerances
    theorem_tolerance: float = 1e-9
    equality_tolerance: float = 1e-8
    abort_threshold: float = 1e-6

    # Largest truncation rank scanned by optimal_certificate
    scan_limit: int = 2_000_000

    # Campaign defaults
    theorem_trials: int = 1000
    lemma_trials: int = 1000
    norm_trials: int = 200
    proof_trials: int = 100
    campaign_dims: list[int] = [2, 4, 8, 16, 32]
    lemma_dims: list[int] = [2, 4, 8, 16]
    theorem_p_grid: list[float] = [1.25, 1.5, 2.0, 3.0, 5.0]
    norm_p_grid: list[float] = [1.0, 1.5, 2.0, 3.0, float("inf")]
    workers: int = 1

    # Output
    output_dir: Path = Path(".")
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        extra = "ignore"


settings = Settings()
