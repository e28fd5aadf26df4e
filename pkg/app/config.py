"""
Configuration settings for NormScope application
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Application
    app_name: str = "NormScope"
    version: str = "1.0.0"
    debug: bool = False

    # Server
    host: str = "0.0.0.0"
    port: int = 8200

    # Interval arithmetic
    precision_bits: int = 128
    guard_bits: int = 32
    brute_force_cap: int = 7

    # Harnesses
    tail_witness_ell_max: int = 12
    eps_scale: int = 4
    tower_height_cap: int = 16
    j_prefix: int = 4

    # GM enumeration
    gm_depth: int = 6
    gm_budget: int = 2000
    convex_grid: str = "1,1/2"
    average_ell_max: int = 3

    # Corpus runs
    corpus_size: int = 20
    default_seed: int = 0
    workers: int = 4
    output_dir: str = "results"

    # CORS
    cors_origins: list = ["*"]

    class Config:
        env_prefix = "NORMSCOPE_"
        env_file = ".env"
        env_file_encoding = "utf-8"


# Global settings instance
settings = Settings()
