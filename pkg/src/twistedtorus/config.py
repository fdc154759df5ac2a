"""Configuration for twistedtorus"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_WHITEHEAD_BUDGET = 1_000_000
MIN_WHITEHEAD_BUDGET = 10_000


class Settings(BaseSettings):
    """Application settings, read from TTK_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="TTK_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Node limit for Whitehead minimisation and orbit search
    whitehead_budget: int = Field(default=DEFAULT_WHITEHEAD_BUDGET, ge=MIN_WHITEHEAD_BUDGET)

    log_level: str = "WARNING"


settings = Settings()


def resolve_budget(budget: int | None) -> int:
    """Return the explicit budget, or the configured one when none is given."""
    return settings.whitehead_budget if budget is None else budget
