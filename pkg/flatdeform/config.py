import os
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()


class Settings(BaseModel):
    word_budget: int = Field(400, ge=1, description="Words scanned before basis extraction gives up")
    search_depth: int = Field(20, ge=0, description="Halvings tried when certifying s_max")
    degree_bound: int = Field(40, ge=1, description="Weighted degree bound for presentation checks")
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return value


def get_settings() -> Settings:
    """Read FLATDEFORM_* variables (after .env) into validated settings."""
    raw = {
        "word_budget": os.getenv("FLATDEFORM_WORD_BUDGET"),
        "search_depth": os.getenv("FLATDEFORM_SEARCH_DEPTH"),
        "degree_bound": os.getenv("FLATDEFORM_DEGREE_BOUND"),
        "log_level": os.getenv("FLATDEFORM_LOG_LEVEL"),
    }
    return Settings(**{key: value for key, value in raw.items() if value is not None})
