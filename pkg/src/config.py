from pathlib import Path
from typing import List, Literal, Optional
import hashlib

import orjson
import toml
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.errors import ConfigValidationError
from src.corpus.schemas import FeatureView
from src.evaluation.schemas import CvPlan
from src.models.schemas import CnnConfig, DaeFfConfig, FastTextConfig

ModelName = Literal["dae-ff", "cnn", "fasttext"]


class EndpointConfig(BaseModel):
    base_url: str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/"
    api_key: Optional[str] = None
    email: Optional[str] = None
    tool: str = "screenbench"
    rate_limit: float = Field(default=3.0, gt=0)  # requests per second
    batch_size: int = Field(default=100, ge=1)
    max_retries: int = Field(default=3, ge=0)
    backoff_seconds: float = Field(default=1.0, ge=0)
    timeout: float = Field(default=30.0, gt=0)
    max_concurrency: int = Field(default=2, ge=1)


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    CACHE_DIR: Path = Path("cache")
    RESULTS_DIR: Path = Path("results")
    STOPWORDS_PATH: Optional[Path] = None
    ENDPOINT: EndpointConfig = EndpointConfig()

    model_config = SettingsConfigDict(
        env_prefix="SCREENBENCH_",
        env_nested_delimiter="__",
        env_file=".env",
        extra="ignore",
    )


Config = Settings()


class RunSection(BaseModel):
    manifests: List[Path]
    cache_dir: Path = Path("cache")
    models: List[ModelName] = ["fasttext"]
    feature_views: List[FeatureView] = [FeatureView.ALL_FEATURES]
    output_dir: Path = Path("results")
    embedding_path: Optional[Path] = None
    seed: int = 42
    workers: int = Field(default=1, ge=1)
    reference_path: Optional[Path] = None

    @field_validator("models")
    @classmethod
    def models_not_empty(cls, value):
        if not value:
            raise ValueError("select at least one model")
        return value

    @field_validator("feature_views")
    @classmethod
    def views_not_empty(cls, value):
        if not value:
            raise ValueError("select at least one feature view")
        return value


class RunConfig(BaseSettings):
    """One file fully determines a benchmark run; SCREENBENCH_* variables override it."""
    run: RunSection
    cv: CvPlan = CvPlan()
    dae_ff: DaeFfConfig = DaeFfConfig()
    cnn: CnnConfig = CnnConfig()
    fasttext: FastTextConfig = FastTextConfig()

    model_config = SettingsConfigDict(
        env_prefix="SCREENBENCH_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings, dotenv_settings, file_secret_settings):
        # environment beats the file, the file beats defaults
        return env_settings, init_settings, file_secret_settings

    def run_id(self) -> str:
        payload = orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)
        return hashlib.sha256(payload).hexdigest()[:12]

    def run_dir(self) -> Path:
        return self.run.output_dir / self.run_id()

    def validate_resources(self) -> None:
        missing = [str(path) for path in self.run.manifests if not path.exists()]
        if missing:
            raise ConfigValidationError(f"Manifest(s) not found: {', '.join(missing)}")
        if not self.run.cache_dir.exists():
            raise ConfigValidationError(f"Cache directory not found: {self.run.cache_dir}")
        if "cnn" in self.run.models:
            if self.run.embedding_path is None:
                raise ConfigValidationError("The cnn model needs run.embedding_path")
            if not self.run.embedding_path.exists():
                raise ConfigValidationError(f"Embedding file not found: {self.run.embedding_path}")
        if self.run.reference_path is not None and not self.run.reference_path.exists():
            raise ConfigValidationError(f"Reference table not found: {self.run.reference_path}")


def load_run_config(path: Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigValidationError(f"Config file not found: {path}")
    try:
        data = toml.load(path)
    except toml.TomlDecodeError as e:
        raise ConfigValidationError(f"{path}: {e}") from e
    try:
        return RunConfig(**data)
    except ValueError as e:
        raise ConfigValidationError(f"{path}: {e}") from e
