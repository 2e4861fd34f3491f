from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Optional
from enum import Enum
import re

_WHITESPACE = re.compile(r"\s+")


class DatasetGroup(str, Enum):
    DRUG = "Drug"
    CLINICAL = "Clinical"
    SWIFT = "SWIFT"


class FeatureView(str, Enum):
    ALL_FEATURES = "all"
    TITLE_ABSTRACT = "title_abstract"
    ABSTRACT_ONLY = "abstract"
    TITLE_ONLY = "title"


class DocumentRecord(BaseModel):
    doc_id: str = Field(min_length=1)
    title: str = ""
    abstract: str = ""
    authors: str = ""
    journal: str = ""
    label: int = Field(ge=0, le=1)

    @field_validator("title", "abstract", "authors", "journal")
    @classmethod
    def collapse_whitespace(cls, value: str) -> str:
        # keeps every cached field on a single tagged line
        return _WHITESPACE.sub(" ", value).strip()

    @field_validator("doc_id")
    @classmethod
    def strip_id(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("doc_id must be non-empty")
        return value


class ManifestEntry(BaseModel):
    doc_id: str
    label: int = Field(ge=0, le=1)


class DatasetManifest(BaseModel):
    name: str
    group: Optional[DatasetGroup] = None
    entries: List[ManifestEntry]

    @model_validator(mode="after")
    def both_classes_present(self):
        n_included = sum(entry.label for entry in self.entries)
        if n_included == 0 or n_included == len(self.entries):
            raise ValueError(f"dataset {self.name} needs at least one included and one excluded entry")
        return self

    @property
    def doc_ids(self) -> List[str]:
        return [entry.doc_id for entry in self.entries]

    @property
    def labels(self) -> List[int]:
        return [entry.label for entry in self.entries]


class CorpusStats(BaseModel):
    name: str = ""
    group: Optional[DatasetGroup] = None
    n_total: int
    n_included: int
    included_fraction: float
    max_wss95: float
    missing_abstract_fraction: Optional[float] = None

    @property
    def n_excluded(self) -> int:
        return self.n_total - self.n_included

    def table_row(self) -> str:
        excluded_fraction = 1.0 - self.included_fraction
        row = (
            f"{self.n_total} | {self.n_included} ({self.included_fraction:.1%}) | "
            f"{self.n_excluded} ({excluded_fraction:.1%}) | {self.max_wss95:.2%}"
        )
        if self.missing_abstract_fraction is not None:
            row += f" | {self.missing_abstract_fraction:.2%}"
        return f"{self.name} | {row}" if self.name else row


class Dataset(BaseModel):
    """A manifest joined with its cached records, in manifest order."""
    manifest: DatasetManifest
    records: List[DocumentRecord]

    @property
    def name(self) -> str:
        return self.manifest.name

    @property
    def labels(self) -> List[int]:
        return [record.label for record in self.records]


class FetchLogEntry(BaseModel):
    timestamp: str
    doc_ids: List[str]
    status: str  # ok | error | missing

    def to_line(self) -> str:
        return f"{self.timestamp}\t{','.join(self.doc_ids)}\t{self.status}"

    @classmethod
    def from_line(cls, line: str) -> "FetchLogEntry":
        timestamp, ids, status = line.rstrip("\n").split("\t")
        return cls(timestamp=timestamp, doc_ids=ids.split(",") if ids else [], status=status)


class FetchSummary(BaseModel):
    dataset: str
    fetched: int
    cached: int
    missing: List[str] = []
    api_calls: int = 0
