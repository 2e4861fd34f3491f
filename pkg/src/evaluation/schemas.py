from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from src.models.schemas import RankedPrediction

Halves = Literal["both", "first"]


class RankingEvaluation(BaseModel):
    """A test-set ranking (score descending, doc_id ascending) with its gold labels."""
    ranked: List[RankedPrediction]
    labels: Dict[str, int]

    @model_validator(mode="after")
    def covers_test_set(self):
        ids = [prediction.doc_id for prediction in self.ranked]
        if len(set(ids)) != len(ids):
            raise ValueError("ranking lists a document twice")
        if set(ids) != set(self.labels):
            raise ValueError("ranking and labels cover different documents")
        return self

    @property
    def n_total(self) -> int:
        return len(self.ranked)

    @property
    def n_included(self) -> int:
        return sum(1 for label in self.labels.values() if label == 1)

    def ranked_labels(self) -> List[int]:
        return [self.labels[prediction.doc_id] for prediction in self.ranked]


class ConfusionAtThreshold(BaseModel):
    cut_index: int = Field(ge=0)
    tp: int = Field(ge=0)
    fp: int = Field(ge=0)
    tn: int = Field(ge=0)
    fn: int = Field(ge=0)

    @model_validator(mode="after")
    def consistent(self):
        if self.tp + self.fp != self.cut_index:
            raise ValueError(f"tp + fp = {self.tp + self.fp}, cut_index = {self.cut_index}")
        return self

    @property
    def n_total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class CvPlan(BaseModel):
    repetitions: int = Field(default=10, ge=1)
    seed: int = 42
    stratified: Literal[True] = True


class FoldResult(BaseModel):
    dataset: str
    model: str
    feature_view: str = "all"
    repetition: int = Field(ge=0)
    half: int = Field(ge=0, le=1)
    wss95: float
    precision_at_95: float = Field(ge=0.0, le=1.0)
    train_seconds: float = Field(ge=0.0)
    n_docs: int = Field(default=0, ge=0)


class ReportRow(BaseModel):
    dataset: str
    model: str
    feature_view: str
    n_docs: int
    n_folds: int
    mean_wss95: float
    std_wss95: float
    mean_precision95: float
    mean_train_seconds: float
    reference_wss95: Optional[float] = None
    abs_delta_pp: Optional[float] = None  # |measured - reference| in percentage points


class GroupRow(BaseModel):
    group: str
    model: str
    feature_view: str
    n_datasets: int
    mean_wss95: float
    mean_precision95: float


class ViewWins(BaseModel):
    model: str
    feature_view: str
    wins: int


class FailureRecord(BaseModel):
    dataset: str
    model: str
    feature_view: str
    error_code: str
    message: str


class BenchmarkReport(BaseModel):
    halves: Halves = "both"
    rows: List[ReportRow]
    groups: List[GroupRow] = []
    view_wins: List[ViewWins] = []
    failures: List[FailureRecord] = []
    results: List[FoldResult] = []
